//! Scripted skill library: 30 stateless linear controllers, each named by a
//! natural-language description.

pub mod demos;
pub mod expert;

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::query::edit_distance;
use crate::scalar::{c, Real};
use crate::sim::{consts, Action, WorldState};

pub use demos::{generate_demos, load_demoset, save_demoset, DemoRecord, DemoSet, Demonstration};
pub use expert::{expert_plan, expert_plans, run_expert, ExpertPlan, ResolvedPlan};

/// State-dependent setpoint for the linear controller.
#[derive(Clone, Debug)]
pub enum TargetRule {
    /// Stay where the gripper is (used by the pure grip skills).
    Hold,
    /// The task goal point.
    Goal,
    /// The task goal, raised by the grasp offset so a carried object lands
    /// exactly on the goal.
    GoalCarry,
    /// A fixed offset from an object's current position.
    NearObject { object: &'static str, offset: [f64; 3] },
    /// Above an object's x/y at an absolute height.
    ObjectAtHeight { object: &'static str, z: f64 },
    /// A jointed object's handle driven `margin` past one end of its travel.
    JointExtreme {
        object: &'static str,
        open: bool,
        margin: f64,
    },
    /// Standoff in front of a button face, against the press axis.
    ButtonFront { object: &'static str, standoff: f64 },
}

/// A stateless linear controller with a natural-language description.
#[derive(Clone, Debug)]
pub struct Skill {
    pub id: &'static str,
    pub description: &'static str,
    pub target: TargetRule,
    pub gain: f64,
    pub grip: f64,
}

fn object_pos<S: Real>(state: &WorldState<S>, name: &str) -> Result<Vec3<S>> {
    state
        .object(name)
        .map(|o| o.position())
        .ok_or_else(|| Error::UnknownObject {
            name: name.to_string(),
            known: state.object_names(),
        })
}

fn resolve_target<S: Real>(rule: &TargetRule, state: &WorldState<S>) -> Result<Vec3<S>> {
    Ok(match rule {
        TargetRule::Hold => state.gripper_pos,
        TargetRule::Goal => state.goal_pos,
        TargetRule::GoalCarry => {
            state.goal_pos - Vec3::from_f64(0.0, 0.0, consts::GRASP_OFFSET_Z)
        }
        TargetRule::NearObject { object, offset } => {
            object_pos(state, object)? + Vec3::from_f64(offset[0], offset[1], offset[2])
        }
        TargetRule::ObjectAtHeight { object, z } => {
            let p = object_pos(state, object)?;
            Vec3::new(p.x, p.y, S::from_f64(*z))
        }
        TargetRule::JointExtreme {
            object,
            open,
            margin,
        } => {
            let obj = state.object(object).ok_or_else(|| Error::UnknownObject {
                name: object.to_string(),
                known: state.object_names(),
            })?;
            let joint = obj.joint.as_ref().ok_or_else(|| Error::UnknownObject {
                name: format!("{object} (not jointed)"),
                known: state.object_names(),
            })?;
            let value = if *open {
                joint.hi + S::from_f64(*margin)
            } else {
                joint.lo - S::from_f64(*margin)
            };
            obj.base + joint.axis * value
        }
        TargetRule::ButtonFront { object, standoff } => {
            let obj = state.object(object).ok_or_else(|| Error::UnknownObject {
                name: object.to_string(),
                known: state.object_names(),
            })?;
            let joint = obj.joint.as_ref().ok_or_else(|| Error::UnknownObject {
                name: format!("{object} (not jointed)"),
                known: state.object_names(),
            })?;
            obj.position() - joint.axis * S::from_f64(*standoff)
        }
    })
}

/// Proportional controller toward the skill's setpoint, saturated per
/// component; grip is the skill's fixed command.
pub fn skill_action<S: Real>(skill: &Skill, state: &WorldState<S>) -> Result<Action<S>> {
    let target = resolve_target(&skill.target, state)?;
    let error = target - state.gripper_pos;
    let scale = S::from_f64(skill.gain) / c::<S>(consts::STEP_SCALE);
    let one = S::one();
    let clamp = |v: S| v.max(-one).min(one);
    Ok(Action::new(
        clamp(error.x * scale),
        clamp(error.y * scale),
        clamp(error.z * scale),
        S::from_f64(skill.grip),
    ))
}

const HOVER: [f64; 3] = [0.0, 0.0, consts::HOVER_OFFSET];

macro_rules! skill {
    ($id:literal, $desc:literal, $target:expr, $grip:literal) => {
        Skill {
            id: $id,
            description: $desc,
            target: $target,
            gain: 1.0,
            grip: $grip,
        }
    };
}

fn build_library() -> Vec<Skill> {
    use TargetRule::*;
    vec![
        skill!("open_gripper", "open the gripper", Hold, -1.0),
        skill!("close_gripper", "close the gripper", Hold, 1.0),
        skill!("move_to_goal", "move the gripper to the goal", Goal, -1.0),
        skill!(
            "above_puck",
            "move the gripper above the puck",
            NearObject { object: "puck", offset: HOVER },
            -1.0
        ),
        skill!(
            "around_puck",
            "move the gripper down around the puck",
            NearObject { object: "puck", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "lift_puck",
            "lift the puck",
            ObjectAtHeight { object: "puck", z: consts::LIFT_HEIGHT },
            1.0
        ),
        skill!("put_puck_on_goal", "put the puck on the goal", GoalCarry, 1.0),
        skill!(
            "above_drawer_handle",
            "move the gripper above the drawer handle",
            NearObject { object: "drawer handle", offset: HOVER },
            -1.0
        ),
        skill!(
            "around_drawer_handle",
            "move the gripper down around the drawer handle",
            NearObject { object: "drawer handle", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "pull_drawer_open",
            "pull the drawer open",
            JointExtreme {
                object: "drawer handle",
                open: true,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "push_drawer_closed",
            "push the drawer closed",
            JointExtreme {
                object: "drawer handle",
                open: false,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "front_of_button",
            "move the gripper in front of the button",
            ButtonFront { object: "button", standoff: consts::BUTTON_STANDOFF },
            1.0
        ),
        skill!(
            "press_button",
            "press the button",
            JointExtreme { object: "button", open: true, margin: 0.02 },
            1.0
        ),
        skill!(
            "to_door_handle",
            "move the gripper to the door handle",
            NearObject { object: "door handle", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "pull_door_open",
            "pull the door open",
            JointExtreme {
                object: "door handle",
                open: true,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "push_door_closed",
            "push the door closed",
            JointExtreme {
                object: "door handle",
                open: false,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "to_window_handle",
            "move the gripper to the window handle",
            NearObject { object: "window handle", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "slide_window_open",
            "slide the window open",
            JointExtreme {
                object: "window handle",
                open: true,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "slide_window_closed",
            "slide the window closed",
            JointExtreme {
                object: "window handle",
                open: false,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "above_peg",
            "move the gripper above the peg",
            NearObject { object: "peg", offset: HOVER },
            -1.0
        ),
        skill!(
            "around_peg",
            "move the gripper down around the peg",
            NearObject { object: "peg", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "insert_peg",
            "insert the peg into the hole",
            GoalCarry,
            1.0
        ),
        skill!(
            "to_faucet_handle",
            "move the gripper to the faucet handle",
            NearObject { object: "faucet handle", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "slide_faucet_open",
            "slide the faucet open",
            JointExtreme {
                object: "faucet handle",
                open: true,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "slide_faucet_closed",
            "slide the faucet closed",
            JointExtreme {
                object: "faucet handle",
                open: false,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "above_handle",
            "move the gripper above the handle",
            NearObject { object: "handle", offset: HOVER },
            -1.0
        ),
        skill!(
            "around_handle",
            "move the gripper down around the handle",
            NearObject { object: "handle", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "pull_handle_up",
            "pull the handle up",
            JointExtreme {
                object: "handle",
                open: true,
                margin: consts::JOINT_PULL_MARGIN
            },
            1.0
        ),
        skill!(
            "to_plate",
            "move the gripper to the plate",
            NearObject { object: "plate", offset: [0.0; 3] },
            -1.0
        ),
        skill!(
            "slide_plate_to_goal",
            "slide the plate to the goal",
            GoalCarry,
            1.0
        ),
    ]
}

/// The fixed 30-skill registry.
pub fn library() -> &'static [Skill] {
    static LIBRARY: OnceLock<Vec<Skill>> = OnceLock::new();
    LIBRARY.get_or_init(build_library)
}

pub fn find_skill(id: &str) -> Result<&'static Skill> {
    library()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| Error::UnknownSkill(id.to_string()))
}

/// Library skill whose description is closest by edit distance; ties break
/// toward the earlier registry entry.
pub fn nearest_skill(description: &str) -> &'static Skill {
    library()
        .iter()
        .min_by_key(|s| edit_distance(description, s.description))
        .expect("library is non-empty")
}
