//! Task registry: 10 base tasks plus 10 extended tasks that recombine the
//! same object vocabulary and skill set.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::consts;

/// Which slice of the registry to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TaskSet {
    Base10,
    Full20,
}

/// Inclusive uniform range for one scalar; `lo == hi` means fixed.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    pub const fn fixed(v: f64) -> Self {
        Self { lo: v, hi: v }
    }
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// Prismatic joint description: handle position = base + axis * value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointTemplate {
    pub axis: [f64; 3],
    pub lo: f64,
    pub hi: f64,
    pub init: Range,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ObjectTemplate {
    pub name: String,
    pub base: [Range; 3],
    pub joint: Option<JointTemplate>,
    pub graspable: bool,
    pub button: bool,
    /// Colocated twin: initialized by copying the named sibling's draw, so
    /// e.g. "drawer" and "drawer handle" answer to both names in queries.
    pub alias_of: Option<String>,
}

impl ObjectTemplate {
    fn free(name: &str, x: Range, y: Range, z: Range) -> Self {
        Self {
            name: name.to_string(),
            base: [x, y, z],
            joint: None,
            graspable: true,
            button: false,
            alias_of: None,
        }
    }

    fn jointed(name: &str, x: Range, y: Range, z: Range, joint: JointTemplate) -> Self {
        Self {
            name: name.to_string(),
            base: [x, y, z],
            joint: Some(joint),
            graspable: false,
            button: false,
            alias_of: None,
        }
    }

    fn button(name: &str, x: Range, y: Range, z: Range, joint: JointTemplate) -> Self {
        Self {
            name: name.to_string(),
            base: [x, y, z],
            joint: Some(joint),
            graspable: false,
            button: true,
            alias_of: None,
        }
    }

    fn alias(name: &str, of: &str, joint: JointTemplate) -> Self {
        Self {
            name: name.to_string(),
            base: [Range::fixed(0.0); 3],
            joint: Some(joint),
            graspable: false,
            button: false,
            alias_of: Some(of.to_string()),
        }
    }
}

/// Where the goal point is drawn from.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum GoalRule {
    /// Uniform box, independent of the objects.
    Box([Range; 3]),
    /// Handle position of `object` at travel fraction `frac` (derived after
    /// object placement, so the goal tracks the randomized base).
    JointTarget { object: String, frac: f64 },
}

/// Per-episode success predicate, checked at every state of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SuccessRule {
    GripperNearGoal,
    ObjectNearGoal { object: String },
    JointAtLeast { object: String },
    JointAtMost { object: String },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub description: String,
    pub objects: Vec<ObjectTemplate>,
    pub goal: GoalRule,
    pub success: SuccessRule,
    pub horizon: usize,
    /// True for the 10-task base set.
    pub base_set: bool,
}

impl TaskSpec {
    /// Object names addressable in queries for this task (excluding the
    /// fixed scene names `gripper`, `table`, `wall`, `goal`).
    pub fn object_names(&self) -> Vec<&str> {
        self.objects.iter().map(|o| o.name.as_str()).collect()
    }
}

fn drawer_joint(init: Range) -> JointTemplate {
    JointTemplate {
        axis: [0.0, -1.0, 0.0],
        lo: 0.0,
        hi: 0.16,
        init,
    }
}

fn door_joint(init: Range) -> JointTemplate {
    JointTemplate {
        axis: [-1.0, 0.0, 0.0],
        lo: 0.0,
        hi: 0.2,
        init,
    }
}

fn window_joint(init: Range) -> JointTemplate {
    JointTemplate {
        axis: [1.0, 0.0, 0.0],
        lo: 0.0,
        hi: 0.12,
        init,
    }
}

fn faucet_joint(init: Range) -> JointTemplate {
    JointTemplate {
        axis: [1.0, 0.0, 0.0],
        lo: 0.0,
        hi: 0.1,
        init,
    }
}

fn build_registry() -> Vec<TaskSpec> {
    let mut tasks = Vec::with_capacity(20);
    let base = |name: &str,
                description: &str,
                objects: Vec<ObjectTemplate>,
                goal: GoalRule,
                success: SuccessRule| TaskSpec {
        name: name.to_string(),
        description: description.to_string(),
        objects,
        goal,
        success,
        horizon: consts::HORIZON,
        base_set: true,
    };
    let extended = |name: &str,
                    description: &str,
                    objects: Vec<ObjectTemplate>,
                    goal: GoalRule,
                    success: SuccessRule| TaskSpec {
        base_set: false,
        ..base(name, description, objects, goal, success)
    };

    let puck = || {
        ObjectTemplate::free(
            "puck",
            Range::new(-0.1, 0.1),
            Range::new(-0.15, 0.0),
            Range::fixed(0.02),
        )
    };

    // --- base set -----------------------------------------------------
    tasks.push(base(
        "reach",
        "reach the goal position",
        vec![],
        GoalRule::Box([
            Range::new(-0.2, 0.2),
            Range::new(-0.2, 0.2),
            Range::new(0.15, 0.35),
        ]),
        SuccessRule::GripperNearGoal,
    ));

    tasks.push(base(
        "push",
        "push the puck to the goal",
        vec![puck()],
        GoalRule::Box([
            Range::new(-0.15, 0.15),
            Range::new(0.1, 0.25),
            Range::fixed(0.02),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "puck".into(),
        },
    ));

    tasks.push(base(
        "pick-place",
        "pick up the puck and place it at the goal",
        vec![puck()],
        GoalRule::Box([
            Range::new(-0.15, 0.15),
            Range::new(0.0, 0.2),
            Range::new(0.15, 0.25),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "puck".into(),
        },
    ));

    let drawer_objects = |init: Range| {
        vec![
            ObjectTemplate::jointed(
                "drawer handle",
                Range::new(-0.15, 0.15),
                Range::fixed(0.25),
                Range::fixed(0.06),
                drawer_joint(init),
            ),
            ObjectTemplate::alias("drawer", "drawer handle", drawer_joint(init)),
        ]
    };
    tasks.push(base(
        "drawer-open",
        "open the drawer",
        drawer_objects(Range::fixed(0.0)),
        GoalRule::JointTarget {
            object: "drawer handle".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "drawer handle".into(),
        },
    ));
    tasks.push(base(
        "drawer-close",
        "close the drawer",
        drawer_objects(Range::new(0.12, 0.16)),
        GoalRule::JointTarget {
            object: "drawer handle".into(),
            frac: 0.0,
        },
        SuccessRule::JointAtMost {
            object: "drawer handle".into(),
        },
    ));

    tasks.push(base(
        "button-press",
        "press the button",
        vec![ObjectTemplate::button(
            "button",
            Range::new(-0.12, 0.12),
            Range::new(0.2, 0.3),
            Range::new(0.1, 0.15),
            JointTemplate {
                axis: [0.0, 1.0, 0.0],
                lo: 0.0,
                hi: 0.04,
                init: Range::fixed(0.0),
            },
        )],
        GoalRule::JointTarget {
            object: "button".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "button".into(),
        },
    ));

    let door_objects = |init: Range| {
        vec![
            ObjectTemplate::jointed(
                "door handle",
                Range::new(0.05, 0.2),
                Range::new(0.15, 0.25),
                Range::fixed(0.1),
                door_joint(init),
            ),
            ObjectTemplate::alias("door", "door handle", door_joint(init)),
        ]
    };
    tasks.push(base(
        "door-open",
        "open the door",
        door_objects(Range::fixed(0.0)),
        GoalRule::JointTarget {
            object: "door handle".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "door handle".into(),
        },
    ));

    let window_objects = |init: Range| {
        vec![
            ObjectTemplate::jointed(
                "window handle",
                Range::new(-0.2, -0.05),
                Range::new(0.2, 0.3),
                Range::fixed(0.12),
                window_joint(init),
            ),
            ObjectTemplate::alias("window", "window handle", window_joint(init)),
        ]
    };
    tasks.push(base(
        "window-open",
        "slide the window open",
        window_objects(Range::fixed(0.0)),
        GoalRule::JointTarget {
            object: "window handle".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "window handle".into(),
        },
    ));
    tasks.push(base(
        "window-close",
        "slide the window closed",
        window_objects(Range::new(0.1, 0.12)),
        GoalRule::JointTarget {
            object: "window handle".into(),
            frac: 0.0,
        },
        SuccessRule::JointAtMost {
            object: "window handle".into(),
        },
    ));

    tasks.push(base(
        "peg-insert",
        "insert the peg into the hole",
        vec![ObjectTemplate::free(
            "peg",
            Range::new(-0.1, 0.1),
            Range::new(-0.15, 0.0),
            Range::fixed(0.02),
        )],
        GoalRule::Box([
            Range::new(0.15, 0.25),
            Range::new(0.1, 0.2),
            Range::fixed(0.05),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "peg".into(),
        },
    ));

    // --- extended set ---------------------------------------------------
    tasks.push(extended(
        "coffee-button",
        "push the button on the coffee machine",
        vec![ObjectTemplate::button(
            "button",
            Range::new(-0.1, 0.1),
            Range::new(0.25, 0.3),
            Range::new(0.18, 0.24),
            JointTemplate {
                axis: [0.0, 1.0, 0.0],
                lo: 0.0,
                hi: 0.04,
                init: Range::fixed(0.0),
            },
        )],
        GoalRule::JointTarget {
            object: "button".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "button".into(),
        },
    ));

    tasks.push(extended(
        "button-press-topdown",
        "press the button from above",
        vec![ObjectTemplate::button(
            "button",
            Range::new(-0.12, 0.12),
            Range::new(0.1, 0.2),
            Range::fixed(0.05),
            JointTemplate {
                axis: [0.0, 0.0, -1.0],
                lo: 0.0,
                hi: 0.03,
                init: Range::fixed(0.0),
            },
        )],
        GoalRule::JointTarget {
            object: "button".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "button".into(),
        },
    ));

    tasks.push(extended(
        "door-close",
        "close the door",
        door_objects(Range::new(0.16, 0.2)),
        GoalRule::JointTarget {
            object: "door handle".into(),
            frac: 0.0,
        },
        SuccessRule::JointAtMost {
            object: "door handle".into(),
        },
    ));

    let faucet_objects = |init: Range| {
        vec![
            ObjectTemplate::jointed(
                "faucet handle",
                Range::new(-0.1, 0.1),
                Range::new(0.1, 0.2),
                Range::new(0.08, 0.12),
                faucet_joint(init),
            ),
            ObjectTemplate::alias("faucet", "faucet handle", faucet_joint(init)),
        ]
    };
    tasks.push(extended(
        "faucet-open",
        "open the faucet",
        faucet_objects(Range::fixed(0.0)),
        GoalRule::JointTarget {
            object: "faucet handle".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "faucet handle".into(),
        },
    ));
    tasks.push(extended(
        "faucet-close",
        "close the faucet",
        faucet_objects(Range::new(0.08, 0.1)),
        GoalRule::JointTarget {
            object: "faucet handle".into(),
            frac: 0.0,
        },
        SuccessRule::JointAtMost {
            object: "faucet handle".into(),
        },
    ));

    tasks.push(extended(
        "handle-pull",
        "pull the handle up",
        vec![ObjectTemplate::jointed(
            "handle",
            Range::new(-0.12, 0.12),
            Range::new(0.05, 0.15),
            Range::fixed(0.04),
            JointTemplate {
                axis: [0.0, 0.0, 1.0],
                lo: 0.0,
                hi: 0.12,
                init: Range::fixed(0.0),
            },
        )],
        GoalRule::JointTarget {
            object: "handle".into(),
            frac: 1.0,
        },
        SuccessRule::JointAtLeast {
            object: "handle".into(),
        },
    ));

    tasks.push(extended(
        "plate-slide",
        "slide the plate to the goal",
        vec![ObjectTemplate::free(
            "plate",
            Range::new(-0.1, 0.1),
            Range::new(-0.1, 0.0),
            Range::fixed(0.02),
        )],
        GoalRule::Box([
            Range::new(-0.15, 0.15),
            Range::new(0.15, 0.25),
            Range::fixed(0.02),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "plate".into(),
        },
    ));

    tasks.push(extended(
        "shelf-place",
        "pick up the puck and put it on the shelf",
        vec![ObjectTemplate::free(
            "puck",
            Range::new(-0.1, 0.1),
            Range::new(-0.12, 0.0),
            Range::fixed(0.02),
        )],
        GoalRule::Box([
            Range::new(-0.1, 0.1),
            Range::new(0.2, 0.28),
            Range::new(0.15, 0.22),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "puck".into(),
        },
    ));

    tasks.push(extended(
        "push-back",
        "pull the puck back to the goal",
        vec![ObjectTemplate::free(
            "puck",
            Range::new(-0.1, 0.1),
            Range::new(0.05, 0.15),
            Range::fixed(0.02),
        )],
        GoalRule::Box([
            Range::new(-0.1, 0.1),
            Range::new(-0.2, -0.05),
            Range::fixed(0.02),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "puck".into(),
        },
    ));

    tasks.push(extended(
        "pick-place-wall",
        "pick up the puck and carry it over the wall to the goal",
        vec![ObjectTemplate::free(
            "puck",
            Range::new(-0.1, 0.1),
            Range::new(-0.15, -0.05),
            Range::fixed(0.02),
        )],
        GoalRule::Box([
            Range::new(-0.1, 0.1),
            Range::new(0.3, 0.38),
            Range::new(0.1, 0.18),
        ]),
        SuccessRule::ObjectNearGoal {
            object: "puck".into(),
        },
    ));

    tasks
}

/// The full, ordered task registry (base tasks first).
pub fn registry() -> &'static [TaskSpec] {
    static REGISTRY: OnceLock<Vec<TaskSpec>> = OnceLock::new();
    REGISTRY.get_or_init(build_registry)
}

/// Tasks in a set, in stable registry order.
pub fn list_tasks(set: TaskSet) -> Vec<&'static TaskSpec> {
    registry()
        .iter()
        .filter(|t| match set {
            TaskSet::Base10 => t.base_set,
            TaskSet::Full20 => true,
        })
        .collect()
}

pub fn find_task(name: &str) -> Result<&'static TaskSpec> {
    registry()
        .iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::UnknownTask(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_has_10_and_full_has_20() {
        assert_eq!(list_tasks(TaskSet::Base10).len(), 10);
        assert_eq!(list_tasks(TaskSet::Full20).len(), 20);
    }

    #[test]
    fn base_is_subset_of_full() {
        let full: Vec<&str> = list_tasks(TaskSet::Full20)
            .iter()
            .map(|t| t.name.as_str())
            .collect();
        for task in list_tasks(TaskSet::Base10) {
            assert!(full.contains(&task.name.as_str()));
        }
    }

    #[test]
    fn expected_base_names_present() {
        let names: Vec<&str> = list_tasks(TaskSet::Base10)
            .iter()
            .map(|t| t.name.as_str())
            .collect();
        for expected in [
            "reach",
            "push",
            "pick-place",
            "drawer-open",
            "drawer-close",
            "button-press",
            "door-open",
            "window-open",
            "window-close",
            "peg-insert",
        ] {
            assert!(names.contains(&expected), "missing {expected}");
        }
    }

    #[test]
    fn every_task_has_description_and_horizon() {
        for task in registry() {
            assert!(!task.description.is_empty());
            assert_eq!(task.horizon, 500);
        }
    }

    #[test]
    fn unknown_task_is_an_error() {
        assert!(find_task("juggle").is_err());
    }

    #[test]
    fn aliases_reference_earlier_objects() {
        for task in registry() {
            for (idx, obj) in task.objects.iter().enumerate() {
                if let Some(of) = &obj.alias_of {
                    let target = task.objects.iter().position(|o| &o.name == of);
                    assert!(target.is_some() && target.unwrap() < idx);
                }
            }
        }
    }
}
