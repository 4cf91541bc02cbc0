//! Hand-written expert plans (one per task) and the shared plan executor.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::query::{eval_query, parse_query, Query};
use crate::scalar::Real;
use crate::sim::{consts, episode_success, find_task, observe, reset, step, TaskSpec, WorldState};
use crate::skills::demos::{DemoStep, Demonstration};
use crate::skills::{find_skill, skill_action, Skill};

/// Ordered (query sentence, skill id) steps for one task.
#[derive(Clone, Debug)]
pub struct ExpertPlan {
    pub task: &'static str,
    pub steps: Vec<(&'static str, &'static str)>,
}

fn puck_plan(transport: &'static str) -> Vec<(&'static str, &'static str)> {
    vec![
        ("the gripper is closed and not near the puck", "open_gripper"),
        ("the gripper is not near the puck", "above_puck"),
        ("the gripper is above the puck", "around_puck"),
        ("the gripper is open and around the puck", "close_gripper"),
        ("the gripper is closed and around the puck", transport),
    ]
}

fn button_plan() -> Vec<(&'static str, &'static str)> {
    vec![
        ("the gripper is not near the button", "front_of_button"),
        ("the gripper is near the button", "press_button"),
    ]
}

fn handle_slide_plan(
    handle: &'static str,
    approach: &'static str,
    slide: &'static str,
) -> Vec<(&'static str, &'static str)> {
    // Conditions are built at parse time; the literals here keep the plan
    // table readable. The grasp trigger is "around" (a 3 cm band inside the
    // 4 cm grasp radius).
    let not_near: &'static str = match handle {
        "door handle" => "the gripper is closed and not near the door handle",
        "window handle" => "the gripper is closed and not near the window handle",
        "faucet handle" => "the gripper is closed and not near the faucet handle",
        _ => unreachable!(),
    };
    let not_around: &'static str = match handle {
        "door handle" => "the gripper is not around the door handle",
        "window handle" => "the gripper is not around the window handle",
        "faucet handle" => "the gripper is not around the faucet handle",
        _ => unreachable!(),
    };
    let open_around: &'static str = match handle {
        "door handle" => "the gripper is open and around the door handle",
        "window handle" => "the gripper is open and around the window handle",
        "faucet handle" => "the gripper is open and around the faucet handle",
        _ => unreachable!(),
    };
    let closed_near: &'static str = match handle {
        "door handle" => "the gripper is closed and near the door handle",
        "window handle" => "the gripper is closed and near the window handle",
        "faucet handle" => "the gripper is closed and near the faucet handle",
        _ => unreachable!(),
    };
    vec![
        (not_near, "open_gripper"),
        (not_around, approach),
        (open_around, "close_gripper"),
        (closed_near, slide),
    ]
}

fn build_expert_plans() -> Vec<ExpertPlan> {
    let mut plans = Vec::with_capacity(20);
    let mut push = |task: &'static str, steps: Vec<(&'static str, &'static str)>| {
        plans.push(ExpertPlan { task, steps });
    };

    push(
        "reach",
        vec![("the gripper is far from the goal", "move_to_goal")],
    );
    push("push", puck_plan("put_puck_on_goal"));
    push("pick-place", puck_plan("put_puck_on_goal"));
    push(
        "drawer-open",
        vec![
            (
                "the gripper is closed and not near the drawer handle",
                "open_gripper",
            ),
            (
                "the gripper is not near the drawer handle",
                "above_drawer_handle",
            ),
            // Stated as in the task card, with the copula elided.
            ("the gripper above the drawer handle", "around_drawer_handle"),
            ("the gripper is open and around the drawer", "close_gripper"),
            (
                "the gripper is closed and around the drawer",
                "pull_drawer_open",
            ),
        ],
    );
    push(
        "drawer-close",
        vec![
            (
                "the gripper is closed and not near the drawer handle",
                "open_gripper",
            ),
            (
                "the gripper is not near the drawer handle",
                "above_drawer_handle",
            ),
            (
                "the gripper is above the drawer handle",
                "around_drawer_handle",
            ),
            ("the gripper is open and around the drawer", "close_gripper"),
            (
                "the gripper is closed and around the drawer",
                "push_drawer_closed",
            ),
        ],
    );
    push("button-press", button_plan());
    push(
        "door-open",
        handle_slide_plan("door handle", "to_door_handle", "pull_door_open"),
    );
    push(
        "window-open",
        handle_slide_plan("window handle", "to_window_handle", "slide_window_open"),
    );
    push(
        "window-close",
        handle_slide_plan("window handle", "to_window_handle", "slide_window_closed"),
    );
    push(
        "peg-insert",
        vec![
            ("the gripper is closed and not near the peg", "open_gripper"),
            ("the gripper is not near the peg", "above_peg"),
            ("the gripper is above the peg", "around_peg"),
            ("the gripper is open and around the peg", "close_gripper"),
            ("the gripper is closed and around the peg", "insert_peg"),
        ],
    );

    push("coffee-button", button_plan());
    push("button-press-topdown", button_plan());
    push(
        "door-close",
        handle_slide_plan("door handle", "to_door_handle", "push_door_closed"),
    );
    push(
        "faucet-open",
        handle_slide_plan("faucet handle", "to_faucet_handle", "slide_faucet_open"),
    );
    push(
        "faucet-close",
        handle_slide_plan("faucet handle", "to_faucet_handle", "slide_faucet_closed"),
    );
    push(
        "handle-pull",
        vec![
            (
                "the gripper is closed and not near the handle",
                "open_gripper",
            ),
            ("the gripper is not near the handle", "above_handle"),
            ("the gripper is above the handle", "around_handle"),
            ("the gripper is open and around the handle", "close_gripper"),
            ("the gripper is closed and around the handle", "pull_handle_up"),
        ],
    );
    push(
        "plate-slide",
        vec![
            (
                "the gripper is closed and not near the plate",
                "open_gripper",
            ),
            ("the gripper is open and not around the plate", "to_plate"),
            ("the gripper is open and around the plate", "close_gripper"),
            (
                "the gripper is closed and near the plate",
                "slide_plate_to_goal",
            ),
        ],
    );
    push("shelf-place", puck_plan("put_puck_on_goal"));
    push("push-back", puck_plan("put_puck_on_goal"));
    push("pick-place-wall", puck_plan("put_puck_on_goal"));

    plans
}

/// Registry of expert plans, one per task in the full set.
pub fn expert_plans() -> &'static [ExpertPlan] {
    static PLANS: OnceLock<Vec<ExpertPlan>> = OnceLock::new();
    PLANS.get_or_init(build_expert_plans)
}

pub fn expert_plan(task: &str) -> Result<&'static ExpertPlan> {
    expert_plans()
        .iter()
        .find(|p| p.task == task)
        .ok_or_else(|| Error::MissingPlan(task.to_string()))
}

/// A plan with conditions parsed and skills resolved, ready to execute.
///
/// Selection is first-true-wins, scanning steps top to bottom; when no
/// condition holds the last step's skill acts.
pub struct ResolvedPlan {
    pub steps: Vec<(Query, &'static Skill)>,
}

impl ResolvedPlan {
    pub fn from_expert(plan: &ExpertPlan, task: &TaskSpec) -> Result<Self> {
        if plan.steps.is_empty() {
            return Err(Error::InvalidPlan {
                task: task.name.clone(),
                reason: "plan has no steps".to_string(),
            });
        }
        let steps = plan
            .steps
            .iter()
            .map(|(condition, skill_id)| {
                Ok((parse_query(condition, task)?, find_skill(skill_id)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { steps })
    }

    /// Build from already-parsed pairs (used by the grounded-plan executor).
    pub fn from_steps(steps: Vec<(Query, &'static Skill)>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::EmptyPlan { raw: String::new() });
        }
        Ok(Self { steps })
    }

    /// Index of the step that acts in `state`.
    pub fn active_step<S: Real>(&self, state: &WorldState<S>) -> Result<usize> {
        for (idx, (query, _)) in self.steps.iter().enumerate() {
            if eval_query(query, state)? {
                return Ok(idx);
            }
        }
        Ok(self.steps.len() - 1)
    }

    pub fn act<S: Real>(&self, state: &WorldState<S>) -> Result<crate::sim::Action<S>> {
        let idx = self.active_step(state)?;
        skill_action(self.steps[idx].1, state)
    }
}

/// Roll out one 500-step episode under an expert plan, recording the
/// demonstration. Pure in `(task, plan, seed)`.
pub fn run_expert<S: Real>(
    task: &TaskSpec,
    plan: &ExpertPlan,
    seed: u64,
) -> Result<(Vec<WorldState<S>>, Demonstration<S>)> {
    let resolved = ResolvedPlan::from_expert(plan, task)?;
    let mut trajectory = Vec::with_capacity(consts::HORIZON + 1);
    let mut steps = Vec::with_capacity(consts::HORIZON);
    let mut state: WorldState<S> = reset(task, seed);

    for _ in 0..consts::HORIZON {
        let action = resolved.act(&state)?;
        steps.push(DemoStep {
            observation: observe(&state),
            action,
        });
        trajectory.push(state.clone());
        state = step(&state, action)?;
    }
    trajectory.push(state);

    let success = episode_success(task, &trajectory);
    let demo = Demonstration {
        task: task.name.clone(),
        seed,
        steps,
        success,
    };
    Ok((trajectory, demo))
}

/// Convenience wrapper: run the registry expert for a task by name.
pub fn run_registry_expert<S: Real>(
    task_name: &str,
    seed: u64,
) -> Result<(Vec<WorldState<S>>, Demonstration<S>)> {
    let task = find_task(task_name)?;
    run_expert(task, expert_plan(task_name)?, seed)
}
