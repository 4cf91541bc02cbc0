//! Deterministic kinematic tabletop world.
//!
//! States are immutable values; [`reset`] and [`step`] are pure functions, so
//! identical `(task, seed, actions)` always reproduce the same trajectory
//! bitwise. There are no forces or contacts: the gripper moves by bounded
//! displacements, grasping attaches objects, and prismatic joints follow a
//! holding gripper.

pub mod consts;
pub mod task;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::rng::{fnv1a, stream, CounterRng};
use crate::scalar::{c, Real};

pub use task::{
    find_task, list_tasks, registry, GoalRule, JointTemplate, ObjectTemplate, Range, SuccessRule,
    TaskSet, TaskSpec,
};

/// Prismatic joint: handle position = base + axis * value, lo <= value <= hi.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JointState<S> {
    pub axis: Vec3<S>,
    pub value: S,
    pub lo: S,
    pub hi: S,
}

impl<S: Real> JointState<S> {
    fn from_template(t: &task::JointTemplate, value: S) -> Self {
        Self {
            axis: Vec3::from_f64(t.axis[0], t.axis[1], t.axis[2]),
            value,
            lo: S::from_f64(t.lo),
            hi: S::from_f64(t.hi),
        }
    }

    fn clamp(&mut self) {
        self.value = self.value.max(self.lo).min(self.hi);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectState<S> {
    pub name: String,
    /// Anchor point. Free objects live exactly here; jointed objects derive
    /// their handle position from it.
    pub base: Vec3<S>,
    pub joint: Option<JointState<S>>,
    pub graspable: bool,
    pub button: bool,
}

impl<S: Real> ObjectState<S> {
    /// Current position: base + axis * value for jointed objects.
    pub fn position(&self) -> Vec3<S> {
        match &self.joint {
            Some(j) => self.base + j.axis * j.value,
            None => self.base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorldState<S> {
    pub gripper_pos: Vec3<S>,
    /// 0 = fully open, 1 = fully closed.
    pub gripper_closure: S,
    pub attached: Option<String>,
    pub objects: Vec<ObjectState<S>>,
    pub goal_pos: Vec3<S>,
    pub step_index: usize,
}

impl<S: Real> WorldState<S> {
    pub fn object(&self, name: &str) -> Option<&ObjectState<S>> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn object_names(&self) -> Vec<String> {
        self.objects.iter().map(|o| o.name.clone()).collect()
    }
}

/// Scaled displacement command plus gripper command, all in [-1, 1].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Action<S> {
    pub dx: S,
    pub dy: S,
    pub dz: S,
    pub grip: S,
}

impl<S: Real> Action<S> {
    pub fn new(dx: S, dy: S, dz: S, grip: S) -> Self {
        Self { dx, dy, dz, grip }
    }

    pub fn zero() -> Self {
        Self::new(S::zero(), S::zero(), S::zero(), S::zero())
    }

    pub fn clamped(self) -> Self {
        let one = S::one();
        let clamp = |v: S| v.max(-one).min(one);
        Self::new(
            clamp(self.dx),
            clamp(self.dy),
            clamp(self.dz),
            clamp(self.grip),
        )
    }

    pub fn to_array(self) -> [S; consts::ACTION_DIM] {
        [self.dx, self.dy, self.dz, self.grip]
    }

    pub fn from_array(a: [S; consts::ACTION_DIM]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Fixed-length observation vector; layout is identical for every task:
/// gripper (3), closure (1), two object slots (6, zero-padded), goal (3),
/// step fraction (1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observation<S>(pub [S; consts::OBS_DIM]);

impl<S: Real> Observation<S> {
    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

fn workspace_lo<S: Real>() -> Vec3<S> {
    Vec3::from_f64(
        consts::WORKSPACE_LO[0],
        consts::WORKSPACE_LO[1],
        consts::WORKSPACE_LO[2],
    )
}

fn workspace_hi<S: Real>() -> Vec3<S> {
    Vec3::from_f64(
        consts::WORKSPACE_HI[0],
        consts::WORKSPACE_HI[1],
        consts::WORKSPACE_HI[2],
    )
}

fn grasp_offset<S: Real>() -> Vec3<S> {
    Vec3::from_f64(0.0, 0.0, consts::GRASP_OFFSET_Z)
}

/// Draw a fresh initial state for `task`. Pure in `(task, seed)`.
pub fn reset<S: Real>(task: &TaskSpec, seed: u64) -> WorldState<S> {
    let mut rng = CounterRng::new(seed, stream::RESET ^ fnv1a(&task.name));
    let mut objects: Vec<ObjectState<S>> = Vec::with_capacity(task.objects.len());

    for template in &task.objects {
        if let Some(of) = &template.alias_of {
            let twin = objects
                .iter()
                .find(|o| &o.name == of)
                .expect("alias target precedes alias in the template list");
            objects.push(ObjectState {
                name: template.name.clone(),
                base: twin.base,
                joint: twin.joint.clone(),
                graspable: template.graspable,
                button: template.button,
            });
            continue;
        }
        let base = Vec3::new(
            rng.uniform(
                S::from_f64(template.base[0].lo),
                S::from_f64(template.base[0].hi),
            ),
            rng.uniform(
                S::from_f64(template.base[1].lo),
                S::from_f64(template.base[1].hi),
            ),
            rng.uniform(
                S::from_f64(template.base[2].lo),
                S::from_f64(template.base[2].hi),
            ),
        );
        let joint = template.joint.as_ref().map(|jt| {
            let value = rng.uniform(S::from_f64(jt.init.lo), S::from_f64(jt.init.hi));
            JointState::from_template(jt, value)
        });
        objects.push(ObjectState {
            name: template.name.clone(),
            base,
            joint,
            graspable: template.graspable,
            button: template.button,
        });
    }

    let goal_pos = match &task.goal {
        GoalRule::Box(ranges) => Vec3::new(
            rng.uniform(S::from_f64(ranges[0].lo), S::from_f64(ranges[0].hi)),
            rng.uniform(S::from_f64(ranges[1].lo), S::from_f64(ranges[1].hi)),
            rng.uniform(S::from_f64(ranges[2].lo), S::from_f64(ranges[2].hi)),
        ),
        GoalRule::JointTarget { object, frac } => {
            let obj = objects
                .iter()
                .find(|o| &o.name == object)
                .expect("goal rule references a task object");
            let joint = obj.joint.as_ref().expect("goal target object is jointed");
            let value = joint.lo + (joint.hi - joint.lo) * S::from_f64(*frac);
            obj.base + joint.axis * value
        }
    };

    WorldState {
        gripper_pos: Vec3::from_f64(
            consts::GRIPPER_START[0],
            consts::GRIPPER_START[1],
            consts::GRIPPER_START[2],
        ),
        gripper_closure: S::zero(),
        attached: None,
        objects,
        goal_pos,
        step_index: 0,
    }
}

/// Advance the world one step. Pure function of `(state, action)`.
///
/// Order of effects: closure update, gripper displacement (clamped to the
/// workspace), joint drag / button press (using the pre-move gripper
/// distance and post-update closure), attachment update.
pub fn step<S: Real>(state: &WorldState<S>, action: Action<S>) -> Result<WorldState<S>> {
    if state.step_index >= consts::HORIZON {
        return Err(Error::HorizonExceeded(state.step_index));
    }

    let action = action.clamped();
    let mut next = state.clone();

    // Closure tracks (grip+1)/2 at a bounded rate.
    let target = (action.grip + S::one()) * c::<S>(0.5);
    let rate = c::<S>(consts::CLOSURE_RATE);
    let delta = (target - state.gripper_closure).max(-rate).min(rate);
    next.gripper_closure = state.gripper_closure + delta;

    let displacement = Vec3::new(action.dx, action.dy, action.dz) * c::<S>(consts::STEP_SCALE);
    let moved = (state.gripper_pos + displacement).clamp_box(workspace_lo(), workspace_hi());
    let actual = moved - state.gripper_pos;
    next.gripper_pos = moved;

    let holding = next.gripper_closure > c::<S>(consts::ATTACH_CLOSURE);
    let grasp_radius = c::<S>(consts::GRASP_RADIUS);
    let press_radius = c::<S>(consts::PRESS_RADIUS);

    for obj in next.objects.iter_mut() {
        let Some(joint) = obj.joint.as_mut() else {
            continue;
        };
        let handle = obj.base + joint.axis * joint.value;
        let reach = handle.distance(state.gripper_pos);
        if obj.button {
            // Buttons only advance, whenever the gripper overlaps the face.
            if reach < press_radius {
                let push = actual.dot(joint.axis).max(S::zero());
                joint.value = joint.value + push;
                joint.clamp();
            }
        } else if holding && reach < grasp_radius {
            joint.value = joint.value + actual.dot(joint.axis);
            joint.clamp();
        }
    }

    if next.attached.is_some() && next.gripper_closure < c::<S>(consts::DETACH_CLOSURE) {
        next.attached = None;
    }
    if next.attached.is_none() && holding {
        let mut best: Option<(S, usize)> = None;
        for (idx, obj) in state.objects.iter().enumerate() {
            if !obj.graspable {
                continue;
            }
            let d = obj.position().distance(state.gripper_pos);
            if d < grasp_radius && best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, idx));
            }
        }
        if let Some((_, idx)) = best {
            next.attached = Some(next.objects[idx].name.clone());
        }
    }
    if let Some(name) = next.attached.clone() {
        let carried = next.gripper_pos + grasp_offset();
        if let Some(obj) = next.objects.iter_mut().find(|o| o.name == name) {
            obj.base = carried;
        }
    }

    next.step_index = state.step_index + 1;
    Ok(next)
}

/// Flatten a state into the fixed 14-dimensional observation.
pub fn observe<S: Real>(state: &WorldState<S>) -> Observation<S> {
    let mut v = [S::zero(); consts::OBS_DIM];
    v[0] = state.gripper_pos.x;
    v[1] = state.gripper_pos.y;
    v[2] = state.gripper_pos.z;
    v[3] = state.gripper_closure;
    for (slot, obj) in state.objects.iter().take(2).enumerate() {
        let p = obj.position();
        v[4 + 3 * slot] = p.x;
        v[5 + 3 * slot] = p.y;
        v[6 + 3 * slot] = p.z;
    }
    v[10] = state.goal_pos.x;
    v[11] = state.goal_pos.y;
    v[12] = state.goal_pos.z;
    v[13] = S::from_f64(state.step_index as f64 / consts::HORIZON as f64);
    Observation(v)
}

fn rule_holds<S: Real>(rule: &SuccessRule, state: &WorldState<S>) -> bool {
    let radius = c::<S>(consts::SUCCESS_RADIUS);
    match rule {
        SuccessRule::GripperNearGoal => state.gripper_pos.distance(state.goal_pos) < radius,
        SuccessRule::ObjectNearGoal { object } => state
            .object(object)
            .map_or(false, |o| o.position().distance(state.goal_pos) < radius),
        SuccessRule::JointAtLeast { object } => state
            .object(object)
            .and_then(|o| o.joint.as_ref())
            .map_or(false, |j| {
                j.value >= j.lo + (j.hi - j.lo) * c::<S>(consts::JOINT_OPEN_FRAC)
            }),
        SuccessRule::JointAtMost { object } => state
            .object(object)
            .and_then(|o| o.joint.as_ref())
            .map_or(false, |j| {
                j.value <= j.lo + (j.hi - j.lo) * c::<S>(consts::JOINT_CLOSED_FRAC)
            }),
    }
}

/// Non-Markovian success: true iff the task predicate holds at any state of
/// the trajectory.
pub fn episode_success<S: Real>(task: &TaskSpec, trajectory: &[WorldState<S>]) -> bool {
    trajectory.iter().any(|s| rule_holds(&task.success, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = f64;

    fn state(task: &str, seed: u64) -> WorldState<S> {
        reset(find_task(task).unwrap(), seed)
    }

    #[test]
    fn reset_is_deterministic() {
        let a = state("drawer-open", 7);
        let b = state("drawer-open", 7);
        assert_eq!(a, b);
    }

    #[test]
    fn reset_seeds_change_goal() {
        let a = state("reach", 0);
        let b = state("reach", 1);
        assert_ne!(a.goal_pos, b.goal_pos);
    }

    #[test]
    fn reset_starts_open_at_step_zero() {
        for task in registry() {
            let s: WorldState<S> = reset(task, 3);
            assert_eq!(s.gripper_closure, 0.0);
            assert_eq!(s.step_index, 0);
            assert!(s.attached.is_none());
        }
    }

    #[test]
    fn zero_action_moves_nothing_but_the_clock() {
        let s0 = state("push", 1);
        let s1 = step(&s0, Action::zero()).unwrap();
        assert_eq!(s1.gripper_pos, s0.gripper_pos);
        assert_eq!(s1.objects, s0.objects);
        assert_eq!(s1.step_index, s0.step_index + 1);
    }

    #[test]
    fn action_is_clamped_before_scaling() {
        let s0 = state("reach", 0);
        let s1 = step(&s0, Action::new(2.0, 0.0, 0.0, 0.0)).unwrap();
        let moved = s1.gripper_pos - s0.gripper_pos;
        assert!((moved.x - consts::STEP_SCALE).abs() < 1e-12);
        assert_eq!(moved.y, 0.0);
        assert_eq!(moved.z, 0.0);
    }

    #[test]
    fn stepping_past_horizon_errors() {
        let mut s = state("reach", 0);
        s.step_index = consts::HORIZON;
        assert!(matches!(
            step(&s, Action::zero()),
            Err(Error::HorizonExceeded(_))
        ));
    }

    #[test]
    fn closure_rate_is_bounded() {
        let s0 = state("reach", 0);
        let s1 = step(&s0, Action::new(0.0, 0.0, 0.0, 1.0)).unwrap();
        assert_eq!(s1.gripper_closure, consts::CLOSURE_RATE);
    }

    /// Hand-computed kinematics: park the gripper on the drawer handle,
    /// close it, and pull along the joint axis for k steps; the joint value
    /// must rise by exactly k * STEP_SCALE until it hits the range end.
    #[test]
    fn closed_gripper_drags_drawer_joint() {
        let task = find_task("drawer-open").unwrap();
        let mut s: WorldState<S> = reset(task, 11);
        let handle = s.object("drawer handle").unwrap().position();
        s.gripper_pos = handle;
        s.gripper_closure = 1.0;

        let axis = s.object("drawer handle").unwrap().joint.as_ref().unwrap().axis;
        let pull = Action::new(axis.x, axis.y, axis.z, 1.0);
        for k in 1..=5 {
            s = step(&s, pull).unwrap();
            let joint = s.object("drawer handle").unwrap().joint.as_ref().unwrap();
            assert!((joint.value - consts::STEP_SCALE * k as f64).abs() < 1e-12);
        }
        // Alias object tracks the same joint.
        let alias = s.object("drawer").unwrap().joint.as_ref().unwrap();
        assert!((alias.value - 0.1).abs() < 1e-12);
    }

    #[test]
    fn open_gripper_does_not_drag() {
        let task = find_task("drawer-open").unwrap();
        let mut s: WorldState<S> = reset(task, 11);
        s.gripper_pos = s.object("drawer handle").unwrap().position();
        let axis = s.object("drawer handle").unwrap().joint.as_ref().unwrap().axis;
        let s1 = step(&s, Action::new(axis.x, axis.y, axis.z, -1.0)).unwrap();
        let joint = s1.object("drawer handle").unwrap().joint.as_ref().unwrap();
        assert_eq!(joint.value, 0.0);
    }

    #[test]
    fn grasp_attaches_and_detaches() {
        let task = find_task("push").unwrap();
        let mut s: WorldState<S> = reset(task, 2);
        s.gripper_pos = s.object("puck").unwrap().position();
        for _ in 0..4 {
            s = step(&s, Action::new(0.0, 0.0, 0.0, 1.0)).unwrap();
        }
        assert_eq!(s.attached.as_deref(), Some("puck"));
        let expected = s.gripper_pos + Vec3::from_f64(0.0, 0.0, consts::GRASP_OFFSET_Z);
        assert_eq!(s.object("puck").unwrap().position(), expected);

        // Carrying: the object follows the gripper.
        s = step(&s, Action::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        let expected = s.gripper_pos + Vec3::from_f64(0.0, 0.0, consts::GRASP_OFFSET_Z);
        assert_eq!(s.object("puck").unwrap().position(), expected);

        for _ in 0..4 {
            s = step(&s, Action::new(0.0, 0.0, 0.0, -1.0)).unwrap();
        }
        assert!(s.attached.is_none());
    }

    #[test]
    fn button_advances_only_forward() {
        let task = find_task("button-press").unwrap();
        let mut s: WorldState<S> = reset(task, 5);
        let face = s.object("button").unwrap().position();
        s.gripper_pos = face + Vec3::from_f64(0.0, -0.03, 0.0);

        let s1 = step(&s, Action::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        let v1 = s1.object("button").unwrap().joint.as_ref().unwrap().value;
        assert!((v1 - consts::STEP_SCALE).abs() < 1e-12);

        // Pulling back does not retract the button.
        let s2 = step(&s1, Action::new(0.0, -1.0, 0.0, 0.0)).unwrap();
        let v2 = s2.object("button").unwrap().joint.as_ref().unwrap().value;
        assert_eq!(v2, v1);
    }

    #[test]
    fn gripper_stays_in_workspace() {
        let mut s = state("reach", 9);
        for _ in 0..60 {
            s = step(&s, Action::new(1.0, 1.0, 1.0, 0.0)).unwrap();
        }
        assert!(s.gripper_pos.x <= consts::WORKSPACE_HI[0]);
        assert!(s.gripper_pos.y <= consts::WORKSPACE_HI[1]);
        assert!(s.gripper_pos.z <= consts::WORKSPACE_HI[2]);
    }

    #[test]
    fn observation_layout_and_padding() {
        let s = state("push", 4);
        let obs = observe(&s);
        assert_eq!(obs.0.len(), consts::OBS_DIM);
        // One object: slots 7..9 stay zero.
        assert_eq!(&obs.0[7..10], &[0.0, 0.0, 0.0]);
        let again = observe(&s);
        assert_eq!(obs, again);
    }

    #[test]
    fn observation_step_fraction() {
        let mut s = state("reach", 0);
        s.step_index = 250;
        let obs = observe(&s);
        assert_eq!(obs.0[13], 0.5);
    }

    #[test]
    fn success_uses_any_step_semantics() {
        let task = find_task("reach").unwrap();
        let mut hit: WorldState<S> = reset(task, 0);
        hit.gripper_pos = hit.goal_pos;
        let miss = reset(task, 0);
        assert!(episode_success(task, &[miss.clone(), hit]));
        assert!(!episode_success(task, &[miss]));
        assert!(!episode_success::<S>(task, &[]));
    }
}
