//! Every numeric threshold used by the world, the query relations, and the
//! controllers lives here, as plain f64 constants lowered into the generic
//! scalar at the point of use.

/// Episode length; every rolled-out episode takes exactly this many steps.
pub const HORIZON: usize = 500;

/// Meters of gripper travel per unit of (clamped) action per step.
pub const STEP_SCALE: f64 = 0.02;

/// Max change of gripper closure per step.
pub const CLOSURE_RATE: f64 = 0.25;

/// A graspable object within this distance of a closing gripper attaches.
pub const GRASP_RADIUS: f64 = 0.04;

/// Closure above which the gripper holds (attach / drag a handle).
pub const ATTACH_CLOSURE: f64 = 0.7;

/// Closure below which an attached object is released.
pub const DETACH_CLOSURE: f64 = 0.3;

/// Attached objects ride this offset below the gripper point.
pub const GRASP_OFFSET_Z: f64 = -0.02;

/// A button face within this distance of the gripper advances when pushed.
pub const PRESS_RADIUS: f64 = 0.04;

/// Goal predicates: object/gripper must come within this distance.
pub const SUCCESS_RADIUS: f64 = 0.05;

/// Joint predicates: fraction of full travel that counts as open / closed.
pub const JOINT_OPEN_FRAC: f64 = 0.9;
pub const JOINT_CLOSED_FRAC: f64 = 0.1;

/// Workspace box the gripper is clamped into.
pub const WORKSPACE_LO: [f64; 3] = [-0.5, -0.5, 0.0];
pub const WORKSPACE_HI: [f64; 3] = [0.5, 0.5, 0.5];

/// Gripper start pose shared by all tasks.
pub const GRIPPER_START: [f64; 3] = [0.0, -0.35, 0.25];

/// Fixed scene points addressable in queries.
pub const TABLE_POS: [f64; 3] = [0.0, 0.0, 0.0];
pub const WALL_POS: [f64; 3] = [0.0, 0.45, 0.1];
pub const TABLE_HEIGHT: f64 = 0.0;

/// Query relation tolerances (meters).
pub const NEAR_RADIUS: f64 = 0.08;
pub const SIDE_MARGIN: f64 = 0.02;
pub const ABOVE_HORIZONTAL: f64 = 0.06;
pub const AROUND_HORIZONTAL: f64 = 0.03;
pub const AROUND_VERTICAL: f64 = 0.03;
pub const TOUCH_RADIUS: f64 = 0.01;
pub const ALIGNED_TOL: f64 = 0.01;
pub const OPEN_CLOSURE: f64 = 0.5;

/// Controller constants. The pull margin stays inside the `around` band so
/// a finished slide parks the gripper in a stable condition pattern.
pub const HOVER_OFFSET: f64 = 0.07;
pub const BUTTON_STANDOFF: f64 = 0.07;
pub const JOINT_PULL_MARGIN: f64 = 0.02;
pub const LIFT_HEIGHT: f64 = 0.2;

/// Observation vector length, identical for every task.
pub const OBS_DIM: usize = 14;

/// Action vector length.
pub const ACTION_DIM: usize = 4;
