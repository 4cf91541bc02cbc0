//! Exact query evaluation over world states.

use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::query::{Query, QueryAtom, RelationKind, UnaryKind};
use crate::scalar::{c, Real};
use crate::sim::consts;
use crate::sim::WorldState;

fn lookup<S: Real>(name: &str, state: &WorldState<S>) -> Result<Vec3<S>> {
    match name {
        "gripper" => Ok(state.gripper_pos),
        "goal" => Ok(state.goal_pos),
        "table" => Ok(Vec3::from_f64(
            consts::TABLE_POS[0],
            consts::TABLE_POS[1],
            consts::TABLE_POS[2],
        )),
        "wall" => Ok(Vec3::from_f64(
            consts::WALL_POS[0],
            consts::WALL_POS[1],
            consts::WALL_POS[2],
        )),
        _ => state
            .object(name)
            .map(|o| o.position())
            .ok_or_else(|| Error::UnknownObject {
                name: name.to_string(),
                known: state.object_names(),
            }),
    }
}

fn relation_holds<S: Real>(relation: RelationKind, a: Vec3<S>, b: Vec3<S>, object: &str) -> bool {
    let near = c::<S>(consts::NEAR_RADIUS);
    let side = c::<S>(consts::SIDE_MARGIN);
    let above_h = c::<S>(consts::ABOVE_HORIZONTAL);
    let around_h = c::<S>(consts::AROUND_HORIZONTAL);
    let around_v = c::<S>(consts::AROUND_VERTICAL);
    let touch = c::<S>(consts::TOUCH_RADIUS);
    let aligned = c::<S>(consts::ALIGNED_TOL);

    match relation {
        RelationKind::Near => a.distance(b) < near,
        RelationKind::FarFrom => a.distance(b) >= near,
        RelationKind::LeftOf => a.x < b.x - side,
        RelationKind::RightOf => a.x > b.x + side,
        RelationKind::InFrontOf => a.y < b.y - side,
        RelationKind::Behind => a.y > b.y + side,
        RelationKind::Above => a.z > b.z + side && a.horizontal_distance(b) < above_h,
        RelationKind::Below => a.z < b.z - side && a.horizontal_distance(b) < above_h,
        RelationKind::Around => {
            a.horizontal_distance(b) < around_h && (a.z - b.z).abs() < around_v
        }
        RelationKind::Touching => {
            if object == "table" {
                a.z < c::<S>(consts::TABLE_HEIGHT) + touch
            } else {
                a.distance(b) < touch
            }
        }
        RelationKind::AlignedX => (a.x - b.x).abs() < aligned,
        RelationKind::AlignedY => (a.y - b.y).abs() < aligned,
        RelationKind::AlignedZ => (a.z - b.z).abs() < aligned,
    }
}

fn atom_holds<S: Real>(atom: &QueryAtom, state: &WorldState<S>) -> Result<bool> {
    match atom {
        QueryAtom::Unary { kind } => {
            let open = state.gripper_closure < c::<S>(consts::OPEN_CLOSURE);
            Ok(match kind {
                UnaryKind::GripperOpen => open,
                UnaryKind::GripperClosed => !open,
            })
        }
        QueryAtom::Binary {
            relation,
            subject,
            object,
        } => {
            let a = lookup(subject, state)?;
            let b = lookup(object, state)?;
            Ok(relation_holds(*relation, a, b, object))
        }
    }
}

/// Evaluate a query: conjunction over literals, negation per literal.
pub fn eval_query<S: Real>(query: &Query, state: &WorldState<S>) -> Result<bool> {
    for literal in &query.literals {
        let value = atom_holds(&literal.atom, state)?;
        if value == literal.negated {
            return Ok(false);
        }
    }
    Ok(true)
}
