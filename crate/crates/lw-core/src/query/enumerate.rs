//! Enumeration of every supported single-atom query for a task.

use crate::query::parse::known_names;
use crate::query::{Query, QueryAtom, RelationKind, UnaryKind};
use crate::sim::TaskSpec;

/// All supported single-atom query sentences for `task`, in a stable order:
/// the two unary gripper tests first, then every relation over every ordered
/// name pair, each immediately followed by its negation.
///
/// Conjunctions remain parseable and evaluable but are not enumerated.
pub fn supported_queries(task: &TaskSpec) -> Vec<String> {
    let names = known_names(task);
    let mut out = Vec::with_capacity((2 + 13 * names.len() * (names.len() - 1)) * 2);

    for kind in [UnaryKind::GripperOpen, UnaryKind::GripperClosed] {
        for negated in [false, true] {
            out.push(Query::single(negated, QueryAtom::Unary { kind }).render());
        }
    }
    for relation in RelationKind::ALL {
        for subject in &names {
            for object in &names {
                if subject == object {
                    continue;
                }
                for negated in [false, true] {
                    out.push(
                        Query::single(
                            negated,
                            QueryAtom::Binary {
                                relation,
                                subject: subject.clone(),
                                object: object.clone(),
                            },
                        )
                        .render(),
                    );
                }
            }
        }
    }
    out
}
