//! Query answering: a small English-like query language over world states.
//!
//! Queries are conjunctions of possibly negated atoms. Atoms are either one
//! of 13 binary geometric relations between named points, or a unary gripper
//! test. Evaluation is exact and pure; see `docs/query-grammar.md` for the
//! accepted surface forms.

mod distance;
mod enumerate;
mod eval;
mod parse;

pub use distance::{edit_distance, nearest_query};
pub use enumerate::supported_queries;
pub use eval::eval_query;
pub use parse::parse_query;

use serde::{Deserialize, Serialize};

/// The 13 binary relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    Near,
    FarFrom,
    LeftOf,
    RightOf,
    InFrontOf,
    Behind,
    Above,
    Below,
    Around,
    Touching,
    AlignedX,
    AlignedY,
    AlignedZ,
}

impl RelationKind {
    pub const ALL: [RelationKind; 13] = [
        RelationKind::Near,
        RelationKind::FarFrom,
        RelationKind::LeftOf,
        RelationKind::RightOf,
        RelationKind::InFrontOf,
        RelationKind::Behind,
        RelationKind::Above,
        RelationKind::Below,
        RelationKind::Around,
        RelationKind::Touching,
        RelationKind::AlignedX,
        RelationKind::AlignedY,
        RelationKind::AlignedZ,
    ];

    /// Canonical surface form, placed between the subject and "the <object>".
    pub fn phrase(self) -> &'static str {
        match self {
            RelationKind::Near => "near",
            RelationKind::FarFrom => "far from",
            RelationKind::LeftOf => "left of",
            RelationKind::RightOf => "right of",
            RelationKind::InFrontOf => "in front of",
            RelationKind::Behind => "behind",
            RelationKind::Above => "above",
            RelationKind::Below => "below",
            RelationKind::Around => "around",
            RelationKind::Touching => "touching",
            RelationKind::AlignedX => "aligned in x with",
            RelationKind::AlignedY => "aligned in y with",
            RelationKind::AlignedZ => "aligned in z with",
        }
    }
}

/// Unary gripper tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnaryKind {
    GripperOpen,
    GripperClosed,
}

impl UnaryKind {
    pub fn phrase(self) -> &'static str {
        match self {
            UnaryKind::GripperOpen => "open",
            UnaryKind::GripperClosed => "closed",
        }
    }
}

/// One atomic test over a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QueryAtom {
    Binary {
        relation: RelationKind,
        subject: String,
        object: String,
    },
    /// Subject is always the gripper.
    Unary { kind: UnaryKind },
}

impl QueryAtom {
    pub fn subject(&self) -> &str {
        match self {
            QueryAtom::Binary { subject, .. } => subject,
            QueryAtom::Unary { .. } => "gripper",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub negated: bool,
    pub atom: QueryAtom,
}

/// A conjunction of at least one literal, sharing a single subject when it
/// came from the parser.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Query {
    pub literals: Vec<Literal>,
}

impl Query {
    pub fn single(negated: bool, atom: QueryAtom) -> Self {
        Self {
            literals: vec![Literal { negated, atom }],
        }
    }

    /// Canonical sentence for this query. Inverse of [`parse_query`] on
    /// sentences produced by [`supported_queries`].
    pub fn render(&self) -> String {
        let subject = self.literals[0].atom.subject();
        let mut out = format!("the {subject} is ");
        for (idx, lit) in self.literals.iter().enumerate() {
            if idx > 0 {
                out.push_str(" and ");
            }
            if lit.negated {
                out.push_str("not ");
            }
            match &lit.atom {
                QueryAtom::Unary { kind } => out.push_str(kind.phrase()),
                QueryAtom::Binary {
                    relation, object, ..
                } => {
                    out.push_str(relation.phrase());
                    out.push_str(" the ");
                    out.push_str(object);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_count_is_exactly_13() {
        assert_eq!(RelationKind::ALL.len(), 13);
    }

    #[test]
    fn render_single_negated_atom() {
        let q = Query::single(
            true,
            QueryAtom::Binary {
                relation: RelationKind::Near,
                subject: "gripper".into(),
                object: "puck".into(),
            },
        );
        assert_eq!(q.render(), "the gripper is not near the puck");
    }
}
