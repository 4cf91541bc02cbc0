//! Recursive-descent parser for query sentences.
//!
//! Grammar (case-insensitive, articles and "is" optional):
//!
//! ```text
//! sentence := [the] SUBJECT [is] PRED ("and" [is] PRED)*
//! PRED     := ["not"] ( "open" | "closed" | REL [the] OBJECT )
//! ```
//!
//! The subject is stated once and distributes over every conjunct.

use crate::error::{Error, Result};
use crate::query::{edit_distance, Literal, Query, QueryAtom, RelationKind, UnaryKind};
use crate::sim::TaskSpec;

/// Names addressable in queries for a task: its objects plus the gripper and
/// the fixed scene points.
pub(crate) fn known_names(task: &TaskSpec) -> Vec<String> {
    let mut names = vec!["gripper".to_string()];
    names.extend(task.objects.iter().map(|o| o.name.clone()));
    names.extend(["table".to_string(), "wall".to_string(), "goal".to_string()]);
    names
}

fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|t| {
            t.trim_matches(|c: char| ",.;:!?\"'`".contains(c))
                .to_lowercase()
        })
        .filter(|t| !t.is_empty())
        .collect()
}

struct Parser<'a> {
    tokens: Vec<String>,
    pos: usize,
    names: &'a [String],
    raw: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&str> {
        self.tokens.get(self.pos).map(String::as_str)
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.peek() == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_article(&mut self) {
        let _ = self.eat("the") || self.eat("a") || self.eat("an");
    }

    fn rest(&self) -> String {
        self.tokens[self.pos.min(self.tokens.len())..].join(" ")
    }

    /// Longest match of the upcoming tokens against the known-name list.
    fn match_name(&mut self) -> Option<String> {
        let mut best: Option<(usize, &String)> = None;
        for name in self.names {
            let words: Vec<&str> = name.split_whitespace().collect();
            if self.tokens.len() < self.pos + words.len() {
                continue;
            }
            let matches = words
                .iter()
                .enumerate()
                .all(|(i, w)| self.tokens[self.pos + i] == *w);
            if matches && best.map_or(true, |(len, _)| words.len() > len) {
                best = Some((words.len(), name));
            }
        }
        best.map(|(len, name)| {
            self.pos += len;
            name.clone()
        })
    }

    /// Longest match against the relation phrases.
    fn match_relation(&mut self) -> Option<RelationKind> {
        let mut best: Option<(usize, RelationKind)> = None;
        for rel in RelationKind::ALL {
            let words: Vec<&str> = rel.phrase().split_whitespace().collect();
            if self.tokens.len() < self.pos + words.len() {
                continue;
            }
            let matches = words
                .iter()
                .enumerate()
                .all(|(i, w)| self.tokens[self.pos + i] == *w);
            if matches && best.map_or(true, |(len, _)| words.len() > len) {
                best = Some((words.len(), rel));
            }
        }
        best.map(|(len, rel)| {
            self.pos += len;
            rel
        })
    }

    fn predicate(&mut self, subject: &str) -> Result<Literal> {
        let negated = self.eat("not");
        if self.eat("open") {
            self.require_gripper(subject, "open")?;
            return Ok(Literal {
                negated,
                atom: QueryAtom::Unary {
                    kind: UnaryKind::GripperOpen,
                },
            });
        }
        if self.eat("closed") {
            self.require_gripper(subject, "closed")?;
            return Ok(Literal {
                negated,
                atom: QueryAtom::Unary {
                    kind: UnaryKind::GripperClosed,
                },
            });
        }

        let Some(relation) = self.match_relation() else {
            let at = self.rest();
            let hint = RelationKind::ALL
                .iter()
                .min_by_key(|r| edit_distance(r.phrase(), &at))
                .map(|r| r.phrase())
                .unwrap_or("near");
            return Err(Error::QueryParse {
                at,
                reason: format!("expected a relation phrase (nearest supported: `{hint}`)"),
            });
        };
        self.eat_article();
        let Some(object) = self.match_name() else {
            return Err(Error::UnknownObject {
                name: self.rest(),
                known: self.names.to_vec(),
            });
        };
        if object == subject {
            return Err(Error::QueryParse {
                at: self.raw.to_string(),
                reason: format!("subject and object are both `{object}`"),
            });
        }
        Ok(Literal {
            negated,
            atom: QueryAtom::Binary {
                relation,
                subject: subject.to_string(),
                object,
            },
        })
    }

    fn require_gripper(&self, subject: &str, pred: &str) -> Result<()> {
        if subject == "gripper" {
            Ok(())
        } else {
            Err(Error::QueryParse {
                at: self.raw.to_string(),
                reason: format!("`{pred}` only applies to the gripper, not `{subject}`"),
            })
        }
    }

    fn sentence(&mut self) -> Result<Query> {
        self.eat_article();
        let Some(subject) = self.match_name() else {
            return Err(Error::UnknownObject {
                name: self.rest(),
                known: self.names.to_vec(),
            });
        };
        let _ = self.eat("is");
        let mut literals = vec![self.predicate(&subject)?];
        while self.eat("and") {
            let _ = self.eat("is");
            literals.push(self.predicate(&subject)?);
        }
        if self.pos != self.tokens.len() {
            return Err(Error::QueryParse {
                at: self.rest(),
                reason: "trailing words after the last predicate".to_string(),
            });
        }
        Ok(Query { literals })
    }
}

/// Parse a query sentence against a task's object vocabulary.
pub fn parse_query(text: &str, task: &TaskSpec) -> Result<Query> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(Error::QueryParse {
            at: text.to_string(),
            reason: "empty query".to_string(),
        });
    }
    let names = known_names(task);
    Parser {
        tokens,
        pos: 0,
        names: &names,
        raw: text,
    }
    .sentence()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::find_task;

    #[test]
    fn parses_conjunction_with_shared_subject() {
        let task = find_task("push").unwrap();
        let q = parse_query("the gripper is open and not above the puck", task).unwrap();
        assert_eq!(q.literals.len(), 2);
        assert_eq!(
            q.literals[0],
            Literal {
                negated: false,
                atom: QueryAtom::Unary {
                    kind: UnaryKind::GripperOpen
                }
            }
        );
        assert_eq!(
            q.literals[1],
            Literal {
                negated: true,
                atom: QueryAtom::Binary {
                    relation: RelationKind::Above,
                    subject: "gripper".into(),
                    object: "puck".into(),
                }
            }
        );
    }

    #[test]
    fn parsing_is_deterministic() {
        let task = find_task("push").unwrap();
        let a = parse_query("the gripper is near the puck", task).unwrap();
        let b = parse_query("the gripper is near the puck", task).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn touching_the_table() {
        let task = find_task("push").unwrap();
        let q = parse_query("the puck is touching the table", task).unwrap();
        assert_eq!(
            q.literals,
            vec![Literal {
                negated: false,
                atom: QueryAtom::Binary {
                    relation: RelationKind::Touching,
                    subject: "puck".into(),
                    object: "table".into(),
                }
            }]
        );
    }

    #[test]
    fn articles_and_is_are_optional() {
        let task = find_task("push").unwrap();
        let a = parse_query("gripper near puck", task).unwrap();
        let b = parse_query("the gripper is near the puck", task).unwrap();
        assert_eq!(a, b);
        // Table-style row with the copula omitted.
        let c = parse_query("the gripper above the puck", task).unwrap();
        assert_eq!(c.literals.len(), 1);
    }

    #[test]
    fn multiword_object_names() {
        let task = find_task("drawer-open").unwrap();
        let q = parse_query("the gripper is near the drawer handle", task).unwrap();
        match &q.literals[0].atom {
            QueryAtom::Binary { object, .. } => assert_eq!(object, "drawer handle"),
            other => panic!("unexpected atom {other:?}"),
        }
        // The bare alias also resolves.
        let q = parse_query("the gripper is around the drawer", task).unwrap();
        match &q.literals[0].atom {
            QueryAtom::Binary { object, .. } => assert_eq!(object, "drawer"),
            other => panic!("unexpected atom {other:?}"),
        }
    }

    #[test]
    fn unknown_object_lists_known_names() {
        let task = find_task("push").unwrap();
        let err = parse_query("the gripper is near the banana", task).unwrap_err();
        match err {
            Error::UnknownObject { known, .. } => {
                assert!(known.contains(&"puck".to_string()));
                assert!(known.contains(&"goal".to_string()));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn unknown_relation_hints_nearest() {
        let task = find_task("push").unwrap();
        let err = parse_query("the gripper is nearr the puck", task).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("near"), "no hint in: {msg}");
    }
}
