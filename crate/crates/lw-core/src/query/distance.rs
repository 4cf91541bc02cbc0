//! Levenshtein distance and nearest-query matching.

use crate::query::supported_queries;
use crate::sim::TaskSpec;

/// Case-insensitive Levenshtein distance with unit costs, over chars.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.to_lowercase().chars().collect();
    let b: Vec<char> = b.to_lowercase().chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }

    // Single rolling row over the shorter string.
    let (long, short) = if a.len() >= b.len() { (&a, &b) } else { (&b, &a) };
    let mut row: Vec<usize> = (0..=short.len()).collect();
    for (i, cl) in long.iter().enumerate() {
        let mut prev_diag = row[0];
        row[0] = i + 1;
        for (j, cs) in short.iter().enumerate() {
            let substitute = prev_diag + usize::from(cl != cs);
            prev_diag = row[j + 1];
            row[j + 1] = substitute.min(row[j] + 1).min(row[j + 1] + 1);
        }
    }
    row[short.len()]
}

/// Map free-form text to the closest supported query sentence by edit
/// distance; ties break toward the earlier sentence in enumeration order.
pub fn nearest_query(text: &str, task: &TaskSpec) -> String {
    supported_queries(task)
        .into_iter()
        .min_by_key(|q| edit_distance(text, q))
        .expect("supported_queries is never empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::find_task;

    #[test]
    fn identical_strings_have_distance_zero() {
        assert_eq!(edit_distance("abc", "abc"), 0);
    }

    #[test]
    fn empty_string_costs_insertions() {
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("abc", ""), 3);
    }

    #[test]
    fn kitten_sitting_is_three() {
        assert_eq!(edit_distance("kitten", "sitting"), 3);
    }

    #[test]
    fn case_is_ignored() {
        assert_eq!(edit_distance("The Gripper", "the gripper"), 0);
    }

    #[test]
    fn exact_sentence_maps_to_itself() {
        let task = find_task("push").unwrap();
        let sentence = "the gripper is near the puck";
        assert_eq!(nearest_query(sentence, task), sentence);
    }

    #[test]
    fn missing_articles_recover_canonical_form() {
        let task = find_task("push").unwrap();
        assert_eq!(
            nearest_query("gripper near puck", task),
            "the gripper is near the puck"
        );
    }

    #[test]
    fn nearest_query_is_idempotent() {
        let task = find_task("drawer-open").unwrap();
        for text in [
            "gripper around drawer",
            "the gripper is closed and near the drawer handle",
            "grip above drawer hand",
        ] {
            let once = nearest_query(text, task);
            assert_eq!(nearest_query(&once, task), once);
        }
    }
}
