//! Few-shot prompt construction from manually written plans.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::plan::{encode_plan, ConditionalPlan, PlanFormat};
use crate::query::edit_distance;
use crate::sim::{list_tasks, TaskSet, TaskSpec};

const ANCHOR_TASK: &str = "pick-place";

/// Exemplar task names for a prompt: the anchor task plus the two base tasks
/// whose descriptions are closest to the target's by edit distance (never
/// the target itself). Ties break toward registry order. When the target is
/// the anchor itself, the three nearest other base tasks are used instead.
pub fn exemplar_tasks(target: &TaskSpec) -> Vec<&'static str> {
    let mut candidates: Vec<(usize, usize, &'static str)> = list_tasks(TaskSet::Base10)
        .iter()
        .enumerate()
        .filter(|(_, t)| t.name != target.name && t.name != ANCHOR_TASK)
        .map(|(idx, t)| {
            (
                edit_distance(&t.description, &target.description),
                idx,
                t.name.as_str(),
            )
        })
        .collect();
    candidates.sort();
    if target.name == ANCHOR_TASK {
        return candidates.iter().take(3).map(|(_, _, name)| *name).collect();
    }
    let mut out = vec![ANCHOR_TASK];
    out.extend(candidates.iter().take(2).map(|(_, _, name)| *name));
    out
}

/// The target task's name and description rendered in the format, with the
/// plan body omitted, ready for a completion to continue.
pub fn encode_target_header(target: &TaskSpec, format: PlanFormat) -> String {
    match format {
        PlanFormat::PlainList => format!(
            "task: {}\ndescription: {}\nplan:\n",
            target.name, target.description
        ),
        PlanFormat::BasicPyMd => format!(
            "## {}\n\n{}\n\n```python\ndef {}(robot):\n",
            target.name,
            target.description,
            target.name.replace(['-', ' '], "_")
        ),
        PlanFormat::ChainPy => format!("# Task: {}: {}\n", target.name, target.description),
    }
}

/// Build the full prompt for `target`: three exemplar plans in the format,
/// then the target header. The target's own plan never appears.
pub fn build_prompt(
    target: &TaskSpec,
    format: PlanFormat,
    library: &BTreeMap<String, ConditionalPlan>,
) -> Result<String> {
    for task in list_tasks(TaskSet::Base10) {
        if !library.contains_key(&task.name) {
            return Err(Error::MissingPlan(task.name.clone()));
        }
    }
    let mut prompt = String::new();
    for name in exemplar_tasks(target) {
        let plan = library.get(name).expect("checked above");
        prompt.push_str(&encode_plan(plan, format));
        prompt.push('\n');
    }
    prompt.push_str(&encode_target_header(target, format));
    Ok(prompt)
}
