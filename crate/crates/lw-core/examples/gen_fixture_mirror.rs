//! Regenerates fixtures/completions/ from fixtures/plans/: each held-out
//! task's plan variants are stored under the chain_py prompt hash so the
//! replay backend serves them for `lw llm complete`.

use std::collections::BTreeMap;

use lw_core::plan::{build_prompt, fixture_path_for, ConditionalPlan, PlanFormat};
use lw_core::sim::{list_tasks, registry, TaskSet};
use lw_core::skills::expert_plan;

fn main() {
    let plans: BTreeMap<String, ConditionalPlan> = registry()
        .iter()
        .map(|task| {
            let plan = ConditionalPlan::from_expert(expert_plan(&task.name).unwrap(), task).unwrap();
            (task.name.clone(), plan)
        })
        .collect();
    let out = std::path::Path::new("fixtures/completions");
    let _ = std::fs::remove_dir_all(out);
    std::fs::create_dir_all(out).unwrap();
    for task in list_tasks(TaskSet::Full20) {
        if task.base_set {
            continue;
        }
        let prompt = build_prompt(task, PlanFormat::ChainPy, &plans).unwrap();
        for k in 0..4 {
            let src = format!("fixtures/plans/{}/{k}.txt", task.name);
            let text = std::fs::read_to_string(&src).unwrap();
            let dst = fixture_path_for(out, &prompt, k);
            std::fs::write(&dst, text).unwrap();
        }
        println!("{}: {}", task.name, lw_core::plan::prompt_hash(&prompt));
    }
}
