use std::collections::BTreeMap;

use lw_core::pcbc::{Arch, PcbcPolicy, PreparedPlan};
use lw_core::plan::ConditionalPlan;
use lw_core::sim::{find_task, list_tasks, observe, reset, step, TaskSet};
use lw_core::skills::expert_plan;
use lw_core::train::{prepare_data, train_prepared, DataConfig, TrainConfig};

fn registry_plans() -> BTreeMap<String, ConditionalPlan> {
    list_tasks(TaskSet::Full20)
        .iter()
        .map(|task| {
            let plan = ConditionalPlan::from_expert(expert_plan(&task.name).unwrap(), task).unwrap();
            (task.name.clone(), plan)
        })
        .collect()
}

fn main() {
    let plans = registry_plans();
    let data = prepare_data::<f64>(Arch::Pcbc, &DataConfig::FewShot, &plans, 9000).unwrap();
    let outcome = train_prepared(&data, &TrainConfig::default()).unwrap();
    let policy = PcbcPolicy::new(outcome.params, plans.clone()).unwrap();

    for name in ["door-open", "window-open"] {
        let task = find_task(name).unwrap();
        let prepared = PreparedPlan::<f64>::prepare(plans[name].clone(), task).unwrap();
        for seed in [10_000u64, 10_001, 10_002] {
            let mut state = reset::<f64>(task, seed);
            let mut max_joint = 0.0f64;
            let mut pattern_hist: Vec<(usize, String)> = Vec::new();
            let mut min_dist = f64::INFINITY;
            for t in 0..500 {
                let truths = prepared.truths(&state).unwrap();
                let pat: String = truths.iter().map(|b| if *b { '1' } else { '0' }).collect();
                if pattern_hist.last().map(|(_, p)| p != &pat).unwrap_or(true) {
                    pattern_hist.push((t, pat));
                }
                let action = policy.act(name, &state).unwrap();
                state = step(&state, action).unwrap();
                let handle = state.objects[0].position();
                min_dist = min_dist.min(handle.distance(state.gripper_pos));
                let joint = state.objects[0].joint.as_ref().unwrap();
                max_joint = max_joint.max(joint.value / joint.hi);
            }
            let closure = state.gripper_closure;
            println!("{name} seed {seed}: max_joint={max_joint:.2} min_dist={min_dist:.3} closure_end={closure:.2}");
            let hist: Vec<String> = pattern_hist.iter().take(12).map(|(t, p)| format!("{t}:{p}")).collect();
            println!("  patterns: {}", hist.join(" "));
        }
    }
}
