use std::collections::BTreeMap;
use std::time::Instant;

use lw_core::eval::evaluate;
use lw_core::pcbc::{Arch, PcbcPolicy};
use lw_core::plan::ConditionalPlan;
use lw_core::sim::{find_task, list_tasks, TaskSet};
use lw_core::skills::{expert_plan, generate_demos};
use lw_core::train::{build_training_set, train_on_sets, TrainConfig};

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
    let t0 = Instant::now();
    let base_tasks = list_tasks(TaskSet::Base10);
    let base_demos = generate_demos::<f64>(&base_tasks, 100, 9000).unwrap();
    let base_set = build_training_set(Arch::Pcbc, &base_demos, &plans).unwrap();
    eprintln!("base data: {:.1}s ({} samples)", t0.elapsed().as_secs_f32(), base_set.total_samples());

    let held_out: Vec<_> = list_tasks(TaskSet::Full20)
        .into_iter()
        .filter(|t| !t.base_set)
        .collect();
    let mut per_seed_nonzero = [0usize; 4];
    for target_task in &held_out {
        let target_demos = generate_demos::<f64>(&[target_task], 1, 9000).unwrap();
        let target_set = build_training_set(Arch::Pcbc, &target_demos, &plans).unwrap();
        let mut line = format!("{:22}", target_task.name);
        for seed in 0..4u64 {
            let config = TrainConfig { seed, steps: 8000, ..TrainConfig::default() };
            let outcome = train_on_sets(&base_set, Some(&target_set), &config).unwrap();
            let policy = PcbcPolicy::new(outcome.params, plans.clone()).unwrap();
            let task = find_task(&target_task.name).unwrap();
            let results = evaluate(&policy, "pcbc-oneshot", seed as u32, &[task], 50, 10_000).unwrap();
            let rate = results[0].success_rate;
            if rate > 0.0 {
                per_seed_nonzero[seed as usize] += 1;
            }
            line.push_str(&format!(" {rate:5.2}"));
        }
        println!("{line}");
    }
    println!("nonzero per seed: {per_seed_nonzero:?} (need >= 9/10 each)");
}
