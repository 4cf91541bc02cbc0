use std::collections::BTreeMap;

use lw_core::eval::{evaluate, success_cdf};
use lw_core::pcbc::{Arch, DcPolicy, PcbcPolicy};
use lw_core::plan::ConditionalPlan;
use lw_core::sim::{list_tasks, TaskSet};
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
    let tasks = list_tasks(TaskSet::Full20);
    let n_eps = 50;
    let mut zero_tasks: BTreeMap<String, usize> = BTreeMap::new();

    for arch in [Arch::Pcbc, Arch::Dc] {
        let data = prepare_data::<f64>(arch, &DataConfig::FewShot, &plans, 9000).unwrap();
        for seed in 0..4u64 {
            let config = TrainConfig { seed, ..TrainConfig::default() };
            let outcome = train_prepared(&data, &config).unwrap();
            let results = match arch {
                Arch::Pcbc => {
                    let policy = PcbcPolicy::new(outcome.params, plans.clone()).unwrap();
                    evaluate(&policy, "pcbc", seed as u32, &tasks, n_eps, 10_000).unwrap()
                }
                Arch::Dc => {
                    let policy = DcPolicy::new(outcome.params, &tasks);
                    evaluate(&policy, "dc", seed as u32, &tasks, n_eps, 10_000).unwrap()
                }
            };
            let nonzero = results.iter().filter(|r| r.success_rate > 0.0).count();
            let cdf = success_cdf(&results);
            println!("{} seed {seed}: nonzero {nonzero}/20 cdf@10={:.3}", arch.name(), cdf[9].success);
            for r in &results {
                if r.success_rate == 0.0 && arch == Arch::Pcbc {
                    *zero_tasks.entry(r.task.clone()).or_default() += 1;
                }
            }
        }
    }
    println!("pcbc zero tasks: {zero_tasks:?}");
}
