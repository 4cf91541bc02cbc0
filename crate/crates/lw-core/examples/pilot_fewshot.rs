use std::collections::BTreeMap;
use std::time::Instant;

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

    for arch in [Arch::Pcbc, Arch::Dc] {
        let t0 = Instant::now();
        let data = prepare_data::<f64>(arch, &DataConfig::FewShot, &plans, 9000).unwrap();
        eprintln!("{}: data prepared in {:.1}s ({} samples, {} contexts)",
            arch.name(), t0.elapsed().as_secs_f32(), data.base.total_samples(), data.base.contexts.len());
        for seed in [0u64] {
            let t1 = Instant::now();
            let config = TrainConfig { seed, ..TrainConfig::default() };
            let outcome = train_prepared(&data, &config).unwrap();
            let first: Vec<f64> = outcome.log[..100].iter().map(|e| e.loss).collect();
            let last: Vec<f64> = outcome.log[outcome.log.len()-100..].iter().map(|e| e.loss).collect();
            eprintln!("  seed {seed}: trained in {:.1}s  loss[0..100]~{:.4} loss[-100..]~{:.4}",
                t1.elapsed().as_secs_f32(),
                first.iter().sum::<f64>()/100.0, last.iter().sum::<f64>()/100.0);
            let t2 = Instant::now();
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
            eprintln!("  eval in {:.1}s", t2.elapsed().as_secs_f32());
            let nonzero = results.iter().filter(|r| r.success_rate > 0.0).count();
            let cdf = success_cdf(&results);
            eprintln!("  nonzero tasks: {nonzero}/20, cdf@10 = {:.3}", cdf[9].success);
            for r in &results {
                eprintln!("    {:22} {:.2}", r.task, r.success_rate);
            }
        }
    }
}
