use lw_core::eval::{evaluate, GroundedPlanPolicy};
use lw_core::plan::{decode_plan, ground_plan, PlanFormat};
use lw_core::sim::{find_task, list_tasks, TaskSet};

fn main() {
    let n_eps = 50;
    let mut strong = 0;
    for task in list_tasks(TaskSet::Full20) {
        if task.base_set {
            continue;
        }
        let mut best = 0.0f64;
        let mut line = format!("{:22}", task.name);
        for k in 0..4 {
            let path = format!("fixtures/plans/{}/{k}.txt", task.name);
            let text = std::fs::read_to_string(&path).unwrap();
            let rate = match decode_plan(&text, PlanFormat::ChainPy) {
                Ok(plan) => {
                    let grounded = ground_plan(&plan, task);
                    GroundedPlanPolicy::new(&grounded, task)
                        .and_then(|policy| evaluate::<f64>(&policy, "plan", k, &[task], n_eps, 20_000))
                        .map(|r| r[0].success_rate)
                        .unwrap_or(0.0)
                }
                Err(_) => {
                    line.push_str("  dec!");
                    continue;
                }
            };
            line.push_str(&format!(" {rate:5.2}"));
            best = best.max(rate);
        }
        if best >= 0.5 {
            strong += 1;
        }
        println!("{line}  best {best:.2}");
    }
    println!("tasks with best >= 0.5: {strong}/10 (need >= 3)");
}
