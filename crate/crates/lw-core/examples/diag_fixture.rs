use lw_core::plan::{decode_plan, ground_plan, PlanFormat};
use lw_core::sim::find_task;

fn main() {
    for (task_name, k) in [("door-close", 1), ("door-close", 2), ("faucet-close", 2), ("faucet-open", 2)] {
        let task = find_task(task_name).unwrap();
        let text = std::fs::read_to_string(format!("fixtures/plans/{task_name}/{k}.txt")).unwrap();
        let plan = decode_plan(&text, PlanFormat::ChainPy).unwrap();
        println!("== {task_name}/{k} decoded:");
        for s in &plan.steps {
            println!("   [{}] -> [{}]", s.condition, s.skill);
        }
        let grounded = ground_plan(&plan, task);
        println!("   grounded:");
        for s in &grounded.steps {
            println!("   [{}] -> [{}]", s.condition, s.skill);
        }
    }
}
