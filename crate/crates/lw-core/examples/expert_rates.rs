use lw_core::sim::{episode_success, find_task, list_tasks, TaskSet};
use lw_core::skills::{expert_plan, run_expert};

fn main() {
    let n = 100;
    for task in list_tasks(TaskSet::Full20) {
        let plan = expert_plan(&task.name).unwrap();
        let t = find_task(&task.name).unwrap();
        let mut wins = 0;
        for seed in 0..n {
            let (traj, _demo) = run_expert::<f64>(t, plan, seed).unwrap();
            if episode_success(t, &traj) {
                wins += 1;
            }
        }
        println!("{:22} {:>5.2}", task.name, wins as f64 / n as f64);
    }
}
