//! Minibatch samplers: uniform per-task mixing and 1:1 co-learning.

use crate::error::{Error, Result};
use crate::rng::CounterRng;
use crate::scalar::Real;
use crate::train::dataset::{SampleRef, TrainingSet};

fn draw<'a, S: Real>(
    set: &'a TrainingSet<S>,
    task_idx: usize,
    rng: &mut CounterRng,
) -> SampleRef<'a, S> {
    let samples = &set.samples[task_idx];
    let sample = &samples[rng.index(samples.len())];
    SampleRef {
        obs: &sample.obs,
        action: &sample.action,
        counts: &set.contexts[sample.ctx as usize],
    }
}

/// Equal number of tuples from every task, sampled uniformly with
/// replacement over each task's demo timesteps.
pub fn sample_uniform<'a, S: Real>(
    set: &'a TrainingSet<S>,
    batch_size: usize,
    rng: &mut CounterRng,
) -> Result<Vec<SampleRef<'a, S>>> {
    let tasks = set.tasks.len();
    if batch_size == 0 || batch_size % tasks != 0 {
        return Err(Error::BadBatch {
            batch: batch_size,
            reason: format!("must be a positive multiple of the task count {tasks}"),
        });
    }
    let per_task = batch_size / tasks;
    let mut batch = Vec::with_capacity(batch_size);
    for task_idx in 0..tasks {
        for _ in 0..per_task {
            batch.push(draw(set, task_idx, rng));
        }
    }
    Ok(batch)
}

/// 1:1 co-learning: half the batch from the single target demonstration,
/// half split equally over the base tasks.
pub fn sample_colearning<'a, S: Real>(
    base: &'a TrainingSet<S>,
    target: &'a TrainingSet<S>,
    batch_size: usize,
    rng: &mut CounterRng,
) -> Result<Vec<SampleRef<'a, S>>> {
    let base_tasks = base.tasks.len();
    if batch_size == 0 || batch_size % 2 != 0 || batch_size % (2 * base_tasks) != 0 {
        return Err(Error::BadBatch {
            batch: batch_size,
            reason: format!("must be divisible by 2 and by 2 * base task count {base_tasks}"),
        });
    }
    debug_assert_eq!(target.tasks.len(), 1, "co-learning takes a single target");
    let half = batch_size / 2;
    let per_base = half / base_tasks;
    let mut batch = Vec::with_capacity(batch_size);
    for _ in 0..half {
        batch.push(draw(target, 0, rng));
    }
    for task_idx in 0..base_tasks {
        for _ in 0..per_base {
            batch.push(draw(base, task_idx, rng));
        }
    }
    Ok(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use crate::sim::consts;
    use crate::train::dataset::TrainingSample;

    type S = f64;

    fn toy_set(tasks: usize, samples_per_task: usize) -> TrainingSet<S> {
        let mut set = TrainingSet::default();
        for t in 0..tasks {
            set.tasks.push(format!("task-{t}"));
            set.contexts.push(vec![(t as u16, 1.0)]);
            set.samples.push(
                (0..samples_per_task)
                    .map(|i| TrainingSample {
                        obs: [i as f64; consts::OBS_DIM],
                        action: [t as f64; consts::ACTION_DIM],
                        ctx: t as u32,
                    })
                    .collect(),
            );
        }
        set
    }

    #[test]
    fn uniform_batches_are_exactly_balanced() {
        let set = toy_set(20, 50);
        let mut rng = CounterRng::new(0, stream::TEST);
        for _ in 0..100 {
            let batch = sample_uniform(&set, 120, &mut rng).unwrap();
            assert_eq!(batch.len(), 120);
            for t in 0..20 {
                let count = batch
                    .iter()
                    .filter(|s| s.action[0] == t as f64)
                    .count();
                assert_eq!(count, 6);
            }
        }
    }

    #[test]
    fn uniform_rejects_indivisible_batches() {
        let set = toy_set(20, 10);
        let mut rng = CounterRng::new(0, stream::TEST);
        assert!(matches!(
            sample_uniform(&set, 110, &mut rng),
            Err(Error::BadBatch { .. })
        ));
    }

    #[test]
    fn same_rng_state_gives_identical_batches() {
        let set = toy_set(4, 25);
        let mut a = CounterRng::new(5, stream::TEST);
        let mut b = CounterRng::new(5, stream::TEST);
        let ba = sample_uniform(&set, 8, &mut a).unwrap();
        let bb = sample_uniform(&set, 8, &mut b).unwrap();
        for (x, y) in ba.iter().zip(&bb) {
            assert_eq!(x.obs, y.obs);
            assert_eq!(x.action, y.action);
        }
    }

    #[test]
    fn colearning_batch_is_one_to_one() {
        let base = toy_set(10, 40);
        let target = toy_set(1, consts::HORIZON);
        let mut rng = CounterRng::new(1, stream::TEST);
        for _ in 0..100 {
            let batch = sample_colearning(&base, &target, 120, &mut rng).unwrap();
            assert_eq!(batch.len(), 120);
            // Target samples carry ctx bucket 0 with obs from the toy target.
            let target_count = batch
                .iter()
                .take(60)
                .filter(|s| s.counts == &target.contexts[0])
                .count();
            assert_eq!(target_count, 60);
            for t in 0..10 {
                let count = batch[60..]
                    .iter()
                    .filter(|s| s.action[0] == t as f64)
                    .count();
                assert_eq!(count, 6);
            }
        }
    }

    #[test]
    fn colearning_small_batch_splits() {
        let base = toy_set(10, 10);
        let target = toy_set(1, 10);
        let mut rng = CounterRng::new(2, stream::TEST);
        let batch = sample_colearning(&base, &target, 20, &mut rng).unwrap();
        assert_eq!(batch.len(), 20);
    }

    #[test]
    fn colearning_rejects_bad_divisibility() {
        let base = toy_set(10, 10);
        let target = toy_set(1, 10);
        let mut rng = CounterRng::new(3, stream::TEST);
        assert!(sample_colearning(&base, &target, 130, &mut rng).is_err());
        assert!(sample_colearning(&base, &target, 30, &mut rng).is_err());
    }
}
