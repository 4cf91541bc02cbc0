//! Flattening demonstrations into (observation, action, context) tuples.
//!
//! The context of a sample is the sparse count vector the policy encodes:
//! for PCBC the attention-mixed skill counts for the step's condition-truth
//! pattern, for DC the task description counts. Contexts are deduplicated,
//! so samples store only an index.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::pcbc::{count_vector, Arch, PreparedPlan, SparseCounts};
use crate::plan::ConditionalPlan;
use crate::scalar::Real;
use crate::sim::{consts, find_task};
use crate::skills::DemoSet;

#[derive(Clone, Debug)]
pub struct TrainingSample<S> {
    pub obs: [S; consts::OBS_DIM],
    pub action: [S; consts::ACTION_DIM],
    /// Index into [`TrainingSet::contexts`].
    pub ctx: u32,
}

/// Samples grouped by task, plus the deduplicated context table.
#[derive(Clone, Debug)]
pub struct TrainingSet<S> {
    pub tasks: Vec<String>,
    pub contexts: Vec<SparseCounts<S>>,
    pub samples: Vec<Vec<TrainingSample<S>>>,
}

impl<S> Default for TrainingSet<S> {
    fn default() -> Self {
        Self {
            tasks: Vec::new(),
            contexts: Vec::new(),
            samples: Vec::new(),
        }
    }
}

impl<S: Real> TrainingSet<S> {
    pub fn total_samples(&self) -> usize {
        self.samples.iter().map(Vec::len).sum()
    }
}

/// A sample joined with its context, as handed to the loss.
#[derive(Clone, Copy)]
pub struct SampleRef<'a, S> {
    pub obs: &'a [S; consts::OBS_DIM],
    pub action: &'a [S; consts::ACTION_DIM],
    pub counts: &'a SparseCounts<S>,
}

/// Build the flat training set for an architecture. PCBC requires a plan for
/// every task in the demo set; DC ignores plans.
pub fn build_training_set<S: Real>(
    arch: Arch,
    demos: &DemoSet<S>,
    plans: &BTreeMap<String, ConditionalPlan>,
) -> Result<TrainingSet<S>> {
    let mut set = TrainingSet::default();
    for (task_name, records) in &demos.by_task {
        let task = find_task(task_name)?;
        let mut task_samples = Vec::new();
        match arch {
            Arch::Dc => {
                let ctx = set.contexts.len() as u32;
                set.contexts.push(count_vector(&task.description));
                for record in records {
                    for step in &record.demo.steps {
                        task_samples.push(TrainingSample {
                            obs: step.observation.0,
                            action: step.action.to_array(),
                            ctx,
                        });
                    }
                }
            }
            Arch::Pcbc => {
                let plan = plans
                    .get(task_name)
                    .ok_or_else(|| Error::MissingPlan(task_name.clone()))?;
                let prepared = PreparedPlan::prepare(plan.clone(), task)?;
                let mut pattern_ctx: BTreeMap<u64, u32> = BTreeMap::new();
                for record in records {
                    for (step, state) in record.demo.steps.iter().zip(&record.states) {
                        let truths = prepared.truths(state)?;
                        debug_assert!(truths.len() <= 64);
                        let mask = truths
                            .iter()
                            .enumerate()
                            .fold(0u64, |m, (i, &b)| m | ((b as u64) << i));
                        let ctx = *pattern_ctx.entry(mask).or_insert_with(|| {
                            let id = set.contexts.len() as u32;
                            set.contexts.push(prepared.mixed_counts(&truths));
                            id
                        });
                        task_samples.push(TrainingSample {
                            obs: step.observation.0,
                            action: step.action.to_array(),
                            ctx,
                        });
                    }
                }
            }
        }
        if task_samples.is_empty() {
            return Err(Error::MissingDemos(task_name.clone()));
        }
        set.tasks.push(task_name.clone());
        set.samples.push(task_samples);
    }
    if set.tasks.is_empty() {
        return Err(Error::MissingDemos("<empty demo set>".to_string()));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plan::ConditionalPlan;
    use crate::skills::{expert_plan, generate_demos};

    type S = f64;

    fn plans_for(tasks: &[&str]) -> BTreeMap<String, ConditionalPlan> {
        tasks
            .iter()
            .map(|name| {
                let task = find_task(name).unwrap();
                (
                    name.to_string(),
                    ConditionalPlan::from_expert(expert_plan(name).unwrap(), task).unwrap(),
                )
            })
            .collect()
    }

    #[test]
    fn pcbc_set_dedupes_truth_patterns() {
        let tasks = vec![find_task("push").unwrap()];
        let demos = generate_demos::<S>(&tasks, 2, 5).unwrap();
        let set = build_training_set(Arch::Pcbc, &demos, &plans_for(&["push"])).unwrap();
        assert_eq!(set.total_samples(), 2 * consts::HORIZON);
        // Far fewer contexts than samples: one per distinct truth pattern.
        assert!(set.contexts.len() < 32, "{} contexts", set.contexts.len());
        assert!(set.contexts.len() >= 2);
    }

    #[test]
    fn dc_set_has_one_context_per_task() {
        let tasks = vec![find_task("push").unwrap(), find_task("reach").unwrap()];
        let demos = generate_demos::<S>(&tasks, 1, 5).unwrap();
        let set = build_training_set(Arch::Dc, &demos, &BTreeMap::new()).unwrap();
        assert_eq!(set.contexts.len(), 2);
    }

    #[test]
    fn pcbc_without_plan_errors() {
        let tasks = vec![find_task("push").unwrap()];
        let demos = generate_demos::<S>(&tasks, 1, 5).unwrap();
        let err = build_training_set(Arch::Pcbc, &demos, &BTreeMap::new()).unwrap_err();
        assert!(matches!(err, Error::MissingPlan(_)));
    }
}
