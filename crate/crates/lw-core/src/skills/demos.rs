//! Demonstration generation and the on-disk demo format.
//!
//! On disk a demo set is one JSON-lines file per task (`demos/<task>.jsonl`,
//! one record per step carrying state, observation, and action) plus a
//! `manifest.json` with the episode seeds and success flags.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{fnv1a, stream, CounterRng};
use crate::scalar::Real;
use crate::sim::{consts, Action, Observation, TaskSpec, WorldState};
use crate::skills::expert::{expert_plan, run_expert};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemoStep<S> {
    pub observation: Observation<S>,
    pub action: Action<S>,
}

/// One 500-step expert trajectory of (observation, action) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Demonstration<S> {
    pub task: String,
    pub seed: u64,
    pub steps: Vec<DemoStep<S>>,
    pub success: bool,
}

/// A demonstration together with the states it was observed from (one per
/// step), so condition truths can be recomputed for any plan.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoRecord<S> {
    pub demo: Demonstration<S>,
    pub states: Vec<WorldState<S>>,
}

/// Demonstrations grouped by task, in stable task order.
#[derive(Clone, Debug, Default)]
pub struct DemoSet<S> {
    pub by_task: BTreeMap<String, Vec<DemoRecord<S>>>,
}

impl<S: Real> DemoSet<S> {
    pub fn records(&self, task: &str) -> Result<&[DemoRecord<S>]> {
        self.by_task
            .get(task)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::MissingDemos(task.to_string()))
    }

    pub fn total_steps(&self) -> usize {
        self.by_task
            .values()
            .flat_map(|records| records.iter().map(|r| r.demo.steps.len()))
            .sum()
    }
}

const RETRY_FACTOR: usize = 20;
const RETRY_SLACK: usize = 50;

/// Generate `n_per_task` successful expert demonstrations per task,
/// resampling episode seeds on failure within a bounded retry budget.
/// Deterministic in `(tasks, n_per_task, seed)`.
pub fn generate_demos<S: Real>(
    tasks: &[&TaskSpec],
    n_per_task: usize,
    seed: u64,
) -> Result<DemoSet<S>> {
    let mut by_task = BTreeMap::new();
    for task in tasks {
        let plan = expert_plan(&task.name)?;
        let mut rng = CounterRng::new(seed, stream::DEMOS ^ fnv1a(&task.name));
        let mut records = Vec::with_capacity(n_per_task);
        let budget = n_per_task * RETRY_FACTOR + RETRY_SLACK;
        let mut attempts = 0;
        while records.len() < n_per_task {
            if attempts >= budget {
                return Err(Error::DemoRetryBudget {
                    task: task.name.clone(),
                    attempts,
                    wanted: n_per_task,
                });
            }
            attempts += 1;
            let episode_seed = rng.next_u64();
            let (trajectory, demo) = run_expert::<S>(task, plan, episode_seed)?;
            if demo.success {
                let states = trajectory[..consts::HORIZON].to_vec();
                records.push(DemoRecord { demo, states });
            }
        }
        by_task.insert(task.name.clone(), records);
    }
    Ok(DemoSet { by_task })
}

#[derive(Serialize, Deserialize)]
struct StepLine<S> {
    demo: usize,
    step: usize,
    state: WorldState<S>,
    observation: Observation<S>,
    action: Action<S>,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    n: usize,
    seeds: Vec<u64>,
    success: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    tasks: BTreeMap<String, ManifestEntry>,
}

/// Write `demos/<task>.jsonl` files plus `manifest.json` under `dir`.
pub fn save_demoset<S: Real>(dir: &Path, set: &DemoSet<S>) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest {
        tasks: BTreeMap::new(),
    };
    for (task, records) in &set.by_task {
        let path = dir.join(format!("{task}.jsonl"));
        let mut out = BufWriter::new(std::fs::File::create(path)?);
        for (demo_idx, record) in records.iter().enumerate() {
            for (step_idx, (step, state)) in
                record.demo.steps.iter().zip(&record.states).enumerate()
            {
                let line = StepLine {
                    demo: demo_idx,
                    step: step_idx,
                    state: state.clone(),
                    observation: step.observation.clone(),
                    action: step.action,
                };
                serde_json::to_writer(&mut out, &line)?;
                out.write_all(b"\n")?;
            }
        }
        out.flush()?;
        manifest.tasks.insert(
            task.clone(),
            ManifestEntry {
                n: records.len(),
                seeds: records.iter().map(|r| r.demo.seed).collect(),
                success: records.iter().map(|r| r.demo.success).collect(),
            },
        );
    }
    let mut file = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut file, &manifest)?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Load a demo set previously written by [`save_demoset`].
pub fn load_demoset<S: Real>(dir: &Path) -> Result<DemoSet<S>> {
    let manifest: Manifest =
        serde_json::from_reader(std::fs::File::open(dir.join("manifest.json"))?)?;
    let mut by_task = BTreeMap::new();
    for (task, entry) in &manifest.tasks {
        let file = std::fs::File::open(dir.join(format!("{task}.jsonl")))?;
        let mut records: Vec<DemoRecord<S>> = (0..entry.n)
            .map(|i| DemoRecord {
                demo: Demonstration {
                    task: task.clone(),
                    seed: entry.seeds[i],
                    steps: Vec::with_capacity(consts::HORIZON),
                    success: entry.success[i],
                },
                states: Vec::with_capacity(consts::HORIZON),
            })
            .collect();
        for line in BufReader::new(file).lines() {
            let parsed: StepLine<S> = serde_json::from_str(&line?)?;
            let record = &mut records[parsed.demo];
            record.states.push(parsed.state);
            record.demo.steps.push(DemoStep {
                observation: parsed.observation,
                action: parsed.action,
            });
        }
        by_task.insert(task.clone(), records);
    }
    Ok(DemoSet { by_task })
}
