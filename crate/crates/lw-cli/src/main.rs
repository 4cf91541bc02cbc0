//! `lw`: command-line driver for the benchmark pipeline — demo generation,
//! query evaluation, plan tooling, completion replay, training, evaluation,
//! and self-checks.

mod manifest;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lw_core::eval::{
    evaluate, write_report, EvalResult, GroundedPlanPolicy, RandomPolicy, ScriptedExpert,
};
use lw_core::pcbc::{
    attention_weights, grad_check, Arch, Checkpoint, DcPolicy, PcbcPolicy, CHECKPOINT_VERSION,
};
use lw_core::plan::{
    build_prompt, complete, decode_plan, encode_plan, ground_plan, Backend, CompletionRequest,
    ConditionalPlan, PlanFormat,
};
use lw_core::query::{edit_distance, eval_query, nearest_query, parse_query, supported_queries};
use lw_core::sim::{find_task, list_tasks, registry, TaskSet, TaskSpec};
use lw_core::skills::{expert_plan, generate_demos, save_demoset};
use lw_core::train::{train, DataConfig, TrainConfig};
use lw_core::Scalar;

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "lw", version, about = "Tabletop language-and-skills benchmark")]
struct Cli {
    /// Worker threads for parallel episodes/runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Task registry queries.
    Tasks {
        #[command(subcommand)]
        command: TasksCommand,
    },
    /// Demonstration generation.
    Demos {
        #[command(subcommand)]
        command: DemosCommand,
    },
    /// Query parsing, evaluation, and matching.
    Query {
        #[command(subcommand)]
        command: QueryCommand,
    },
    /// Plan encoding, decoding, grounding, and prompt construction.
    Plan {
        #[command(subcommand)]
        command: PlanCommand,
    },
    /// Text-completion client.
    Llm {
        #[command(subcommand)]
        command: LlmCommand,
    },
    /// Behavioral-cloning training.
    Train(TrainArgs),
    /// Policy evaluation.
    Eval(EvalArgs),
    /// Merge evaluation results into a combined report.
    Report(ReportArgs),
    /// Fast oracle and gradient self-checks.
    Selfcheck {
        /// Run the heavier variant (more instances per check).
        #[arg(long)]
        full: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Base,
    Full,
}

impl From<SetArg> for TaskSet {
    fn from(value: SetArg) -> Self {
        match value {
            SetArg::Base => TaskSet::Base10,
            SetArg::Full => TaskSet::Full20,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    PlainList,
    BasicPyMd,
    ChainPy,
}

impl From<FormatArg> for PlanFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::PlainList => PlanFormat::PlainList,
            FormatArg::BasicPyMd => PlanFormat::BasicPyMd,
            FormatArg::ChainPy => PlanFormat::ChainPy,
        }
    }
}

#[derive(Subcommand)]
enum TasksCommand {
    /// List tasks in a set.
    List {
        #[arg(long, value_enum, default_value = "base")]
        set: SetArg,
        /// Emit the full registry entries as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum DemosCommand {
    /// Generate successful expert demonstrations and write them to disk.
    Generate {
        #[arg(long, value_enum, default_value = "base")]
        set: SetArg,
        /// Demonstrations per task.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum QueryCommand {
    /// Evaluate a query sentence against a world state file.
    Eval {
        #[arg(long)]
        task: String,
        /// JSON world state (e.g. a `state` record from a demo file).
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Print every supported query sentence for a task.
    List {
        #[arg(long)]
        task: String,
    },
    /// Map free-form text to the nearest supported query.
    Nearest {
        #[arg(long)]
        task: String,
        #[arg(long)]
        text: String,
    },
}

#[derive(Subcommand)]
enum PlanCommand {
    /// Render a task's registry plan in a plan format.
    Encode {
        #[arg(long)]
        task: String,
        #[arg(long, value_enum, default_value = "chain-py")]
        format: FormatArg,
    },
    /// Decode a plan text file; prints the recovered steps as JSON.
    Decode {
        #[arg(long, value_enum, default_value = "chain-py")]
        format: FormatArg,
        #[arg(long)]
        file: PathBuf,
    },
    /// Decode a plan text file and ground it onto the supported vocabulary.
    Ground {
        #[arg(long)]
        task: String,
        #[arg(long, value_enum, default_value = "chain-py")]
        format: FormatArg,
        #[arg(long)]
        file: PathBuf,
    },
    /// Build the few-shot prompt for a task.
    Prompt {
        #[arg(long)]
        task: String,
        #[arg(long, value_enum, default_value = "chain-py")]
        format: FormatArg,
    },
}

#[derive(Subcommand)]
enum LlmCommand {
    /// Fetch a completion for a task prompt (or a raw prompt file).
    Complete {
        /// Build the prompt for this task (with --format).
        #[arg(long, conflicts_with = "prompt_file")]
        task: Option<String>,
        #[arg(long, value_enum, default_value = "chain-py")]
        format: FormatArg,
        /// Raw prompt file instead of a task prompt.
        #[arg(long)]
        prompt_file: Option<PathBuf>,
        /// Which repeated sample to fetch.
        #[arg(long, default_value_t = 0)]
        sample: usize,
        #[arg(long, default_value = "replay")]
        backend: String,
        /// Fixture directory for the replay backend.
        #[arg(long, default_value = "fixtures/completions")]
        fixtures: PathBuf,
        /// Endpoint URL for the http backend.
        #[arg(long)]
        endpoint: Option<String>,
        /// Environment variable holding the API credential (never logged).
        #[arg(long, default_value = "LW_API_KEY")]
        api_key_env: String,
        /// Log http completions here so they become replayable.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

#[derive(Args, serde::Serialize)]
struct TrainArgs {
    #[arg(long)]
    arch: String,
    /// zero_shot | few_shot | one_shot
    #[arg(long)]
    data: String,
    /// Target task for one_shot; omitted = train every full-set target.
    #[arg(long)]
    target: Option<String>,
    /// JSON file with TrainConfig fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, serde::Serialize)]
struct EvalArgs {
    /// scripted | random | plan | pcbc | dc
    #[arg(long)]
    policy: String,
    /// Checkpoint file for pcbc/dc policies.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Directory of plan text fixtures (<task>/<k>.txt) for --policy plan.
    #[arg(long)]
    plans_dir: Option<PathBuf>,
    #[arg(long, default_value = "chain_py")]
    format: String,
    #[arg(long, default_value = "base")]
    tasks: String,
    #[arg(long, default_value_t = 50)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// results.json files to merge.
    #[arg(long, required = true, value_delimiter = ',')]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

/// Registry expert plans viewed as conditional plans, keyed by task.
fn registry_plans() -> Result<BTreeMap<String, ConditionalPlan>> {
    let mut plans = BTreeMap::new();
    for task in registry() {
        let plan = ConditionalPlan::from_expert(expert_plan(&task.name)?, task)?;
        plans.insert(task.name.clone(), plan);
    }
    Ok(plans)
}

fn cmd_tasks(command: TasksCommand) -> Result<()> {
    match command {
        TasksCommand::List { set, json } => {
            let tasks = list_tasks(set.into());
            if json {
                println!("{}", serde_json::to_string_pretty(&tasks)?);
            } else {
                for task in tasks {
                    println!("{}", task.name);
                }
            }
        }
    }
    Ok(())
}

fn cmd_demos(command: DemosCommand) -> Result<()> {
    match command {
        DemosCommand::Generate { set, n, seed, out } => {
            let tasks = list_tasks(set.into());
            let demos = generate_demos::<Scalar>(&tasks, n, seed)?;
            std::fs::create_dir_all(&out)?;
            save_demoset(&out, &demos)?;
            let mut manifest = RunManifest::new(
                &serde_json::json!({"cmd": "demos.generate", "set": tasks.len(), "n": n, "seed": seed}),
                vec![seed],
            )?;
            for task in &tasks {
                manifest.add_output(&out, &out.join(format!("{}.jsonl", task.name)));
            }
            manifest.write(&out)?;
            println!(
                "wrote {} demos across {} tasks to {}",
                demos.total_steps() / lw_core::sim::consts::HORIZON,
                tasks.len(),
                out.display()
            );
        }
    }
    Ok(())
}

fn load_state(path: &Path) -> Result<lw_core::WorldState> {
    let state: lw_core::WorldState = serde_json::from_slice(&std::fs::read(path)?)
        .with_context(|| format!("reading world state from {}", path.display()))?;
    Ok(state)
}

fn cmd_query(command: QueryCommand) -> Result<()> {
    match command {
        QueryCommand::Eval { task, state, query } => {
            let task = find_task(&task)?;
            let parsed = parse_query(&query, task)?;
            let state = load_state(&state)?;
            println!("{}", eval_query(&parsed, &state)?);
        }
        QueryCommand::List { task } => {
            let task = find_task(&task)?;
            for sentence in supported_queries(task) {
                println!("{sentence}");
            }
        }
        QueryCommand::Nearest { task, text } => {
            let task = find_task(&task)?;
            let nearest = nearest_query(&text, task);
            println!("{nearest}");
        }
    }
    Ok(())
}

fn cmd_plan(command: PlanCommand) -> Result<()> {
    match command {
        PlanCommand::Encode { task, format } => {
            let spec = find_task(&task)?;
            let plan = ConditionalPlan::from_expert(expert_plan(&task)?, spec)?;
            print!("{}", encode_plan(&plan, format.into()));
        }
        PlanCommand::Decode { format, file } => {
            let text = std::fs::read_to_string(&file)?;
            let plan = decode_plan(&text, format.into())?;
            println!("{}", serde_json::to_string_pretty(&plan)?);
        }
        PlanCommand::Ground { task, format, file } => {
            let spec = find_task(&task)?;
            let text = std::fs::read_to_string(&file)?;
            let plan = decode_plan(&text, format.into())?;
            let grounded = ground_plan(&plan, spec);
            print!("{}", encode_plan(&grounded, PlanFormat::PlainList));
        }
        PlanCommand::Prompt { task, format } => {
            let spec = find_task(&task)?;
            let prompt = build_prompt(spec, format.into(), &registry_plans()?)?;
            print!("{prompt}");
        }
    }
    Ok(())
}

fn cmd_llm(command: LlmCommand) -> Result<()> {
    match command {
        LlmCommand::Complete {
            task,
            format,
            prompt_file,
            sample,
            backend,
            fixtures,
            endpoint,
            api_key_env,
            log_dir,
        } => {
            let prompt = match (&task, &prompt_file) {
                (Some(task), None) => {
                    let spec = find_task(task)?;
                    build_prompt(spec, format.into(), &registry_plans()?)?
                }
                (None, Some(path)) => std::fs::read_to_string(path)?,
                _ => bail!("pass exactly one of --task or --prompt-file"),
            };
            let backend = match backend.as_str() {
                "replay" => Backend::Replay { dir: fixtures },
                "http" => Backend::Http {
                    endpoint: endpoint.ok_or_else(|| anyhow!("--endpoint required for http"))?,
                    api_key_env,
                    log_dir,
                },
                other => bail!("unknown backend `{other}` (replay|http)"),
            };
            let result = complete(&CompletionRequest::new(prompt, sample), &backend)?;
            print!("{}", result.text);
        }
    }
    Ok(())
}

fn load_train_config(args: &TrainArgs) -> Result<TrainConfig> {
    let mut config: TrainConfig = match &args.config {
        Some(path) => serde_json::from_slice(&std::fs::read(path)?)
            .with_context(|| format!("parsing {}", path.display()))?,
        None => TrainConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn write_train_outputs(
    dir: &Path,
    arch: Arch,
    config: &TrainConfig,
    outcome: &lw_core::train::TrainOutcome<Scalar>,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let ckpt_path = dir.join("checkpoint.json");
    lw_core::pcbc::save_checkpoint(
        &ckpt_path,
        &Checkpoint {
            version: CHECKPOINT_VERSION,
            arch,
            seed: config.seed,
            rng_counter: outcome.sampler_counter,
            params: outcome.params.clone(),
        },
    )?;
    let log_path = dir.join("train_log.csv");
    let mut log = String::from("step,loss,wall_ms\n");
    for entry in &outcome.log {
        log.push_str(&format!("{},{:.9},{}\n", entry.step, entry.loss, entry.wall_ms));
    }
    std::fs::write(&log_path, log)?;
    Ok(vec![ckpt_path, log_path])
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let arch = Arch::from_name(&args.arch)
        .ok_or_else(|| anyhow!("unknown arch `{}` (pcbc|dc)", args.arch))?;
    let config = load_train_config(&args)?;
    let plans = registry_plans()?;

    let data_configs: Vec<DataConfig> = match args.data.as_str() {
        "zero_shot" => vec![DataConfig::ZeroShot],
        "few_shot" => vec![DataConfig::FewShot],
        "one_shot" => match &args.target {
            Some(target) => vec![DataConfig::OneShot {
                target: target.clone(),
            }],
            None => list_tasks(TaskSet::Full20)
                .iter()
                .map(|t| DataConfig::OneShot {
                    target: t.name.clone(),
                })
                .collect(),
        },
        other => bail!("unknown data config `{other}` (zero_shot|few_shot|one_shot)"),
    };

    let mut manifest = RunManifest::new(
        &serde_json::json!({"cmd": "train", "args": &args, "config": &config}),
        vec![config.seed, config.demo_seed],
    )?;
    if let Some(path) = &args.config {
        manifest.add_input(path)?;
    }

    let multi = data_configs.len() > 1;
    for data in &data_configs {
        let outcome = train::<Scalar>(arch, data, &config, &plans)?;
        let dir = if multi {
            match data {
                DataConfig::OneShot { target } => args.out.join(target),
                _ => unreachable!(),
            }
        } else {
            args.out.clone()
        };
        for path in write_train_outputs(&dir, arch, &config, &outcome)? {
            manifest.add_output(&args.out, &path);
        }
        let last = outcome.log.last().map(|e| e.loss).unwrap_or(f64::NAN);
        eprintln!("{} {}: final loss {last:.6}", arch.name(), data.name());
    }
    manifest.write(&args.out)?;
    Ok(())
}

/// Evaluate a plan-fixture directory: best-of-k per task over the decodable
/// variants.
fn eval_plans_dir(
    dir: &Path,
    format: PlanFormat,
    tasks: &[&'static TaskSpec],
    episodes: usize,
    seed: u64,
) -> Result<Vec<EvalResult>> {
    let mut results = Vec::new();
    for task in tasks {
        let task_dir = dir.join(&task.name);
        if !task_dir.is_dir() {
            continue;
        }
        let mut entries: Vec<PathBuf> = std::fs::read_dir(&task_dir)?
            .map(|e| Ok(e?.path()))
            .collect::<Result<Vec<_>>>()?;
        entries.sort();
        let mut best: Option<EvalResult> = None;
        for path in entries {
            let text = std::fs::read_to_string(&path)?;
            let Ok(plan) = decode_plan(&text, format) else {
                continue;
            };
            let grounded = ground_plan(&plan, task);
            let Ok(policy) = GroundedPlanPolicy::new(&grounded, task) else {
                continue;
            };
            let Ok(mut rows) = evaluate::<Scalar>(&policy, "plan", 0, &[task], episodes, seed)
            else {
                continue;
            };
            let row = rows.remove(0);
            if best
                .as_ref()
                .map(|b| row.success_rate > b.success_rate)
                .unwrap_or(true)
            {
                best = Some(row);
            }
        }
        if let Some(row) = best {
            results.push(row);
        }
    }
    Ok(results)
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let tasks = match args.tasks.as_str() {
        "base" => list_tasks(TaskSet::Base10),
        "full" => list_tasks(TaskSet::Full20),
        name => vec![find_task(name)?],
    };
    let format = PlanFormat::from_name(&args.format)
        .ok_or_else(|| anyhow!("unknown plan format `{}`", args.format))?;

    let results: Vec<EvalResult> = match args.policy.as_str() {
        "scripted" => {
            let policy = ScriptedExpert::new()?;
            evaluate::<Scalar>(&policy, "scripted", 0, &tasks, args.episodes, args.seed)?
        }
        "random" => {
            let policy = RandomPolicy { seed: args.seed };
            evaluate::<Scalar>(&policy, "random", 0, &tasks, args.episodes, args.seed)?
        }
        "plan" => {
            let dir = args
                .plans_dir
                .as_ref()
                .ok_or_else(|| anyhow!("--plans-dir required for --policy plan"))?;
            eval_plans_dir(dir, format, &tasks, args.episodes, args.seed)?
        }
        "pcbc" => {
            let path = args
                .checkpoint
                .as_ref()
                .ok_or_else(|| anyhow!("--checkpoint required for --policy pcbc"))?;
            let checkpoint = lw_core::pcbc::load_checkpoint::<Scalar>(path)?;
            if checkpoint.arch != Arch::Pcbc {
                bail!("checkpoint is not a pcbc checkpoint");
            }
            let policy = PcbcPolicy::new(checkpoint.params, registry_plans()?)?;
            evaluate::<Scalar>(&policy, "pcbc", 0, &tasks, args.episodes, args.seed)?
        }
        "dc" => {
            let path = args
                .checkpoint
                .as_ref()
                .ok_or_else(|| anyhow!("--checkpoint required for --policy dc"))?;
            let checkpoint = lw_core::pcbc::load_checkpoint::<Scalar>(path)?;
            if checkpoint.arch != Arch::Dc {
                bail!("checkpoint is not a dc checkpoint");
            }
            let policy = DcPolicy::new(checkpoint.params, &tasks);
            evaluate::<Scalar>(&policy, "dc", 0, &tasks, args.episodes, args.seed)?
        }
        other => bail!("unknown policy `{other}` (scripted|random|plan|pcbc|dc)"),
    };

    let mut manifest = RunManifest::new(
        &serde_json::json!({"cmd": "eval", "args": &args}),
        vec![args.seed],
    )?;
    let run_id = manifest.config_hash[..12].to_string();
    let dir = args.out.join(&run_id);
    if let Some(path) = &args.checkpoint {
        manifest.add_input(path)?;
    }
    let files = write_report(&dir, &results)?;
    for file in &files {
        manifest.add_output(&dir, file);
    }
    manifest.write(&dir)?;
    for row in &results {
        println!("{},{},{:.4}", row.policy, row.task, row.success_rate);
    }
    eprintln!("report written to {}", dir.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let mut combined: Vec<EvalResult> = Vec::new();
    for input in &args.inputs {
        // Accept either raw EvalResult dumps or prior report rows.
        let bytes = std::fs::read(input)?;
        let results: Vec<EvalResult> = serde_json::from_slice(&bytes)
            .with_context(|| format!("parsing {}", input.display()))?;
        combined.extend(results);
    }
    if combined.is_empty() {
        bail!("no results in inputs");
    }
    let files = write_report(&args.out, &combined)?;
    for file in files {
        println!("{}", file.display());
    }
    Ok(())
}

fn cmd_selfcheck(full: bool) -> Result<()> {
    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // Gradient checks.
    let instances = if full { 10 } else { 2 };
    for arch in [Arch::Pcbc, Arch::Dc] {
        let mut worst = 0.0f64;
        for seed in 0..instances {
            let report = grad_check::<Scalar>(arch, seed, 1e-4);
            worst = worst.max(report.max_rel_err());
        }
        check(
            &format!("gradcheck.{} (max rel err {worst:.2e})", arch.name()),
            worst <= 1e-4,
        );
    }

    // Attention closed forms.
    let e8 = (8.0f64).exp();
    let uniform: Vec<Scalar> = attention_weights(&[false; 5]);
    let mut one_true_ok = true;
    for n in 2..=10 {
        let mut truths = vec![false; n];
        truths[0] = true;
        let w: Vec<Scalar> = attention_weights(&truths);
        let expected = e8 / (e8 + (n as f64 - 1.0));
        if (w[0] - expected).abs() > 1e-12 {
            one_true_ok = false;
        }
    }
    check(
        "attention.closed_forms",
        uniform.iter().all(|w| (w - 0.2).abs() < 1e-12) && one_true_ok,
    );

    // Edit distance oracle cases.
    check(
        "edit_distance.known_cases",
        edit_distance("kitten", "sitting") == 3
            && edit_distance("", "abc") == 3
            && edit_distance("abc", "abc") == 0,
    );

    // Parser round-trip over two tasks.
    let mut round_trip = true;
    for name in ["push", "drawer-open"] {
        let task = find_task(name)?;
        for sentence in supported_queries(task) {
            match parse_query(&sentence, task) {
                Ok(q) => {
                    if q.render() != sentence {
                        round_trip = false;
                    }
                }
                Err(_) => round_trip = false,
            }
        }
    }
    check("query.parse_render_round_trip", round_trip);

    // Expert smoke test.
    let expert = ScriptedExpert::new()?;
    let task = find_task("drawer-open")?;
    let results = evaluate::<Scalar>(&expert, "scripted", 0, &[task], 5, 0)?;
    check("expert.drawer_open_smoke", results[0].success_rate >= 0.8);

    if failures > 0 {
        bail!("{failures} selfcheck(s) failed");
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let result = match cli.command {
        Command::Tasks { command } => cmd_tasks(command),
        Command::Demos { command } => cmd_demos(command),
        Command::Query { command } => cmd_query(command),
        Command::Plan { command } => cmd_plan(command),
        Command::Llm { command } => cmd_llm(command),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Report(args) => cmd_report(args),
        Command::Selfcheck { full } => cmd_selfcheck(full),
    };
    if let Err(err) = result {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}
