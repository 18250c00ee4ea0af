mod commands;
mod config;
mod error;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::config::{Experiment, Issues, SimulateConfig};
use crate::error::CliError;
use crate::output::{RunDir, VERSION};

/// Environment variable naming the default output root.
const OUT_ENV: &str = "QMLKIT_OUT";

#[derive(Parser)]
#[command(name = "qmlkit", version, about = "Seeded quantum machine-learning experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Experiment config (TOML). `simulate` also accepts a circuit JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Master seed; overrides the config's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory. Defaults to the config's `out`, then
    /// `$QMLKIT_OUT/<command>`, then `runs/<command>`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel evaluation (results do not depend on it).
    #[arg(long)]
    threads: Option<usize>,
    /// Check the config and exit without running.
    #[arg(long)]
    validate_only: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train a variational classifier/regressor.
    TrainVqc(RunArgs),
    /// Train a QLSTM on next-step prediction of a damped sine.
    TrainQlstm(RunArgs),
    /// Fit the readout of a frozen random QLSTM.
    TrainReservoir(RunArgs),
    /// Train a fast-weight programmer on sequence tracking.
    TrainQfwp(RunArgs),
    /// Generate a classical network's weights from a small circuit.
    QtCompress(RunArgs),
    /// Deep-Q learning on a grid world with a circuit Q-function.
    Qrl(RunArgs),
    /// Federated averaging over in-process clients.
    FedSim(RunArgs),
    /// Evolutionary architecture search over circuit blocks.
    QasEvo(RunArgs),
    /// Reinforcement-learned gate placement.
    QasRl(RunArgs),
    /// Differentiable search over a softmax ensemble of circuits.
    QasDiff(RunArgs),
    /// Simulate a circuit document and print its basis probabilities.
    Simulate(RunArgs),
}

type Runner<E> = fn(&E, &mut RunDir) -> Result<(), CliError>;

fn load<E: Experiment>(args: &RunArgs) -> Result<E, CliError> {
    let mut cfg: E = config::load(&args.config)?;
    let base = args.config.parent().unwrap_or(Path::new("."));
    cfg.resolve_paths(base);
    Ok(cfg)
}

fn output_root(args: &RunArgs, cfg_out: Option<&Path>, name: &str) -> PathBuf {
    if let Some(p) = &args.out {
        return p.clone();
    }
    if let Some(p) = cfg_out {
        return p.to_path_buf();
    }
    match std::env::var_os(OUT_ENV) {
        Some(root) if !root.is_empty() => PathBuf::from(root).join(name),
        _ => PathBuf::from("runs").join(name),
    }
}

fn execute<E: Experiment>(args: &RunArgs, mut cfg: E, run: Runner<E>) -> Result<(), CliError> {
    if let Some(seed) = args.seed {
        *cfg.seed_mut() = seed;
    }
    let mut issues = Issues::default();
    if args.threads == Some(0) {
        issues.push("--threads", "must be at least 1");
    }
    cfg.validate(&mut issues);
    if !issues.is_empty() {
        return Err(CliError::Invalid(issues.0));
    }
    if args.validate_only {
        println!("{}: valid {} config", args.config.display(), E::NAME);
        return Ok(());
    }
    let resolved = toml::to_string(&cfg).map_err(|e| CliError::Runtime(format!("cannot echo config: {e}")))?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let root = output_root(args, cfg.out(), E::NAME);
    let seed = *cfg.seed_mut();
    let mut dir = RunDir::create(&root, &resolved)?;
    dir.event(json!({"event": "start", "command": E::NAME, "seed": seed, "tool": VERSION}))?;
    run(&cfg, &mut dir)?;
    dir.finish()?;
    eprintln!("outputs written to {}", root.display());
    Ok(())
}

fn dispatch<E: Experiment>(args: &RunArgs, run: Runner<E>) -> Result<(), CliError> {
    execute(args, load::<E>(args)?, run)
}

fn simulate(args: &RunArgs) -> Result<(), CliError> {
    let is_json = args.config.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let cfg = if is_json {
        SimulateConfig {
            seed: 0,
            out: None,
            circuit: args.config.clone(),
            inputs: Vec::new(),
            params: Vec::new(),
            shots: 0,
        }
    } else {
        load(args)?
    };
    execute(args, cfg, commands::simulate::simulate)
}

fn main() -> ExitCode {
    use commands::*;
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::TrainVqc(a) => dispatch(a, models::train_vqc),
        Command::TrainQlstm(a) => dispatch(a, models::train_qlstm),
        Command::TrainReservoir(a) => dispatch(a, models::train_reservoir),
        Command::TrainQfwp(a) => dispatch(a, models::train_qfwp),
        Command::QtCompress(a) => dispatch(a, models::qt_compress),
        Command::Qrl(a) => dispatch(a, rl::qrl),
        Command::FedSim(a) => dispatch(a, fed::fed_sim),
        Command::QasEvo(a) => dispatch(a, qas::qas_evo),
        Command::QasRl(a) => dispatch(a, qas::qas_rl),
        Command::QasDiff(a) => dispatch(a, qas::qas_diff),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
