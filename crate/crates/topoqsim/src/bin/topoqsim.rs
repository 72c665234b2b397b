//! Config-driven experiment runner. Every subcommand reads a key=value
//! config file, applies the command-line overrides, runs the experiment,
//! writes the full report to the output path and a per-check summary to
//! stdout. Exit status: 0 when every check passes, 1 when any check fails,
//! 2 on config or I/O problems.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use topoqsim::harness::{parse_config_for, run, Experiment};

#[derive(Parser)]
#[command(
    name = "topoqsim",
    version,
    about = "Majorana-vortex quantum computation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Path to the key=value config file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the report output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Majorana and braid-group identities on dense Fock spaces.
    VerifyAlgebra(RunArgs),
    /// Braid words for the standard gates, plus the closure census.
    SynthBraids(RunArgs),
    /// Probabilistic entanglement generation between two vortex qubits.
    RunEg(RunArgs),
    /// CHSH test on the generated pairs, exact and sampled.
    RunChsh(RunArgs),
    /// Measurement-based deterministic controlled-phase gate.
    RunCphase(RunArgs),
    /// Controlled-collision phase for the configured pulse.
    CollisionPhase(RunArgs),
    /// Adjust one pulse parameter until the phase hits its target.
    Calibrate(RunArgs),
    /// Residuals for the whole universal gate set in one place.
    UniversalReport(RunArgs),
}

impl Command {
    fn split(self) -> (Experiment, RunArgs) {
        match self {
            Command::VerifyAlgebra(a) => (Experiment::VerifyAlgebra, a),
            Command::SynthBraids(a) => (Experiment::SynthBraids, a),
            Command::RunEg(a) => (Experiment::RunEg, a),
            Command::RunChsh(a) => (Experiment::RunChsh, a),
            Command::RunCphase(a) => (Experiment::RunCphase, a),
            Command::CollisionPhase(a) => (Experiment::CollisionPhase, a),
            Command::Calibrate(a) => (Experiment::Calibrate, a),
            Command::UniversalReport(a) => (Experiment::UniversalReport, a),
        }
    }
}

fn main() -> ExitCode {
    let (experiment, args) = Cli::parse().command.split();
    match execute(experiment, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<bool, String> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| format!("cannot read {}: {e}", args.config.display()))?;
    let mut cfg = parse_config_for(&text, experiment).map_err(|e| e.to_string())?;
    cfg.apply_overrides(args.seed, args.trials, args.out)
        .map_err(|e| e.to_string())?;

    let report = run(&cfg).map_err(|e| e.to_string())?;

    let out = cfg
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-report.txt", experiment.name())));
    std::fs::write(&out, report.render())
        .map_err(|e| format!("cannot write {}: {e}", out.display()))?;

    print!("{}", report.summary());
    println!("report: {}", out.display());
    Ok(report.passed())
}
