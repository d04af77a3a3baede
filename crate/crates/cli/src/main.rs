//! `semtwin` scenario runner: ingest, reason, optimize, simulate, eval.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::ScenarioConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, configuration or missing inputs.
    #[error("{0}")]
    Usage(String),
    /// Input that is well-formed but rejected by the model.
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}

/// What a successful command reports back.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// `reason` found conflicts.
    Conflicts,
    /// `optimize` could not reach a feasible layout.
    Infeasible,
}

#[derive(Debug, Parser)]
#[command(name = "semtwin", version, about = "Semantic digital twin scenario runner")]
struct Cli {
    /// Scenario INI file; relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// RNG seed (overrides `opt.seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Progress on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Overrides {
    /// Config overrides as `--key value` or `--section.key value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    rest: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract documents through the replay store into a graph and rule file.
    Ingest(Overrides),
    /// Check a layout against the compiled rules; exits 3 when conflicts exist.
    Reason(Overrides),
    /// Grid initialization followed by wake-aware layout optimization.
    Optimize(Overrides),
    /// Replay a hurricane track over the farm.
    Simulate(Overrides),
    /// Inter-coder agreement and extraction accuracy.
    Eval(Overrides),
}

fn build_config(cli: &Cli, overrides: &[String]) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::empty(&std::env::current_dir().map_err(|e| CliError::Usage(e.to_string()))?),
    };
    cfg.apply_overrides(overrides)?;
    if let Some(out) = &cli.out {
        let out = std::path::absolute(out).map_err(|e| CliError::Usage(e.to_string()))?;
        cfg.set("output.dir", out.display().to_string())?;
    }
    if let Some(seed) = cli.seed {
        cfg.set("opt.seed", seed.to_string())?;
    }
    cfg.check_paths()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (Command::Ingest(o) | Command::Reason(o) | Command::Optimize(o) | Command::Simulate(o) | Command::Eval(o)) =
        &cli.command;
    let cfg = build_config(cli, &o.rest)?;
    let ctx = commands::Context { cfg, verbose: cli.verbose };
    match cli.command {
        Command::Ingest(_) => commands::ingest(&ctx),
        Command::Reason(_) => commands::reason(&ctx),
        Command::Optimize(_) => commands::optimize(&ctx),
        Command::Simulate(_) => commands::simulate(&ctx),
        Command::Eval(_) => commands::eval(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Conflicts) => ExitCode::from(3),
        Ok(Outcome::Infeasible) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
