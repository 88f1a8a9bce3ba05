//! `bjj-lgi`: runs the double-well Leggett-Garg experiments and writes
//! their results as CSV or JSON.

mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Sink;

#[derive(Debug, Parser)]
#[command(name = "bjj-lgi", version, about = "Leggett-Garg tests in a Bose-Josephson junction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// P(n_L, t) and ⟨z⟩(t) from a Fock state.
    Evolve(RunConfig),
    /// Collapsed correlators and LG over τ and either Λ or n_L(0).
    LgScan(RunConfig),
    /// ⟨Q(2τ)⟩ with and without a measurement at τ.
    MeasurementEffect(RunConfig),
    /// Edge doublet, NOON overlaps and the Rabi-regime LG.
    Rabi(RunConfig),
    /// Closed-form non-interacting results against the numerics, and τ₀.
    AnalyticCheck(RunConfig),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Evolve(_) => "evolve",
            Command::LgScan(_) => "lg-scan",
            Command::MeasurementEffect(_) => "measurement-effect",
            Command::Rabi(_) => "rabi",
            Command::AnalyticCheck(_) => "analytic-check",
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    let name = command.name();
    let (Command::Evolve(flags)
    | Command::LgScan(flags)
    | Command::MeasurementEffect(flags)
    | Command::Rabi(flags)
    | Command::AnalyticCheck(flags)) = &command;
    let cfg = flags.clone().load()?;
    let workers = cfg.workers()?;
    let sink = Sink::new(cfg.out.clone(), cfg.format())?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {workers} workers: {e}")))?;
    let extra: Value = pool.install(|| match &command {
        Command::Evolve(_) => commands::evolve(&cfg, &sink, workers),
        Command::LgScan(_) => commands::lg_scan(&cfg, &sink, workers),
        Command::MeasurementEffect(_) => commands::measurement_effect(&cfg, &sink, workers),
        Command::Rabi(_) => commands::rabi(&cfg, &sink),
        Command::AnalyticCheck(_) => commands::analytic_check(&cfg, &sink, workers),
    })?;
    let mut body = json!({ "command": name, "config": cfg.resolved() });
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.extend(e);
    }
    sink.sidecar(&body)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bjj-lgi: {e}");
            e.exit_code()
        }
    }
}
