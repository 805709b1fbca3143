//! Scenario-driven command line for GBDT Darboux transformations.
//!
//! Every command reads a declarative JSON scenario, runs one pipeline and
//! writes CSV artifacts plus a verification report (`report.json`) into the
//! output directory. Runs are fully deterministic: repeated invocations on
//! the same scenario produce byte-identical files.
//!
//! Exit codes: 0 success, 1 schema/usage error, 2 triple-identity
//! violation, 3 singular-S gap where invertibility is required, 4 residual
//! tolerance exceeded.

mod commands;
mod output;
mod scenario;

use clap::{Args, Parser, Subcommand};
use commands::{CliError, RunContext};
use scenario::Scenario;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gbdt",
    about = "GBDT Darboux transformations of first-order spectral systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Scenario JSON file.
    scenario: PathBuf,
    /// Output directory for CSV artifacts and report.json.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the default residual tolerances of the verification
    /// checks (and the propagation drift gate).
    #[arg(long)]
    tol: Option<f64>,
    /// Overrides the scenario grid step count.
    #[arg(long)]
    grid_steps: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the parameter triple against its matrix identity.
    Validate(RunArgs),
    /// Integrate the generator data and dump the path.
    Propagate(RunArgs),
    /// Emit transformed coefficients (and the gauge-normalised form).
    Transform(RunArgs),
    /// Weyl disk forms, Möbius blocks and mapped candidates.
    Weyl(RunArgs),
    /// Explicit dynamical solutions, energies and diffusion residuals.
    Dynamic(RunArgs),
    /// Closed-form pipeline of the indefinite sign-weight model case.
    IndefModel(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Validate(a)
            | Command::Propagate(a)
            | Command::Transform(a)
            | Command::Weyl(a)
            | Command::Dynamic(a)
            | Command::IndefModel(a) => a,
        }
    }
}

fn run(cli: &Cli) -> Result<i32, CliError> {
    let args = cli.command.args();
    let scenario = Scenario::from_path(&args.scenario)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Schema(format!("cannot create {}: {e}", args.out.display())))?;
    let ctx = RunContext {
        scenario: &scenario,
        out_dir: &args.out,
        tol: args.tol,
        grid_steps: args.grid_steps,
    };
    match &cli.command {
        Command::Validate(_) => commands::validate::run(&ctx),
        Command::Propagate(_) => commands::propagate::run(&ctx),
        Command::Transform(_) => commands::transform::run(&ctx),
        Command::Weyl(_) => commands::weyl::run(&ctx),
        Command::Dynamic(_) => commands::dynamic::run(&ctx),
        Command::IndefModel(_) => commands::indef_model::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            eprintln!("gbdt: verification checks failed (see report.json)");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("gbdt: {}", e.message());
            ExitCode::from(e.code() as u8)
        }
    }
}
