//! `galtor`: scenario-driven simulations and torsor algebra on the
//! command line.
//!
//! Exit codes: 0 on success, 1 on validation errors (bad flags, malformed
//! or mismatching scenarios, invalid initial data), 2 on numerical
//! failures (gravitational singularities, degenerate inertia, failed
//! self checks).

mod run;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use run::CliError;

#[derive(Parser)]
#[command(
    name = "galtor",
    version,
    about = "Galilean torsor mechanics: particles, rigid bodies, and observer changes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a freely falling particle and write trajectory + report.
    SimulateParticle(RunArgs),
    /// Integrate a free rigid body and write trajectory + report.
    SimulateRigidbody(RunArgs),
    /// Transform a torsor by component law and matrix law, print both.
    TransformTorsor(ScenarioArgs),
    /// Compare a run against its re-integration in a moving frame.
    CheckCovariance(CheckArgs),
    /// Print mass, spin, spin norm, and isotropy dimension of a torsor.
    Invariants(ScenarioArgs),
    /// Run the embedded oracle suite on seeded random data.
    SelfTest(SelfTestArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Directory for the CSV/JSON outputs.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the scenario's time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the scenario's step count.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Override the scenario's step count.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct SelfTestArgs {
    /// Seed for the suite's random data.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::SimulateParticle(args) => {
            let scenario = run::load_scenario(&args.scenario)?;
            run::simulate_particle(scenario, &args.out, args.dt, args.steps)
        }
        Command::SimulateRigidbody(args) => {
            let scenario = run::load_scenario(&args.scenario)?;
            run::simulate_rigidbody(scenario, &args.out, args.dt, args.steps)
        }
        Command::TransformTorsor(args) => {
            let scenario = run::load_scenario(&args.scenario)?;
            run::transform_torsor(scenario)
        }
        Command::CheckCovariance(args) => {
            let scenario = run::load_scenario(&args.scenario)?;
            run::check_covariance(scenario, args.dt, args.steps)
        }
        Command::Invariants(args) => {
            let scenario = run::load_scenario(&args.scenario)?;
            run::invariants(scenario)
        }
        Command::SelfTest(args) => run::self_test(args.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version are not failures; everything else is
            // a validation problem and exits 1.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
