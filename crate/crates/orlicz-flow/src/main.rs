//! Command-line driver.
//!
//! ```text
//! orlicz-flow run   --config flow.json [--check] [--out DIR]
//! orlicz-flow table --config flow.json
//! orlicz-flow probe --potential bp_dual
//! ```
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 solver failure,
//! 4 failed acceptance check in `--check` mode.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orlicz_flow::config::{ExperimentConfig, ResolvedExperiment};
use orlicz_flow::runner::{convergence_table, probe_potential, run_experiment};
use orlicz_flow::{check, Error};

#[derive(Parser)]
#[command(
    name = "orlicz-flow",
    version,
    about = "Doubly nonlinear gradient flows by minimizing movements",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve the configured problem once per step size and write
    /// trajectory.csv, edb.json, and summary.json per run
    Run {
        /// JSON experiment configuration
        #[arg(long)]
        config: PathBuf,
        /// Run the built-in acceptance suite against baked-in thresholds
        /// instead of the configured runs (writes check_report.json)
        #[arg(long)]
        check: bool,
        /// Override the configured output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the step-size convergence table (needs a preset with a
    /// closed-form reference and at least three step sizes)
    Table {
        /// JSON experiment configuration
        #[arg(long)]
        config: PathBuf,
    },
    /// Print doubling, superlinearity, and coercivity reports for a named
    /// potential (e.g. power:2, bp_primal, damage_dual)
    Probe {
        /// Potential name, with numeric argument after `:` where required
        #[arg(long)]
        potential: String,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn load(config: &Path, out: Option<PathBuf>) -> Result<ResolvedExperiment, Error> {
    let mut exp = ExperimentConfig::from_path(config)?.resolve()?;
    if let Some(dir) = out {
        exp.output_dir = dir;
    }
    Ok(exp)
}

fn dispatch(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Run {
            config,
            check: check_mode,
            out,
        } => {
            let exp = load(&config, out)?;
            if check_mode {
                return run_checks(&exp);
            }
            let outcome = run_experiment(&exp)?;
            for r in &outcome.records {
                match &r.failure {
                    None => println!("tau = {:e}: ok ({})", r.tau, r.dir.display()),
                    Some(msg) => {
                        println!("tau = {:e}: FAILED ({}): {msg}", r.tau, r.dir.display())
                    }
                }
            }
            Ok(if outcome.any_failed() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Table { config } => {
            print!("{}", convergence_table(&load(&config, None)?)?);
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Probe { potential } => {
            print!("{}", probe_potential(&potential)?);
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_checks(exp: &ResolvedExperiment) -> Result<ExitCode, Error> {
    let results = check::run_all();
    std::fs::create_dir_all(&exp.output_dir)?;
    std::fs::write(
        exp.output_dir.join("check_report.json"),
        check::render_report(&results),
    )?;
    for r in &results {
        println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    let passed = results.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria pass", results.len());
    Ok(if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}
