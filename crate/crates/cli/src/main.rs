//! `zsdv`: runs verification scenarios for two-variable zero-sum games.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 bad scenario or
//! flags, 3 a solver did not converge.

mod checks;
mod report;
mod scenario;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context as _;
use clap::{Parser, Subcommand};

use checks::Setup;
use report::{CheckReport, Report, Status, SCHEMA_VERSION};
use scenario::{CheckName, Format, Scenario};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_BAD_INPUT: u8 = 2;
const EXIT_NO_CONVERGENCE: u8 = 3;

#[derive(Parser)]
#[command(name = "zsdv", version, about = "Verify equilibria of symmetric zero-sum games with two strategic variables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the checks of a scenario file.
    Run(RunArgs),
    /// List the available checks and what each verifies.
    ListChecks,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Check to run; repeat to select several. Overrides the scenario's list.
    #[arg(long = "check", value_name = "NAME", value_parser = parse_check)]
    checks: Vec<CheckName>,
    /// Solver tolerance; overrides `tolerances.solver`.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Verify all 2^n variable assignments instead of one per m.
    #[arg(long)]
    exhaustive_regimes: bool,
    /// Directory for report.json and summary.txt.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Iteration cap for equilibrium searches.
    #[arg(long, env = "ZSDV_MAX_ITER", hide = true)]
    max_iter: Option<usize>,
}

fn parse_check(name: &str) -> Result<CheckName, String> {
    CheckName::parse(name).ok_or_else(|| {
        let known: Vec<&str> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
        format!("unknown check `{name}`, expected one of {}", known.join(", "))
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_BAD_INPUT) } else { ExitCode::SUCCESS };
        }
    };
    match cli.command {
        Command::ListChecks => {
            for check in CheckName::ALL {
                println!("{:<13} {}", check.as_str(), check.provenance());
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(args) {
            Ok(code) => ExitCode::from(code),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::from(EXIT_BAD_INPUT)
            }
        },
    }
}

fn run(args: RunArgs) -> anyhow::Result<u8> {
    let mut scenario = match Scenario::load(&args.scenario) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", args.scenario.display());
            return Ok(EXIT_BAD_INPUT);
        }
    };
    if let Some(tol) = args.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            eprintln!("error: --tol must be positive, got {tol}");
            return Ok(EXIT_BAD_INPUT);
        }
        scenario.tolerances.solver = tol;
    }
    if !args.checks.is_empty() {
        scenario.checks = Some(args.checks.clone());
    }
    let selected = scenario.selected_checks();
    if selected.contains(&CheckName::ClosedForms) && scenario.model != scenario::Model::Oligopoly {
        eprintln!("error: check closed-forms needs the oligopoly model");
        return Ok(EXIT_BAD_INPUT);
    }
    let format = args.format.or(scenario.format).unwrap_or_default();

    let setup = Setup::new(scenario.clone(), args.max_iter, args.exhaustive_regimes)?;
    if setup.opts.max_iter == 0 {
        eprintln!("error: ZSDV_MAX_ITER must be at least 1");
        return Ok(EXIT_BAD_INPUT);
    }

    // checks run concurrently; the map keeps the report ordered by name
    let results: BTreeMap<&'static str, CheckReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|check| {
                let setup = &setup;
                (*check, scope.spawn(move || checks::run(setup, *check)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(check, handle)| {
                let result = handle.join().expect("check thread panicked");
                let report = match result {
                    Ok(outcome) => CheckReport {
                        status: if outcome.passed { Status::Pass } else { Status::Fail },
                        provenance: check.provenance(),
                        error: None,
                        details: outcome.details,
                    },
                    Err(e) => CheckReport {
                        status: Status::Error,
                        provenance: check.provenance(),
                        error: Some(e.to_string()),
                        details: serde_json::Value::Null,
                    },
                };
                (check.as_str(), report)
            })
            .collect()
    });

    let report = Report {
        schema_version: SCHEMA_VERSION,
        model: scenario.model,
        params: scenario.params,
        tolerances: scenario.tolerances,
        max_iter: setup.opts.max_iter,
        exhaustive_regimes: args.exhaustive_regimes,
        passed: results.values().all(|c| c.status == Status::Pass),
        checks: results,
    };
    let json = report.to_json();
    let text = report.to_text();
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("report.json"), &json).context("writing report.json")?;
        std::fs::write(dir.join("summary.txt"), &text).context("writing summary.txt")?;
    }
    match format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{text}"),
    }

    let errored = report.failing(Status::Error);
    let failed = report.failing(Status::Fail);
    if !errored.is_empty() {
        eprintln!("solver failure in: {}", errored.join(", "));
        return Ok(EXIT_NO_CONVERGENCE);
    }
    if !failed.is_empty() {
        eprintln!("failed checks: {}", failed.join(", "));
        return Ok(EXIT_CHECK_FAILED);
    }
    Ok(0)
}
