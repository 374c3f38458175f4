//! Configuration text, output files, benchmark cases and the command line.
//!
//! Exit codes: `0` on completion, `2` when the run stops on a detected
//! instability (the report is still written), `1` on configuration or I/O
//! errors.

pub mod cases;
pub mod config_text;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;
use log::debug;

use crate::config::{CaseKind, SimConfig};
use crate::error::{Error, Result};
use crate::stepper::{advance, RunOutcome};

pub use cases::{run_convergence, run_interpolation_study};
pub use config_text::{parse_config, parse_config_with, to_config_text};
pub use output::{write_instability_report, write_snapshot, write_timeseries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_UNSTABLE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "vlasov-spectral", version, about = "Semi-Lagrangian spectral Vlasov-Poisson solver")]
struct Cli {
    /// `key=value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Case name; overrides the `case` key of the configuration.
    #[arg(long)]
    case: Option<String>,
    /// Output directory; overrides `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reserved; the solver is deterministic.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress the summary line and warnings.
    #[arg(long)]
    quiet: bool,
}

/// How a CLI run ended.
#[derive(Debug, Clone, PartialEq)]
pub struct CliSummary {
    pub line: String,
    pub exit_code: i32,
}

fn load_config(cli: &Cli) -> Result<SimConfig> {
    let case = cli.case.as_deref().map(str::parse::<CaseKind>).transpose()?;
    let text = match &cli.config {
        Some(p) => std::fs::read_to_string(p)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", p.display())))?,
        None => String::new(),
    };
    let mut config = parse_config_with(&text, case)?;
    if let Some(out) = &cli.out {
        config.out_dir = out.clone();
    }
    Ok(config)
}

fn run_simulation(config: &SimConfig, out: &Path, started: Instant) -> Result<CliSummary> {
    let run = advance(config)?;
    write_timeseries(&run.records, &out.join("timeseries.csv"))?;
    for snap in &run.snapshots {
        write_snapshot(&snap.state, &run.grid, snap.t, &out.join(output::snapshot_file_name(snap.t)))?;
    }
    let first = &run.records[0];
    let last = run.records.last().unwrap_or(first);
    let mass_drift = ((last.mass - first.mass) / first.mass).abs();
    let head = format!(
        "{} {} N={} M={} {}: {} steps to t={}, mass drift {:.3e}, energy drift {:.3e}, wall {:.2}s",
        config.case,
        config.basis,
        config.n,
        config.m,
        config.stepper,
        run.steps,
        last.t,
        mass_drift,
        last.energy_drift,
        started.elapsed().as_secs_f64()
    );
    Ok(match run.outcome {
        RunOutcome::Completed => CliSummary {
            line: head,
            exit_code: EXIT_OK,
        },
        RunOutcome::Unstable(report) => {
            write_instability_report(&report, &out.join("instability.txt"))?;
            CliSummary {
                line: format!("{head}; unstable: {report}"),
                exit_code: EXIT_UNSTABLE,
            }
        }
    })
}

/// Run the case described by `config`, writing all outputs under its
/// `out_dir`.
pub fn execute(config: &SimConfig) -> Result<CliSummary> {
    let started = Instant::now();
    let out = config.out_dir.as_path();
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("config.txt"), to_config_text(config))?;
    match config.case {
        CaseKind::TwoStream | CaseKind::Custom => run_simulation(config, out, started),
        CaseKind::InterpolationStudy => {
            let rows = run_interpolation_study(config, out)?;
            let worst = rows.iter().map(|r| r.max_error).fold(0.0, f64::max);
            Ok(CliSummary {
                line: format!(
                    "interpolation_study: {} tables, largest sup error {:.3e}, wall {:.2}s",
                    rows.len(),
                    worst,
                    started.elapsed().as_secs_f64()
                ),
                exit_code: EXIT_OK,
            })
        }
        CaseKind::ManufacturedConvergence => {
            let rows = match run_convergence(config, out) {
                Ok(rows) => rows,
                Err(Error::Instability(r)) => {
                    write_instability_report(&r, &out.join("instability.txt"))?;
                    return Ok(CliSummary {
                        line: format!("manufactured_convergence: unstable: {r}"),
                        exit_code: EXIT_UNSTABLE,
                    });
                }
                Err(e) => return Err(e),
            };
            let order = |s| {
                let sel: Vec<_> = rows.iter().filter(|r| r.stepper == s).cloned().collect();
                cases::fitted_order(&sel)
            };
            Ok(CliSummary {
                line: format!(
                    "manufactured_convergence {}: euler order {:.3}, bdf2 order {:.3}, wall {:.2}s",
                    config.basis,
                    order(crate::config::StepperKind::Euler),
                    order(crate::config::StepperKind::Bdf2),
                    started.elapsed().as_secs_f64()
                ),
                exit_code: EXIT_OK,
            })
        }
    }
}

/// Parse `args` (program name first), run, and return the process exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let level = if cli.quiet { "error" } else { "warn" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    if let Some(seed) = cli.seed {
        debug!("--seed {seed} ignored: the solver has no random components");
    }
    let config = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match execute(&config) {
        Ok(summary) => {
            if !cli.quiet {
                println!("{}", summary.line);
            }
            summary.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}
