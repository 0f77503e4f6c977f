//! Command-line front end: `check` runs one criterion from a config file,
//! `example` runs a built-in preset end to end, `plot` renders a report's
//! series to SVG. Exit codes follow the verdict contract: 0 supported,
//! 2 refuted, 3 inconclusive, 1 for any error before a verdict exists.

mod checks;
mod config;
mod plot;
mod presets;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use sectorlab::proxy::CheckVerdict;
use sectorlab::report::{exit_code, RunReport};

use config::ExperimentConfig;

/// Numerical laboratory for weighted translation and composition semigroups
/// on sectors of the complex plane.
#[derive(Parser)]
#[command(name = "sectorlab", version, disable_help_subcommand = true)]
struct Cli {
    /// Directory reports and plots are written to [env: SECTORLAB_OUT; default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one criterion from an experiment config.
    Check {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// One of: dov, dovs, oma, f-fhc, athens, backspace, qwea, nasser-tube.
        #[arg(long)]
        criterion: String,
    },
    /// Run a built-in example preset end to end.
    Example {
        /// Preset name, e.g. II1; `--name list` prints the catalog.
        #[arg(long)]
        name: String,
    },
    /// Render every series of a saved report to SVG files.
    Plot {
        /// Report JSON produced by check or example.
        #[arg(long = "in")]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's usage-error exit code collides with the refuted verdict;
            // argument problems exit 1 here, help and version keep 0.
            let _ = e.print();
            return if e.exit_code() == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("SECTORLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let dir = out_dir(cli.out);
    match cli.command {
        Command::Check { config, criterion } => {
            let text = fs::read_to_string(&config)
                .with_context(|| format!("cannot read config {}", config.display()))?;
            let cfg: ExperimentConfig = serde_json::from_str(&text)
                .with_context(|| format!("config {} does not match the schema", config.display()))?;
            let report = checks::run_criterion(&cfg, &criterion)?;
            write_report(&report, &dir, "report.json", "summary.csv")?;
            print_table(&report);
            Ok(exit_code(report.verdict) as u8)
        }
        Command::Example { name } => {
            if name == "list" {
                for preset in presets::PRESETS {
                    println!("{preset}");
                }
                return Ok(0);
            }
            let report = presets::run_preset(&name)?;
            write_report(
                &report,
                &dir,
                &format!("{name}-report.json"),
                &format!("{name}-summary.csv"),
            )?;
            print_table(&report);
            Ok(exit_code(report.verdict) as u8)
        }
        Command::Plot { input } => {
            let text = fs::read_to_string(&input)
                .with_context(|| format!("cannot read report {}", input.display()))?;
            let report = RunReport::from_json(&text)
                .with_context(|| format!("{} is not a report", input.display()))?;
            let written = plot::write_all(&report, &dir)?;
            if written.is_empty() {
                println!("report has no series; nothing to plot");
            }
            for path in &written {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}

fn write_report(
    report: &RunReport,
    dir: &Path,
    json_name: &str,
    csv_name: &str,
) -> anyhow::Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let json_path = dir.join(json_name);
    fs::write(&json_path, report.to_json()?)
        .with_context(|| format!("cannot write {}", json_path.display()))?;
    let csv_path = dir.join(csv_name);
    fs::write(&csv_path, report.summary_csv())
        .with_context(|| format!("cannot write {}", csv_path.display()))?;
    println!("wrote {}", json_path.display());
    println!("wrote {}", csv_path.display());
    Ok(())
}

fn verdict_word(v: CheckVerdict) -> &'static str {
    match v {
        CheckVerdict::Supported => "supported",
        CheckVerdict::Refuted => "refuted",
        CheckVerdict::Inconclusive => "inconclusive",
    }
}

fn print_table(report: &RunReport) {
    println!("{}", report.subject);
    for row in &report.rows {
        println!("  [{:>12}] {:<20} {}", verdict_word(row.verdict), row.stage, row.claim);
    }
    println!("overall: {}", verdict_word(report.verdict));
}
