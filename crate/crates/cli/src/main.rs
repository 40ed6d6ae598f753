use std::path::{Path, PathBuf};
use std::process::ExitCode;

use billiards_cli::{
    export_trajectories, merge_reports, run_cohomology, run_search, verify_export, CliError,
    ExperimentConfig, RunReport, CLOSURE_TOL,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "billiards",
    version,
    about = "Periodic billiard trajectory search and F_p cohomology checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multistart search described by a TOML config.
    Search {
        config: PathBuf,
        /// Overrides `report_path` from the config.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Overrides `export_path` from the config.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Betti tables and index record for G(R^d, p) and G(S^{d-1}, p).
    Cohomology { d: usize, p: usize },
    /// Re-shoot every trajectory of an export file.
    Verify { export: PathBuf },
    /// Report utilities.
    Report {
        #[command(subcommand)]
        action: ReportAction,
    },
}

#[derive(Subcommand)]
enum ReportAction {
    /// Pool reports of the same body and period and re-deduplicate.
    Merge {
        #[arg(required = true, num_args = 2..)]
        inputs: Vec<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn summarize(r: &RunReport) {
    println!(
        "d={} p={} seed={} starts={} converged={} classes={} continuum={} bound={} verdict={}",
        r.d,
        r.p,
        r.seed,
        r.stats.starts,
        r.stats.converged,
        r.certified_count,
        r.continuum.len(),
        r.bound,
        r.verdict.as_str()
    );
    for c in &r.classes {
        println!(
            "  class     perimeter {:.12}  members {}",
            c.perimeter, c.members
        );
    }
    for f in &r.continuum {
        println!(
            "  continuum perimeter {:.12}  members {}",
            f.perimeter, f.members
        );
    }
    eprintln!("wall clock {:.2} s", r.timing.wall_clock_secs);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Search {
            config,
            report,
            export,
        } => {
            let cfg = ExperimentConfig::load(&config)?;
            let r = run_search(&cfg)?;
            if let Some(path) = report.or_else(|| cfg.report_path.clone()) {
                write(&path, &r.to_json())?;
            }
            if let Some(path) = export.or_else(|| cfg.export_path.clone()) {
                export_trajectories(&r, &path)?;
            }
            summarize(&r);
            Ok(r.verdict.exit_code())
        }
        Command::Cohomology { d, p } => {
            let r = run_cohomology(d, p)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&r).expect("report serializes")
            );
            Ok(if r.all_ok() { 0 } else { 1 })
        }
        Command::Verify { export } => {
            let outcome = verify_export(&export)?;
            for (i, c) in outcome.closure.iter().enumerate() {
                let tag = if *c <= CLOSURE_TOL { "ok" } else { "FAIL" };
                println!("record {:>4}  closure {c:.3e}  {tag}", i + 1);
            }
            Ok(if outcome.passed { 0 } else { 1 })
        }
        Command::Report {
            action: ReportAction::Merge { inputs, output },
        } => {
            let reports = inputs
                .iter()
                .map(|p| {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| CliError::Io(p.display().to_string(), e))?;
                    RunReport::from_json(&text)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let merged = merge_reports(&reports)?;
            write(&output, &merged.to_json())?;
            summarize(&merged);
            Ok(merged.verdict.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
