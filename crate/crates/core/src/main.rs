//! Command-line front end: verification campaigns, ensemble scans,
//! extremizer searches, determinant suites and the closed-form reference
//! table.
//!
//! Exit codes: 0 all theorem checks pass, 1 at least one theorem check
//! failed, 2 malformed input or usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use entrocheck::checks::{run_ensemble, GenParams, CHECK_NAMES};
use entrocheck::density::write_density;
use entrocheck::report::{
    paper_suite, read_campaign, report_csv, report_json, run_campaign, reference_table,
    tool_version, Report,
};
use entrocheck::search::{
    optimize, trace_csv, Method, Objective, SearchConfig, SearchProblem, SearchSpace,
};

#[derive(Parser)]
#[command(name = "entrocheck", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification campaign (a JSON campaign file, or the built-in
    /// "paper-suite").
    Verify {
        /// Campaign file path, or the literal "paper-suite".
        #[arg(long, default_value = "paper-suite")]
        campaign: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per generator entry (paper-suite only).
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Override the pass tolerance for every check.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Random-ensemble scan of a single check.
    Scan {
        check: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extremizer search (doubling/difference constants or check slack).
    Search {
        /// JSON file holding {"problem": ..., "config": ...}; defaults to
        /// maximizing the difference constant over log-concave grids.
        #[arg(long)]
        campaign: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Output stem; writes STEM.json, STEM.csv and STEM.density.json.
        #[arg(long, default_value = "search_trace")]
        out: PathBuf,
    },
    /// Determinant-inequality suite.
    Det {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form reference table for the standard anchors.
    Table {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("entrocheck: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> entrocheck::Result<ExitCode> {
    match cli.command {
        Command::Verify {
            campaign,
            seed,
            trials,
            tolerance,
            out,
            format,
        } => cmd_verify(&campaign, seed, trials, tolerance, out.as_deref(), format),
        Command::Scan {
            check,
            trials,
            seed,
            out,
        } => cmd_scan(&check, trials, seed, out.as_deref()),
        Command::Search {
            campaign,
            seed,
            trials,
            out,
        } => cmd_search(campaign.as_deref(), seed, trials, &out),
        Command::Det {
            dim,
            trials,
            seed,
            out,
        } => cmd_det(dim, trials, seed, out.as_deref()),
        Command::Table { format } => cmd_table(format),
    }
}

fn emit(text: &str, out: Option<&Path>) -> entrocheck::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn report_exit(report: &Report) -> ExitCode {
    if report.summary.fail > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_verify(
    campaign: &str,
    seed: u64,
    trials: usize,
    tolerance: Option<f64>,
    out: Option<&Path>,
    format: Format,
) -> entrocheck::Result<ExitCode> {
    let mut c = if campaign == "paper-suite" {
        paper_suite(seed, trials)
    } else {
        let mut c = read_campaign(Path::new(campaign))?;
        c.seed = seed;
        c
    };
    if tolerance.is_some() {
        c.tolerance = tolerance;
    }
    if c.entries.is_empty() {
        eprintln!("entrocheck: warning: campaign has no entries; nothing to verify");
    }
    let report = run_campaign(&c)?;
    let text = match format {
        Format::Json => report_json(&report),
        Format::Csv => report_csv(&report),
    };
    emit(&text, out)?;
    eprintln!(
        "entrocheck: {} pass, {} fail, {} skipped, {} conjecture",
        report.summary.pass, report.summary.fail, report.summary.skipped, report.summary.conjecture
    );
    Ok(report_exit(&report))
}

fn cmd_scan(check: &str, trials: usize, seed: u64, out: Option<&Path>) -> entrocheck::Result<ExitCode> {
    if !CHECK_NAMES.contains(&check) {
        eprintln!(
            "entrocheck: unknown check '{check}'; known checks: {}",
            CHECK_NAMES.join(", ")
        );
        return Ok(ExitCode::from(2));
    }
    let ens = run_ensemble(check, &GenParams::default(), trials, seed)?;
    let wrapped = serde_json::json!({
        "tool_version": tool_version(),
        "seed": seed,
        "ensemble": ens,
    });
    emit(&serde_json::to_string_pretty(&wrapped)?, out)?;
    Ok(if ens.violations > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_search(
    config_path: Option<&Path>,
    seed: u64,
    max_evals: usize,
    out: &Path,
) -> entrocheck::Result<ExitCode> {
    #[derive(serde::Deserialize)]
    struct SearchFile {
        problem: SearchProblem,
        #[serde(default)]
        config: Option<SearchConfig>,
    }
    let (problem, mut config) = match config_path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| entrocheck::Error::MalformedFile {
                path: p.display().to_string(),
                reason: e.to_string(),
            })?;
            let f: SearchFile =
                serde_json::from_str(&text).map_err(|e| entrocheck::Error::MalformedFile {
                    path: p.display().to_string(),
                    reason: e.to_string(),
                })?;
            (f.problem, f.config.unwrap_or_default())
        }
        None => (
            SearchProblem {
                objective: Objective::MaximizeSigmaMinus,
                space: SearchSpace::LogConcaveGrid { knots: 64 },
            },
            SearchConfig {
                method: Method::NelderMead,
                restarts: 8,
                seed,
                max_evals,
            },
        ),
    };
    config.seed = seed;
    let outcome = optimize(&problem, &config)?;
    let stem = out.to_string_lossy();
    std::fs::write(
        format!("{stem}.json"),
        serde_json::to_string_pretty(&outcome)?,
    )?;
    std::fs::write(format!("{stem}.csv"), trace_csv(&outcome.trace))?;
    for (i, d) in outcome.best_densities.iter().enumerate() {
        let suffix = if outcome.best_densities.len() == 1 {
            String::new()
        } else {
            format!(".{i}")
        };
        write_density(Path::new(&format!("{stem}{suffix}.density.json")), d)?;
    }
    println!(
        "best objective {:.6} (refined: {})",
        outcome.trace.best_objective,
        outcome
            .trace
            .best_objective_refined
            .map_or("n/a".into(), |v| format!("{v:.6}")),
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_det(dim: usize, trials: usize, seed: u64, out: Option<&Path>) -> entrocheck::Result<ExitCode> {
    let params = GenParams {
        matrix_dim: dim,
        ..GenParams::default()
    };
    let mut reports = Vec::new();
    let mut violations = 0;
    for check in ["det_minkowski", "det_rotfeld", "det_sum"] {
        let ens = run_ensemble(check, &params, trials, seed)?;
        violations += ens.violations;
        reports.push(ens);
    }
    let wrapped = serde_json::json!({
        "tool_version": tool_version(),
        "seed": seed,
        "dimension": dim,
        "ensembles": reports,
    });
    emit(&serde_json::to_string_pretty(&wrapped)?, out)?;
    Ok(if violations > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_table(format: Format) -> entrocheck::Result<ExitCode> {
    let rows = reference_table()?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
        Format::Csv => {
            println!("distribution,sigma_minus,sigma_plus,d_self,d_reflected,provenance");
            for r in &rows {
                println!(
                    "{},{:.6},{:.6},{:.6},{:.6},{}",
                    r.distribution, r.sigma_minus, r.sigma_plus, r.d_self, r.d_reflected,
                    r.provenance
                );
            }
        }
    }
    // Human-readable anchor lines on stderr regardless of format.
    for r in &rows {
        eprintln!("{}: \u{3c3}\u{208b} = {:.3}", r.distribution, r.sigma_minus);
    }
    Ok(ExitCode::SUCCESS)
}
