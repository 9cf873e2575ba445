mod config;
mod expr;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use lattice_ext::fock::DEFAULT_STATE_BUDGET;
use lattice_ext::report::{Report, Status};
use lattice_ext::scalar::RealScalar;
use rayon::prelude::*;
use serde::Serialize;

use config::{build_model, load, ConfigError, ModelConfig, ModelLattice};
use suites::{Ctx, SuiteError};

const BUDGET_VAR: &str = "LATEXT_STATE_BUDGET";

#[derive(Parser)]
#[command(name = "latext", version, about = "Verify truncated lattice extensions from a model file")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites on a model config.
    Check {
        config: PathBuf,
        /// Suite to run; repeatable. Overrides the config's `[suites]`.
        #[arg(long = "suite", value_name = "NAME")]
        suites: Vec<String>,
        /// Also write the JSON report to this file.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Print JSON to stdout instead of the text summary.
        #[arg(long)]
        json: bool,
        /// Add wall-clock timings to the report.
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Serialize)]
struct SuiteOut {
    name: String,
    checks: Vec<lattice_ext::report::Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    millis: Option<u128>,
}

#[derive(Serialize)]
struct Summary {
    status: &'static str,
    total: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct Output<'a> {
    config: &'a ModelConfig,
    suites: Vec<SuiteOut>,
    summary: Summary,
}

fn budget() -> Result<usize, ConfigError> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| ConfigError::Backend(format!("{BUDGET_VAR}={v} is not a count"))),
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

fn run_all<F: RealScalar>(ctx: &Ctx<'_, F>, names: &[String], timing: bool) -> Result<Vec<SuiteOut>, SuiteError> {
    names
        .par_iter()
        .map(|n| {
            let t = Instant::now();
            let r: Report = suites::run(n, ctx)?;
            Ok(SuiteOut { name: r.name, checks: r.checks, millis: timing.then(|| t.elapsed().as_millis()) })
        })
        .collect()
}

fn text(out: &Output<'_>) -> String {
    let mut s = String::new();
    for suite in &out.suites {
        let r = Report { name: suite.name.clone(), checks: suite.checks.clone() };
        s.push_str(&r.to_string());
        if let Some(ms) = suite.millis {
            s.push_str(&format!("  ({ms} ms)\n"));
        }
    }
    let m = &out.summary;
    s.push_str(&format!(
        "{}: {} checks, {} passed, {} failed, {} skipped\n",
        m.status, m.total, m.passed, m.failed, m.skipped
    ));
    s
}

fn check(config: PathBuf, overrides: Vec<String>, out: Option<PathBuf>, json: bool, timing: bool) -> Result<bool, String> {
    let cfg = load(&config).map_err(|e| e.to_string())?;
    let model = build_model(&cfg, &overrides).map_err(|e| e.to_string())?;
    let budget = budget().map_err(|e| e.to_string())?;
    let names = &model.suites;
    let r2 = model.r_squared.as_ref();
    let results = match &model.lattice {
        ModelLattice::Rational(l) => run_all(&Ctx { lattice: l, cutoffs: &cfg.cutoffs, r_squared: r2, budget }, names, timing),
        ModelLattice::Quadratic(l) => run_all(&Ctx { lattice: l, cutoffs: &cfg.cutoffs, r_squared: r2, budget }, names, timing),
        ModelLattice::Float(l) => run_all(&Ctx { lattice: l, cutoffs: &cfg.cutoffs, r_squared: r2, budget }, names, timing),
    }
    .map_err(|e| e.to_string())?;
    let count = |s: Status| results.iter().flat_map(|r| &r.checks).filter(|c| c.status == s).count();
    let (passed, failed, skipped) = (count(Status::Pass), count(Status::Fail), count(Status::Skipped));
    let summary = Summary {
        status: if failed == 0 { "pass" } else { "fail" },
        total: passed + failed + skipped,
        passed,
        failed,
        skipped,
    };
    let output = Output { config: &cfg, suites: results, summary };
    let js = serde_json::to_string_pretty(&output).expect("report serializes") + "\n";
    if let Some(p) = out {
        std::fs::write(&p, &js).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
    }
    if json {
        print!("{js}");
    } else {
        print!("{}", text(&output));
    }
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check { config, suites, out, json, timing } => match check(config, suites, out, json, timing) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
