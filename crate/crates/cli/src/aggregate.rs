//! `report`: gather the `report.json` of earlier run directories into one
//! summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::Value;

use crate::report::{create_dir, write_json_with_timestamp, CliError, REPORT_FILE};

#[derive(Debug, Serialize)]
struct RunSummary {
    dir: String,
    command: String,
    seed: u64,
    passed: bool,
    checks: Vec<Value>,
}

#[derive(Debug, Serialize)]
struct Summary {
    runs: Vec<RunSummary>,
    total_checks: usize,
    failed_checks: usize,
    passed: bool,
}

fn load(dir: &Path) -> Result<RunSummary, CliError> {
    let path = dir.join(REPORT_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    let bad = |what: &str| CliError::Config(format!("{}: {what}", path.display()));
    let v: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    let command = v["command"].as_str().ok_or_else(|| bad("missing \"command\""))?.to_string();
    let seed = v["seed"].as_u64().ok_or_else(|| bad("missing \"seed\""))?;
    let checks = v["checks"].as_array().ok_or_else(|| bad("missing \"checks\""))?.clone();
    let passed = checks.iter().all(|c| c["passed"].as_bool() == Some(true));
    Ok(RunSummary { dir: dir.display().to_string(), command, seed, passed, checks })
}

pub fn run(dirs: &[PathBuf], out: &Path) -> Result<ExitCode, CliError> {
    if dirs.is_empty() {
        return Err(CliError::Config("report needs at least one run directory".into()));
    }
    let runs = dirs.iter().map(|d| load(d)).collect::<Result<Vec<_>, _>>()?;
    create_dir(out)?;

    let mut csv = String::from("run,command,seed,id,anchor,passed,value,threshold\n");
    let mut first_failure = None;
    let (mut total, mut failed) = (0, 0);
    for r in &runs {
        for c in &r.checks {
            total += 1;
            let ok = c["passed"].as_bool() == Some(true);
            let id = c["id"].as_str().unwrap_or("?");
            if !ok {
                failed += 1;
                first_failure.get_or_insert_with(|| format!("{}: {id} ({})", r.dir, c["anchor"].as_str().unwrap_or("")));
            }
            let anchor = c["anchor"].as_str().unwrap_or("").replace('"', "\"\"");
            writeln!(csv, "{},{},{},{id},\"{anchor}\",{ok},{},{}", r.dir, r.command, r.seed, c["value"], c["threshold"]).unwrap();
        }
        println!("{} {} (seed {}): {}", if r.passed { "[PASS]" } else { "[FAIL]" }, r.dir, r.seed, r.command);
    }
    let csv_path = out.join("summary.csv");
    std::fs::write(&csv_path, csv).map_err(|e| CliError::io(&csv_path, e))?;
    let summary = Summary { passed: failed == 0, runs, total_checks: total, failed_checks: failed };
    let path = out.join("summary.json");
    write_json_with_timestamp(&path, &summary)?;
    println!("{total} checks, {failed} failed; summary written to {}", path.display());
    Ok(match first_failure {
        None => ExitCode::SUCCESS,
        Some(name) => {
            eprintln!("check failed: {name}");
            ExitCode::from(2)
        }
    })
}
