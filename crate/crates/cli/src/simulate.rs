//! `simulate`: the solver runs of the config, each in its own directory
//! with CSV snapshots, a manifest and plain-column `.dat` tables.

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::path::Path;
use std::process::ExitCode;

use serde_json::{json, Value};
use snaking_core::comparison::{select_constants, ComparisonBundle};
use snaking_core::solver::{
    pressure_probe, relax_to_steady, run_exhaustion, step, wave, wave_field, write_snapshot_csv, CheckResult, ExhaustionSchedule,
    Field, GridSummary, MovingFrame, Scheme, SnapshotManifest, WaveDomain,
};
use snaking_core::ProblemParams;

use crate::config::{RunConfig, SolverRun};
use crate::report::{create_dir, finish, to_value, Check, CliError, RunReport};

/// Largest relative deviation of the fitted pressure constant from `B`.
pub const PROBE_TOLERANCE: f64 = 0.1;

struct RunOutput {
    checks: Vec<Check>,
    details: Value,
}

struct RunDir<'a> {
    dir: &'a Path,
    name: String,
    m: f64,
    snapshots: Vec<String>,
}

impl RunDir<'_> {
    fn snapshot(&mut self, file: String, field: &Field) -> Result<(), CliError> {
        let path = self.dir.join(&file);
        let mut w = BufWriter::new(File::create(&path).map_err(|e| CliError::io(&path, e))?);
        write_snapshot_csv(&mut w, field, self.m).map_err(|e| CliError::io(&path, e))?;
        self.snapshots.push(file);
        Ok(())
    }

    fn table(&self, file: &str, header: &str, rows: &str) -> Result<(), CliError> {
        let path = self.dir.join(file);
        std::fs::write(&path, format!("# {header}\n{rows}")).map_err(|e| CliError::io(&path, e))
    }

    fn manifest(&self, field: &Field, scheme: Scheme, dt: f64, steps: usize, checks: &[Check]) -> Result<(), CliError> {
        let manifest = SnapshotManifest {
            run: self.name.clone(),
            grid: GridSummary::from(&field.grid),
            scheme,
            dt,
            steps,
            snapshots: self.snapshots.clone(),
            checks: checks
                .iter()
                .map(|c| CheckResult { name: c.id.clone(), passed: c.passed, value: c.value, threshold: c.threshold })
                .collect(),
        };
        let path = self.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&manifest).expect("in-memory JSON") + "\n";
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

fn wave_relaxation(rd: &mut RunDir, p: &ProblemParams, cells: &[usize], domain: &WaveDomain, relax: &snaking_core::solver::RelaxConfig) -> Result<RunOutput, CliError> {
    let label = format!("{}: wave relaxation", rd.name);
    let ctx = |e| CliError::core(label.clone(), e);
    let eq = MovingFrame::from(p);
    let phi = wave(p);
    let mut rows = String::new();
    let mut table = Vec::new();
    let mut errors: Vec<f64> = Vec::new();
    let mut converged = true;
    let mut last = None;
    let mut total_steps = 0;
    for &nc in cells {
        let mut f = wave_field(p, domain.grid(p.n, nc, nc).map_err(ctx)?, 1.0).map_err(ctx)?;
        let rep = relax_to_steady(&eq, &mut f, relax).map_err(ctx)?;
        let err = f.relative_deviation(&phi);
        let ratio = errors.last().map(|prev| prev / err);
        writeln!(rows, "{nc} {:e} {:e} {err:e} {:e} {} {}", f.grid.h_rho, f.grid.h_zeta, ratio.unwrap_or(f64::NAN), rep.steps, rep.converged).unwrap();
        converged &= rep.converged;
        total_steps += rep.steps;
        table.push(json!({"cells": nc, "h_rho": f.grid.h_rho, "h_zeta": f.grid.h_zeta, "relative_error": err,
                          "ratio": ratio, "relax": to_value(&rep)}));
        errors.push(err);
        rd.snapshot(format!("steady-{nc}.csv"), &f)?;
        last = Some(f);
    }
    rd.table("convergence.dat", "cells h_rho h_zeta relative_error ratio steps converged", &rows)?;
    let mut checks = vec![Check::holds(format!("{}.relaxed", rd.name), "steady state reached on every grid", converged)];
    if errors.len() >= 2 {
        let min_ratio = errors.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least(
            format!("{}.refinement", rd.name),
            "error against the traveling wave decreases under refinement",
            min_ratio,
            1.0,
        ));
    }
    let f = last.expect("cells validated non-empty");
    rd.manifest(&f, Scheme::LinearlyImplicit, relax.dt_max, total_steps, &checks)?;
    Ok(RunOutput { checks, details: json!({"convergence": table}) })
}

fn exhaustion(
    rd: &mut RunDir,
    cfg: &RunConfig,
    cells: [usize; 2],
    schedule: Option<&ExhaustionSchedule>,
    factor: f64,
    relax: &snaking_core::solver::RelaxConfig,
) -> Result<RunOutput, CliError> {
    let p = cfg.params;
    let label = format!("{}: exhaustion", rd.name);
    let ctx = |e| CliError::core(label.clone(), e);
    let mut steady = wave_field(&p, WaveDomain::default().grid(p.n, cells[0], cells[1]).map_err(ctx)?, 1.0).map_err(ctx)?;
    relax_to_steady(&MovingFrame::from(&p), &mut steady, relax).map_err(ctx)?;
    let disc = steady.relative_deviation(wave(&p));
    let tolerance = factor * disc;
    let curve = cfg.curve.build(p.n).map_err(ctx)?;
    let (constants, _) = select_constants(&p, &curve, &cfg.verifier.search).map_err(ctx)?;
    let bundle = ComparisonBundle::new(p, curve, constants);
    let schedule = schedule.cloned().unwrap_or_else(|| ExhaustionSchedule::desk(cells[0], cells[1]));
    let run = run_exhaustion(&schedule, &bundle, tolerance).map_err(ctx)?;
    let rep = &run.report;

    let mut levels = String::new();
    for l in &rep.levels {
        writeln!(levels, "{} {} {} {:e} {} {:e} {:e} {}", l.level, l.active_nodes, l.steps, l.start_time, l.clamped, l.lower_margin, l.upper_margin, l.sandwich_passed).unwrap();
    }
    rd.table("levels.dat", "level active_nodes steps start_time clamped lower_margin upper_margin sandwich", &levels)?;
    let mut pairs = String::new();
    for q in &rep.pairs {
        writeln!(pairs, "{} {} {} {:e} {}", q.inner, q.outer, q.checkpoints, q.max_violation, q.passed).unwrap();
    }
    rd.table("monotonicity.dat", "inner outer checkpoints max_violation passed", &pairs)?;
    for (i, f) in run.fields.iter().enumerate() {
        rd.snapshot(format!("level-{i}.csv"), f)?;
    }

    let worst = rep.pairs.iter().map(|q| q.max_violation).fold(f64::NEG_INFINITY, f64::max);
    let margin = rep.levels.iter().map(|l| l.lower_margin.min(l.upper_margin)).fold(f64::INFINITY, f64::min);
    let mut checks = Vec::new();
    if !rep.pairs.is_empty() {
        checks.push(
            Check::at_most(format!("{}.monotone", rd.name), "w_i <= w_(i+1) on the nested domains", worst, tolerance)
                .with_passed(rep.monotone),
        );
    }
    checks.push(
        Check::at_least(format!("{}.sandwich", rd.name), "u-under <= w_i <= u-bar on every level", margin, -tolerance)
            .with_passed(rep.sandwich),
    );
    let last = run.fields.last().expect("schedule validated non-empty");
    let steps: usize = schedule.levels.iter().map(|l| l.steps).sum();
    rd.manifest(last, Scheme::LinearlyImplicit, schedule.dt, steps, &checks)?;
    Ok(RunOutput {
        checks,
        details: json!({"discretization_error": disc, "constants": to_value(&constants), "report": to_value(rep)}),
    })
}

fn probe(
    rd: &mut RunDir,
    p: &ProblemParams,
    cells: usize,
    domain: &WaveDomain,
    relax: &snaking_core::solver::RelaxConfig,
    probe_cfg: &snaking_core::solver::ProbeConfig,
) -> Result<RunOutput, CliError> {
    let label = format!("{}: pressure probe", rd.name);
    let ctx = |e| CliError::core(label.clone(), e);
    let mut f = wave_field(p, domain.grid(p.n, cells, cells).map_err(ctx)?, 1.0).map_err(ctx)?;
    let relax_rep = relax_to_steady(&MovingFrame::from(p), &mut f, relax).map_err(ctx)?;
    let rep = pressure_probe(&f, p.m, p.c, probe_cfg).map_err(ctx)?;
    let mut rows = String::new();
    for s in &rep.stations {
        writeln!(rows, "{:e} {} {:e} {:e} {:e} {:e}", s.zeta, s.radii, s.alpha, s.gamma, s.elapsed, s.b).unwrap();
    }
    rd.table("probe.dat", "zeta radii alpha gamma elapsed b", &rows)?;
    rd.snapshot(format!("steady-{cells}.csv"), &f)?;
    let target = p.b_pressure();
    let deviation = (rep.b - target).abs() / target;
    let checks = vec![Check::at_most(
        format!("{}.pressure-constant", rd.name),
        "fitted W ~ (x1 + t)^+ rho^2 / B constant matches B",
        deviation,
        PROBE_TOLERANCE,
    )];
    rd.manifest(&f, Scheme::LinearlyImplicit, relax.dt_max, relax_rep.steps, &checks)?;
    Ok(RunOutput {
        checks,
        details: json!({"b_pressure": target, "relative_deviation": deviation, "relax": to_value(&relax_rep), "probe": to_value(&rep)}),
    })
}

#[allow(clippy::too_many_arguments)]
fn evolution(
    rd: &mut RunDir,
    p: &ProblemParams,
    cells: [usize; 2],
    domain: &WaveDomain,
    factor: f64,
    scheme: Scheme,
    dt: f64,
    steps: usize,
    every: usize,
) -> Result<RunOutput, CliError> {
    let label = format!("{}: evolution", rd.name);
    let ctx = |e| CliError::core(label.clone(), e);
    let eq = MovingFrame::from(p);
    let phi = wave(p);
    let mut f = wave_field(p, domain.grid(p.n, cells[0], cells[1]).map_err(ctx)?, factor).map_err(ctx)?;
    let mut rows = String::new();
    let mut clamped = 0;
    writeln!(rows, "0 {:e} {:e} {:e} 0", f.time, f.relative_deviation(&phi), f64::NAN).unwrap();
    rd.snapshot("step-0.csv".into(), &f)?;
    for k in 1..=steps {
        let rep = step(&eq, &mut f, dt, scheme).map_err(ctx)?;
        clamped += rep.clamped;
        writeln!(rows, "{k} {:e} {:e} {:e} {}", f.time, f.relative_deviation(&phi), rep.residual, rep.clamped).unwrap();
        if (every > 0 && k % every == 0) || k == steps {
            rd.snapshot(format!("step-{k}.csv"), &f)?;
        }
    }
    rd.table("evolution.dat", "step time relative_deviation residual clamped", &rows)?;
    let g = &f.grid;
    let min = g.active_nodes().map(|(i, j)| f.at(i, j)).fold(f64::INFINITY, f64::min);
    let finite = f.values.iter().all(|v| v.is_finite());
    let checks = vec![
        Check::holds(format!("{}.finite", rd.name), "solution stays finite", finite),
        Check::at_least(format!("{}.positive", rd.name), "solution stays above the positivity floor", min, f.floor),
    ];
    rd.manifest(&f, scheme, dt, steps, &checks)?;
    Ok(RunOutput {
        checks,
        details: json!({"clamped": clamped, "final_relative_deviation": f.relative_deviation(&phi), "min_active": min}),
    })
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<ExitCode, CliError> {
    if cfg.solver.runs.is_empty() {
        return Err(CliError::Config("simulate needs at least one entry in solver.runs".into()));
    }
    create_dir(out)?;
    let p = cfg.params;
    let mut checks = Vec::new();
    let mut runs = Vec::new();
    for (i, job) in cfg.solver.runs.iter().enumerate() {
        let name = format!("run{i}-{}", job.kind());
        let dir = out.join(&name);
        create_dir(&dir)?;
        let mut rd = RunDir { dir: &dir, name: name.clone(), m: p.m, snapshots: Vec::new() };
        let o = match job {
            SolverRun::WaveRelaxation { cells, domain, relax } => wave_relaxation(&mut rd, &p, cells, domain, relax)?,
            SolverRun::Exhaustion { cells, schedule, tolerance_factor, relax } => {
                exhaustion(&mut rd, cfg, *cells, schedule.as_ref(), *tolerance_factor, relax)?
            }
            SolverRun::PressureProbe { cells, domain, relax, probe: pc } => probe(&mut rd, &p, *cells, domain, relax, pc)?,
            SolverRun::Evolution { cells, domain, factor, scheme, dt, steps, snapshot_every } => {
                evolution(&mut rd, &p, *cells, domain, *factor, *scheme, *dt, *steps, *snapshot_every)?
            }
        };
        checks.extend(o.checks);
        runs.push(json!({"name": name, "kind": job.kind(), "snapshots": rd.snapshots, "details": o.details}));
    }
    let report = RunReport::new("simulate", cfg.verifier.seed, cfg, to_value(&p.derived()), checks, json!({"runs": runs}));
    let path = report.write(out)?;
    Ok(finish(&report, &path))
}
