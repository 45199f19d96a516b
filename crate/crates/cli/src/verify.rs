//! `verify`: geometry oracle, constant search, residual signs, boundary
//! vanishing and the sandwich, in that order.

use std::path::Path;
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use snaking_core::comparison::{
    check_tube_embedding, check_vanishing_ahead, check_vanishing_on_boundary, ordering_check, residual_sign_check,
    sandwich_check, select_constants, ComparisonBundle, Region, SignCheckOptions, PATH_TOLERANCE,
};
use snaking_core::geometry::{fd_oracle, project, random_unit, Curve, Projection, TubeFrame, DEFAULT_S_STEP};

use crate::config::RunConfig;
use crate::report::{create_dir, finish, to_value, Check, CliError, RunReport};

/// Closed-form derivatives of `s` and `r` must match finite differences to this.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

fn region_anchor(region: Region) -> &'static str {
    match region {
        Region::SigmaTail => "sub-solution inequality on the tail sigma <= -2",
        Region::SigmaCutoff => "sub-solution inequality on the cutoff -2 <= sigma <= -1",
        Region::SigmaHead => "sub-solution inequality near the head -1 <= sigma <= 1",
        Region::BlendNearR2 => "super-solution inequality on the blend r2' < r < r2",
        Region::BlendInner => "super-solution inequality on the blend r1 < r <= r2'",
        Region::Core => "super-solution inequality on the core r <= r1",
        Region::PlusTube => "super-solution inequality for u+ in the tube",
    }
}

struct GeometryOutcome {
    max_error: f64,
    violations: usize,
    outside: usize,
    r0: f64,
}

/// Random points of the tube of radius `min(r̃0, 1/(2K))`, built from the
/// frame, projected back, and compared against the finite-difference oracle.
fn geometry_oracle(curve: &Curve, points: usize, seed: u64) -> Result<GeometryOutcome, CliError> {
    let k = curve.k_bound();
    let r0 = curve.r_tilde0().min(0.5 / k);
    let (lo, hi) = curve.window();
    let (mid, half) = (0.5 * (lo + hi), 0.375 * (hi - lo));
    let frame = TubeFrame::new(curve, curve.window(), 0.01);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GeometryOutcome { max_error: 0.0, violations: 0, outside: 0, r0 };
    for _ in 0..points {
        let s = rng.gen_range(mid - half..mid + half);
        let r = r0 * rng.gen_range(0.02..0.98);
        let w = random_unit(&mut rng, curve.dim() - 1);
        let x = frame.point(curve, s, r, &w);
        let tp = match project(curve, &x, curve.r_tilde0()).map_err(|e| CliError::core("geometry oracle", e))? {
            Projection::Inside(tp) => tp,
            Projection::Outside => {
                out.outside += 1;
                continue;
            }
        };
        let fd = fd_oracle(curve, &x, &tp, DEFAULT_S_STEP).map_err(|e| CliError::core("geometry oracle", e))?;
        out.max_error = out.max_error.max(fd.max_error(&tp));
        if !tp.satisfies_tube_bounds(r0, k, curve.dim()) {
            out.violations += 1;
        }
    }
    Ok(out)
}

pub fn run(cfg: &RunConfig, out: &Path) -> Result<ExitCode, CliError> {
    create_dir(out)?;
    let v = &cfg.verifier;
    let params = cfg.params;
    let curve = cfg.curve.build(params.n).map_err(|e| CliError::core("curve", e))?;
    let mut checks = Vec::new();

    let geo = geometry_oracle(&curve, v.geometry_points, v.seed)?;
    checks.push(Check::at_most(
        "geometry.oracle",
        "closed-form gradients and Laplacians of s and r match finite differences",
        geo.max_error,
        ORACLE_TOLERANCE,
    ));
    checks.push(Check::at_most(
        "geometry.tube-bounds",
        "tube bounds on grad s, Laplacian s and Laplacian r",
        (geo.violations + geo.outside) as f64,
        0.0,
    ));

    let (constants, trace) = select_constants(&params, &curve, &v.search).map_err(|e| CliError::core("constant search", e))?;
    let bundle = ComparisonBundle::new(params, curve, constants);

    let embedding = check_tube_embedding(&bundle, v.embedding_points, v.seed).map_err(|e| CliError::core("tube embedding", e))?;
    checks.push(Check::at_most("tube.embedded", "tube of radius r0 is embedded", embedding.mismatches as f64, 0.0));

    let mut signs = Vec::new();
    for (i, region) in Region::ALL.into_iter().enumerate() {
        let opts = SignCheckOptions { samples: v.samples_per_region, seed: v.seed.wrapping_add(100 + i as u64), fd_stride: v.fd_stride };
        let rep = residual_sign_check(&bundle, region, opts)
            .map_err(|e| CliError::core(format!("sign check on {}", region.name()), e))?;
        checks.push(
            Check::at_most(format!("sign.{}", region.name()), region_anchor(region), rep.worst_violation, rep.tolerance)
                .with_passed(rep.passed),
        );
        checks.push(Check::at_most(
            format!("sign.{}.fd-path", region.name()),
            "analytic and finite-difference residuals agree",
            rep.max_path_disagreement,
            PATH_TOLERANCE,
        ));
        signs.push(rep);
    }

    let boundary = check_vanishing_on_boundary(&bundle, v.vanishing_points);
    checks.push(Check::at_most("vanishing.boundary", boundary.name, boundary.nonzero as f64, 0.0));
    let ahead = check_vanishing_ahead(&bundle, v.vanishing_points);
    checks.push(Check::at_most("vanishing.ahead", ahead.name, ahead.nonzero as f64, 0.0));

    let ordering = ordering_check(&bundle, v.ordering_samples, v.seed.wrapping_add(200));
    checks.push(
        Check::at_least("ordering", "u-bar >= u-under >= eps", ordering.min_gap.min(ordering.min_floor_gap), 0.0)
            .with_passed(ordering.passed),
    );

    let sandwich = sandwich_check(&bundle, v.sandwich_samples, v.seed.wrapping_add(300));
    let margin = sandwich.lower_margin.min(sandwich.middle_margin).min(sandwich.upper_margin);
    checks.push(
        Check::at_least("sandwich", "(1-eps) U <= u-under <= u-bar <= (1+eps) U for r, sigma <= delta", margin, 0.0)
            .with_passed(sandwich.passed),
    );

    let details = json!({
        "geometry": {"r0": geo.r0, "points": v.geometry_points, "max_error": geo.max_error,
                     "bound_violations": geo.violations, "outside": geo.outside},
        "constants": to_value(&constants),
        "search": to_value(&trace),
        "embedding": to_value(&embedding),
        "signs": to_value(&signs),
        "vanishing": [to_value(&boundary), to_value(&ahead)],
        "ordering": to_value(&ordering),
        "sandwich": to_value(&sandwich),
    });
    let report = RunReport::new("verify", v.seed, cfg, to_value(&params.derived()), checks, details);
    let path = report.write(out)?;
    Ok(finish(&report, &path))
}
