use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bundle::{ComparisonBundle, Field, Residual, TubeSample};
use super::fd::AmbientPoint;
use crate::error::{Error, Result};
use crate::geometry::{latin_hypercube, project, random_unit, Projection, TubeFrame, TubularPoint};
use crate::linalg::{dot, gram_schmidt};
use crate::profile::TubeTerms;

/// Relative tolerance on the sign of a residual, in units of `ρ^{−1} c U`.
pub const SIGN_TOLERANCE: f64 = 1e-12;
/// Largest allowed gap between the analytic and finite-difference residuals,
/// relative to the magnitude of the terms that make them up.
pub const PATH_TOLERANCE: f64 = 1e-4;

/// The parts of the tube on which the residual signs are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Region {
    /// `σ ≤ −2` out to `σ = −10⁶`, sub-solution.
    SigmaTail,
    /// `−2 ≤ σ ≤ −1`, sub-solution.
    SigmaCutoff,
    /// `−1 ≤ σ ≤ 1`, sub-solution.
    SigmaHead,
    /// `r2' < r < r2`, super-solution.
    BlendNearR2,
    /// `r1 < r ≤ r2'`, super-solution.
    BlendInner,
    /// `r ≤ r1`, super-solution.
    Core,
    /// `r < r0`, the unblended super-solution `u⁺`.
    PlusTube,
}

impl Region {
    pub const ALL: [Region; 7] = [
        Region::SigmaTail,
        Region::SigmaCutoff,
        Region::SigmaHead,
        Region::BlendNearR2,
        Region::BlendInner,
        Region::Core,
        Region::PlusTube,
    ];

    pub fn field(self) -> Field {
        match self {
            Region::SigmaTail | Region::SigmaCutoff | Region::SigmaHead => Field::UMinus,
            Region::BlendNearR2 | Region::BlendInner | Region::Core => Field::UBar,
            Region::PlusTube => Field::UPlus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Region::SigmaTail => "sigma-tail",
            Region::SigmaCutoff => "sigma-cutoff",
            Region::SigmaHead => "sigma-head",
            Region::BlendNearR2 => "blend-near-r2",
            Region::BlendInner => "blend-inner",
            Region::Core => "core",
            Region::PlusTube => "u-plus-tube",
        }
    }

    fn index(self) -> u64 {
        Region::ALL.iter().position(|&r| r == self).unwrap() as u64
    }
}

/// Coordinates of one sampled point of the tube.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleCoords {
    pub s: f64,
    pub r: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SignCheckOptions {
    pub samples: usize,
    pub seed: u64,
    /// Cross-check every `fd_stride`-th evaluated sample by finite
    /// differences; `0` disables the cross-check.
    pub fd_stride: usize,
}

impl SignCheckOptions {
    pub fn analytic(samples: usize, seed: u64) -> Self {
        Self { samples, seed, fd_stride: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub region: Region,
    pub field: Field,
    pub samples: usize,
    /// Samples where the residual was evaluated (the sub-solution is only
    /// checked where its bracket is positive).
    pub evaluated: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Largest violation of the expected sign, in units of `ρ^{−1} c U`;
    /// negative values are margins.
    pub worst_violation: f64,
    pub worst_sample: Option<SampleCoords>,
    pub fd_checked: usize,
    pub fd_skipped: usize,
    pub max_path_disagreement: f64,
    pub passed: bool,
}

/// `σ` drawn log-uniformly from a negative tail, uniformly around the head,
/// or log-uniformly ahead of it.
fn mixed_sigma(u: f64, ahead_max: f64) -> f64 {
    if u < 1.0 / 3.0 {
        -2.0 * 5e5f64.powf(3.0 * u)
    } else if u < 2.0 / 3.0 {
        -2.0 + 4.0 * (3.0 * u - 1.0)
    } else {
        ahead_max.powf(3.0 * u - 2.0)
    }
}

fn log_uniform(u: f64, lo: f64, hi: f64) -> f64 {
    lo * (hi / lo).powf(u)
}

/// Distance from the curve: log-uniform on `[10⁻⁴ hi, hi]` for the lower
/// half of `u`, uniform on `(0, hi]` for the upper half, so both the scales
/// near the curve and the outer part of the tube are covered.
fn radial(u: f64, hi: f64) -> f64 {
    if u < 0.5 {
        log_uniform(2.0 * u, 1e-4 * hi, hi)
    } else {
        hi * (2.0 * u - 1.0)
    }
}

impl Region {
    /// Map a unit-cube point to `(r, σ)` in this region.
    fn coords(self, b: &ComparisonBundle, ur: f64, us: f64) -> (f64, f64) {
        let k = &b.constants;
        let w = k.blend_sigma_window;
        match self {
            Region::SigmaTail => (radial(ur, k.r0), -2.0 * 5e5f64.powf(us)),
            Region::SigmaCutoff => (radial(ur, k.r0), -2.0 + us),
            Region::SigmaHead => (radial(ur, k.r0), -1.0 + 2.0 * us),
            Region::BlendNearR2 => (k.r2_prime + (k.r2 - k.r2_prime) * ur, -w + 2.0 * w * us),
            Region::BlendInner => (k.r1 + (k.r2_prime - k.r1) * ur, -w + 2.0 * w * us),
            Region::Core => (radial(ur, k.r1), mixed_sigma(us, 1e3)),
            Region::PlusTube => (radial(ur, k.r0), mixed_sigma(us, 1e3)),
        }
    }
}

struct Draw {
    s: f64,
    r: f64,
    sigma: f64,
    w: Vec<f64>,
}

fn draws(b: &ComparisonBundle, region: Region, samples: usize, seed: u64) -> Vec<Draw> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (region.index().wrapping_mul(0x9E37_79B9_7F4A_7C15)));
    let (lo, hi) = sampling_window(b);
    let design = latin_hypercube(&mut rng, samples, 3);
    design
        .into_iter()
        .map(|u| {
            let (r, sigma) = region.coords(b, u[1], u[2]);
            // keep the open ends of the r ranges out of the sample
            let r = r.max(f64::MIN_POSITIVE);
            let w = random_unit(&mut rng, b.params.n - 1);
            Draw { s: lo + (hi - lo) * u[0], r, sigma, w }
        })
        .collect()
}

/// Arclength window used for tube samples: the curve window minus a
/// margin of one unit at each end.
pub fn sampling_window(b: &ComparisonBundle) -> (f64, f64) {
    let (lo, hi) = b.curve.window();
    if hi - lo > 4.0 {
        (lo + 1.0, hi - 1.0)
    } else {
        (lo, hi)
    }
}

/// Construct the tube point `ξ(s) + r N(s) w` and its tubular data from the
/// foot directly.
fn construct(b: &ComparisonBundle, frame: &TubeFrame, d: &Draw) -> (AmbientPoint, TubeSample) {
    let jet = b.curve.jet(d.s);
    let normals = frame.normals_at(&b.curve, d.s);
    let mut offset = vec![0.0; jet.pos.len()];
    for (wi, nu) in d.w.iter().zip(&normals) {
        for (o, v) in offset.iter_mut().zip(nu) {
            *o += d.r * wi * v;
        }
    }
    let x: Vec<f64> = jet.pos.iter().zip(&offset).map(|(p, o)| p + o).collect();
    let tp = TubularPoint::from_foot(d.s, &offset, &jet.d1, &jet.d2, &jet.d3);
    let terms = TubeTerms { r: d.r, ..TubeTerms::from(&tp) };
    // tangent, radial direction, then the rest of the normal space
    let radial: Vec<f64> = offset.iter().map(|o| o / d.r).collect();
    let skip = (0..normals.len()).max_by(|&a, &b| dot(&normals[a], &radial).abs().total_cmp(&dot(&normals[b], &radial).abs()));
    let mut rest: Vec<Vec<f64>> = std::iter::once(radial)
        .chain(normals.iter().enumerate().filter(|(k, _)| Some(*k) != skip).map(|(_, v)| v.clone()))
        .collect();
    gram_schmidt(&jet.d1, &mut rest);
    let axes = std::iter::once(jet.d1.clone()).chain(rest).collect();
    (AmbientPoint { x, s: d.s, r: d.r, sigma: d.sigma, axes }, TubeSample { r: d.r, sigma: d.sigma, terms })
}

struct Outcome {
    coords: SampleCoords,
    violation: Option<f64>,
    fd: Option<std::result::Result<Option<f64>, Error>>,
}

/// Sample `region` and check the sign of the residual of its comparison
/// function, with an optional finite-difference cross-check.
pub fn residual_sign_check(b: &ComparisonBundle, region: Region, opts: SignCheckOptions) -> Result<SignReport> {
    let field = region.field();
    let frame = TubeFrame::new(&b.curve, b.curve.window(), 0.01);
    let pts = draws(b, region, opts.samples, opts.seed);
    let outcomes: Vec<Outcome> = pts
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let coords = SampleCoords { s: d.s, r: d.r, sigma: d.sigma };
            let (amb, ts) = construct(b, &frame, d);
            let Some(res) = b.residual(field, &ts) else {
                return Outcome { coords, violation: None, fd: None };
            };
            let scale = b.residual_scale(d.r, d.sigma);
            let signed = if field.is_super() { -res.value() } else { res.value() };
            let fd = (opts.fd_stride > 0 && i % opts.fd_stride == 0)
                .then(|| b.residual_fd(field, &amb).map(|o| o.map(|f| path_gap(&res, &f))));
            Outcome { coords, violation: Some(signed / scale), fd }
        })
        .collect();

    let mut report = SignReport {
        region,
        field,
        samples: opts.samples,
        evaluated: 0,
        seed: opts.seed,
        tolerance: SIGN_TOLERANCE,
        worst_violation: f64::NEG_INFINITY,
        worst_sample: None,
        fd_checked: 0,
        fd_skipped: 0,
        max_path_disagreement: 0.0,
        passed: true,
    };
    for (o, d) in outcomes.iter().zip(&pts) {
        if let Some(v) = o.violation {
            report.evaluated += 1;
            if v > report.worst_violation || v.is_nan() {
                report.worst_violation = v;
                report.worst_sample = Some(o.coords);
            }
        }
        match &o.fd {
            None => {}
            Some(Ok(None)) => report.fd_skipped += 1,
            Some(Ok(Some(gap))) => {
                report.fd_checked += 1;
                report.max_path_disagreement = report.max_path_disagreement.max(*gap);
                if *gap > PATH_TOLERANCE {
                    let ts = construct(b, &frame, d).1;
                    let res = b.residual(field, &ts).unwrap();
                    let fd = b.residual_fd(field, &construct(b, &frame, d).0)?.unwrap();
                    return Err(Error::PathDisagreement {
                        analytic: res.value(),
                        fd: fd.value(),
                        relative: *gap,
                        s: d.s,
                        r: d.r,
                        sigma: d.sigma,
                    });
                }
            }
            Some(Err(e)) => return Err(e.clone()),
        }
    }
    report.passed = report.worst_violation <= SIGN_TOLERANCE;
    Ok(report)
}

/// Analytic residuals of the comparison function of `region` on the same
/// samples `residual_sign_check` draws for `seed`. Samples where the
/// residual is not defined are dropped.
pub(crate) fn sampled_residuals(b: &ComparisonBundle, region: Region, samples: usize, seed: u64) -> Vec<(TubeSample, Residual)> {
    let field = region.field();
    let frame = TubeFrame::new(&b.curve, b.curve.window(), 0.01);
    draws(b, region, samples, seed)
        .par_iter()
        .filter_map(|d| {
            let ts = construct(b, &frame, d).1;
            b.residual(field, &ts).map(|res| (ts, res))
        })
        .collect()
}

/// `|R_analytic − R_fd| / (|V_t| + Σ |Laplacian terms|)`.
fn path_gap(analytic: &Residual, fd: &Residual) -> f64 {
    let gap = (analytic.value() - fd.value()).abs();
    if analytic.magnitude == 0.0 {
        if gap == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        gap / analytic.magnitude
    }
}

/// Exact-zero checks of the sub-solution on `r = r0` and on `σ ≥ 1`.
#[derive(Debug, Clone, Serialize)]
pub struct VanishingReport {
    pub name: &'static str,
    pub points: usize,
    pub nonzero: usize,
    pub max_value: f64,
    pub passed: bool,
}

fn vanishing(b: &ComparisonBundle, name: &'static str, pts: impl Iterator<Item = (f64, f64)>) -> VanishingReport {
    let (mut points, mut nonzero, mut max_value) = (0, 0, 0.0f64);
    for (r, sigma) in pts {
        points += 1;
        let v = b.u_minus(r, sigma);
        if v != 0.0 {
            nonzero += 1;
            max_value = max_value.max(v);
        }
    }
    VanishingReport { name, points, nonzero, max_value, passed: nonzero == 0 }
}

/// `u⁻ = 0` on `r = r0` for `σ ∈ [−10⁶, 10]`. The bracket is evaluated
/// just inside the tube, where the formula still applies.
pub fn check_vanishing_on_boundary(b: &ComparisonBundle, points: usize) -> VanishingReport {
    let r = b.constants.r0 * (1.0 - f64::EPSILON);
    let half = points / 2;
    let tail = (0..half).map(move |k| -1e6 * (1e-7f64).powf(k as f64 / half as f64));
    let near = (0..=points - half).map(move |k| -2.0 + 12.0 * k as f64 / (points - half) as f64);
    vanishing(b, "sub-solution vanishing at r = r0", tail.chain(near).map(move |s| (r, s)))
}

/// `u⁻ = 0` wherever `σ ≥ 1`, over the full radial range of the tube.
pub fn check_vanishing_ahead(b: &ComparisonBundle, points: usize) -> VanishingReport {
    let r0 = b.constants.r0;
    let side = (points as f64).sqrt().ceil() as usize;
    let grid = (0..side).flat_map(move |i| {
        let r = r0 * (1e-8f64).powf(i as f64 / side as f64);
        (0..side).map(move |j| (r, 1e6f64.powf(j as f64 / side as f64)))
    });
    vanishing(b, "sub-solution vanishing for sigma >= 1", grid)
}

/// Outcome of re-projecting constructed tube points with the global
/// projector.
#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingReport {
    pub points: usize,
    pub mismatches: usize,
    /// Constructed and recovered foot of the first mismatch.
    pub first_mismatch: Option<[f64; 2]>,
    pub passed: bool,
}

/// Build points `ξ(s) + r N(s) w` with `r` just below `r0` and check that
/// the global projector recovers `s` and `r`. Fails when the tube of radius
/// `r0` is not embedded, for instance when the curve comes back within `2r0`
/// of itself.
pub fn check_tube_embedding(b: &ComparisonBundle, points: usize, seed: u64) -> Result<EmbeddingReport> {
    let frame = TubeFrame::new(&b.curve, b.curve.window(), 0.01);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = sampling_window(b);
    let r0 = b.constants.r0;
    let draws: Vec<(f64, Vec<f64>)> = (0..points)
        .map(|k| (lo + (hi - lo) * (k as f64 + 0.5) / points as f64, random_unit(&mut rng, b.params.n - 1)))
        .collect();
    let found: Vec<Result<Option<f64>>> = draws
        .par_iter()
        .map(|(s, w)| {
            let x = frame.point(&b.curve, *s, r0 * (1.0 - 1e-9), w);
            match project(&b.curve, &x, b.curve.r_tilde0())? {
                Projection::Inside(tp) => Ok(Some(tp.s)),
                Projection::Outside => Ok(None),
            }
        })
        .collect();
    let mut rep = EmbeddingReport { points, mismatches: 0, first_mismatch: None, passed: true };
    for ((s, _), f) in draws.iter().zip(found) {
        let got = f?;
        if got.is_none_or(|g| (g - s).abs() > 1e-6 * (1.0 + s.abs())) {
            rep.mismatches += 1;
            rep.first_mismatch.get_or_insert([*s, got.unwrap_or(f64::NAN)]);
        }
    }
    rep.passed = rep.mismatches == 0;
    Ok(rep)
}
