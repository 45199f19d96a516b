use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::bundle::ComparisonBundle;

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub samples: usize,
    pub seed: u64,
    pub delta: f64,
    pub eps: f64,
    /// Smallest `u̲/U − (1−ε)`.
    pub lower_margin: f64,
    /// Smallest `ū − u̲`, relative to `U`.
    pub middle_margin: f64,
    /// Smallest `(1+ε) − ū/U`.
    pub upper_margin: f64,
    pub most_negative_sigma: f64,
    /// `(r, σ)` of the sample with the smallest margin.
    pub worst_sample: Option<[f64; 2]>,
    pub failures: usize,
    pub passed: bool,
}

/// True when `(r, σ)` lies in the region `0 < r ≤ δ`, `σ ≤ δ` where the
/// two-sided bound is claimed.
pub fn in_sandwich_region(delta: f64, r: f64, sigma: f64) -> bool {
    r > 0.0 && r <= delta && sigma <= delta
}

/// `(r, σ)` samples of the sandwich region. A fixed set of points on the
/// edge `r = δ` comes first (`U` is smallest at the corner `r = σ = δ`); the
/// rest have `r` log-uniform in `[10⁻⁶δ, δ]` and `σ` cycling through a log
/// spread out to `−10⁶`, a uniform draw on `[−2, δ]`, and a log spread of
/// distances `δ·[10⁻¹, 10⁶]` behind the head `σ = δ`.
fn sandwich_points(delta: f64, samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = [1.0, 0.5, 0.0, -0.5, -1.0, -4.0, -16.0]
        .iter()
        .map(|&k| (delta, k * delta))
        .chain([(1e-3 * delta, delta), (1e-6 * delta, delta)])
        .take(samples)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in pts.len()..samples {
        let r = delta * 1e-6f64.powf(rng.gen::<f64>());
        let u: f64 = rng.gen();
        let sigma = match k % 3 {
            0 => -2.0 * 5e5f64.powf(u),
            1 => -2.0 + (2.0 + delta) * u,
            _ => delta * (1.0 - 10f64.powf(7.0 * u - 1.0)),
        };
        pts.push((r.max(f64::MIN_POSITIVE), sigma.min(delta)));
    }
    pts
}

/// Check `(1−ε)U ≤ u̲ ≤ ū ≤ (1+ε)U` on the sandwich region of `b` with
/// `δ = b.constants.delta`.
pub fn sandwich_check(b: &ComparisonBundle, samples: usize, seed: u64) -> SandwichReport {
    let delta = b.constants.delta;
    let eps = b.params.eps;
    let pts = sandwich_points(delta, samples, seed);
    let margins: Vec<(f64, f64, f64)> = pts
        .par_iter()
        .map(|&(r, sigma)| {
            let (lower, upper) = b.ratios_to_profile(r, sigma);
            (lower - (1.0 - eps), upper - lower, (1.0 + eps) - upper)
        })
        .collect();
    let mut report = SandwichReport {
        samples,
        seed,
        delta,
        eps,
        lower_margin: f64::INFINITY,
        middle_margin: f64::INFINITY,
        upper_margin: f64::INFINITY,
        most_negative_sigma: pts.iter().map(|p| p.1).fold(0.0, f64::min),
        worst_sample: None,
        failures: 0,
        passed: true,
    };
    let mut worst = f64::INFINITY;
    for (&(r, sigma), &(lo, mid, hi)) in pts.iter().zip(&margins) {
        report.lower_margin = report.lower_margin.min(lo);
        report.middle_margin = report.middle_margin.min(mid);
        report.upper_margin = report.upper_margin.min(hi);
        let m = lo.min(mid).min(hi);
        if !(m >= 0.0) {
            report.failures += 1;
        }
        if m < worst || m.is_nan() {
            worst = m;
            report.worst_sample = Some([r, sigma]);
        }
    }
    report.passed = report.failures == 0;
    report
}

#[derive(Debug, Clone, Serialize)]
pub struct OrderingReport {
    pub samples: usize,
    pub seed: u64,
    /// Smallest `ū − u̲`.
    pub min_gap: f64,
    /// Smallest `u̲ − ε`.
    pub min_floor_gap: f64,
    pub failures: usize,
    pub passed: bool,
}

/// `ū ≥ u̲ ≥ ε` on samples of `Q`, inside and outside the tube.
pub fn ordering_check(b: &ComparisonBundle, samples: usize, seed: u64) -> OrderingReport {
    let r0 = b.constants.r0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<(f64, f64)> = (0..samples)
        .map(|k| {
            let r = if k % 4 == 3 { r0 * (1.0 + 9.0 * rng.gen::<f64>()) } else { r0 * 1e-6f64.powf(rng.gen::<f64>()) };
            let u: f64 = rng.gen();
            let sigma = match k % 3 {
                0 => -2.0 * 5e5f64.powf(u),
                1 => -2.0 + 4.0 * u,
                _ => 1e3f64.powf(u),
            };
            (r, sigma)
        })
        .collect();
    let eps = b.params.eps;
    let gaps: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|&(r, sigma)| {
            let lower = b.u_lower(r, sigma);
            (b.u_bar(r, sigma) - lower, lower - eps)
        })
        .collect();
    let min_gap = gaps.iter().map(|g| g.0).fold(f64::INFINITY, f64::min);
    let min_floor_gap = gaps.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let failures = gaps.iter().filter(|g| !(g.0 >= 0.0 && g.1 >= 0.0)).count();
    OrderingReport { samples, seed, min_gap, min_floor_gap, failures, passed: failures == 0 }
}
