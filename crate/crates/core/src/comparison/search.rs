use serde::{Deserialize, Serialize};

use super::bundle::{sub_solution_m_bound, ComparisonBundle, ComparisonConstants};
use super::cutoff::{dominance_point, SmoothStep};
use super::regions::{check_tube_embedding, residual_sign_check, sampled_residuals, Region, SignCheckOptions};
use super::sandwich::sandwich_check;
use crate::error::{Error, Result};
use crate::geometry::Curve;
use crate::params::ProblemParams;
use crate::profile::ProfileEval;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    pub pilot_samples: usize,
    pub sandwich_pilot_samples: usize,
    pub seed: u64,
    pub blend_sigma_window: f64,
    pub m_factor: f64,
    pub max_r0_shrinks: usize,
    /// Extra shrinks of `r0` applied after the pilot first passes.
    pub r0_safety_shrinks: usize,
    pub max_b_doublings: usize,
    /// Extra doublings of `b` applied after the blend pilot first passes.
    pub b_safety_doublings: usize,
    pub max_delta_shrinks: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            pilot_samples: 16000,
            sandwich_pilot_samples: 4000,
            seed: 0,
            blend_sigma_window: 2.0,
            m_factor: 2.0,
            max_r0_shrinks: 60,
            r0_safety_shrinks: 1,
            max_b_doublings: 400,
            b_safety_doublings: 2,
            max_delta_shrinks: 400,
        }
    }
}

/// What the search did on the way to its constants.
#[derive(Debug, Clone, Serialize)]
pub struct SearchTrace {
    pub r0_shrinks: usize,
    pub b_doublings: usize,
    pub delta_shrinks: usize,
}

const SHRINK: f64 = 0.7;
const B_SAFETY: f64 = 4.0;

/// Constants for radius `r0` with the remaining search variables at their
/// starting values.
fn constants_for(params: &ProblemParams, config: &SearchConfig, r0: f64) -> ComparisonConstants {
    let (r1, r2) = (r0 / 3.0, 2.0 * r0 / 3.0);
    let r2_prime = dominance_point(&SmoothStep::new(r1, r2), params.n);
    // (u⁺)^m = (1+ε')^m (U^m + 1) is largest on the blend window at r = r1,
    // σ = −window, since U^m decreases in both r and σ
    let peak = (1.0 + params.eps_prime).powf(params.m)
        * (ProfileEval::new(params, r1, -config.blend_sigma_window).f + 1.0);
    ComparisonConstants {
        r0,
        r1,
        r2,
        r2_prime,
        m_sub: config.m_factor * sub_solution_m_bound(params, r0),
        b_super: 2.0 * peak + 1.0,
        b: 2.0,
        delta: r1,
        blend_sigma_window: config.blend_sigma_window,
    }
}

fn pilot_passes(bundle: &ComparisonBundle, regions: &[Region], config: &SearchConfig) -> Result<bool> {
    for &region in regions {
        let opts = SignCheckOptions::analytic(config.pilot_samples, config.seed);
        if !residual_sign_check(bundle, region, opts)?.passed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B_SAFETY` times the smallest `b` for which every pilot sample of
/// `regions` satisfies `∂t ū ≥ Δū^m`. The time term of `ū` scales as `(ū^m)^{1/m−1}` and
/// `ū^m − B b` and `Δū^m` do not depend on `b`, so the bound is explicit
/// per sample. `None` when it is not representable.
fn required_b(bundle: &ComparisonBundle, regions: &[Region], config: &SearchConfig) -> Option<f64> {
    let m = bundle.params.m;
    let k = &bundle.constants;
    let mut need: f64 = 2.0;
    for &region in regions {
        for (ts, res) in sampled_residuals(bundle, region, config.pilot_samples, config.seed) {
            if res.laplacian <= 0.0 {
                continue;
            }
            let x0 = bundle.u_bar_power(ts.r, ts.sigma);
            let rate = res.time / x0.powf(1.0 / m - 1.0);
            if !(rate > 0.0) {
                return None;
            }
            let x_req = (res.laplacian / rate).powf(m / (1.0 - m));
            need = need.max((x_req - (x0 - k.b_super * k.b)) / k.b_super);
        }
    }
    let b = B_SAFETY * need;
    b.is_finite().then_some(b)
}

/// Deterministic search for the comparison constants.
///
/// 1. `r0` starts at `r̃₀/2` and shrinks by 0.7 until the near-curve super-
///    solution and the three `σ` regions of the sub-solution pass a pilot,
///    then shrinks `r0_safety_shrinks` more times. Points at distance `r0`
///    must project back to their own foot.
/// 2. `B_super` is twice the peak of `(u⁺)^m` on the blend window, plus 1.
/// 3. `b` starts from the explicit pilot bound of `required_b` and doubles
///    until both blend regions and the core pass, then doubles
///    `b_safety_doublings` more times.
/// 4. `δ` starts at `r1` and shrinks by 0.7 until the sandwich pilot passes.
pub fn select_constants(
    params: &ProblemParams,
    curve: &Curve,
    config: &SearchConfig,
) -> Result<(ComparisonConstants, SearchTrace)> {
    if params.n != curve.dim() {
        return Err(Error::InvalidParams(format!("n = {} but the curve lives in ℝ^{}", params.n, curve.dim())));
    }
    let near = [Region::PlusTube, Region::SigmaTail, Region::SigmaCutoff, Region::SigmaHead];
    let blend = [Region::BlendNearR2, Region::BlendInner, Region::Core];

    let mut r0 = 0.5 * curve.r_tilde0();
    let mut r0_shrinks = 0;
    let mut bundle = loop {
        let bundle = ComparisonBundle::new(*params, curve.clone(), constants_for(params, config, r0));
        if pilot_passes(&bundle, &near, config)? {
            if config.r0_safety_shrinks == 0 {
                break bundle;
            }
            r0 *= SHRINK.powi(config.r0_safety_shrinks as i32);
            r0_shrinks += config.r0_safety_shrinks;
            break ComparisonBundle::new(*params, curve.clone(), constants_for(params, config, r0));
        }
        r0_shrinks += 1;
        if r0_shrinks > config.max_r0_shrinks {
            return Err(Error::SearchExhausted(format!(
                "near-curve checks still fail after {r0_shrinks} shrinks of r0 (last r0 = {r0:e})"
            )));
        }
        r0 *= SHRINK;
    };
    let embedding = check_tube_embedding(&bundle, config.pilot_samples.min(500), config.seed)?;
    if let Some([s, got]) = embedding.first_mismatch {
        return Err(Error::SearchExhausted(format!(
            "the tube of radius r0 = {r0:e} is not embedded: a point built on s = {s} projects to s = {got}"
        )));
    }

    let Some(b_start) = required_b(&bundle, &blend, config) else {
        return Err(Error::SearchExhausted(format!(
            "the blend constant b needed at r0 = {r0:e} is not representable in double precision"
        )));
    };
    let mut k = bundle.constants;
    k.b = b_start;
    bundle = ComparisonBundle::new(*params, curve.clone(), k);
    let mut b_doublings = 0;
    while !pilot_passes(&bundle, &blend, config)? {
        b_doublings += 1;
        if b_doublings > config.max_b_doublings {
            return Err(Error::SearchExhausted(format!(
                "blend checks still fail at b = {:e} (r0 = {r0:e})",
                bundle.constants.b
            )));
        }
        let mut k = bundle.constants;
        k.b *= 2.0;
        bundle = ComparisonBundle::new(*params, curve.clone(), k);
    }
    if config.b_safety_doublings > 0 {
        let mut k = bundle.constants;
        k.b *= 2f64.powi(config.b_safety_doublings as i32);
        b_doublings += config.b_safety_doublings;
        bundle = ComparisonBundle::new(*params, curve.clone(), k);
    }

    let mut delta_shrinks = 0;
    loop {
        let rep = sandwich_check(&bundle, config.sandwich_pilot_samples, config.seed);
        if rep.passed {
            break;
        }
        delta_shrinks += 1;
        if delta_shrinks > config.max_delta_shrinks {
            return Err(Error::SearchExhausted(format!(
                "sandwich still fails at delta = {:e} (b = {:e}, worst sample (r, σ) = {:?})",
                bundle.constants.delta, bundle.constants.b, rep.worst_sample
            )));
        }
        let mut k = bundle.constants;
        k.delta *= SHRINK;
        bundle = ComparisonBundle::new(*params, curve.clone(), k);
    }

    Ok((bundle.constants, SearchTrace { r0_shrinks, b_doublings, delta_shrinks }))
}
