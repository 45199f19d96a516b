use super::curve::Curve;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scale, sub, Vector};

/// Tubular coordinates of a point near the curve, with the derivatives of
/// `s(x)` and `r(x)` in closed form.
#[derive(Debug, Clone, PartialEq)]
pub struct TubularPoint {
    pub s: f64,
    pub r: f64,
    /// `(x − ξ(s))·ξ''(s)`
    pub q2: f64,
    /// `(x − ξ(s))·ξ'''(s)`
    pub q3: f64,
    pub grad_s: Vector,
    pub grad_r: Vector,
    pub lap_s: f64,
    pub lap_r: f64,
}

impl TubularPoint {
    /// Closed-form derivatives at a point `x` with foot `s`, given the
    /// offset `p = x − ξ(s)` and the curve jet there.
    pub fn from_foot(s: f64, offset: &[f64], d1: &[f64], d2: &[f64], d3: &[f64]) -> Self {
        let n = offset.len() as f64;
        let r = norm(offset);
        let q2 = dot(offset, d2);
        let q3 = dot(offset, d3);
        let denom = 1.0 - q2;
        Self {
            s,
            r,
            q2,
            q3,
            grad_s: scale(1.0 / denom, d1),
            grad_r: scale(1.0 / r, offset),
            lap_s: q3 / (denom * denom * denom),
            lap_r: (n - 2.0 - (n - 1.0) * q2) / (denom * r),
        }
    }

    /// `|∇s|²`.
    pub fn grad_s_sq(&self) -> f64 {
        dot(&self.grad_s, &self.grad_s)
    }

    /// Check the tube bounds on `|∇s|`, `Δs` and `Δr` for radius `r0`.
    ///
    /// The lower bound on `r Δr` is `(n−2−(n−1)r0K)/(1±r0K)`, with the sign
    /// chosen so the bound is the smaller of the two: for `n = 2` the
    /// numerator is negative and `1 − r0K` is needed (see
    /// `planar_lower_bound_needs_the_smaller_denominator`).
    pub fn satisfies_tube_bounds(&self, r0: f64, k: f64, n: usize) -> bool {
        let nf = n as f64;
        let rk = r0 * k;
        let gs = norm(&self.grad_s);
        let num = nf - 2.0 - (nf - 1.0) * rk;
        let lap_r_lo = (num / (1.0 + rk)).min(num / (1.0 - rk)) / self.r;
        let lap_r_hi = (nf - 2.0 + (nf - 1.0) * rk) / (1.0 - rk) / self.r;
        gs >= 1.0 / (1.0 + rk)
            && gs <= 1.0 / (1.0 - rk)
            && self.lap_s.abs() <= rk / (1.0 - rk).powi(3)
            && self.lap_r >= lap_r_lo
            && self.lap_r <= lap_r_hi
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Projection {
    Inside(TubularPoint),
    Outside,
}

impl Projection {
    pub fn inside(self) -> Option<TubularPoint> {
        match self {
            Projection::Inside(t) => Some(t),
            Projection::Outside => None,
        }
    }
}

const WINDOW_SAMPLES: usize = 32;
const MAX_NEWTON: usize = 50;

/// Project `x` onto the curve, returning tubular coordinates when
/// `dist(x, Γ) < r0`.
///
/// `r0` may not exceed the curve's `r̃₀`. Candidate feet are the local
/// minima of `|x − ξ|` sampled on a window around a guess, refined by
/// bracketed Newton on `g(s) = (x − ξ(s))·ξ'(s)`.
pub fn project(curve: &Curve, x: &[f64], r0: f64) -> Result<Projection> {
    let guess = curve.eval().foot_guess(x).unwrap_or_else(|| curve.scan_guess(x));
    project_near(curve, x, r0, guess)
}

/// [`project`] with an explicit foot guess.
pub fn project_near(curve: &Curve, x: &[f64], r0: f64, guess: f64) -> Result<Projection> {
    if !(r0 > 0.0 && r0 <= curve.r_tilde0()) {
        return Err(Error::OutsideTube { r0 });
    }
    if x.len() != curve.dim() {
        return Err(Error::InvalidCurve(format!("point has dimension {}, curve {}", x.len(), curve.dim())));
    }
    let d_guess = norm(&sub(x, &curve.jet(guess).pos));
    let half = (2.0 * d_guess).max(1e-6);
    let lo = guess - half;
    let step = 2.0 * half / WINDOW_SAMPLES as f64;
    let dist2: Vec<f64> = (0..=WINDOW_SAMPLES)
        .map(|k| {
            let p = sub(x, &curve.jet(lo + step * k as f64).pos);
            dot(&p, &p)
        })
        .collect();

    let mut feet: Vec<(f64, f64)> = Vec::new();
    for k in 0..=WINDOW_SAMPLES {
        let left = if k == 0 { f64::INFINITY } else { dist2[k - 1] };
        let right = if k == WINDOW_SAMPLES { f64::INFINITY } else { dist2[k + 1] };
        if dist2[k] <= left && dist2[k] <= right {
            let a = lo + step * k.saturating_sub(1) as f64;
            let b = lo + step * (k + 1).min(WINDOW_SAMPLES) as f64;
            let s = refine_foot(curve, x, a, b, lo + step * k as f64)?;
            let d = norm(&sub(x, &curve.jet(s).pos));
            if !feet.iter().any(|&(t, _)| (t - s).abs() <= 1e-9 * (1.0 + s.abs())) {
                feet.push((s, d));
            }
        }
    }
    feet.sort_by(|a, b| a.1.total_cmp(&b.1));
    let &(s, d) = feet.first().ok_or(Error::NoConvergence { iterations: 0 })?;
    if d >= r0 {
        return Ok(Projection::Outside);
    }
    if let Some(&(s2, d2)) = feet.get(1) {
        if (d2 - d) <= 1e-12 * d.max(1.0) && (s2 - s).abs() > 1e-6 {
            return Err(Error::NonUniqueFoot { s1: s, s2, distance: d });
        }
    }
    if d == 0.0 {
        return Err(Error::OnCurve { r: d });
    }
    let j = curve.jet(s);
    let offset = sub(x, &j.pos);
    Ok(Projection::Inside(TubularPoint::from_foot(s, &offset, &j.d1, &j.d2, &j.d3)))
}

/// Root of `g(s) = (x − ξ(s))·ξ'(s)` near `s0`, kept inside `[a, b]` when
/// `g` changes sign there.
fn refine_foot(curve: &Curve, x: &[f64], a: f64, b: f64, s0: f64) -> Result<f64> {
    let g = |s: f64| {
        let j = curve.jet(s);
        let p = sub(x, &j.pos);
        (dot(&p, &j.d1), -1.0 + dot(&p, &j.d2))
    };
    let (ga, _) = g(a);
    let (gb, _) = g(b);
    let bracketed = ga >= 0.0 && gb <= 0.0;
    let (mut lo, mut hi) = (a, b);
    let mut s = s0;
    for it in 0..MAX_NEWTON {
        let (gs, dgs) = g(s);
        if gs == 0.0 {
            return Ok(s);
        }
        if bracketed {
            // g decreases through the root
            if gs > 0.0 {
                lo = s;
            } else {
                hi = s;
            }
        }
        let mut next = s - gs / dgs;
        // a converged step may round onto the bracket end
        if (next - s).abs() <= 4.0 * f64::EPSILON * (1.0 + s.abs()) {
            return Ok(next);
        }
        if bracketed && !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if !next.is_finite() {
            return Err(Error::NoConvergence { iterations: it + 1 });
        }
        let tol = 4.0 * f64::EPSILON * (1.0 + next.abs());
        let done = (next - s).abs() <= tol || (bracketed && hi - lo <= tol);
        s = next;
        if done {
            return Ok(s);
        }
    }
    Err(Error::NoConvergence { iterations: MAX_NEWTON })
}
