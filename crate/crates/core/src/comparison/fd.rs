use super::bundle::{ComparisonBundle, Field, Residual};
use crate::error::{Error, Result};
use crate::geometry::project_near;
use crate::profile::ProfileEval;

/// Smallest step relative to the size of the ambient point. Below this the
/// stencil is dominated by roundoff in the projected coordinates and the
/// sample is not cross-checked.
const MIN_RELATIVE_STEP: f64 = 1e-9;

/// Ambient position of a point in the moving frame, its constructed foot `s`,
/// distance `r`, `σ` at the foot, and an orthonormal basis of ℝⁿ: the curve
/// tangent at the foot, the radial direction, then the other normals.
#[derive(Debug, Clone)]
pub struct AmbientPoint {
    pub x: Vec<f64>,
    pub s: f64,
    pub r: f64,
    pub sigma: f64,
    pub axes: Vec<Vec<f64>>,
}

/// Steps along the tangent, the radial direction, the remaining normal
/// directions, and in `σ` (time).
#[derive(Debug, Clone, Copy)]
struct Steps {
    tangent: f64,
    radial: f64,
    angular: f64,
    sigma: f64,
}

impl Steps {
    fn min(&self, o: &Steps) -> Steps {
        Steps {
            tangent: self.tangent.min(o.tangent),
            radial: self.radial.min(o.radial),
            angular: self.angular.min(o.angular),
            sigma: self.sigma.min(o.sigma),
        }
    }

    fn scaled(&self, k: f64) -> Steps {
        Steps { tangent: k * self.tangent, radial: k * self.radial, angular: k * self.angular, sigma: k * self.sigma }
    }

    fn smallest_spatial(&self) -> f64 {
        self.tangent.min(self.radial).min(self.angular)
    }
}

/// Fourth-order Laplacians, gradients (in the axis basis) and
/// `σ`-derivatives of two scalar component fields, with the smallest
/// sub-solution bracket seen on the stencil.
struct Differences {
    lap: [f64; 2],
    grad: [Vec<f64>; 2],
    d_sigma: [f64; 2],
    bracket_min: f64,
}

/// How far a cutoff argument may move from `x` before the stencil sees a
/// different regime: the square of the distance to the nearer end inside
/// the transition interval `(lo, hi)`, the distance to it outside.
fn cutoff_variation(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo {
        lo - x
    } else if x >= hi {
        x - hi
    } else {
        let d = (x - lo).min(hi - x);
        d * d
    }
}

impl ComparisonBundle {
    /// The two component fields differenced for `field`: `U^m` and the
    /// cutoff it is combined with (`η(r)` for `ū`, `h(σ)` for `u⁻`). Large
    /// constants are added afterwards and never differenced.
    fn components(&self, field: Field, r: f64, sigma: f64) -> [f64; 2] {
        let f = ProfileEval::new(&self.params, r, sigma).f;
        match field {
            Field::UPlus => [f, 0.0],
            Field::UBar => [f, self.eta_value(r)],
            Field::UMinus => [f, self.tail_weight(sigma).value],
        }
    }

    fn eta_value(&self, r: f64) -> f64 {
        if r >= self.constants.r2 {
            0.0
        } else {
            self.eta().eval(r).value
        }
    }

    fn bracket_of(&self, field: Field, r: f64, c: [f64; 2]) -> f64 {
        match field {
            Field::UMinus if r < self.constants.r0 => c[0] - self.constants.m_sub * (1.0 + c[1]),
            Field::UMinus => f64::NEG_INFINITY,
            _ => f64::INFINITY,
        }
    }

    /// Steps for the two component fields. `U^m` depends on `r` through
    /// `r²` on the scale `√(ρβ)` and on `σ` on the scale `ρ`. A tangent step
    /// `h` moves `r` by `O(K r h²)`, an angular one by `h²/(2r)`, and a
    /// normal one moves the foot by `O(K h²)`.
    fn fd_steps(&self, field: Field, r: f64, sigma: f64) -> [Steps; 2] {
        let e = ProfileEval::new(&self.params, r, sigma);
        let k = &self.constants;
        let tube = self.curve.r_tilde0();
        let kb = self.curve.k_bound();
        let bend = (kb * r).max(f64::MIN_POSITIVE);
        let scale = (e.rho * e.beta).sqrt().min(tube);
        let profile = Steps { tangent: e.rho.min(scale / bend.sqrt()).min(tube), radial: scale, angular: scale, sigma: e.rho };
        let cap = |l: f64| Steps { tangent: l, radial: l, angular: l, sigma: e.rho };
        let steps = match field {
            Field::UPlus => [profile, profile],
            Field::UBar => {
                let l = cutoff_variation(r, k.r1, k.r2);
                let eta = Steps {
                    tangent: (l / bend).sqrt(),
                    radial: l,
                    angular: (2.0 * r * l).sqrt(),
                    sigma: e.rho,
                };
                [profile, eta.min(&cap(tube))]
            }
            Field::UMinus => {
                // stay inside r < r0, where the bracket is defined
                let inner = cap(k.r0 - r);
                let l = cutoff_variation(sigma, -2.0, -1.0).min(sigma.abs());
                let tail = Steps { tangent: l, radial: (l / kb).sqrt(), angular: (l / kb).sqrt(), sigma: l };
                [profile.min(&inner), tail.min(&inner)]
            }
        };
        steps.map(|s| s.scaled(0.01))
    }

    fn differences(&self, field: Field, pt: &AmbientPoint, h: Steps) -> Result<Differences> {
        let r_big = self.curve.r_tilde0();
        let at = |y: &[f64]| -> Result<(f64, [f64; 2])> {
            let tp = project_near(&self.curve, y, r_big, pt.s)?.inside().ok_or(Error::OutsideTube { r0: r_big })?;
            Ok((tp.r, self.components(field, tp.r, (tp.s - pt.s) + pt.sigma)))
        };
        let centre = self.components(field, pt.r, pt.sigma);
        let mut bracket_min = self.bracket_of(field, pt.r, centre);
        let mut lap = [0.0; 2];
        let mut grad = [vec![0.0; pt.axes.len()], vec![0.0; pt.axes.len()]];
        for (i, axis) in pt.axes.iter().enumerate() {
            let step = match i {
                0 => h.tangent,
                1 => h.radial,
                _ => h.angular,
            };
            let mut v = [[0.0; 2]; 4];
            for (slot, k) in v.iter_mut().zip([2.0, 1.0, -1.0, -2.0]) {
                let y: Vec<f64> = pt.x.iter().zip(axis).map(|(x, a)| x + k * step * a).collect();
                let (r, c) = at(&y)?;
                bracket_min = bracket_min.min(self.bracket_of(field, r, c));
                *slot = c;
            }
            for c in 0..2 {
                lap[c] += (-v[0][c] + 16.0 * v[1][c] - 30.0 * centre[c] + 16.0 * v[2][c] - v[3][c]) / (12.0 * step * step);
                grad[c][i] = (-v[0][c] + 8.0 * v[1][c] - 8.0 * v[2][c] + v[3][c]) / (12.0 * step);
            }
        }
        let mut d_sigma = [0.0; 2];
        let mut tv = [[0.0; 2]; 4];
        for (slot, k) in tv.iter_mut().zip([2.0, 1.0, -1.0, -2.0]) {
            *slot = self.components(field, pt.r, pt.sigma + k * h.sigma);
            bracket_min = bracket_min.min(self.bracket_of(field, pt.r, *slot));
        }
        for (c, d) in d_sigma.iter_mut().enumerate() {
            *d = (-tv[0][c] + 8.0 * tv[1][c] - 8.0 * tv[2][c] + tv[3][c]) / (12.0 * h.sigma);
        }
        Ok(Differences { lap, grad, d_sigma, bracket_min })
    }

    /// Residual of `field` at `pt` from fourth-order central differences of
    /// its component fields, each with its own steps: in space along the
    /// axes of `pt` (re-projecting every stencil point onto the curve) and
    /// in `σ` for the time derivative. Products are recombined by the
    /// Leibniz rule. `Ok(None)` when the stencil leaves the positivity set
    /// of the sub-solution bracket, touches its free-boundary band, or is
    /// too fine for double precision.
    pub fn residual_fd(&self, field: Field, pt: &AmbientPoint) -> Result<Option<Residual>> {
        let prm = &self.params;
        let m = prm.m;
        let h = self.fd_steps(field, pt.r, pt.sigma);
        let x_size = pt.x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let floor = MIN_RELATIVE_STEP * x_size;
        let sigma_floor = MIN_RELATIVE_STEP * pt.sigma.abs().max(1.0);
        let used = if field == Field::UPlus { &h[..1] } else { &h[..] };
        if used.iter().any(|s| s.smallest_spatial() < floor || s.sigma < sigma_floor) {
            return Ok(None);
        }
        let first = self.differences(field, pt, h[0])?;
        let d = if field == Field::UPlus {
            first
        } else {
            let sec = self.differences(field, pt, h[1])?;
            Differences {
                lap: [first.lap[0], sec.lap[1]],
                grad: [first.grad[0].clone(), sec.grad[1].clone()],
                d_sigma: [first.d_sigma[0], sec.d_sigma[1]],
                bracket_min: first.bracket_min.min(sec.bracket_min),
            }
        };
        // d/dt = −c d/dσ at fixed x
        let dt = [-prm.c * d.d_sigma[0], -prm.c * d.d_sigma[1]];
        let e = ProfileEval::new(prm, pt.r, pt.sigma);
        let res = match field {
            Field::UPlus => Residual {
                time: (1.0 + prm.eps_prime) / m * (e.f + 1.0).powf(1.0 / m - 1.0) * dt[0],
                laplacian: (1.0 + prm.eps_prime).powf(m) * d.lap[0],
                magnitude: 0.0,
            },
            Field::UBar => {
                let c = &self.constants;
                let k = (1.0 + prm.eps_prime).powf(m);
                let eta = self.eta_value(pt.r);
                let ubar_m = c.b_super * c.b + eta * (k * (e.f + 1.0) - c.b_super);
                let cross: f64 = d.grad[0].iter().zip(&d.grad[1]).map(|(a, b)| a * b).sum();
                Residual {
                    time: ubar_m.powf(1.0 / m - 1.0) / m * eta * k * dt[0],
                    laplacian: k * eta * d.lap[0] + 2.0 * k * cross + (k * (e.f + 1.0) - c.b_super) * d.lap[1],
                    magnitude: 0.0,
                }
            }
            Field::UMinus => {
                let big_m = self.constants.m_sub;
                let g = e.f - big_m * (1.0 + self.tail_weight(pt.sigma).value);
                if !(d.bracket_min > 0.0) || g < 1e-8 * e.f {
                    return Ok(None);
                }
                Residual {
                    time: (1.0 - prm.eps_prime) / m * g.powf(1.0 / m - 1.0) * (dt[0] - big_m * dt[1]),
                    laplacian: (1.0 - prm.eps_prime).powf(m) * (d.lap[0] - big_m * d.lap[1]),
                    magnitude: 0.0,
                }
            }
        };
        Ok(Some(res))
    }
}
