use super::curve::Curve;
use super::projection::{project_near, TubularPoint};
use crate::error::{Error, Result};
use crate::linalg::Vector;

/// Default finite-difference step for the `s` field, which is smooth on
/// the scale `1/K` across the curve.
pub const DEFAULT_S_STEP: f64 = 5e-3;

/// `∇s`, `∇r`, `Δs`, `Δr` from fourth-order central differences of the
/// projection map.
#[derive(Debug, Clone, PartialEq)]
pub struct FdTubular {
    pub grad_s: Vector,
    pub grad_r: Vector,
    pub lap_s: f64,
    pub lap_r: f64,
}

/// Reference derivatives at `x` by re-projecting stencil points.
///
/// The `s` field uses step `h_s`; the `r` field, which is singular on the
/// curve, uses `min(h_s, r/40)`. Stencil points are projected with the
/// full uniqueness radius `r̃₀`.
pub fn fd_oracle(curve: &Curve, x: &[f64], at: &TubularPoint, h_s: f64) -> Result<FdTubular> {
    let h_r = h_s.min(at.r / 40.0);
    let r_big = curve.r_tilde0();
    let dim = x.len();
    let coords = |y: &[f64]| -> Result<(f64, f64)> {
        project_near(curve, y, r_big, at.s)?
            .inside()
            .map(|t| (t.s, t.r))
            .ok_or(Error::OutsideTube { r0: r_big })
    };
    let mut grad_s = vec![0.0; dim];
    let mut grad_r = vec![0.0; dim];
    let mut lap_s = 0.0;
    let mut lap_r = 0.0;
    for i in 0..dim {
        let shifted = |h: f64, k: f64| {
            let mut y = x.to_vec();
            y[i] += k * h;
            y
        };
        let s_at = |k: f64| coords(&shifted(h_s, k)).map(|c| c.0);
        let r_at = |k: f64| coords(&shifted(h_r, k)).map(|c| c.1);
        let (s2, s1, sm1, sm2) = (s_at(2.0)?, s_at(1.0)?, s_at(-1.0)?, s_at(-2.0)?);
        let (r2, r1, rm1, rm2) = (r_at(2.0)?, r_at(1.0)?, r_at(-1.0)?, r_at(-2.0)?);
        grad_s[i] = (-s2 + 8.0 * s1 - 8.0 * sm1 + sm2) / (12.0 * h_s);
        grad_r[i] = (-r2 + 8.0 * r1 - 8.0 * rm1 + rm2) / (12.0 * h_r);
        lap_s += (-s2 + 16.0 * s1 - 30.0 * at.s + 16.0 * sm1 - sm2) / (12.0 * h_s * h_s);
        lap_r += (-r2 + 16.0 * r1 - 30.0 * at.r + 16.0 * rm1 - rm2) / (12.0 * h_r * h_r);
    }
    Ok(FdTubular { grad_s, grad_r, lap_s, lap_r })
}

/// `|a − b| / max(|b|, 10⁻²)`.
pub fn oracle_error(analytic: f64, reference: f64) -> f64 {
    (analytic - reference).abs() / reference.abs().max(1e-2)
}

impl FdTubular {
    /// Largest [`oracle_error`] over all components.
    pub fn max_error(&self, tp: &TubularPoint) -> f64 {
        let mut worst = oracle_error(tp.lap_s, self.lap_s).max(oracle_error(tp.lap_r, self.lap_r));
        for (a, b) in tp.grad_s.iter().zip(&self.grad_s) {
            worst = worst.max(oracle_error(*a, *b));
        }
        for (a, b) in tp.grad_r.iter().zip(&self.grad_r) {
            worst = worst.max(oracle_error(*a, *b));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::projection::project;

    #[test]
    fn helix_oracle_agrees() {
        let c = Curve::helix(3, 1.0, 1.0, (-20.0, 20.0)).unwrap();
        let x = [0.9, 0.3, 0.8];
        let tp = project(&c, &x, c.r_tilde0()).unwrap().inside().unwrap();
        let fd = fd_oracle(&c, &x, &tp, DEFAULT_S_STEP).unwrap();
        assert!(fd.max_error(&tp) < 1e-6, "{}", fd.max_error(&tp));
    }
}
