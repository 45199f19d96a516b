use serde::Serialize;

use super::cutoff::{cutoff_zeta, CutoffEta, CutoffJet, SmoothStep};
use crate::geometry::Curve;
use crate::params::ProblemParams;
use crate::profile::{beta, ProfileEval, TubeTerms};

/// The free constants of the comparison functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonConstants {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub r2_prime: f64,
    #[serde(rename = "M")]
    pub m_sub: f64,
    #[serde(rename = "B_super")]
    pub b_super: f64,
    pub b: f64,
    pub delta: f64,
    /// Half-width of the `σ` window on which the blend regions are checked.
    pub blend_sigma_window: f64,
}

/// Lower bound that `M` must exceed for the sub-solution to vanish on
/// `r = r0`: `max(3^p, 10^p) A^m c^{−p} r0^{−2p}` with `p = m/(1−m)`.
pub fn sub_solution_m_bound(params: &ProblemParams, r0: f64) -> f64 {
    let p = params.p();
    let common = params.amplitude().powf(params.m) * params.c.powf(-p) * r0.powf(-2.0 * p);
    3f64.powf(p).max(10f64.powf(p)) * common
}

/// Which comparison function a residual belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    UPlus,
    UBar,
    UMinus,
}

impl Field {
    /// Super-solutions need a nonnegative residual, sub-solutions a
    /// nonpositive one.
    pub fn is_super(self) -> bool {
        !matches!(self, Field::UMinus)
    }
}

/// Parabolic residual `V_t − ΔV^m`, its two parts, and the sum of the
/// magnitudes of all terms that enter it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub time: f64,
    pub laplacian: f64,
    pub magnitude: f64,
}

impl Residual {
    pub fn value(&self) -> f64 {
        self.time - self.laplacian
    }

    fn zero() -> Self {
        Self { time: 0.0, laplacian: 0.0, magnitude: 0.0 }
    }
}

/// A point of the tube in the moving frame: distance `r`, `σ = s − ct`
/// and the tubular quantities at its foot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSample {
    pub r: f64,
    pub sigma: f64,
    pub terms: TubeTerms,
}

/// Comparison functions for one problem and one curve.
#[derive(Debug, Clone)]
pub struct ComparisonBundle {
    pub params: ProblemParams,
    pub curve: Curve,
    pub constants: ComparisonConstants,
    eta: CutoffEta,
    zeta: SmoothStep,
}

impl ComparisonBundle {
    pub fn new(params: ProblemParams, curve: Curve, constants: ComparisonConstants) -> Self {
        let eta = SmoothStep::new(constants.r1, constants.r2);
        Self { params, curve, constants, eta, zeta: cutoff_zeta() }
    }

    pub fn eta(&self) -> &CutoffEta {
        &self.eta
    }

    pub fn zeta(&self) -> &SmoothStep {
        &self.zeta
    }

    fn eps_prime(&self) -> f64 {
        self.params.eps_prime
    }

    /// `(1+ε')^m`.
    fn plus_factor(&self) -> f64 {
        (1.0 + self.eps_prime()).powf(self.params.m)
    }

    /// `h(σ) = |σ|^p ζ(σ)` with its first two derivatives.
    pub fn tail_weight(&self, sigma: f64) -> CutoffJet {
        let z = self.zeta.eval(sigma);
        if z.value == 0.0 && z.d1 == 0.0 {
            return CutoffJet { value: 0.0, d1: 0.0, d2: 0.0 };
        }
        // ζ vanishes for σ ≥ −1, so σ < 0 here
        let p = self.params.p();
        let a = -sigma;
        let ap = a.powf(p);
        let ap1 = ap / a;
        let ap2 = ap1 / a;
        CutoffJet {
            value: ap * z.value,
            d1: -p * ap1 * z.value + ap * z.d1,
            d2: p * (p - 1.0) * ap2 * z.value - 2.0 * p * ap1 * z.d1 + ap * z.d2,
        }
    }

    /// `G = U^m − M − M h(σ)`, the bracket inside the sub-solution.
    pub fn sub_bracket(&self, e: &ProfileEval) -> f64 {
        let m = self.constants.m_sub;
        e.f - m - m * self.tail_weight(e.sigma).value
    }

    pub fn u_plus(&self, r: f64, sigma: f64) -> f64 {
        let e = ProfileEval::new(&self.params, r, sigma);
        (1.0 + self.eps_prime()) * (e.f + 1.0).powf(1.0 / self.params.m)
    }

    /// `ū^m`.
    pub fn u_bar_power(&self, r: f64, sigma: f64) -> f64 {
        let k = &self.constants;
        let outer = k.b_super * k.b;
        if r >= k.r2 {
            return outer;
        }
        let eta = self.eta.eval(r).value;
        let big_p = self.plus_factor() * (ProfileEval::new(&self.params, r, sigma).f + 1.0);
        outer + eta * (big_p - k.b_super)
    }

    pub fn u_bar(&self, r: f64, sigma: f64) -> f64 {
        self.u_bar_power(r, sigma).powf(1.0 / self.params.m)
    }

    pub fn u_minus(&self, r: f64, sigma: f64) -> f64 {
        if r >= self.constants.r0 {
            return 0.0;
        }
        let g = self.sub_bracket(&ProfileEval::new(&self.params, r, sigma));
        if g > 0.0 {
            (1.0 - self.eps_prime()) * g.powf(1.0 / self.params.m)
        } else {
            0.0
        }
    }

    pub fn u_lower(&self, r: f64, sigma: f64) -> f64 {
        self.u_minus(r, sigma).max(self.params.eps)
    }

    /// `(u̲/U, ū/U)` from `U^{−m} = A^{−m}(cβ)^p`, which stays finite where
    /// `U` itself overflows (small `r` far behind the head).
    pub fn ratios_to_profile(&self, r: f64, sigma: f64) -> (f64, f64) {
        let prm = &self.params;
        let k = &self.constants;
        let inv_f = prm.amplitude().powf(-prm.m) * (prm.c * beta(sigma, r)).powf(prm.p());
        let upper_m = if r >= k.r2 {
            k.b_super * k.b * inv_f
        } else {
            let eta = self.eta.eval(r).value;
            (k.b_super * k.b - eta * k.b_super) * inv_f + eta * self.plus_factor() * (1.0 + inv_f)
        };
        let minus = if r >= k.r0 {
            0.0
        } else {
            let g = 1.0 - k.m_sub * inv_f * (1.0 + self.tail_weight(sigma).value);
            if g > 0.0 {
                (1.0 - self.eps_prime()) * g.powf(1.0 / prm.m)
            } else {
                0.0
            }
        };
        let floor = prm.eps * inv_f.powf(1.0 / prm.m);
        (minus.max(floor), upper_m.powf(1.0 / prm.m))
    }

    /// Local residual scale `ρ^{−1} c U`, `ρ = √(r² + σ²)`.
    pub fn residual_scale(&self, r: f64, sigma: f64) -> f64 {
        let e = ProfileEval::new(&self.params, r, sigma);
        self.params.c * e.u / e.rho
    }

    /// `ΔU^m` through the chain rule and the sum of its term magnitudes.
    fn laplacian_f(e: &ProfileEval, t: &TubeTerms) -> (f64, f64) {
        let terms = [e.f_rr, e.f_ss * t.grad_s_sq, e.f_r * t.lap_r, e.f_sigma * t.lap_s];
        (terms.iter().sum(), terms.iter().map(|x| x.abs()).sum())
    }

    /// Analytic residual of `field` at `pt`. `None` for the sub-solution
    /// where its bracket is not positive.
    pub fn residual(&self, field: Field, pt: &TubeSample) -> Option<Residual> {
        let prm = &self.params;
        let m = prm.m;
        let e = ProfileEval::new(prm, pt.r, pt.sigma);
        let (lap_f, lap_f_mag) = Self::laplacian_f(&e, &pt.terms);
        let f_t = e.f_t(prm.c);
        match field {
            Field::UPlus => {
                let time = (1.0 + self.eps_prime()) / m * (e.f + 1.0).powf(1.0 / m - 1.0) * f_t;
                let k = self.plus_factor();
                Some(Residual { time, laplacian: k * lap_f, magnitude: time.abs() + k * lap_f_mag })
            }
            Field::UBar => {
                let c = &self.constants;
                if pt.r >= c.r2 {
                    return Some(Residual::zero());
                }
                let eta = self.eta.eval(pt.r);
                let k = self.plus_factor();
                let big_p = k * (e.f + 1.0);
                let p_r = k * e.f_r;
                let ubar_m = c.b_super * c.b + eta.value * (big_p - c.b_super);
                let time = ubar_m.powf(1.0 / m - 1.0) / m * eta.value * k * f_t;
                let terms = [
                    eta.d2 * (big_p - c.b_super),
                    eta.d1 * pt.terms.lap_r * (big_p - c.b_super),
                    2.0 * eta.d1 * p_r,
                    eta.value * k * lap_f,
                ];
                let magnitude = time.abs() + terms[..3].iter().map(|x| x.abs()).sum::<f64>() + eta.value * k * lap_f_mag;
                Some(Residual { time, laplacian: terms.iter().sum(), magnitude })
            }
            Field::UMinus => {
                if pt.r >= self.constants.r0 {
                    return None;
                }
                let g = self.sub_bracket(&e);
                if !(g > 0.0) {
                    return None;
                }
                let big_m = self.constants.m_sub;
                let h = self.tail_weight(pt.sigma);
                let g_t = -prm.c * (e.f_sigma - big_m * h.d1);
                let k = (1.0 - self.eps_prime()).powf(m);
                let time = (1.0 - self.eps_prime()) / m * g.powf(1.0 / m - 1.0) * g_t;
                let extra = [-big_m * h.d2 * pt.terms.grad_s_sq, -big_m * h.d1 * pt.terms.lap_s];
                let laplacian = k * (lap_f + extra[0] + extra[1]);
                let magnitude = time.abs() + k * (lap_f_mag + extra[0].abs() + extra[1].abs());
                Some(Residual { time, laplacian, magnitude })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_bundle(m_factor: f64) -> ComparisonBundle {
        let params = ProblemParams::new(3, 0.5, 1.0, 0.5, 0.25).unwrap();
        let curve = Curve::line(3, (-10.0, 10.0)).unwrap();
        let r0 = 0.1;
        let eta = SmoothStep::new(r0 / 3.0, 2.0 * r0 / 3.0);
        let constants = ComparisonConstants {
            r0,
            r1: r0 / 3.0,
            r2: 2.0 * r0 / 3.0,
            r2_prime: super::super::cutoff::dominance_point(&eta, 3),
            m_sub: m_factor * sub_solution_m_bound(&params, r0),
            b_super: 10.0,
            b: 4.0,
            delta: 0.01,
            blend_sigma_window: 2.0,
        };
        ComparisonBundle::new(params, curve, constants)
    }

    #[test]
    fn m_bound_reference() {
        // n = 3, m = 1/2, c = 1: p = 1, A = 1, so the bound is 10/r0²
        let params = ProblemParams::wave(3, 0.5, 1.0).unwrap();
        assert!((sub_solution_m_bound(&params, 0.1) - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn sub_solution_vanishes_where_required() {
        let b = line_bundle(2.0);
        for k in 0..2000 {
            let sigma = -1e6 * (1e-9f64).powf(k as f64 / 2000.0) + 10.0 * (k as f64 / 2000.0);
            assert_eq!(b.u_minus(b.constants.r0, sigma), 0.0);
        }
        for sigma in [1.0, 1.5, 3.0, 1e3] {
            for r in [1e-6, 1e-3, 0.05] {
                assert_eq!(b.u_minus(r, sigma), 0.0);
            }
        }
        let deep = b.u_minus(b.constants.r0 / 100.0, -1e-3);
        let e = ProfileEval::new(&b.params, b.constants.r0 / 100.0, -1e-3);
        assert!(deep > 0.0 && deep < (1.0 - b.params.eps_prime) * e.u);
    }

    #[test]
    fn super_solution_branches() {
        let b = line_bundle(2.0);
        let k = b.constants;
        let outer = (k.b_super * k.b).powf(2.0);
        assert_eq!(b.u_bar(k.r2, 0.3), outer);
        assert!((b.u_bar(k.r2 * (1.0 - 1e-9), 0.3) - outer).abs() < 1e-10);
        let inner = b.u_bar(k.r1 * 0.5, -0.2);
        let up = b.u_plus(k.r1 * 0.5, -0.2);
        assert!((inner - (up.powf(0.5) + k.b_super * (k.b - 1.0)).powf(2.0)).abs() < 1e-10 * inner);
    }

    #[test]
    fn plus_exceeds_profile_without_slack() {
        let mut b = line_bundle(2.0);
        b.params = ProblemParams::new(3, 0.5, 1.0, 0.5, 1e-300).unwrap();
        for (r, s) in [(1e-3, -5.0), (0.05, 0.0), (0.01, 40.0)] {
            assert!(b.u_plus(r, s) > ProfileEval::new(&b.params, r, s).u);
        }
    }

    #[test]
    fn line_residual_signs() {
        let b = line_bundle(2.0);
        for (r, s) in [(1e-3, -5.0), (0.02, 0.3), (0.01, 40.0)] {
            let pt = TubeSample { r, sigma: s, terms: TubeTerms::straight(3, r) };
            assert!(b.residual(Field::UPlus, &pt).unwrap().value() > 0.0);
            assert!(b.residual(Field::UPlus, &pt).unwrap().time > 0.0);
        }
        let pt = TubeSample { r: 1e-3, sigma: -0.5, terms: TubeTerms::straight(3, 1e-3) };
        assert!(b.residual(Field::UMinus, &pt).unwrap().value() < 0.0);
    }

    #[test]
    fn ratios_match_quotients_and_survive_overflow() {
        let b = line_bundle(2.0);
        for (r, sigma) in [(1e-3, -0.5), (0.02, -30.0), (0.05, 0.01), (1e-5, -1e4)] {
            let u = ProfileEval::new(&b.params, r, sigma).u;
            let (lo, hi) = b.ratios_to_profile(r, sigma);
            assert!((lo - b.u_lower(r, sigma) / u).abs() <= 1e-12 * lo.max(1e-300), "r={r} σ={sigma}");
            assert!((hi - b.u_bar(r, sigma) / u).abs() <= 1e-12 * hi);
        }
        // m = 0.8, κ = 5: U overflows at r = 1e-40, σ = −10⁶
        let p = ProblemParams::new(3, 0.8, 1.0, 0.5, 0.25).unwrap();
        let hot = ComparisonBundle::new(p, b.curve.clone(), b.constants);
        assert!(ProfileEval::new(&p, 1e-40, -1e6).u.is_infinite());
        let (lo, hi) = hot.ratios_to_profile(1e-40, -1e6);
        assert!((lo - 0.75).abs() < 1e-12 && (hi - 1.25).abs() < 1e-12, "{lo} {hi}");
    }
}
