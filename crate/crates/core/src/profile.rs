//! The explicit traveling wave and the snaking profile built from it.
//!
//! The wave is `φ(y) = A (|a||y| + a·y)^{−κ}` with `κ = 1/(1−m)`. Written
//! in cylindrical variables around its axis (`σ` along, `ρ` across) it is
//! `A c^{−κ} β^{−κ}` with `β = √(σ²+ρ²) + σ`, and the same expression in
//! tubular coordinates `(σ, r) = (s − ct, r)` is the profile `U`.

use crate::geometry::TubularPoint;
use crate::linalg::{dot, norm, Vector};
use crate::params::ProblemParams;

/// `β = √(σ² + ρ²) + σ`, evaluated without cancellation for `σ < 0`.
#[inline]
pub fn beta(sigma: f64, rho: f64) -> f64 {
    let hyp = sigma.hypot(rho);
    if sigma >= 0.0 {
        hyp + sigma
    } else {
        rho * rho / (hyp - sigma)
    }
}

/// `A c^{−κ} β^{−κ}`: the wave in its own cylindrical variables, equal to
/// the profile `U(r, σ)` with `ρ = r`.
#[inline]
pub fn profile_value(params: &ProblemParams, sigma: f64, rho: f64) -> f64 {
    params.amplitude() * (params.c * beta(sigma, rho)).powf(-params.kappa())
}

/// `U^m = A^m (c β)^{−p}`.
#[inline]
pub fn profile_power(params: &ProblemParams, sigma: f64, rho: f64) -> f64 {
    params.amplitude().powf(params.m) * (params.c * beta(sigma, rho)).powf(-params.p())
}

/// Traveling wave `u(x, t) = φ(x − a t)` with velocity `a`, `|a| = c`.
#[derive(Debug, Clone)]
pub struct TravelingWave {
    params: ProblemParams,
    velocity: Vector,
}

impl TravelingWave {
    /// Wave moving along the first axis.
    pub fn along_axis(params: ProblemParams) -> Self {
        let mut velocity = vec![0.0; params.n];
        velocity[0] = params.c;
        Self { params, velocity }
    }

    /// Wave with velocity `(c/|d|) d`.
    pub fn along(params: ProblemParams, direction: &[f64]) -> Self {
        assert_eq!(direction.len(), params.n);
        let k = params.c / norm(direction);
        Self { params, velocity: direction.iter().map(|d| k * d).collect() }
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn velocity(&self) -> &[f64] {
        &self.velocity
    }

    /// `|a||y| + a·y`, cancellation-safe behind the wave.
    fn g(&self, y: &[f64]) -> f64 {
        let c = self.params.c;
        let along = dot(&self.velocity, y) / c;
        let across_sq = (dot(y, y) - along * along).max(0.0);
        c * beta(along, across_sq.sqrt())
    }

    pub fn phi(&self, y: &[f64]) -> f64 {
        self.params.amplitude() * self.g(y).powf(-self.params.kappa())
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        let y: Vector = x.iter().zip(&self.velocity).map(|(xi, ai)| xi - t * ai).collect();
        self.phi(&y)
    }

    /// `φ_t = −a·∇φ`, along the wave.
    pub fn time_derivative(&self, y: &[f64]) -> f64 {
        let p = &self.params;
        let ry = norm(y);
        p.kappa() * p.c * self.phi(y) * self.g(y).recip() * (p.c + dot(&self.velocity, y) / ry)
    }

    /// `Δφ^m` by differentiating `A^m g^{−p}` with `∇g = |a| y/|y| + a` and
    /// `Δg = |a|(n−1)/|y|`.
    pub fn laplacian_power(&self, y: &[f64]) -> f64 {
        let prm = &self.params;
        let (c, p) = (prm.c, prm.p());
        let ry = norm(y);
        let g = self.g(y);
        let grad_g: Vector = y.iter().zip(&self.velocity).map(|(yi, ai)| c * yi / ry + ai).collect();
        let lap_g = c * (prm.n as f64 - 1.0) / ry;
        let am = prm.amplitude().powf(prm.m);
        -p * am * g.powf(-p - 1.0) * (lap_g - (p + 1.0) * dot(&grad_g, &grad_g) / g)
    }

    /// Closed form `Δφ^m = (A/(1−m)) (|a|/|y|) g^{−κ}`.
    pub fn laplacian_power_closed(&self, y: &[f64]) -> f64 {
        let p = &self.params;
        p.kappa() * p.c * self.phi(y) / norm(y)
    }

    /// `φ_t − Δφ^m` together with the size `|φ_t| + |Δφ^m|` that normalises it.
    pub fn residual(&self, y: &[f64]) -> (f64, f64) {
        let ut = self.time_derivative(y);
        let lap = self.laplacian_power(y);
        (ut - lap, ut.abs() + lap.abs())
    }

    /// Second-order central difference of `Δφ^m` with step `h`.
    pub fn laplacian_power_fd(&self, y: &[f64], h: f64) -> f64 {
        let m = self.params.m;
        let centre = self.phi(y).powf(m);
        let mut lap = 0.0;
        let mut z = y.to_vec();
        for i in 0..y.len() {
            z[i] = y[i] + h;
            let up = self.phi(&z).powf(m);
            z[i] = y[i] - h;
            let down = self.phi(&z).powf(m);
            z[i] = y[i];
            lap += (up - 2.0 * centre + down) / (h * h);
        }
        lap
    }
}

/// Tubular data the profile Laplacian needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeTerms {
    pub r: f64,
    pub grad_s_sq: f64,
    pub lap_s: f64,
    pub lap_r: f64,
}

impl TubeTerms {
    /// Terms of a straight line in ℝⁿ: `|∇s| = 1`, `Δs = 0`, `Δr = (n−2)/r`.
    pub fn straight(n: usize, r: f64) -> Self {
        Self { r, grad_s_sq: 1.0, lap_s: 0.0, lap_r: (n as f64 - 2.0) / r }
    }
}

impl From<&TubularPoint> for TubeTerms {
    fn from(t: &TubularPoint) -> Self {
        Self { r: t.r, grad_s_sq: t.grad_s_sq(), lap_s: t.lap_s, lap_r: t.lap_r }
    }
}

/// The profile `U` and the derivatives of `F = U^m` in `(r, σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEval {
    pub r: f64,
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub u: f64,
    pub f: f64,
    /// `U_t = κ c U / ρ` at fixed `x` (σ = s − ct).
    pub u_t: f64,
    pub f_r: f64,
    pub f_sigma: f64,
    pub f_rr: f64,
    pub f_ss: f64,
    /// `A^{m−1} ρ^{−1} c U = F/(ρ β)`, the scale that factors out of `ΔU^m`.
    pub scale: f64,
}

impl ProfileEval {
    pub fn new(params: &ProblemParams, r: f64, sigma: f64) -> Self {
        let p = params.p();
        let rho = sigma.hypot(r);
        let beta = beta(sigma, r);
        let cb = params.c * beta;
        let u = params.amplitude() * cb.powf(-params.kappa());
        let f = params.amplitude().powf(params.m) * cb.powf(-p);
        let scale = f / (rho * beta);
        // 1 − σ/ρ = r²/(βρ) and 1 + σ/ρ = β/ρ keep both second derivatives accurate
        let f_rr = p * scale * ((p + 1.0) * r * r / (beta * rho) - (sigma / rho).powi(2));
        let f_ss = p * scale * ((p + 1.0) * beta / rho - (r / rho).powi(2));
        Self {
            r,
            sigma,
            rho,
            beta,
            u,
            f,
            u_t: params.kappa() * params.c * u / rho,
            f_r: -p * scale * r,
            f_sigma: -p * scale * beta,
            f_rr,
            f_ss,
            scale,
        }
    }

    /// `F_t = −c F_σ`.
    pub fn f_t(&self, c: f64) -> f64 {
        -c * self.f_sigma
    }

    /// `ΔU^m` by the chain rule through `(r, s)`.
    pub fn laplacian_chain(&self, t: &TubeTerms) -> f64 {
        self.f_rr + self.f_ss * t.grad_s_sq + self.f_r * t.lap_r + self.f_sigma * t.lap_s
    }

    /// `ΔU^m` in the factored form, with the bracket returned separately.
    pub fn laplacian_factored(&self, params: &ProblemParams, t: &TubeTerms) -> (f64, f64) {
        let m = params.m;
        let g = t.grad_s_sq;
        let ratio = self.sigma / self.rho;
        let bracket = -(1.0 - g) * ((1.0 - m) * ratio * ratio + ratio) + (1.0 + m * g)
            - (1.0 - m) * self.r * t.lap_r
            - (1.0 - m) * self.beta * t.lap_s;
        let prefactor = m / ((1.0 - m) * (1.0 - m)) * self.scale;
        (prefactor * bracket, bracket)
    }
}

/// Pressure `W = m u^{m−1}`.
#[inline]
pub fn pressure(m: f64, u: f64) -> f64 {
    m * u.powf(m - 1.0)
}

/// Inverse of [`pressure`]: `u = (W/m)^{1/(m−1)}`.
#[inline]
pub fn pressure_inverse(m: f64, w: f64) -> f64 {
    (w / m).powf(1.0 / (m - 1.0))
}

/// Pressure of the wave in cylindrical variables, `W = c β / B`.
pub fn wave_pressure(params: &ProblemParams, sigma: f64, rho: f64) -> f64 {
    params.c * beta(sigma, rho) / params.b_pressure()
}

/// A radial pressure field and its derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureJet {
    pub rho: f64,
    pub w: f64,
    pub w_t: f64,
    pub w_rho: f64,
    pub w_rhorho: f64,
}

impl PressureJet {
    /// `W = ρ²/(2 B τ)` with `τ = t − t* > 0`.
    pub fn local(rho: f64, tau: f64, b: f64) -> Self {
        Self {
            rho,
            w: rho * rho / (2.0 * b * tau),
            w_t: -rho * rho / (2.0 * b * tau * tau),
            w_rho: rho / (b * tau),
            w_rhorho: 1.0 / (b * tau),
        }
    }
}

/// `W_t − W(W_ρρ + (n−2)/ρ W_ρ) + κ W_ρ²` and the sum of the magnitudes of
/// its three terms.
pub fn pressure_balance_residual(n: usize, m: f64, jet: &PressureJet) -> (f64, f64) {
    let kappa = 1.0 / (1.0 - m);
    let diffusion = jet.w * (jet.w_rhorho + (n as f64 - 2.0) / jet.rho * jet.w_rho);
    let gradient = kappa * jet.w_rho * jet.w_rho;
    (jet.w_t - diffusion + gradient, jet.w_t.abs() + diffusion.abs() + gradient)
}

/// Residual of the radial pressure ODE for the wave in the variable
/// `Y = √β`: `a Y φ_Y + φ(φ_YY + (n−2)/Y φ_Y) − κ φ_Y²`.
pub fn appendix_ode_residual(n: usize, m: f64, a: f64, y: f64, phi: f64, phi_y: f64, phi_yy: f64) -> f64 {
    let kappa = 1.0 / (1.0 - m);
    a * y * phi_y + phi * (phi_yy + (n as f64 - 2.0) / y * phi_y) - kappa * phi_y * phi_y
}

/// [`appendix_ode_residual`] at `φ = a Y²/B`.
pub fn appendix_ode_residual_quadratic(n: usize, m: f64, a: f64, b: f64, y: f64) -> f64 {
    appendix_ode_residual(n, m, a, y, a * y * y / b, 2.0 * a * y / b, 2.0 * a / b)
}

/// Relative mismatch between `m φ^{m−1}` and `a Y²/B` where
/// `Y² = √((x₁ − ta)² + ρ²) + (x₁ − ta)`.
pub fn coordinate_identity_residual(params: &ProblemParams, x1: f64, rho: f64, t: f64) -> f64 {
    let a = params.c;
    let sigma = x1 - t * a;
    let y_sq = beta(sigma, rho);
    let lhs = pressure(params.m, profile_value(params, sigma, rho));
    let rhs = a * y_sq / params.b_pressure();
    (lhs - rhs).abs() / rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wave(n: usize, m: f64, c: f64) -> ProblemParams {
        ProblemParams::wave(n, m, c).unwrap()
    }

    #[test]
    fn beta_is_cancellation_safe() {
        let b = beta(-1e8, 1.0);
        assert!((b - 0.5e-8).abs() < 1e-22);
        assert_eq!(beta(0.0, 2.0), 2.0);
    }

    #[test]
    fn wave_value_reference() {
        // n = 3, m = 1/2, c = 1: A = 1, κ = 2, so φ(0, 1, 0) = 1
        let w = TravelingWave::along_axis(wave(3, 0.5, 1.0));
        assert!((w.phi(&[0.0, 1.0, 0.0]) - 1.0).abs() < 1e-15);
        assert!((w.phi(&[3.0, 4.0, 0.0]) - 1.0 / 64.0).abs() < 1e-16);
    }

    #[test]
    fn wave_laplacian_forms_agree() {
        let w = TravelingWave::along(wave(4, 0.6, 1.3), &[1.0, 2.0, -1.0, 0.5]);
        for y in [[0.3, -0.2, 0.5, 1.0], [-4.0, 0.1, 0.2, 0.3], [2.0, 2.0, 2.0, 2.0]] {
            let a = w.laplacian_power(&y);
            let b = w.laplacian_power_closed(&y);
            assert!((a - b).abs() <= 1e-12 * b.abs(), "{a} {b}");
            let (res, size) = w.residual(&y);
            assert!(res.abs() <= 1e-12 * size);
            assert!(b > 0.0);
        }
    }

    #[test]
    fn line_profile_reduces_to_wave() {
        for (n, m) in [(2, 0.5), (3, 0.5), (3, 0.8), (4, 0.6)] {
            let p = wave(n, m, 1.7);
            for (r, sigma) in [(0.1, -3.0), (0.01, 0.0), (0.3, 5.0), (1e-4, -1e4)] {
                let e = ProfileEval::new(&p, r, sigma);
                let t = TubeTerms::straight(n, r);
                let chain = e.laplacian_chain(&t);
                let (fact, _) = e.laplacian_factored(&p, &t);
                assert!((chain - e.u_t).abs() <= 1e-10 * e.u_t, "n={n} m={m} r={r} σ={sigma}");
                assert!((fact - e.u_t).abs() <= 1e-10 * e.u_t);
            }
        }
    }

    #[test]
    fn profile_derivatives_match_differences() {
        let p = wave(3, 0.7, 0.9);
        let (r, s) = (0.2, -0.7);
        let h = 1e-4;
        let f = |r: f64, s: f64| profile_power(&p, s, r);
        let e = ProfileEval::new(&p, r, s);
        assert!((e.f - f(r, s)).abs() < 1e-14 * e.f);
        assert!(((f(r + h, s) - f(r - h, s)) / (2.0 * h) - e.f_r).abs() < 1e-5 * e.f_r.abs());
        assert!(((f(r, s + h) - f(r, s - h)) / (2.0 * h) - e.f_sigma).abs() < 1e-5 * e.f_sigma.abs());
        let frr = (f(r + h, s) - 2.0 * e.f + f(r - h, s)) / (h * h);
        let fss = (f(r, s + h) - 2.0 * e.f + f(r, s - h)) / (h * h);
        assert!((frr - e.f_rr).abs() < 1e-5 * e.f_rr.abs());
        assert!((fss - e.f_ss).abs() < 1e-5 * e.f_ss.abs());
    }

    #[test]
    fn pressure_round_trip_and_wave_pressure() {
        let p = wave(3, 0.5, 2.0);
        let u = profile_value(&p, -0.4, 0.3);
        let w = pressure(p.m, u);
        assert!((pressure_inverse(p.m, w) - u).abs() < 1e-14 * u);
        assert!((w - wave_pressure(&p, -0.4, 0.3)).abs() < 1e-14 * w);
    }

    #[test]
    fn correct_pressure_constant_balances() {
        for (n, m) in [(2, 0.5), (3, 0.5), (4, 0.6), (6, 0.9)] {
            let p = wave(n, m, 1.0);
            let (res, size) = pressure_balance_residual(n, m, &PressureJet::local(0.3, 0.7, p.b_pressure()));
            assert!(res.abs() <= 1e-14 * size, "n={n} m={m}");
        }
    }

    #[test]
    fn perturbed_pressure_constant_leaves_residual() {
        // ρ = τ = 1, n = 3, m = 1/2, B = 2·1.01: (1/B²)(κ − B/2 − (n−1)/2) = −0.01/4.0804
        let (res, _) = pressure_balance_residual(3, 0.5, &PressureJet::local(1.0, 1.0, 2.02));
        assert!((res - (-0.002_450_740_123_517_302)).abs() < 1e-15);
    }

    #[test]
    fn appendix_quadratic_solves_ode() {
        for (n, m) in [(2, 0.3), (3, 0.5), (5, 0.7)] {
            let b = wave(n, m, 1.0).b_pressure();
            let res = appendix_ode_residual_quadratic(n, m, 1.4, b, 0.8);
            assert!(res.abs() < 1e-13);
            assert!(appendix_ode_residual_quadratic(n, m, 1.4, 1.1 * b, 0.8).abs() > 1e-3);
        }
    }

    #[test]
    fn coordinate_identity_holds() {
        let p = wave(3, 0.6, 1.2);
        for (x1, rho, t) in [(0.5, 0.3, 0.0), (-2.0, 1.0, 1.5), (10.0, 0.01, 2.0)] {
            assert!(coordinate_identity_residual(&p, x1, rho, t) < 1e-13);
        }
    }
}
