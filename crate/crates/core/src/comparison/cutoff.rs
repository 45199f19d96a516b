use serde::Serialize;

/// Value and first two derivatives of a cutoff at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffJet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Smooth step from 1 (at and below `lo`) to 0 (at and above `hi`):
/// `Φ/(Φ+Ψ)` with `Φ = exp(−1/(hi−x))`, `Ψ = exp(−1/(x−lo))`.
///
/// The quotient is evaluated as `1/(1 + exp(1/(hi−x) − 1/(x−lo)))`, and its
/// complement by the mirrored expression, so neither underflows to a
/// meaningless `0/0` near the ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothStep {
    pub lo: f64,
    pub hi: f64,
}

impl SmoothStep {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "smooth step needs lo < hi");
        Self { lo, hi }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn eval(&self, x: f64) -> CutoffJet {
        if x <= self.lo {
            return CutoffJet { value: 1.0, d1: 0.0, d2: 0.0 };
        }
        if x >= self.hi {
            return CutoffJet { value: 0.0, d1: 0.0, d2: 0.0 };
        }
        let a = self.hi - x;
        let b = x - self.lo;
        let eta = 1.0 / (1.0 + (1.0 / a - 1.0 / b).exp());
        let comp = 1.0 / (1.0 + (1.0 / b - 1.0 / a).exp());
        let w = eta * comp;
        if w == 0.0 {
            return CutoffJet { value: eta, d1: 0.0, d2: 0.0 };
        }
        let (a2, b2) = (a * a, b * b);
        let sum = 1.0 / a2 + 1.0 / b2;
        let d1 = -w * sum;
        let d2 = w * ((1.0 - 2.0 * a) / (a2 * a2) - (1.0 - 2.0 * b) / (b2 * b2)) - 2.0 * w * sum * (eta / a2 - comp / b2);
        CutoffJet { value: eta, d1, d2 }
    }
}

/// Radial cutoff `η`: 1 on `[0, r1]`, 0 on `[r2, ∞)`.
pub type CutoffEta = SmoothStep;

/// `σ` cutoff `ζ`: 1 for `σ ≤ −2`, 0 for `σ ≥ −1`.
pub fn cutoff_zeta() -> SmoothStep {
    SmoothStep::new(-2.0, -1.0)
}

/// Point in `(mid, r2)` beyond which `η'' ≥ |η'|·2·max(n−2, 1)/ρ`, so the
/// second-derivative term of `Δη(r(x))` dominates the `Δr` term. Found by
/// bisection; the condition holds on the whole interval to the right.
pub fn dominance_point(eta: &CutoffEta, n: usize) -> f64 {
    let weight = 2.0 * ((n as f64 - 2.0).max(1.0));
    let dominated = |x: f64| {
        let j = eta.eval(x);
        j.d2 >= j.d1.abs() * weight / x
    };
    let (mut lo, mut hi) = (eta.midpoint(), eta.hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dominated(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_midpoint() {
        let eta = SmoothStep::new(0.1, 0.2);
        assert_eq!(eta.eval(0.1).value, 1.0);
        assert_eq!(eta.eval(0.2).value, 0.0);
        assert_eq!(eta.eval(0.05).value, 1.0);
        assert_eq!(eta.eval(1.0).value, 0.0);
        assert!((eta.eval(eta.midpoint()).value - 0.5).abs() < 1e-12);
        assert!(eta.eval(eta.midpoint()).d2.abs() < 1e-6);
    }

    #[test]
    fn derivatives_match_differences() {
        let eta = SmoothStep::new(0.3, 0.9);
        let h = 1e-4;
        let diff = |f: &dyn Fn(f64) -> f64, x: f64| {
            (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
        };
        for k in 1..1000 {
            let x = 0.3 + 0.6 * k as f64 / 1000.0;
            let j = eta.eval(x);
            let d1 = diff(&|y| eta.eval(y).value, x);
            let d2 = diff(&|y| eta.eval(y).d1, x);
            assert!((d1 - j.d1).abs() <= 1e-6 * j.d1.abs().max(1e-3), "x={x}");
            assert!((d2 - j.d2).abs() <= 1e-6 * j.d2.abs().max(1e-3), "x={x}");
        }
    }

    #[test]
    fn zeta_support() {
        let z = cutoff_zeta();
        assert_eq!(z.eval(-2.0).value, 1.0);
        assert_eq!(z.eval(-1.0).value, 0.0);
        assert_eq!(z.eval(-5.0).d1, 0.0);
    }

    #[test]
    fn dominance_point_lies_in_upper_half() {
        let eta = SmoothStep::new(0.05, 0.1);
        let r = dominance_point(&eta, 3);
        assert!(r > eta.midpoint() && r < 0.1);
        for k in 1..100 {
            let x = r + (0.1 - r) * k as f64 / 100.0;
            let j = eta.eval(x);
            assert!(j.d2 >= j.d1.abs() * 2.0 / x);
        }
    }
}
