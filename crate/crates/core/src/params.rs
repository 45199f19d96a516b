//! Problem parameters and the constants derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Critical exponent below which the traveling wave does not exist:
/// `0` for `n = 2`, `(n − 3)/(n − 1)` for `n ≥ 3`.
pub fn m_star(n: usize) -> Result<f64> {
    match n {
        0 | 1 => Err(Error::InvalidParams(format!("dimension n = {n} must be at least 2"))),
        2 => Ok(0.0),
        _ => Ok((n as f64 - 3.0) / (n as f64 - 1.0)),
    }
}

fn check_exponent(n: usize, m: f64) -> Result<()> {
    let lo = m_star(n)?;
    if !(m > lo && m < 1.0) {
        return Err(Error::InvalidParams(format!(
            "exponent m = {m} must lie in (m*, 1) = ({lo}, 1) for n = {n}"
        )));
    }
    Ok(())
}

/// `B = (n−1)/(1−m) · (m − (n−3)/(n−1))`, the constant of the local pressure
/// profile `W ~ ρ²/(2B(t−t*))`.
///
/// For `n = 2` the inner ratio is `−1`, not `m* = 0`.
pub fn pressure_b(n: usize, m: f64) -> Result<f64> {
    check_exponent(n, m)?;
    let nf = n as f64;
    Ok((nf - 1.0) / (1.0 - m) * (m - (nf - 3.0) / (nf - 1.0)))
}

/// Amplitude of the traveling wave, `A = (m B)^{1/(1−m)}` written out as
/// `((n−1)m/(1−m) · (m − (n−3)/(n−1)))^{1/(1−m)}`.
pub fn amplitude_a(n: usize, m: f64) -> Result<f64> {
    check_exponent(n, m)?;
    let nf = n as f64;
    let inner = (nf - 1.0) * m / (1.0 - m) * (m - (nf - 3.0) / (nf - 1.0));
    Ok(inner.powf(1.0 / (1.0 - m)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub m_star: f64,
    #[serde(rename = "A")]
    pub amplitude: f64,
    #[serde(rename = "B_pressure")]
    pub b_pressure: f64,
}

impl DerivedConstants {
    /// Relative defect of the identity `A = (m B)^{1/(1−m)}`.
    pub fn identity_residual(&self, m: f64) -> f64 {
        let via_b = (m * self.b_pressure).powf(1.0 / (1.0 - m));
        (self.amplitude - via_b).abs() / self.amplitude
    }
}

/// Validated parameters of one problem instance. Every downstream module
/// assumes the invariants checked in [`ProblemParams::new`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub n: usize,
    pub m: f64,
    pub c: f64,
    pub eps: f64,
    pub eps_prime: f64,
    #[serde(skip)]
    derived: DerivedConstants,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    n: usize,
    m: f64,
    c: f64,
    eps: f64,
    eps_prime: f64,
}

impl<'de> Deserialize<'de> for ProblemParams {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = RawParams::deserialize(de)?;
        ProblemParams::new(raw.n, raw.m, raw.c, raw.eps, raw.eps_prime).map_err(serde::de::Error::custom)
    }
}

impl ProblemParams {
    pub fn new(n: usize, m: f64, c: f64, eps: f64, eps_prime: f64) -> Result<Self> {
        check_exponent(n, m)?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("speed c = {c} must be positive")));
        }
        if !(eps_prime > 0.0 && eps_prime < eps && eps < 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < eps' < eps < 1, got eps' = {eps_prime}, eps = {eps}"
            )));
        }
        let derived = DerivedConstants {
            m_star: m_star(n)?,
            amplitude: amplitude_a(n, m)?,
            b_pressure: pressure_b(n, m)?,
        };
        Ok(Self { n, m, c, eps, eps_prime, derived })
    }

    /// Parameters for the exact-solution and solver paths, which never touch
    /// the sandwich tolerances.
    pub fn wave(n: usize, m: f64, c: f64) -> Result<Self> {
        Self::new(n, m, c, 0.5, 0.25)
    }

    pub fn derived(&self) -> &DerivedConstants {
        &self.derived
    }

    #[inline]
    pub fn amplitude(&self) -> f64 {
        self.derived.amplitude
    }

    #[inline]
    pub fn b_pressure(&self) -> f64 {
        self.derived.b_pressure
    }

    /// `1/(1−m)`, the blow-up exponent of the profile.
    #[inline]
    pub fn kappa(&self) -> f64 {
        1.0 / (1.0 - self.m)
    }

    /// `m/(1−m)`.
    #[inline]
    pub fn p(&self) -> f64 {
        self.m / (1.0 - self.m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_values() {
        assert_eq!(m_star(2).unwrap(), 0.0);
        assert_eq!(m_star(3).unwrap(), 0.0);
        assert_eq!(m_star(5).unwrap(), 0.5);
        assert!(m_star(1).is_err());
        assert!(m_star(0).is_err());
    }

    #[test]
    fn critical_exponent_monotone_below_one() {
        let mut prev = m_star(2).unwrap();
        for n in 3..200 {
            let cur = m_star(n).unwrap();
            assert!(cur >= prev && cur < 1.0);
            prev = cur;
        }
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn amplitude_reference_values() {
        assert!((amplitude_a(3, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((amplitude_a(2, 0.5).unwrap() - 2.25).abs() < 1e-14);
        // 40-digit evaluation of ((n−1)m/(1−m)(m−(n−3)/(n−1)))^{1/(1−m)} at (4, 0.6).
        let high_precision = 1.577_440_965_614_878_406_756_072_974_466_310_145_784_f64;
        let a = amplitude_a(4, 0.6).unwrap();
        assert!(((a - high_precision) / high_precision).abs() < 1e-12);
    }

    #[test]
    fn pressure_reference_values() {
        assert!((pressure_b(3, 0.5).unwrap() - 2.0).abs() < 1e-15);
        assert!((pressure_b(2, 0.5).unwrap() - 3.0).abs() < 1e-15);
        let p = ProblemParams::wave(3, 0.5, 1.0).unwrap();
        let via_b = (0.5 * p.b_pressure()).powf(2.0);
        assert!((via_b - p.amplitude()).abs() < 1e-14);
    }

    #[test]
    fn identity_on_parameter_grid() {
        for n in 2..=6 {
            let lo = m_star(n).unwrap();
            let mut m = lo + 0.01;
            while m < 0.99 {
                let a = amplitude_a(n, m).unwrap();
                let b = pressure_b(n, m).unwrap();
                assert!(a.is_finite() && a > 0.0 && b > 0.0, "n={n} m={m}");
                assert!((a - (m * b).powf(1.0 / (1.0 - m))).abs() <= 1e-12 * a, "n={n} m={m}");
                m += 0.01;
            }
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ProblemParams::new(3, 0.0, 1.0, 0.5, 0.25).is_err());
        assert!(ProblemParams::new(3, 1.0, 1.0, 0.5, 0.25).is_err());
        assert!(ProblemParams::new(5, 0.5, 1.0, 0.5, 0.25).is_err());
        assert!(ProblemParams::new(3, 0.5, 0.0, 0.5, 0.25).is_err());
        assert!(ProblemParams::new(3, 0.5, 1.0, 0.5, 0.5).is_err());
        assert!(ProblemParams::new(3, 0.5, 1.0, 1.0, 0.5).is_err());
        assert!(ProblemParams::new(1, 0.5, 1.0, 0.5, 0.25).is_err());
        assert!(ProblemParams::new(2, 0.01, 1.0, 0.5, 0.25).is_ok());
    }

    #[test]
    fn deserialize_validates() {
        let ok: ProblemParams =
            serde_json::from_str(r#"{"n":3,"m":0.5,"c":1.0,"eps":0.5,"eps_prime":0.25}"#).unwrap();
        assert_eq!(ok.amplitude(), 1.0);
        let bad: std::result::Result<ProblemParams, _> =
            serde_json::from_str(r#"{"n":3,"m":0.0,"c":1.0,"eps":0.5,"eps_prime":0.25}"#);
        assert!(bad.is_err());
        let unknown: std::result::Result<ProblemParams, _> =
            serde_json::from_str(r#"{"n":3,"m":0.5,"c":1.0,"eps":0.5,"eps_prime":0.25,"x":1}"#);
        assert!(unknown.is_err());
    }
}
