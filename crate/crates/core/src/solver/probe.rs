use serde::{Deserialize, Serialize};

use super::field::Field;
use crate::error::{Error, Result};

/// Probe stations `ζ_p < 0` (behind the head) and the largest radius used
/// in the small-`ρ` fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub stations: Vec<f64>,
    pub max_rho: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { stations: vec![-1.0, -1.25, -1.5, -1.75], max_rho: 0.6 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StationFit {
    pub zeta: f64,
    pub radii: usize,
    /// `W ≈ α ρ² + γ ρ⁴` on the column.
    pub alpha: f64,
    pub gamma: f64,
    /// Estimated `t − t*` since the head passed, `−ζ_p/c`.
    pub elapsed: f64,
    /// `1/(2 α (t − t*))`.
    pub b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub stations: Vec<StationFit>,
    /// Slope of `1/(2α)` against the estimated elapsed time (the station
    /// value when there is only one).
    pub b: f64,
    /// Correction to the estimated crossing times: `t* = t*_est + t_star_shift`.
    pub t_star_shift: f64,
}

/// Least-squares `W = α ρ² + γ ρ⁴`.
fn fit_quartic(points: &[(f64, f64)]) -> (f64, f64) {
    let (mut s4, mut s6, mut s8, mut y2, mut y4) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(r, w) in points {
        let r2 = r * r;
        s4 += r2 * r2;
        s6 += r2 * r2 * r2;
        s8 += r2 * r2 * r2 * r2;
        y2 += w * r2;
        y4 += w * r2 * r2;
    }
    let det = s4 * s8 - s6 * s6;
    ((y2 * s8 - y4 * s6) / det, (s4 * y4 - s6 * y2) / det)
}

/// Pressure `W = m v^{m−1}` on the columns `ζ = ζ_p` of a moving-frame field
/// (speed `c`), fitted by `α ρ² + γ ρ⁴` over active radii `ρ ≤ max_rho`. The
/// local solution has `α = 1/(2B(t − t*))`, where the head crossed the
/// station's point at `t* = t + ζ_p/c`.
pub fn pressure_probe(field: &Field, m: f64, c: f64, cfg: &ProbeConfig) -> Result<ProbeReport> {
    let g = &field.grid;
    let mut stations = Vec::new();
    for &zeta in &cfg.stations {
        if !(zeta < 0.0) {
            return Err(Error::InvalidGrid(format!("probe station ζ = {zeta} is not behind the head")));
        }
        let jf = (zeta - g.zeta_min) / g.h_zeta;
        let j = jf.round();
        if j < 1.0 || j >= g.nz as f64 {
            return Err(Error::InvalidGrid(format!("probe station ζ = {zeta} is outside the grid")));
        }
        let j = j as usize;
        let points: Vec<(f64, f64)> = g
            .row_range(j)
            .filter(|&i| g.rho(i) <= cfg.max_rho)
            .map(|i| (g.rho(i), field.pressure(m, i, j)))
            .collect();
        if points.len() < 4 {
            return Err(Error::InsufficientRange { usable: points.len() });
        }
        let (alpha, gamma) = fit_quartic(&points);
        let z = g.zeta(j);
        let elapsed = -z / c;
        stations.push(StationFit { zeta: z, radii: points.len(), alpha, gamma, elapsed, b: 1.0 / (2.0 * alpha * elapsed) });
    }
    if stations.is_empty() {
        return Err(Error::InsufficientRange { usable: 0 });
    }
    let (b, t_star_shift) = if stations.len() == 1 {
        (stations[0].b, 0.0)
    } else {
        // 1/(2α) = B (t − t*_est − shift)
        let k = stations.len() as f64;
        let xs: Vec<f64> = stations.iter().map(|s| s.elapsed).collect();
        let ys: Vec<f64> = stations.iter().map(|s| 0.5 / s.alpha).collect();
        let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let slope = sxy / sxx;
        (slope, -(my - slope * mx) / slope)
    };
    Ok(ProbeReport { stations, b, t_star_shift })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::pressure_inverse;
    use crate::solver::grid::{Excision, Grid2D};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const M: f64 = 0.5;
    const C: f64 = 1.0;

    fn synthetic(b: f64, noise: f64) -> Field {
        let g = Grid2D::new(3, 2.0, -2.0, 2.0, 128, 128, Excision { rho_cut: 0.1, zeta_cut: 0.1 }).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut f = Field::from_fn(g.clone(), |_, _| 1.0).unwrap();
        for j in 0..=g.nz {
            for i in 0..=g.nr {
                let z = g.zeta(j);
                if z < 0.0 {
                    let w = g.rho(i).powi(2) / (2.0 * b * (-z / C)) * (1.0 + noise * (2.0 * rng.gen::<f64>() - 1.0));
                    f.values[g.index(i, j)] = pressure_inverse(M, w);
                }
            }
        }
        f
    }

    #[test]
    fn recovers_its_own_model() {
        let rep = pressure_probe(&synthetic(2.0, 0.0), M, C, &ProbeConfig::default()).unwrap();
        assert!((rep.b - 2.0).abs() < 1e-10, "{}", rep.b);
        assert!(rep.t_star_shift.abs() < 1e-10);
        for s in &rep.stations {
            assert!((s.b - 2.0).abs() < 1e-10);
            assert!(s.gamma.abs() < 1e-8 * s.alpha);
        }
    }

    #[test]
    fn tolerates_five_percent_noise() {
        let rep = pressure_probe(&synthetic(2.0, 0.05), M, C, &ProbeConfig::default()).unwrap();
        assert!((rep.b - 2.0).abs() < 0.2, "{}", rep.b);
    }

    #[test]
    fn needs_four_radii() {
        let cfg = ProbeConfig { stations: vec![-1.0], max_rho: 0.11 };
        assert!(matches!(pressure_probe(&synthetic(2.0, 0.0), M, C, &cfg), Err(Error::InsufficientRange { .. })));
    }
}
