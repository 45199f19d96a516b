use serde::{Deserialize, Serialize};

use super::field::{Field, MovingFrame};
use super::grid::{Excision, Grid2D};
use super::scheme::{step, Scheme};
use crate::error::{Error, Result};
use crate::params::ProblemParams;
use crate::profile::profile_value;

/// Rectangle `(0, rho_max] × [zeta_min, zeta_max]` of the moving frame with
/// the box `{ρ < rho_cut, ζ ≤ zeta_cut}` around the singular ray removed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveDomain {
    pub rho_max: f64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub rho_cut: f64,
    /// Kept above 0 so the head, where `φ` is unbounded along the axis
    /// `ζ → 0⁺`, stays inside the excision.
    pub zeta_cut: f64,
}

impl Default for WaveDomain {
    fn default() -> Self {
        WaveDomain { rho_max: 2.0, zeta_min: -2.0, zeta_max: 2.0, rho_cut: 0.25, zeta_cut: 0.25 }
    }
}

impl WaveDomain {
    pub fn grid(&self, n: usize, cells_rho: usize, cells_zeta: usize) -> Result<Grid2D> {
        let ex = Excision { rho_cut: self.rho_cut, zeta_cut: self.zeta_cut };
        Grid2D::new(n, self.rho_max, self.zeta_min, self.zeta_max, cells_rho, cells_zeta, ex)
    }
}

/// `φ(ρ, ζ)`, the wave in the moving frame.
pub fn wave(params: &ProblemParams) -> impl Fn(f64, f64) -> f64 + Sync + '_ {
    move |rho, zeta| profile_value(params, zeta, rho)
}

/// Dirichlet data `φ`, initial data `factor·φ`.
pub fn wave_field(params: &ProblemParams, grid: Grid2D, factor: f64) -> Result<Field> {
    let phi = wave(params);
    Field::new(grid, &phi, |r, z| factor * phi(r, z))
}

/// Pseudo-time continuation to the steady state with the implicit scheme.
/// Steps cycle geometrically through `[dt_min, dt_max]`, which damps both
/// short and long wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RelaxConfig {
    pub dt_min: f64,
    pub dt_max: f64,
    pub cycle: usize,
    pub max_steps: usize,
    /// Stop when `‖R‖_∞ ≤ tolerance·‖R₀‖_∞`.
    pub tolerance: f64,
}

impl Default for RelaxConfig {
    fn default() -> Self {
        RelaxConfig { dt_min: 1e-3, dt_max: 1e2, cycle: 8, max_steps: 4000, tolerance: 1e-10 }
    }
}

impl RelaxConfig {
    fn dt(&self, k: usize) -> f64 {
        let c = self.cycle.max(1);
        if c == 1 {
            return self.dt_max;
        }
        let t = (k % c) as f64 / (c - 1) as f64;
        self.dt_min * (self.dt_max / self.dt_min).powf(t)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelaxReport {
    pub steps: usize,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub converged: bool,
    pub clamped: usize,
}

/// Drive `field` to a steady state of the moving-frame equation.
pub fn relax_to_steady(eq: &MovingFrame, field: &mut Field, cfg: &RelaxConfig) -> Result<RelaxReport> {
    if !(cfg.dt_min > 0.0 && cfg.dt_max >= cfg.dt_min) {
        return Err(Error::InvalidGrid(format!("bad relaxation steps [{}, {}]", cfg.dt_min, cfg.dt_max)));
    }
    let mut rep = RelaxReport { steps: 0, initial_residual: f64::NAN, final_residual: f64::NAN, converged: false, clamped: 0 };
    for k in 0..cfg.max_steps {
        let s = step(eq, field, cfg.dt(k), Scheme::LinearlyImplicit)?;
        if k == 0 {
            rep.initial_residual = s.residual;
        }
        rep.final_residual = s.residual;
        rep.steps = k + 1;
        rep.clamped += s.clamped;
        if !s.residual.is_finite() {
            break;
        }
        if s.residual <= cfg.tolerance * rep.initial_residual {
            rep.converged = true;
            break;
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub cells: usize,
    pub h_rho: f64,
    pub h_zeta: f64,
    /// `‖v_steady − φ‖_∞/‖φ‖_∞` on active nodes.
    pub relative_error: f64,
    /// Error of the previous (coarser) row divided by this one.
    pub ratio: Option<f64>,
    pub relax: RelaxReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub min_ratio: f64,
}

/// Steady solves from `φ` on `cells × cells` grids for each entry of
/// `cells`, with the error against `φ`.
pub fn convergence_study(params: &ProblemParams, domain: &WaveDomain, cells: &[usize], relax: &RelaxConfig) -> Result<ConvergenceStudy> {
    let eq = MovingFrame::from(params);
    let phi = wave(params);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &nc in cells {
        let mut f = wave_field(params, domain.grid(params.n, nc, nc)?, 1.0)?;
        let rep = relax_to_steady(&eq, &mut f, relax)?;
        let err = f.relative_deviation(&phi);
        let ratio = rows.last().map(|p| p.relative_error / err);
        rows.push(ConvergenceRow { cells: nc, h_rho: f.grid.h_rho, h_zeta: f.grid.h_zeta, relative_error: err, ratio, relax: rep });
    }
    let min_ratio = rows.iter().filter_map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(ConvergenceStudy { rows, min_ratio })
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub factor: f64,
    pub dt: f64,
    /// `‖v − v_h‖_∞` after each step, starting with the initial value, where
    /// `v_h` is the discrete steady wave on the same grid.
    pub errors: Vec<f64>,
    /// `‖v − φ‖_∞` after each step; levels off at `‖v_h − φ‖_∞`.
    pub wave_errors: Vec<f64>,
    /// `‖v_h − φ‖_∞`.
    pub discretization_error: f64,
    /// Largest increase `e_{k+1} − e_k` of `errors` (≤ 0 for monotone decay).
    pub max_increase: f64,
    pub monotone: bool,
}

/// Time-accurate implicit run from `factor·φ` with `φ` on the boundary,
/// measured against the discrete steady wave `v_h` and against `φ`.
pub fn perturbed_decay(
    params: &ProblemParams,
    domain: &WaveDomain,
    cells: usize,
    factor: f64,
    dt: f64,
    steps: usize,
    relax: &RelaxConfig,
) -> Result<DecayReport> {
    let eq = MovingFrame::from(params);
    let phi = wave(params);
    let grid = domain.grid(params.n, cells, cells)?;
    let mut steady = wave_field(params, grid.clone(), 1.0)?;
    relax_to_steady(&eq, &mut steady, relax)?;
    let target = |f: &Field| f.values.iter().zip(&steady.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let mut f = wave_field(params, grid, factor)?;
    let mut errors = vec![target(&f)];
    let mut wave_errors = vec![f.max_deviation(&phi)];
    for _ in 0..steps {
        step(&eq, &mut f, dt, Scheme::LinearlyImplicit)?;
        errors.push(target(&f));
        wave_errors.push(f.max_deviation(&phi));
    }
    let max_increase = errors.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(DecayReport {
        factor,
        dt,
        monotone: max_increase <= 0.0,
        max_increase,
        errors,
        wave_errors,
        discretization_error: steady.max_deviation(&phi),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ShadowReport {
    pub steps: usize,
    /// Largest `v₁ − v₂` over active nodes and steps.
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Two implicit runs with data `low·φ ≤ high·φ` (boundary and initial);
/// checks `v₁ ≤ v₂ + tolerance·‖v₂‖_∞` after every step.
pub fn comparison_shadow(
    params: &ProblemParams,
    domain: &WaveDomain,
    cells: usize,
    (low, high): (f64, f64),
    dt: f64,
    steps: usize,
    tolerance: f64,
) -> Result<ShadowReport> {
    let eq = MovingFrame::from(params);
    let phi = wave(params);
    let grid = domain.grid(params.n, cells, cells)?;
    let mut a = Field::new(grid.clone(), |r, z| low * phi(r, z), |r, z| low * phi(r, z))?;
    let mut b = Field::new(grid, |r, z| high * phi(r, z), |r, z| high * phi(r, z))?;
    let mut max_violation = f64::NEG_INFINITY;
    for _ in 0..steps {
        step(&eq, &mut a, dt, Scheme::LinearlyImplicit)?;
        step(&eq, &mut b, dt, Scheme::LinearlyImplicit)?;
        let scale = b.max_active();
        let worst = a.grid.active_nodes().map(|(i, j)| a.at(i, j) - b.at(i, j)).fold(f64::NEG_INFINITY, f64::max);
        max_violation = max_violation.max(worst / scale);
    }
    Ok(ShadowReport { steps, max_violation, tolerance, passed: max_violation <= tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ProblemParams {
        ProblemParams::wave(3, 0.5, 1.0).unwrap()
    }

    #[test]
    fn steady_error_shrinks_under_refinement() {
        let s = convergence_study(&params(), &WaveDomain::default(), &[16, 32, 64], &RelaxConfig::default()).unwrap();
        for r in &s.rows {
            assert!(r.relax.converged, "{r:?}");
        }
        assert!(s.min_ratio >= 1.7, "{:?}", s.rows.iter().map(|r| r.relative_error).collect::<Vec<_>>());
    }

    #[test]
    fn exact_start_drifts_by_at_most_the_discretization_error() {
        let p = params();
        let d = WaveDomain::default();
        let mut steady = wave_field(&p, d.grid(3, 32, 32).unwrap(), 1.0).unwrap();
        relax_to_steady(&MovingFrame::from(&p), &mut steady, &RelaxConfig::default()).unwrap();
        let disc = steady.max_deviation(wave(&p));
        let run = perturbed_decay(&p, &d, 32, 1.0, 0.01, 1000, &RelaxConfig::default()).unwrap();
        let drift = run.wave_errors.iter().cloned().fold(0.0, f64::max);
        assert!(drift <= 1.01 * disc, "drift {drift} vs {disc}");
    }

    #[test]
    fn perturbation_decays_monotonically() {
        let run = perturbed_decay(&params(), &WaveDomain::default(), 32, 1.1, 0.02, 300, &RelaxConfig::default()).unwrap();
        assert!(run.monotone, "max increase {}", run.max_increase);
        assert!(run.errors.last().unwrap() < &(1e-2 * run.errors[0]));
        let floor = run.discretization_error;
        assert!((run.wave_errors.last().unwrap() - floor).abs() <= 1e-3 * floor);
    }

    #[test]
    fn ordered_data_stay_ordered() {
        let rep = comparison_shadow(&params(), &WaveDomain::default(), 32, (0.9, 1.1), 0.05, 100, 1e-12).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
