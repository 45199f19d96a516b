use serde::{Deserialize, Serialize};

use super::field::{Field, MovingFrame};
use super::grid::{Excision, Grid2D};
use super::scheme::{step, Scheme};
use crate::comparison::ComparisonBundle;
use crate::error::{Error, Result};

/// One domain `Q_i` of the schedule: a rectangle on the common lattice with
/// its excised box, run for `steps` steps ending at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustionLevel {
    pub rho_cells: usize,
    /// `ζ_min` in units of `h_ζ`.
    pub zeta_offset: i64,
    pub zeta_cells: usize,
    pub rho_cut: f64,
    pub zeta_cut: f64,
    pub steps: usize,
}

/// Nested domains on one lattice with spacings `h_rho`, `h_zeta`, a common
/// time step `dt`, and a comparison every `check_every` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustionSchedule {
    pub h_rho: f64,
    pub h_zeta: f64,
    pub dt: f64,
    pub check_every: usize,
    pub levels: Vec<ExhaustionLevel>,
}

impl ExhaustionSchedule {
    /// Three levels growing to `(0, 2] × [−2, 2]` on a `cells_rho × cells_zeta`
    /// lattice, with the excision radius shrinking and the time window
    /// growing (`T = 0.5, 0.75, 1`).
    pub fn desk(cells_rho: usize, cells_zeta: usize) -> Self {
        let h_rho = 2.0 / (cells_rho as f64 + 0.5);
        let h_zeta = 4.0 / cells_zeta as f64;
        let dt = 0.01;
        let levels = [(0.625, 0.2, 50), (0.8125, 0.12, 75), (1.0, 0.06, 100)]
            .iter()
            .map(|&(frac, rho_cut, steps)| {
                let zc = (frac * cells_zeta as f64 / 2.0).round() as i64;
                ExhaustionLevel {
                    rho_cells: (frac * cells_rho as f64).round() as usize,
                    zeta_offset: -zc,
                    zeta_cells: 2 * zc as usize,
                    rho_cut,
                    zeta_cut: 0.0,
                    steps,
                }
            })
            .collect();
        ExhaustionSchedule { h_rho, h_zeta, dt, check_every: 5, levels }
    }

    fn grid(&self, n: usize, l: &ExhaustionLevel) -> Result<Grid2D> {
        let ex = Excision { rho_cut: l.rho_cut, zeta_cut: l.zeta_cut };
        Grid2D::with_spacing(n, self.h_rho, self.h_zeta, l.rho_cells, l.zeta_offset as f64 * self.h_zeta, l.zeta_cells, ex)
    }

    /// `Q_i ⊊ Q_{i+1}` with time windows growing.
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() || !(self.dt > 0.0) || self.check_every == 0 {
            return Err(Error::InvalidGrid("schedule needs levels, dt > 0 and check_every > 0".into()));
        }
        for (k, w) in self.levels.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            let a_top = a.zeta_offset + a.zeta_cells as i64;
            let b_top = b.zeta_offset + b.zeta_cells as i64;
            let contained = a.rho_cells <= b.rho_cells
                && a.zeta_offset >= b.zeta_offset
                && a_top <= b_top
                && a.rho_cut >= b.rho_cut
                && a.zeta_cut >= b.zeta_cut
                && a.steps <= b.steps;
            let strict = a.rho_cells < b.rho_cells
                || a.zeta_offset > b.zeta_offset
                || a_top < b_top
                || a.rho_cut > b.rho_cut
                || a.zeta_cut > b.zeta_cut;
            if !contained || !strict {
                return Err(Error::InvalidGrid(format!("level {k} is not strictly inside level {}", k + 1)));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub active_nodes: usize,
    pub steps: usize,
    pub start_time: f64,
    pub clamped: usize,
    /// Smallest `(w − u̲)/u̲` over checked steps and nodes.
    pub lower_margin: f64,
    /// Smallest `(ū − w)/ū`.
    pub upper_margin: f64,
    pub sandwich_passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairReport {
    pub inner: usize,
    pub outer: usize,
    pub checkpoints: usize,
    /// Largest `(w_i − w_{i+1})/max(w_i, w_{i+1})` over shared checkpoints
    /// and the nodes of `Q_i`.
    pub max_violation: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExhaustionReport {
    pub tolerance: f64,
    pub levels: Vec<LevelReport>,
    pub pairs: Vec<PairReport>,
    pub monotone: bool,
    pub sandwich: bool,
    /// Active nodes of the last level in `ρ ≤ δ, ζ ≤ δ`, where the
    /// `(1±ε)U` band is checked.
    pub band_nodes: usize,
    pub band_passed: bool,
    /// Range of `w/φ` on the last level at the final time, over active nodes
    /// next to the excised ray.
    pub near_ray_ratio: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct ExhaustionRun {
    pub report: ExhaustionReport,
    /// Final field of each level.
    pub fields: Vec<Field>,
}

/// Nodes read by the stencil: active ones and the boundary nodes they touch.
fn checked_nodes(g: &Grid2D) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = g.active_nodes().collect();
    v.extend(g.boundary_nodes());
    v
}

/// Solve `w_t = Δw^m + c w_ζ` on each `Q_i` from `w = u̲` at `t = −T_i`, with
/// `w = u̲` on the boundary, and check `w_i ≤ w_{i+1}` and `u̲ ≤ w_i ≤ ū`
/// pointwise (relative `tolerance`) every `check_every` steps. Violations are
/// reported, not raised.
pub fn run_exhaustion(schedule: &ExhaustionSchedule, bundle: &ComparisonBundle, tolerance: f64) -> Result<ExhaustionRun> {
    schedule.validate()?;
    let (lo, hi) = bundle.curve.window();
    let bent = (0..=64).any(|k| {
        let jet = bundle.curve.jet(lo + (hi - lo) * k as f64 / 64.0);
        jet.d2.iter().any(|x| *x != 0.0)
    });
    if bent {
        return Err(Error::InvalidCurve("exhaustion runs use the straight-line reduction".into()));
    }
    let eq = MovingFrame::from(&bundle.params);
    let lower = |r: f64, z: f64| bundle.u_lower(r, z);
    let upper = |r: f64, z: f64| bundle.u_bar(r, z);

    let mut levels = Vec::new();
    let mut fields = Vec::new();
    // snapshots[i][k]: values of level i at time −k·check_every·dt
    let mut snapshots: Vec<Vec<Option<Vec<f64>>>> = Vec::new();
    for (idx, lvl) in schedule.levels.iter().enumerate() {
        let grid = schedule.grid(eq.n, lvl)?;
        let nodes = checked_nodes(&grid);
        let bounds: Vec<(f64, f64)> = nodes.iter().map(|&(i, j)| (lower(grid.rho(i), grid.zeta(j)), upper(grid.rho(i), grid.zeta(j)))).collect();
        let mut f = Field::new(grid, lower, lower)?;
        f.time = -(lvl.steps as f64) * schedule.dt;
        let mut rep = LevelReport {
            level: idx,
            active_nodes: f.grid.active_count(),
            steps: lvl.steps,
            start_time: f.time,
            clamped: 0,
            lower_margin: f64::INFINITY,
            upper_margin: f64::INFINITY,
            sandwich_passed: true,
        };
        let mut snaps = vec![None; lvl.steps / schedule.check_every + 1];
        for k in 0..=lvl.steps {
            if k > 0 {
                rep.clamped += step(&eq, &mut f, schedule.dt, Scheme::LinearlyImplicit)?.clamped;
            }
            let remaining = lvl.steps - k;
            if remaining % schedule.check_every == 0 {
                for (&(i, j), &(lo, hi)) in nodes.iter().zip(&bounds) {
                    let w = f.at(i, j);
                    rep.lower_margin = rep.lower_margin.min((w - lo) / lo);
                    rep.upper_margin = rep.upper_margin.min((hi - w) / hi);
                }
                snaps[remaining / schedule.check_every] = Some(f.values.clone());
            }
        }
        f.time = 0.0;
        rep.sandwich_passed = rep.lower_margin >= -tolerance && rep.upper_margin >= -tolerance;
        levels.push(rep);
        snapshots.push(snaps);
        fields.push(f);
    }

    let mut pairs = Vec::new();
    for i in 0..fields.len().saturating_sub(1) {
        let (ga, gb) = (&fields[i].grid, &fields[i + 1].grid);
        let map: Vec<(usize, usize)> = checked_nodes(ga)
            .into_iter()
            .map(|(a, b)| {
                let (p, q) = gb.node_of(ga, a, b).ok_or_else(|| Error::InvalidGrid("levels are not on one lattice".into()))?;
                Ok((ga.index(a, b), gb.index(p, q)))
            })
            .collect::<Result<_>>()?;
        let mut worst = f64::NEG_INFINITY;
        let mut checkpoints = 0;
        for (sa, sb) in snapshots[i].iter().zip(&snapshots[i + 1]) {
            let (Some(sa), Some(sb)) = (sa, sb) else { continue };
            checkpoints += 1;
            for &(ka, kb) in &map {
                let (x, y) = (sa[ka], sb[kb]);
                worst = worst.max((x - y) / x.max(y));
            }
        }
        pairs.push(PairReport { inner: i, outer: i + 1, checkpoints, max_violation: worst, passed: worst <= tolerance });
    }

    let last = fields.last().expect("validated non-empty");
    let g = &last.grid;
    let (delta, eps) = (bundle.constants.delta, bundle.params.eps);
    let phi = |i: usize, j: usize| crate::profile::profile_value(&bundle.params, g.zeta(j), g.rho(i));
    let band: Vec<(usize, usize)> = g.active_nodes().filter(|&(i, j)| g.rho(i) <= delta && g.zeta(j) <= delta).collect();
    let band_passed = band.iter().all(|&(i, j)| {
        let ratio = last.at(i, j) / phi(i, j);
        ratio >= 1.0 - eps - tolerance && ratio <= 1.0 + eps + tolerance
    });
    let mut near_ray_ratio = [f64::INFINITY, f64::NEG_INFINITY];
    for j in 1..g.nz {
        let s = g.row_range(j).start;
        if s > 0 && s < g.nr {
            let ratio = last.at(s, j) / phi(s, j);
            near_ray_ratio = [near_ray_ratio[0].min(ratio), near_ray_ratio[1].max(ratio)];
        }
    }
    let report = ExhaustionReport {
        tolerance,
        monotone: pairs.iter().all(|p| p.passed),
        sandwich: levels.iter().all(|l| l.sandwich_passed),
        levels,
        pairs,
        band_nodes: band.len(),
        band_passed,
        near_ray_ratio,
    };
    Ok(ExhaustionRun { report, fields })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_schedule_is_nested() {
        let s = ExhaustionSchedule::desk(64, 128);
        s.validate().unwrap();
        assert_eq!(s.levels.len(), 3);
        assert_eq!(s.levels[2].rho_cells, 64);
        assert_eq!(s.levels[2].zeta_cells, 128);
        assert_eq!(s.levels[2].zeta_offset, -64);
    }

    #[test]
    fn rejects_non_nested_levels() {
        let mut s = ExhaustionSchedule::desk(32, 64);
        s.levels.swap(0, 1);
        assert!(s.validate().is_err());
        let mut s = ExhaustionSchedule::desk(32, 64);
        s.levels[1] = s.levels[0];
        assert!(s.validate().is_err());
    }
}
