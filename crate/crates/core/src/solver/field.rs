use serde::Serialize;

use super::grid::Grid2D;
use crate::error::{Error, Result};
use crate::params::ProblemParams;

/// Fraction of the smallest boundary datum used as the positivity floor.
pub const FLOOR_FRACTION: f64 = 1e-12;

/// Coefficients of `v_t = (v^m)_ρρ + ((n−2)/ρ)(v^m)_ρ + (v^m)_ζζ + c v_ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MovingFrame {
    pub n: usize,
    pub m: f64,
    pub c: f64,
}

impl From<&ProblemParams> for MovingFrame {
    fn from(p: &ProblemParams) -> Self {
        MovingFrame { n: p.n, m: p.m, c: p.c }
    }
}

/// Values on every node of a grid. Dirichlet nodes hold boundary data and
/// are never changed by a step.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Grid2D,
    pub values: Vec<f64>,
    pub time: f64,
    pub floor: f64,
}

impl Field {
    /// Boundary data from `boundary`, active nodes from `initial`.
    pub fn new(grid: Grid2D, boundary: impl Fn(f64, f64) -> f64, initial: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = vec![f64::NAN; grid.len()];
        let mut min_boundary = f64::INFINITY;
        for j in 0..=grid.nz {
            for i in 0..=grid.nr {
                let (rho, zeta) = (grid.rho(i), grid.zeta(j));
                let v = if grid.is_active(i, j) { initial(rho, zeta) } else { boundary(rho, zeta) };
                if !(v > 0.0) || !v.is_finite() {
                    return Err(Error::NonpositiveInput(v));
                }
                if !grid.is_active(i, j) {
                    min_boundary = min_boundary.min(v);
                }
                values[grid.index(i, j)] = v;
            }
        }
        Ok(Field { grid, values, time: 0.0, floor: FLOOR_FRACTION * min_boundary })
    }

    /// Field equal to `f` everywhere.
    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        Self::new(grid, &f, &f)
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    /// Pressure `W = m v^{m−1}` at a node.
    pub fn pressure(&self, m: f64, i: usize, j: usize) -> f64 {
        m * self.at(i, j).powf(m - 1.0)
    }

    /// Largest `|v|` over active nodes.
    pub fn max_active(&self) -> f64 {
        self.grid.active_nodes().map(|(i, j)| self.at(i, j).abs()).fold(0.0, f64::max)
    }

    /// Largest `|v − f|` over active nodes.
    pub fn max_deviation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        self.grid
            .active_nodes()
            .map(|(i, j)| (self.at(i, j) - f(self.grid.rho(i), self.grid.zeta(j))).abs())
            .fold(0.0, f64::max)
    }

    /// `‖v − f‖_∞ / ‖f‖_∞` over active nodes.
    pub fn relative_deviation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let g = &self.grid;
        let (mut num, mut den) = (0.0f64, 0.0f64);
        for (i, j) in g.active_nodes() {
            let e = f(g.rho(i), g.zeta(j));
            num = num.max((self.at(i, j) - e).abs());
            den = den.max(e.abs());
        }
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::grid::Excision;

    #[test]
    fn floor_and_rejection() {
        let g = Grid2D::new(3, 1.0, -1.0, 1.0, 8, 8, Excision { rho_cut: 0.3, zeta_cut: 0.0 }).unwrap();
        let f = Field::new(g.clone(), |r, _| 1.0 + r, |_, _| 5.0).unwrap();
        let min_b = (0..=g.nz)
            .flat_map(|j| (0..=g.nr).map(move |i| (i, j)))
            .filter(|&(i, j)| !g.is_active(i, j))
            .map(|(i, _)| 1.0 + g.rho(i))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(f.floor, FLOOR_FRACTION * min_b);
        assert_eq!(f.at(4, 6), 5.0);
        assert!(matches!(Field::from_fn(g, |_, z| z), Err(Error::NonpositiveInput(_))));
    }
}
