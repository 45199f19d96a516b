use serde::Serialize;

use crate::error::{Error, Result};

/// The excised neighbourhood `{ρ < rho_cut, ζ ≤ zeta_cut}` of the singular
/// ray. Nodes inside carry Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Excision {
    pub rho_cut: f64,
    pub zeta_cut: f64,
}

impl Excision {
    pub fn contains(&self, rho: f64, zeta: f64) -> bool {
        rho < self.rho_cut && zeta <= self.zeta_cut
    }
}

/// Structured grid in the cylindrical variables `(ρ, ζ)` of the moving
/// frame.
///
/// `ρ` is cell-centred, `ρ_i = (i + ½) h_ρ` for `i = 0..=nr`; the column
/// `i = nr` is the outer Dirichlet boundary. `ζ_j = ζ_min + j h_ζ` for
/// `j = 0..=nz`, with Dirichlet rows `j = 0` and `j = nz`. Values are stored
/// row-major, `ρ` fastest.
#[derive(Debug, Clone, Serialize)]
pub struct Grid2D {
    pub n: usize,
    pub nr: usize,
    pub nz: usize,
    pub h_rho: f64,
    pub h_zeta: f64,
    pub zeta_min: f64,
    pub excision: Excision,
    /// First active `i` in each row (`nr` when the row has none).
    #[serde(skip)]
    row_start: Vec<usize>,
    /// First active `j` in each column `i < nr` (`nz` when none).
    #[serde(skip)]
    col_start: Vec<usize>,
    /// `a_{i+½}/(ρ_i^{n−2} h_ρ²)` and `a_{i−½}/(ρ_i^{n−2} h_ρ²)` with
    /// `a = ρ^{n−2}`; the flux through the axis is zero.
    #[serde(skip)]
    pub(crate) w_plus: Vec<f64>,
    #[serde(skip)]
    pub(crate) w_minus: Vec<f64>,
}

impl Grid2D {
    /// Grid with `nr` active `ρ` cells up to `rho_max` (the centre of the
    /// Dirichlet column) and `nz` `ζ` intervals on `[zeta_min, zeta_max]`.
    pub fn new(n: usize, rho_max: f64, zeta_min: f64, zeta_max: f64, nr: usize, nz: usize, excision: Excision) -> Result<Self> {
        if !(rho_max > 0.0) || !(zeta_max > zeta_min) {
            return Err(Error::InvalidGrid(format!("empty domain: rho_max {rho_max}, zeta [{zeta_min}, {zeta_max}]")));
        }
        let h_rho = rho_max / (nr as f64 + 0.5);
        let h_zeta = (zeta_max - zeta_min) / nz as f64;
        Self::with_spacing(n, h_rho, h_zeta, nr, zeta_min, nz, excision)
    }

    /// Grid with given spacings; used to put several grids on one lattice.
    pub fn with_spacing(
        n: usize,
        h_rho: f64,
        h_zeta: f64,
        nr: usize,
        zeta_min: f64,
        nz: usize,
        excision: Excision,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("dimension {n} < 2")));
        }
        if nr < 4 || nz < 4 {
            return Err(Error::InvalidGrid(format!("need at least 4 cells per direction, got {nr}×{nz}")));
        }
        if !(h_rho > 0.0 && h_zeta > 0.0 && h_rho.is_finite() && h_zeta.is_finite() && zeta_min.is_finite()) {
            return Err(Error::InvalidGrid(format!("bad spacings {h_rho}, {h_zeta}")));
        }
        if !(excision.rho_cut >= 0.0) || !excision.zeta_cut.is_finite() {
            return Err(Error::InvalidGrid(format!("bad excision {excision:?}")));
        }
        let mut g = Grid2D {
            n,
            nr,
            nz,
            h_rho,
            h_zeta,
            zeta_min,
            excision,
            row_start: Vec::new(),
            col_start: Vec::new(),
            w_plus: Vec::new(),
            w_minus: Vec::new(),
        };
        g.row_start = (0..=nz)
            .map(|j| {
                if j == 0 || j == nz {
                    nr
                } else {
                    (0..nr).find(|&i| !excision.contains(g.rho(i), g.zeta(j))).unwrap_or(nr)
                }
            })
            .collect();
        g.col_start = (0..nr)
            .map(|i| (1..nz).find(|&j| !excision.contains(g.rho(i), g.zeta(j))).unwrap_or(nz))
            .collect();
        let e = n as f64 - 2.0;
        let h2 = h_rho * h_rho;
        for i in 0..nr {
            let a = |x: f64| if x <= 0.0 { 0.0 } else { x.powf(e) };
            let centre = g.rho(i).powf(e) * h2;
            g.w_plus.push(a((i as f64 + 1.0) * h_rho) / centre);
            g.w_minus.push(if i == 0 { 0.0 } else { a(i as f64 * h_rho) / centre });
        }
        if g.active_count() == 0 {
            return Err(Error::InvalidGrid("excision covers every cell".into()));
        }
        Ok(g)
    }

    pub fn rho(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h_rho
    }

    pub fn zeta(&self, j: usize) -> f64 {
        self.zeta_min + j as f64 * self.h_zeta
    }

    pub fn rho_max(&self) -> f64 {
        self.rho(self.nr)
    }

    pub fn zeta_max(&self) -> f64 {
        self.zeta(self.nz)
    }

    /// Number of stored nodes, `(nr+1)(nz+1)`.
    pub fn len(&self) -> usize {
        (self.nr + 1) * (self.nz + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.nr + 1) + i
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        j > 0 && j < self.nz && i < self.nr && i >= self.row_start[j]
    }

    pub fn is_excised(&self, i: usize, j: usize) -> bool {
        self.excision.contains(self.rho(i), self.zeta(j))
    }

    /// Active `i` range of row `j`.
    pub fn row_range(&self, j: usize) -> std::ops::Range<usize> {
        self.row_start[j]..self.nr
    }

    /// Active `j` range of column `i < nr`.
    pub fn col_range(&self, i: usize) -> std::ops::Range<usize> {
        if i >= self.nr {
            return 0..0;
        }
        self.col_start[i]..self.nz
    }

    pub fn active_count(&self) -> usize {
        (0..=self.nz).map(|j| self.row_range(j).len()).sum()
    }

    /// `(i, j)` of every active node, row by row.
    pub fn active_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..self.nz).flat_map(move |j| self.row_range(j).map(move |i| (i, j)))
    }

    /// Dirichlet nodes that touch an active node. These are the only stored
    /// boundary values the stencil reads.
    pub fn boundary_nodes(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..=self.nz {
            for i in 0..=self.nr {
                if self.is_active(i, j) {
                    continue;
                }
                let touches = (i > 0 && self.is_active(i - 1, j))
                    || self.is_active(i + 1, j)
                    || (j > 0 && self.is_active(i, j - 1))
                    || self.is_active(i, j + 1);
                if touches {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Node of this grid at the position of node `(i, j)` of `other`, if
    /// both sit on one lattice and the position is stored here.
    pub fn node_of(&self, other: &Grid2D, i: usize, j: usize) -> Option<(usize, usize)> {
        let z = (other.zeta(j) - self.zeta_min) / self.h_zeta;
        let jj = z.round();
        if (z - jj).abs() > 1e-6 || jj < 0.0 || jj > self.nz as f64 || i > self.nr {
            return None;
        }
        Some((i, jj as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid2D {
        Grid2D::new(3, 2.0, -2.0, 2.0, 16, 16, Excision { rho_cut: 0.5, zeta_cut: 0.0 }).unwrap()
    }

    #[test]
    fn nodes_and_spacings() {
        let g = grid();
        assert!((g.h_rho - 2.0 / 16.5).abs() < 1e-15);
        assert!((g.rho_max() - 2.0).abs() < 1e-14);
        assert!((g.h_zeta - 0.25).abs() < 1e-15);
        assert!((g.zeta_max() - 2.0).abs() < 1e-14);
        assert_eq!(g.len(), 17 * 17);
    }

    #[test]
    fn mask_is_down_left() {
        let g = grid();
        for j in 1..g.nz {
            for i in 0..g.nr {
                let ex = g.is_excised(i, j);
                assert_eq!(g.is_active(i, j), !ex);
                if ex {
                    // everything left of and below an excised node is excised
                    assert!(i == 0 || g.is_excised(i - 1, j));
                    assert!(j == 1 || g.is_excised(i, j - 1));
                }
            }
        }
        for i in 0..g.nr {
            for j in g.col_range(i) {
                assert!(g.is_active(i, j));
            }
        }
        assert_eq!(g.active_nodes().count(), g.active_count());
    }

    #[test]
    fn axis_flux_vanishes() {
        let g = grid();
        assert_eq!(g.w_minus[0], 0.0);
        // n = 3: a = ρ, so w_± = ρ_{i±½}/(ρ_i h²)
        let h2 = g.h_rho * g.h_rho;
        assert!((g.w_plus[2] - 3.0 / (2.5 * h2)).abs() < 1e-12 * g.w_plus[2]);
        assert!((g.w_minus[2] - 2.0 / (2.5 * h2)).abs() < 1e-12 * g.w_minus[2]);
    }

    #[test]
    fn lattice_lookup() {
        let a = Grid2D::with_spacing(3, 0.1, 0.1, 10, -1.0, 20, Excision { rho_cut: 0.2, zeta_cut: 0.0 }).unwrap();
        let b = Grid2D::with_spacing(3, 0.1, 0.1, 20, -2.0, 40, Excision { rho_cut: 0.1, zeta_cut: 0.0 }).unwrap();
        assert_eq!(b.node_of(&a, 3, 0), Some((3, 10)));
        assert_eq!(a.node_of(&b, 3, 0), None);
    }

    #[test]
    fn rejects_bad_input() {
        let ex = Excision { rho_cut: 0.1, zeta_cut: 0.0 };
        assert!(Grid2D::new(1, 1.0, 0.0, 1.0, 8, 8, ex).is_err());
        assert!(Grid2D::new(3, 1.0, 0.0, 1.0, 2, 8, ex).is_err());
        assert!(Grid2D::new(3, 1.0, 1.0, 0.0, 8, 8, ex).is_err());
        let all = Excision { rho_cut: 10.0, zeta_cut: 10.0 };
        assert!(Grid2D::new(3, 1.0, 0.0, 1.0, 8, 8, all).is_err());
    }
}
