use std::io::{self, Write};

use serde::Serialize;

use super::field::Field;
use super::grid::{Excision, Grid2D};
use super::scheme::Scheme;

/// Write `ρ,ζ,v,W` for every stored node, row by row. Non-active nodes
/// carry their Dirichlet data.
pub fn write_snapshot_csv<W: Write>(out: &mut W, field: &Field, m: f64) -> io::Result<()> {
    let g = &field.grid;
    writeln!(out, "rho,zeta,v,W")?;
    for j in 0..=g.nz {
        for i in 0..=g.nr {
            writeln!(out, "{:e},{:e},{:e},{:e}", g.rho(i), g.zeta(j), field.at(i, j), field.pressure(m, i, j))?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSummary {
    pub n: usize,
    pub nr: usize,
    pub nz: usize,
    pub h_rho: f64,
    pub h_zeta: f64,
    pub rho_max: f64,
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub excision: Excision,
    pub active_nodes: usize,
}

impl From<&Grid2D> for GridSummary {
    fn from(g: &Grid2D) -> Self {
        GridSummary {
            n: g.n,
            nr: g.nr,
            nz: g.nz,
            h_rho: g.h_rho,
            h_zeta: g.h_zeta,
            rho_max: g.rho_max(),
            zeta_min: g.zeta_min,
            zeta_max: g.zeta_max(),
            excision: g.excision,
            active_nodes: g.active_count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

/// Description of one solver run and the files it wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SnapshotManifest {
    pub run: String,
    pub grid: GridSummary,
    pub scheme: Scheme,
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<String>,
    pub checks: Vec<CheckResult>,
}
