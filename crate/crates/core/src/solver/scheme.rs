use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{Field, MovingFrame};
use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Forward Euler; `dt` must respect [`explicit_bound`].
    Explicit,
    /// Delta-form alternating-direction step with the lagged linearisation
    /// `v^m ≈ v_old^m + m v_old^{m−1}(v − v_old)`: one tridiagonal solve per
    /// `ρ`-line, then one per `ζ`-line. Unconditionally stable.
    LinearlyImplicit,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StepReport {
    /// Active nodes raised to the positivity floor by the implicit step.
    pub clamped: usize,
    /// `‖R(v_old)‖_∞` of the right-hand side at the start of the step.
    pub residual: f64,
}

/// `R(v) = L(v^m) + c D⁺_ζ v` on active nodes, zero elsewhere. `L` is the
/// conservative second-order form `ρ^{2−n}(ρ^{n−2} w_ρ)_ρ + w_ζζ`, which
/// equals the even reflection of `w` across the axis.
pub fn residual(eq: &MovingFrame, field: &Field) -> Vec<f64> {
    let w: Vec<f64> = field.values.iter().map(|v| v.powf(eq.m)).collect();
    residual_with(eq, field, &w)
}

fn residual_with(eq: &MovingFrame, field: &Field, w: &[f64]) -> Vec<f64> {
    let g = &field.grid;
    let stride = g.nr + 1;
    let (hz2, adv) = (1.0 / (g.h_zeta * g.h_zeta), eq.c / g.h_zeta);
    let v = &field.values;
    let mut out = vec![0.0; g.len()];
    out.par_chunks_mut(stride).enumerate().for_each(|(j, row)| {
        for i in g.row_range(j) {
            let k = j * stride + i;
            let west = if i == 0 { 0.0 } else { g.w_minus[i] * (w[k - 1] - w[k]) };
            let lr = g.w_plus[i] * (w[k + 1] - w[k]) + west;
            let lz = (w[k + stride] - 2.0 * w[k] + w[k - stride]) * hz2;
            row[i] = lr + lz + adv * (v[k + stride] - v[k]);
        }
    });
    out
}

/// Largest stable forward-Euler step: `1 / max(D·(w₊ + w₋ + 2/h_ζ²) + c/h_ζ)`
/// over active nodes, with `D = m v^{m−1}`. Keeps the update a convex
/// combination of neighbours.
pub fn explicit_bound(eq: &MovingFrame, field: &Field) -> f64 {
    let g = &field.grid;
    let hz2 = 1.0 / (g.h_zeta * g.h_zeta);
    let worst = g
        .active_nodes()
        .map(|(i, j)| {
            let d = eq.m * field.at(i, j).powf(eq.m - 1.0);
            d * (g.w_plus[i] + g.w_minus[i] + 2.0 * hz2) + eq.c / g.h_zeta
        })
        .fold(0.0, f64::max);
    1.0 / worst
}

/// Advance `field` by `dt`.
pub fn step(eq: &MovingFrame, field: &mut Field, dt: f64, scheme: Scheme) -> Result<StepReport> {
    match scheme {
        Scheme::Explicit => step_explicit(eq, field, dt),
        Scheme::LinearlyImplicit => step_implicit(eq, field, dt),
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

fn step_explicit(eq: &MovingFrame, field: &mut Field, dt: f64) -> Result<StepReport> {
    let bound = explicit_bound(eq, field);
    if dt > bound {
        return Err(Error::UnstableStep { dt, bound });
    }
    let r = residual(eq, field);
    let g = &field.grid;
    for (i, j) in g.active_nodes() {
        let k = g.index(i, j);
        let v = field.values[k] + dt * r[k];
        if !(v >= field.floor) {
            return Err(Error::PositivityLoss { i, j, value: v, floor: field.floor });
        }
        field.values[k] = v;
    }
    field.time += dt;
    Ok(StepReport { clamped: 0, residual: max_abs(&r) })
}

fn step_implicit(eq: &MovingFrame, field: &mut Field, dt: f64) -> Result<StepReport> {
    let g = field.grid.clone();
    let stride = g.nr + 1;
    let w: Vec<f64> = field.values.iter().map(|v| v.powf(eq.m)).collect();
    let r = residual_with(eq, field, &w);
    // D = m v^{m−1} = m w / v
    let d: Vec<f64> = w.iter().zip(&field.values).map(|(w, v)| eq.m * w / v).collect();

    // (I − dt J_ρ) δ* = dt R, one system per row
    let mut delta = vec![0.0; g.len()];
    delta.par_chunks_mut(stride).enumerate().for_each(|(j, row)| {
        let range = g.row_range(j);
        if range.is_empty() {
            return;
        }
        let len = range.len();
        let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
        for (q, i) in range.clone().enumerate() {
            let k = j * stride + i;
            let (wp, wm) = (g.w_plus[i], g.w_minus[i]);
            lo[q] = if i > 0 { -dt * wm * d[k - 1] } else { 0.0 };
            di[q] = 1.0 + dt * (wp + wm) * d[k];
            up[q] = -dt * wp * d[k + 1];
            rhs[q] = dt * r[k];
        }
        let mut scratch = Vec::new();
        solve_tridiagonal(&lo, &di, &up, &mut rhs, &mut scratch);
        row[range].copy_from_slice(&rhs);
    });

    // (I − dt J_ζ) δ = δ*, one system per column
    let hz2 = 1.0 / (g.h_zeta * g.h_zeta);
    let adv = eq.c / g.h_zeta;
    let columns: Vec<(usize, Vec<f64>)> = (0..g.nr)
        .into_par_iter()
        .filter_map(|i| {
            let range = g.col_range(i);
            if range.is_empty() {
                return None;
            }
            let len = range.len();
            let (mut lo, mut di, mut up, mut rhs) = (vec![0.0; len], vec![0.0; len], vec![0.0; len], vec![0.0; len]);
            for (q, j) in range.clone().enumerate() {
                let k = j * stride + i;
                lo[q] = -dt * d[k - stride] * hz2;
                di[q] = 1.0 + dt * (2.0 * d[k] * hz2 + adv);
                up[q] = -dt * (d[k + stride] * hz2 + adv);
                rhs[q] = delta[k];
            }
            let mut scratch = Vec::new();
            solve_tridiagonal(&lo, &di, &up, &mut rhs, &mut scratch);
            Some((i, rhs))
        })
        .collect();

    let mut clamped = 0;
    for (i, col) in columns {
        for (j, dv) in g.col_range(i).zip(col) {
            let k = j * stride + i;
            let v = field.values[k] + dv;
            if v >= field.floor {
                field.values[k] = v;
            } else {
                field.values[k] = field.floor;
                clamped += 1;
            }
        }
    }
    field.time += dt;
    Ok(StepReport { clamped, residual: max_abs(&r) })
}
