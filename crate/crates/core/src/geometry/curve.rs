use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, scale, sub, Vector};

/// Position and the first three arclength derivatives of a curve at one
/// parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    pub pos: Vector,
    pub d1: Vector,
    pub d2: Vector,
    pub d3: Vector,
}

/// A unit-speed, three times differentiable map `s ↦ ξ(s)` into ℝⁿ.
pub trait CurveEval: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn jet(&self, s: f64) -> CurveJet;

    fn position(&self, s: f64) -> Vector {
        self.jet(s).pos
    }

    /// Cheap guess for the foot parameter of `x`, if the curve knows one.
    fn foot_guess(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

/// Straight line `ξ(s) = s·ω`.
#[derive(Debug, Clone)]
pub struct Line {
    omega: Vector,
}

impl Line {
    pub fn new(omega: Vector) -> Result<Self> {
        let len = norm(&omega);
        if omega.len() < 2 || !(len > 0.0) {
            return Err(Error::InvalidCurve("line direction must be a nonzero vector in n ≥ 2".into()));
        }
        Ok(Self { omega: scale(1.0 / len, &omega) })
    }

    pub fn axis(dim: usize) -> Self {
        let mut omega = vec![0.0; dim];
        omega[0] = 1.0;
        Self { omega }
    }

    pub fn direction(&self) -> &[f64] {
        &self.omega
    }
}

impl CurveEval for Line {
    fn dim(&self) -> usize {
        self.omega.len()
    }

    fn jet(&self, s: f64) -> CurveJet {
        let zero = vec![0.0; self.omega.len()];
        CurveJet { pos: scale(s, &self.omega), d1: self.omega.clone(), d2: zero.clone(), d3: zero }
    }

    fn foot_guess(&self, x: &[f64]) -> Option<f64> {
        Some(dot(x, &self.omega))
    }

    fn label(&self) -> String {
        "line".into()
    }
}

/// Unit-speed helix about the third axis:
/// `ξ(s) = (ρ cos(s/L), ρ sin(s/L), h s/L)` with `L = √(ρ² + h²)`.
#[derive(Debug, Clone)]
pub struct Helix {
    dim: usize,
    radius: f64,
    pitch: f64,
    speed: f64,
}

impl Helix {
    pub fn new(dim: usize, radius: f64, pitch: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidCurve(format!("a helix needs n ≥ 3, got n = {dim}")));
        }
        if !(radius > 0.0 && pitch > 0.0) {
            return Err(Error::InvalidCurve("helix radius and pitch must be positive".into()));
        }
        Ok(Self { dim, radius, pitch, speed: radius.hypot(pitch) })
    }

    /// `|ξ''| = ρ / L²`.
    pub fn curvature(&self) -> f64 {
        self.radius / (self.speed * self.speed)
    }
}

impl CurveEval for Helix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, s: f64) -> CurveJet {
        let l = self.speed;
        let t = s / l;
        let (sn, cs) = t.sin_cos();
        let rho = self.radius;
        let mut j = CurveJet {
            pos: vec![0.0; self.dim],
            d1: vec![0.0; self.dim],
            d2: vec![0.0; self.dim],
            d3: vec![0.0; self.dim],
        };
        j.pos[0] = rho * cs;
        j.pos[1] = rho * sn;
        j.pos[2] = self.pitch * t;
        j.d1[0] = -rho * sn / l;
        j.d1[1] = rho * cs / l;
        j.d1[2] = self.pitch / l;
        j.d2[0] = -rho * cs / (l * l);
        j.d2[1] = -rho * sn / (l * l);
        j.d3[0] = rho * sn / (l * l * l);
        j.d3[1] = -rho * cs / (l * l * l);
        j
    }

    fn foot_guess(&self, x: &[f64]) -> Option<f64> {
        let theta = x[1].atan2(x[0]);
        let turns = ((x[2] / self.pitch - theta) / (2.0 * PI)).round();
        Some((theta + 2.0 * PI * turns) * self.speed)
    }

    fn label(&self) -> String {
        format!("helix(radius={}, pitch={})", self.radius, self.pitch)
    }
}

/// A regular parametrised curve `t ↦ γ(t)` with three analytic derivatives.
pub trait RawCurve: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    /// `[γ, γ', γ'', γ''']` at `t`.
    fn eval(&self, t: f64) -> [Vector; 4];

    /// Period of the speed `|γ'|`, when it has one.
    fn speed_period(&self) -> Option<f64> {
        None
    }

    fn param_guess(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn label(&self) -> String;
}

/// `γ(t) = t·e₁`.
#[derive(Debug, Clone)]
pub struct RawLine {
    pub dim: usize,
}

impl RawCurve for RawLine {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64) -> [Vector; 4] {
        let mut p = vec![0.0; self.dim];
        let mut d = vec![0.0; self.dim];
        p[0] = t;
        d[0] = 1.0;
        [p, d, vec![0.0; self.dim], vec![0.0; self.dim]]
    }

    fn param_guess(&self, x: &[f64]) -> Option<f64> {
        Some(x[0])
    }

    fn label(&self) -> String {
        "raw-line".into()
    }
}

/// `γ(t) = (ρ cos t, ρ sin t, h t)`.
#[derive(Debug, Clone)]
pub struct RawHelix {
    pub dim: usize,
    pub radius: f64,
    pub pitch: f64,
}

impl RawCurve for RawHelix {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64) -> [Vector; 4] {
        let (sn, cs) = t.sin_cos();
        let r = self.radius;
        let mut out = [vec![0.0; self.dim], vec![0.0; self.dim], vec![0.0; self.dim], vec![0.0; self.dim]];
        out[0][0] = r * cs;
        out[0][1] = r * sn;
        out[0][2] = self.pitch * t;
        out[1][0] = -r * sn;
        out[1][1] = r * cs;
        out[1][2] = self.pitch;
        out[2][0] = -r * cs;
        out[2][1] = -r * sn;
        out[3][0] = r * sn;
        out[3][1] = -r * cs;
        out
    }

    fn speed_period(&self) -> Option<f64> {
        Some(2.0 * PI)
    }

    fn param_guess(&self, x: &[f64]) -> Option<f64> {
        let theta = x[1].atan2(x[0]);
        let turns = ((x[2] / self.pitch - theta) / (2.0 * PI)).round();
        Some(theta + 2.0 * PI * turns)
    }

    fn label(&self) -> String {
        format!("raw-helix(radius={}, pitch={})", self.radius, self.pitch)
    }
}

/// Sine graph `γ(t) = (t, α sin(k t), 0, …)`.
#[derive(Debug, Clone)]
pub struct RawSine {
    pub dim: usize,
    pub amplitude: f64,
    pub wavenumber: f64,
}

impl RawCurve for RawSine {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64) -> [Vector; 4] {
        let (a, k) = (self.amplitude, self.wavenumber);
        let (sn, cs) = (k * t).sin_cos();
        let mut out = [vec![0.0; self.dim], vec![0.0; self.dim], vec![0.0; self.dim], vec![0.0; self.dim]];
        out[0][0] = t;
        out[0][1] = a * sn;
        out[1][0] = 1.0;
        out[1][1] = a * k * cs;
        out[2][1] = -a * k * k * sn;
        out[3][1] = -a * k * k * k * cs;
        out
    }

    fn speed_period(&self) -> Option<f64> {
        Some(2.0 * PI / self.wavenumber)
    }

    fn param_guess(&self, x: &[f64]) -> Option<f64> {
        Some(x[0])
    }

    fn label(&self) -> String {
        format!("sine(amplitude={}, wavenumber={})", self.amplitude, self.wavenumber)
    }
}

// 8-point Gauss–Legendre rule on [-1, 1].
const GL_NODES: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];
const GL_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362,
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

const SPEED_THRESHOLD: f64 = 1e-8;

/// Arclength reparametrisation of a [`RawCurve`].
///
/// The cumulative arclength is tabulated on a fine grid with Gauss–Legendre
/// panels; `t(s)` is recovered by safeguarded Newton on that table. Curves
/// with a periodic speed are handled on one period and extended exactly.
/// Other curves live on a finite window and continue as straight lines
/// beyond it (only C¹ across the window edges).
#[derive(Debug)]
pub struct ArclengthCurve {
    raw: Arc<dyn RawCurve>,
    t_lo: f64,
    t_hi: f64,
    period: Option<f64>,
    knots: Vec<f64>,
    cumulative: Vec<f64>,
    // arclength of the table origin t_lo relative to t = 0
    s_offset: f64,
}

impl ArclengthCurve {
    fn speed(&self, t: f64) -> f64 {
        norm(&self.raw.eval(t)[1])
    }

    fn panel(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        GL_NODES
            .iter()
            .zip(GL_WEIGHTS.iter())
            .map(|(x, w)| w * self.speed(mid + half * x))
            .sum::<f64>()
            * half
    }

    fn table_len(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Arclength from `t_lo` to `t`, `t` inside the table.
    fn table_arclength(&self, t: f64) -> f64 {
        let h = self.knots[1] - self.knots[0];
        let k = (((t - self.t_lo) / h).floor() as isize).clamp(0, self.knots.len() as isize - 2) as usize;
        self.cumulative[k] + self.panel(self.knots[k], t)
    }

    /// Signed arclength from `t = 0`.
    pub fn arclength(&self, t: f64) -> f64 {
        match self.period {
            Some(period) => {
                let q = ((t - self.t_lo) / period).floor();
                q * self.table_len() + self.table_arclength(t - q * period) - self.s_offset
            }
            None => {
                let tc = t.clamp(self.t_lo, self.t_hi);
                let base = self.table_arclength(tc) - self.s_offset;
                // straight-line continuation past the window has unit speed in s,
                // but the raw parameter keeps the endpoint speed
                base + (t - tc) * self.speed(tc)
            }
        }
    }

    fn invert_in_table(&self, target: f64) -> f64 {
        let k = match self.cumulative.binary_search_by(|v| v.total_cmp(&target)) {
            Ok(i) => return self.knots[i.min(self.knots.len() - 1)],
            Err(i) => i.clamp(1, self.knots.len() - 1) - 1,
        };
        let (mut lo, mut hi) = (self.knots[k], self.knots[k + 1]);
        let span = self.cumulative[k + 1] - self.cumulative[k];
        let mut t = lo + (hi - lo) * (target - self.cumulative[k]) / span;
        let tol = 2.0 * f64::EPSILON * target.abs().max(1.0);
        for _ in 0..60 {
            let f = self.cumulative[k] + self.panel(self.knots[k], t) - target;
            if f.abs() <= tol {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let mut next = t - f / self.speed(t);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            let done = (next - t).abs() <= 4.0 * f64::EPSILON * (1.0 + t.abs());
            t = next;
            if done {
                break;
            }
        }
        t
    }

    /// Raw parameter `t(s)`.
    pub fn parameter(&self, s: f64) -> f64 {
        match self.period {
            Some(period) => {
                let total = self.table_len();
                let s_rel = s + self.s_offset;
                let q = (s_rel / total).floor();
                q * period + self.invert_in_table(s_rel - q * total)
            }
            None => self.invert_in_table((s + self.s_offset).clamp(0.0, self.table_len())),
        }
    }

    fn s_bounds(&self) -> (f64, f64) {
        (-self.s_offset, self.table_len() - self.s_offset)
    }

    fn jet_at_param(&self, t: f64) -> CurveJet {
        let [g, g1, g2, g3] = self.raw.eval(t);
        let v = norm(&g1);
        let v2 = v * v;
        let a = dot(&g1, &g2);
        let b = dot(&g2, &g2) + dot(&g1, &g3);
        let t1 = 1.0 / v;
        let t2 = -a / (v2 * v2);
        let t3 = (-b / (v2 * v2) + 4.0 * a * a / (v2 * v2 * v2)) / v;
        let d1 = scale(t1, &g1);
        let d2: Vector = g2.iter().zip(&g1).map(|(p, q)| p * t1 * t1 + q * t2).collect();
        let d3: Vector = g3
            .iter()
            .zip(&g2)
            .zip(&g1)
            .map(|((r, p), q)| r * t1 * t1 * t1 + 3.0 * p * t1 * t2 + q * t3)
            .collect();
        CurveJet { pos: g, d1, d2, d3 }
    }
}

impl CurveEval for ArclengthCurve {
    fn dim(&self) -> usize {
        self.raw.dim()
    }

    fn jet(&self, s: f64) -> CurveJet {
        if self.period.is_none() {
            let (lo, hi) = self.s_bounds();
            if s < lo || s > hi {
                let edge = if s < lo { lo } else { hi };
                let j = self.jet_at_param(self.parameter(edge));
                let zero = vec![0.0; j.pos.len()];
                let pos = j.pos.iter().zip(&j.d1).map(|(p, d)| p + (s - edge) * d).collect();
                return CurveJet { pos, d1: j.d1, d2: zero.clone(), d3: zero };
            }
        }
        self.jet_at_param(self.parameter(s))
    }

    fn foot_guess(&self, x: &[f64]) -> Option<f64> {
        self.raw.param_guess(x).map(|t| self.arclength(t))
    }

    fn label(&self) -> String {
        format!("unit-speed {}", self.raw.label())
    }
}

/// Reparametrise `raw` by arclength. For curves with a periodic speed the
/// window is ignored; otherwise `t_window` is the tabulated range.
pub fn reparametrize_unit_speed(raw: Arc<dyn RawCurve>, t_window: (f64, f64)) -> Result<ArclengthCurve> {
    let (t_lo, t_hi, period) = match raw.speed_period() {
        Some(p) => (0.0, p, Some(p)),
        None => {
            if !(t_window.1 > t_window.0) {
                return Err(Error::InvalidCurve("empty parameter window".into()));
            }
            (t_window.0, t_window.1, None)
        }
    };
    let panels = (((t_hi - t_lo) / 0.01).ceil() as usize).max(256);
    let knots: Vec<f64> = (0..=panels).map(|k| t_lo + (t_hi - t_lo) * k as f64 / panels as f64).collect();
    let mut curve = ArclengthCurve {
        raw,
        t_lo,
        t_hi,
        period,
        knots,
        cumulative: Vec::new(),
        s_offset: 0.0,
    };
    for &t in curve.knots.iter().step_by(8).chain(std::iter::once(&t_hi)) {
        let speed = curve.speed(t);
        if !(speed >= SPEED_THRESHOLD) {
            return Err(Error::DegenerateSpeed { t, speed });
        }
    }
    let mut cumulative = Vec::with_capacity(panels + 1);
    cumulative.push(0.0);
    for k in 0..panels {
        let next = cumulative[k] + curve.panel(curve.knots[k], curve.knots[k + 1]);
        cumulative.push(next);
    }
    curve.cumulative = cumulative;
    let anchor = 0.0f64.clamp(t_lo, t_hi);
    curve.s_offset = curve.table_arclength(anchor);
    Ok(curve)
}

/// A unit-speed curve together with its curvature bound `K` and the
/// uniqueness radius `r̃₀` of its tubular neighbourhood.
#[derive(Debug, Clone)]
pub struct Curve {
    eval: Arc<dyn CurveEval>,
    window: (f64, f64),
    k_bound: f64,
    r_tilde0: f64,
    r_tilde0_sampled: bool,
}

impl Curve {
    /// Wrap `eval`, estimating `K` and `r̃₀` on `window`.
    pub fn new(eval: Arc<dyn CurveEval>, window: (f64, f64)) -> Result<Self> {
        if !(window.1 > window.0) {
            return Err(Error::InvalidCurve("empty arclength window".into()));
        }
        let k_bound = sampled_curvature_bound(eval.as_ref(), window);
        let mut curve = Self { eval, window, k_bound, r_tilde0: 0.0, r_tilde0_sampled: true };
        curve.r_tilde0 = super::uniqueness::estimate_uniqueness_radius(&curve, window);
        Ok(curve)
    }

    /// Override `K` (re-estimating `r̃₀` against it) and, optionally, `r̃₀`.
    pub fn with_overrides(mut self, k_bound: Option<f64>, r_tilde0: Option<f64>) -> Result<Self> {
        if let Some(k) = k_bound {
            if !(k > 1.0) {
                return Err(Error::InvalidCurve(format!("K = {k} must exceed 1")));
            }
            self.k_bound = k;
            self.r_tilde0 = super::uniqueness::estimate_uniqueness_radius(&self, self.window);
        }
        if let Some(r) = r_tilde0 {
            if !(r > 0.0 && r < 1.0 / (2.0 * self.k_bound)) {
                return Err(Error::InvalidCurve(format!("r̃₀ = {r} must lie in (0, 1/(2K))")));
            }
            self.r_tilde0 = r;
            self.r_tilde0_sampled = false;
        }
        Ok(self)
    }

    pub fn line(dim: usize, window: (f64, f64)) -> Result<Self> {
        Self::new(Arc::new(Line::axis(dim)), window)
    }

    pub fn helix(dim: usize, radius: f64, pitch: f64, window: (f64, f64)) -> Result<Self> {
        Self::new(Arc::new(Helix::new(dim, radius, pitch)?), window)
    }

    pub fn sine(dim: usize, amplitude: f64, wavenumber: f64, window: (f64, f64)) -> Result<Self> {
        if dim < 2 || !(wavenumber > 0.0) {
            return Err(Error::InvalidCurve("sine graph needs n ≥ 2 and a positive wavenumber".into()));
        }
        let raw = Arc::new(RawSine { dim, amplitude, wavenumber });
        Self::new(Arc::new(reparametrize_unit_speed(raw, (0.0, 0.0))?), window)
    }

    pub fn eval(&self) -> &dyn CurveEval {
        self.eval.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.eval.dim()
    }

    pub fn jet(&self, s: f64) -> CurveJet {
        self.eval.jet(s)
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn k_bound(&self) -> f64 {
        self.k_bound
    }

    pub fn r_tilde0(&self) -> f64 {
        self.r_tilde0
    }

    /// True when `r̃₀` comes from the sampled no-self-approach scan rather
    /// than a user override. Either way it is not a proof.
    pub fn r_tilde0_is_sampled(&self) -> bool {
        self.r_tilde0_sampled
    }

    pub fn label(&self) -> String {
        self.eval.label()
    }

    /// Parameter of the sample on the window grid closest to `x`.
    pub(crate) fn scan_guess(&self, x: &[f64]) -> f64 {
        let (lo, hi) = self.window;
        let samples = 4096;
        (0..=samples)
            .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
            .min_by(|&a, &b| {
                let da = norm(&sub(x, &self.eval.position(a)));
                let db = norm(&sub(x, &self.eval.position(b)));
                da.total_cmp(&db)
            })
            .unwrap()
    }
}

/// `max(|ξ''|, |ξ'''|)` sampled on `window`, times 1.05, and at least `1 + 1e-9`.
pub fn sampled_curvature_bound(eval: &dyn CurveEval, window: (f64, f64)) -> f64 {
    let samples = 10_000;
    let sup = (0..=samples)
        .map(|k| {
            let j = eval.jet(window.0 + (window.1 - window.0) * k as f64 / samples as f64);
            norm(&j.d2).max(norm(&j.d3))
        })
        .fold(0.0, f64::max);
    (1.05 * sup).max(1.0 + 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_speed_residual(c: &dyn CurveEval, s: f64) -> (f64, f64) {
        let j = c.jet(s);
        ((norm(&j.d1) - 1.0).abs(), dot(&j.d1, &j.d2).abs())
    }

    #[test]
    fn raw_line_reparametrizes_to_identity() {
        let c = reparametrize_unit_speed(Arc::new(RawLine { dim: 3 }), (-5.0, 5.0)).unwrap();
        for s in [-4.0, -1.5, 0.0, 0.3, 2.0, 4.9] {
            let j = c.jet(s);
            assert!((j.pos[0] - s).abs() < 1e-13);
            assert!(j.pos[1].abs() < 1e-15);
            assert!((j.d1[0] - 1.0).abs() < 1e-14);
            assert!(norm(&j.d2) < 1e-14);
        }
    }

    #[test]
    fn raw_helix_matches_closed_form_helix() {
        let raw = reparametrize_unit_speed(Arc::new(RawHelix { dim: 3, radius: 1.0, pitch: 1.0 }), (0.0, 0.0)).unwrap();
        let exact = Helix::new(3, 1.0, 1.0).unwrap();
        for k in -50..50 {
            let s = 0.37 * k as f64;
            let a = raw.jet(s);
            let b = exact.jet(s);
            for (x, y) in [(&a.pos, &b.pos), (&a.d1, &b.d1), (&a.d2, &b.d2), (&a.d3, &b.d3)] {
                assert!(norm(&sub(x, y)) < 1e-11, "s = {s}");
            }
            assert!((norm(&a.d2) - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn sine_graph_is_unit_speed() {
        let c = reparametrize_unit_speed(Arc::new(RawSine { dim: 3, amplitude: 0.2, wavenumber: 1.0 }), (0.0, 0.0)).unwrap();
        for k in 0..1000 {
            let s = -30.0 + 0.06 * k as f64;
            let (speed, orth) = unit_speed_residual(&c, s);
            assert!(speed < 1e-10, "s = {s}: {speed}");
            assert!(orth < 1e-10);
        }
    }

    #[test]
    fn sine_derivatives_match_finite_differences() {
        let c = reparametrize_unit_speed(Arc::new(RawSine { dim: 2, amplitude: 0.5, wavenumber: 1.3 }), (0.0, 0.0)).unwrap();
        let h = 1e-4;
        for s in [-7.1, -0.4, 0.0, 1.9, 12.5] {
            let j = c.jet(s);
            let (jp, jm) = (c.jet(s + h), c.jet(s - h));
            for i in 0..2 {
                assert!(((jp.pos[i] - jm.pos[i]) / (2.0 * h) - j.d1[i]).abs() < 1e-7);
                assert!(((jp.d1[i] - jm.d1[i]) / (2.0 * h) - j.d2[i]).abs() < 1e-7);
                assert!(((jp.d2[i] - jm.d2[i]) / (2.0 * h) - j.d3[i]).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn arclength_and_parameter_are_inverse() {
        let c = reparametrize_unit_speed(Arc::new(RawSine { dim: 2, amplitude: 0.9, wavenumber: 2.0 }), (0.0, 0.0)).unwrap();
        for t in [-20.0, -3.3, 0.0, 0.001, 5.5, 40.0] {
            assert!((c.parameter(c.arclength(t)) - t).abs() < 1e-12 * (1.0 + t.abs()));
        }
    }

    #[test]
    fn degenerate_speed_is_rejected() {
        #[derive(Debug)]
        struct Stalled;
        impl RawCurve for Stalled {
            fn dim(&self) -> usize {
                2
            }
            fn eval(&self, t: f64) -> [Vector; 4] {
                // γ = (t³, 0) stalls at t = 0
                [vec![t * t * t, 0.0], vec![3.0 * t * t, 0.0], vec![6.0 * t, 0.0], vec![6.0, 0.0]]
            }
            fn label(&self) -> String {
                "stalled".into()
            }
        }
        let err = reparametrize_unit_speed(Arc::new(Stalled), (-1.0, 1.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpeed { .. }));
    }

    #[test]
    fn window_continuation_is_straight() {
        let raw = Arc::new(RawLine { dim: 2 });
        let c = reparametrize_unit_speed(raw, (-1.0, 1.0)).unwrap();
        let j = c.jet(3.0);
        assert!((j.pos[0] - 3.0).abs() < 1e-12);
        assert!(norm(&j.d2) == 0.0);
    }

    #[test]
    fn curvature_bound_respects_convention() {
        let line = Curve::line(3, (-10.0, 10.0)).unwrap();
        assert_eq!(line.k_bound(), 1.0 + 1e-9);
        let tight = Curve::helix(3, 1.0, 0.1, (-5.0, 5.0)).unwrap();
        let kappa = 1.0 / (1.0 + 0.01);
        assert!(tight.k_bound() >= 1.05 * kappa * 0.999);
    }
}
