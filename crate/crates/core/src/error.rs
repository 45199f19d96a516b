use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve speed {speed:e} at t = {t} is below the degeneracy threshold")]
    DegenerateSpeed { t: f64, speed: f64 },

    #[error("point lies on the curve (r = {r:e}); every tubular formula divides by r")]
    OnCurve { r: f64 },

    #[error("two candidate feet s = {s1} and s = {s2} are equidistant (d = {distance:e})")]
    NonUniqueFoot { s1: f64, s2: f64, distance: f64 },

    #[error("foot-point Newton iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("point is outside the tube of radius {r0}")]
    OutsideTube { r0: f64 },

    #[error("evaluation on the singular set (base = {base:e})")]
    OnSingularRay { base: f64 },

    #[error("non-positive input {0:e}")]
    NonpositiveInput(f64),

    #[error("residual paths disagree: analytic {analytic:e} vs finite-difference {fd:e} (relative {relative:e}) at s = {s}, r = {r:e}, sigma = {sigma:e}")]
    PathDisagreement {
        analytic: f64,
        fd: f64,
        relative: f64,
        s: f64,
        r: f64,
        sigma: f64,
    },

    #[error("constant search exhausted: {0}")]
    SearchExhausted(String),

    #[error("positivity lost: value {value:e} below floor {floor:e} at cell ({i}, {j})")]
    PositivityLoss {
        i: usize,
        j: usize,
        value: f64,
        floor: f64,
    },

    #[error("time step {dt:e} exceeds the explicit stability bound {bound:e}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("only {usable} usable radii for the pressure fit, need at least 4")]
    InsufficientRange { usable: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}
