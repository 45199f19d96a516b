//! Curves, tubular coordinates around them, and independent numerical
//! checks of those coordinates.

mod curve;
mod frame;
mod oracle;
mod projection;
mod uniqueness;

pub use curve::{
    reparametrize_unit_speed, sampled_curvature_bound, ArclengthCurve, Curve, CurveEval, CurveJet, Helix, Line,
    RawCurve, RawHelix, RawLine, RawSine,
};
pub use frame::{latin_hypercube, random_unit, TubeFrame};
pub use oracle::{fd_oracle, oracle_error, FdTubular, DEFAULT_S_STEP};
pub use projection::{project, project_near, Projection, TubularPoint};
pub use uniqueness::estimate_uniqueness_radius;
