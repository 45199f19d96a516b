//! Comparison functions around a curve and the numerical verification of
//! their properties.
//!
//! Near the curve the super-solution is `u⁺ = (1+ε')(U^m + 1)^{1/m}`; it is
//! blended by a radial cutoff `η` into a constant to give `ū`. The
//! sub-solution is `u⁻ = (1−ε')[U^m − M − M|σ|^p ζ(σ)]₊^{1/m}`, floored by
//! `ε` to give `u̲`. Residual signs are checked on sampled tube regions,
//! with a finite-difference cross-check of every analytic residual path.

mod bundle;
mod cutoff;
mod fd;
mod regions;
mod sandwich;
mod search;

pub use bundle::{sub_solution_m_bound, ComparisonBundle, ComparisonConstants, Field, Residual, TubeSample};
pub use cutoff::{cutoff_zeta, dominance_point, CutoffEta, CutoffJet, SmoothStep};
pub use fd::AmbientPoint;
pub use regions::{
    check_tube_embedding, check_vanishing_ahead, check_vanishing_on_boundary, residual_sign_check, sampling_window, Region,
    EmbeddingReport, SampleCoords, SignCheckOptions, SignReport, VanishingReport, PATH_TOLERANCE, SIGN_TOLERANCE,
};
pub use sandwich::{in_sandwich_region, ordering_check, sandwich_check, OrderingReport, SandwichReport};
pub use search::{select_constants, SearchConfig, SearchTrace};
