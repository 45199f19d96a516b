//! Singular "snaking" solutions of the fast diffusion equation `u_t = Δu^m`.
//!
//! The crate is organised bottom-up:
//!
//! - [`params`]: exponents, amplitude and pressure constants, validation.
//! - [`geometry`]: unit-speed curves, nearest-point projection and the
//!   closed-form tubular calculus (`∇s`, `∇r`, `Δs`, `Δr`).
//! - [`profile`]: the explicit traveling wave, its cylindrical form and the
//!   exact derivatives of the snaking profile `U`.
//! - [`comparison`]: cutoffs, super/sub-solutions, constant search and the
//!   sign/sandwich verification harness.
//! - [`solver`]: finite differences for the moving-frame equation in
//!   cylindrical variables, relaxation and exhaustion runs, pressure probe.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod comparison;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod params;
pub mod profile;
pub mod solver;

pub use error::{Error, Result};
pub use params::{DerivedConstants, ProblemParams};
