//! Finite differences for the moving-frame equation
//! `v_t = Δv^m + c v_ζ` in the cylindrical variables `(ρ, ζ)` of a straight
//! line, on rectangles with an excised neighbourhood of the singular ray.

mod exhaustion;
mod field;
mod grid;
mod output;
mod probe;
mod relax;
mod scheme;

pub use exhaustion::{run_exhaustion, ExhaustionLevel, ExhaustionReport, ExhaustionRun, ExhaustionSchedule, LevelReport, PairReport};
pub use field::{Field, MovingFrame, FLOOR_FRACTION};
pub use grid::{Excision, Grid2D};
pub use output::{write_snapshot_csv, CheckResult, GridSummary, SnapshotManifest};
pub use probe::{pressure_probe, ProbeConfig, ProbeReport, StationFit};
pub use relax::{
    comparison_shadow, convergence_study, perturbed_decay, relax_to_steady, wave, wave_field, ConvergenceRow,
    ConvergenceStudy, DecayReport, RelaxConfig, RelaxReport, ShadowReport, WaveDomain,
};
pub use scheme::{explicit_bound, residual, step, Scheme, StepReport};
