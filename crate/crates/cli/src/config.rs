//! Run configuration: one JSON document drives both `verify` and `simulate`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use snaking_core::comparison::SearchConfig;
use snaking_core::geometry::Curve;
use snaking_core::solver::{ExhaustionSchedule, ProbeConfig, RelaxConfig, Scheme, WaveDomain};
use snaking_core::ProblemParams;

use crate::report::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub params: ProblemParams,
    #[serde(default)]
    pub curve: CurveConfig,
    #[serde(default)]
    pub verifier: VerifierConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    /// Used when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveShape {
    Line {},
    Helix { radius: f64, pitch: f64 },
    Sine { amplitude: f64, wavenumber: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveConfig {
    pub shape: CurveShape,
    pub window: [f64; 2],
    pub k_bound: Option<f64>,
    pub r_tilde0: Option<f64>,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig { shape: CurveShape::Line {}, window: [-30.0, 30.0], k_bound: None, r_tilde0: None }
    }
}

impl CurveConfig {
    pub fn build(&self, dim: usize) -> snaking_core::Result<Curve> {
        let window = (self.window[0], self.window[1]);
        let curve = match self.shape {
            CurveShape::Line {} => Curve::line(dim, window)?,
            CurveShape::Helix { radius, pitch } => Curve::helix(dim, radius, pitch, window)?,
            CurveShape::Sine { amplitude, wavenumber } => Curve::sine(dim, amplitude, wavenumber, window)?,
        };
        if self.k_bound.is_some() || self.r_tilde0.is_some() {
            curve.with_overrides(self.k_bound, self.r_tilde0)
        } else {
            Ok(curve)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifierConfig {
    pub seed: u64,
    /// Random tube points for the geometry oracle.
    pub geometry_points: usize,
    pub samples_per_region: usize,
    /// Every `fd_stride`-th sign sample is also evaluated by finite differences.
    pub fd_stride: usize,
    pub vanishing_points: usize,
    pub ordering_samples: usize,
    pub sandwich_samples: usize,
    pub embedding_points: usize,
    pub search: SearchConfig,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        VerifierConfig {
            seed: 0,
            geometry_points: 2000,
            samples_per_region: 4000,
            fd_stride: 200,
            vanishing_points: 10_000,
            ordering_samples: 10_000,
            sandwich_samples: 20_000,
            embedding_points: 200,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub runs: Vec<SolverRun>,
}

fn default_cells() -> Vec<usize> {
    vec![16, 32, 64]
}
fn default_one() -> f64 {
    1.0
}
fn default_two() -> f64 {
    2.0
}
fn default_probe_cells() -> usize {
    128
}
fn default_exhaustion_cells() -> [usize; 2] {
    [32, 64]
}
fn default_evolution_cells() -> [usize; 2] {
    [32, 32]
}

/// One solver job. The wave, probe and evolution runs use the `(ρ, ζ)`
/// frame of a straight line in dimension `params.n`; the exhaustion run
/// also needs the configured curve to be a line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverRun {
    WaveRelaxation {
        #[serde(default = "default_cells")]
        cells: Vec<usize>,
        #[serde(default)]
        domain: WaveDomain,
        #[serde(default)]
        relax: RelaxConfig,
    },
    Exhaustion {
        /// `[cells_rho, cells_zeta]` of the finest level.
        #[serde(default = "default_exhaustion_cells")]
        cells: [usize; 2],
        /// Replaces the default three-level schedule built from `cells`.
        #[serde(default)]
        schedule: Option<ExhaustionSchedule>,
        /// The monotonicity tolerance is this multiple of the steady-state
        /// discretization error on the finest grid.
        #[serde(default = "default_two")]
        tolerance_factor: f64,
        #[serde(default)]
        relax: RelaxConfig,
    },
    PressureProbe {
        #[serde(default = "default_probe_cells")]
        cells: usize,
        #[serde(default)]
        domain: WaveDomain,
        #[serde(default)]
        relax: RelaxConfig,
        #[serde(default)]
        probe: ProbeConfig,
    },
    Evolution {
        #[serde(default = "default_evolution_cells")]
        cells: [usize; 2],
        #[serde(default)]
        domain: WaveDomain,
        /// Initial data is this multiple of the wave; boundary data is the wave.
        #[serde(default = "default_one")]
        factor: f64,
        scheme: Scheme,
        dt: f64,
        steps: usize,
        /// `0` writes only the first and last states.
        #[serde(default)]
        snapshot_every: usize,
    },
}

impl SolverRun {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverRun::WaveRelaxation { .. } => "wave_relaxation",
            SolverRun::Exhaustion { .. } => "exhaustion",
            SolverRun::PressureProbe { .. } => "pressure_probe",
            SolverRun::Evolution { .. } => "evolution",
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks that serde cannot express. Runs before any computation.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.version != SCHEMA_VERSION {
            return bad(format!("unsupported config version {} (expected {SCHEMA_VERSION})", self.version));
        }
        self.curve.build(self.params.n).map_err(|e| CliError::Config(e.to_string()))?;
        let v = &self.verifier;
        for (name, count) in [
            ("geometry_points", v.geometry_points),
            ("samples_per_region", v.samples_per_region),
            ("fd_stride", v.fd_stride),
            ("vanishing_points", v.vanishing_points),
            ("ordering_samples", v.ordering_samples),
            ("sandwich_samples", v.sandwich_samples),
            ("embedding_points", v.embedding_points),
        ] {
            if count == 0 {
                return bad(format!("verifier.{name} must be positive"));
            }
        }
        for (i, run) in self.solver.runs.iter().enumerate() {
            let ctx = |msg: &str| CliError::Config(format!("solver.runs[{i}] ({}): {msg}", run.kind()));
            match run {
                SolverRun::WaveRelaxation { cells, .. } => {
                    if cells.is_empty() || cells.iter().any(|&c| c < 4) {
                        return Err(ctx("cells must be a non-empty list of counts ≥ 4"));
                    }
                }
                SolverRun::Exhaustion { schedule, tolerance_factor, .. } => {
                    if !(tolerance_factor.is_finite() && *tolerance_factor > 0.0) {
                        return Err(ctx("tolerance_factor must be positive"));
                    }
                    if let Some(s) = schedule {
                        s.validate().map_err(|e| ctx(&e.to_string()))?;
                    }
                    if !matches!(self.curve.shape, CurveShape::Line {}) {
                        return Err(ctx("exhaustion needs a straight-line curve"));
                    }
                }
                SolverRun::PressureProbe { cells, .. } => {
                    if *cells < 4 {
                        return Err(ctx("cells must be ≥ 4"));
                    }
                }
                SolverRun::Evolution { dt, steps, factor, .. } => {
                    if !(dt.is_finite() && *dt > 0.0) || *steps == 0 {
                        return Err(ctx("dt must be positive and steps nonzero"));
                    }
                    if !(factor.is_finite() && *factor > 0.0) {
                        return Err(ctx("factor must be positive"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        if let Some(s) = seed {
            self.verifier.seed = s;
            self.verifier.search.seed = s;
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"version": 1, "params": {"n": 3, "m": 0.5, "c": 1.0, "eps": 0.5, "eps_prime": 0.25}}"#;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.curve, CurveConfig::default());
        assert_eq!(cfg.verifier.seed, 0);
        assert!(cfg.solver.runs.is_empty());
    }

    #[test]
    fn unknown_keys_are_rejected_at_every_level() {
        let top = MINIMAL.replace("\"version\": 1", "\"version\": 1, \"extra\": 0");
        assert!(RunConfig::from_json(&top).is_err());
        let nested = MINIMAL.replace("\"c\": 1.0", "\"c\": 1.0, \"speed\": 2");
        assert!(RunConfig::from_json(&nested).is_err());
        let curve = MINIMAL.replace("}}", r#"}, "curve": {"shape": {"kind": "line", "radius": 1}}}"#);
        assert!(RunConfig::from_json(&curve).is_err());
        let run = MINIMAL.replace("}}", r#"}, "solver": {"runs": [{"kind": "wave_relaxation", "cels": [8]}]}}"#);
        assert!(RunConfig::from_json(&run).is_err());
    }

    #[test]
    fn version_and_exponent_are_validated() {
        assert!(RunConfig::from_json(&MINIMAL.replace("\"version\": 1", "\"version\": 2")).is_err());
        assert!(RunConfig::from_json(&MINIMAL.replace("\"m\": 0.5", "\"m\": 0.0")).is_err());
    }

    #[test]
    fn exhaustion_requires_a_line() {
        let text = MINIMAL.replace(
            "}}",
            r#"}, "curve": {"shape": {"kind": "helix", "radius": 1, "pitch": 1}}, "solver": {"runs": [{"kind": "exhaustion"}]}}"#,
        );
        assert!(matches!(RunConfig::from_json(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn seed_flag_overrides_both_seeds() {
        let cfg = RunConfig::from_json(MINIMAL).unwrap().with_seed(Some(9));
        assert_eq!((cfg.verifier.seed, cfg.verifier.search.seed), (9, 9));
    }
}
