use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::ModelSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Metric, chart-overlap and projector checks at random points.
    ValidateModel,
    /// Vertizontal curvature of dual and holonomy fields along horizontal
    /// geodesics against the Riemann tensor.
    GrayOneill,
    /// Curvature of warped connection metrics: constant warping anywhere,
    /// otherwise on the minimum set of the warping function.
    WarpedCurvature,
    /// Smallest singular value of the fatness form at random points.
    FatnessScan,
    /// Kernel of `X ↦ A*_X ξ` and the curvature of the plane it spans with `ξ`.
    TheoremA,
    /// Supremum search for `ρ_{ν₀}` and the vertizontal margin at the best
    /// transformation.
    ThmMax,
    /// Operator norms of sampled holonomy transformations and the `ρ` bounds
    /// they imply.
    HolonomyBound,
    /// Rank of pulled-back `A`-values along horizontal geodesics and the
    /// orthogonality of dual fields to them.
    DualLeaf,
    /// Holonomy of closed horizontal loops.
    ClosedLoop,
    /// Pairing, inverse-transpose and verticality checks for dual fields.
    DualitySuite,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::ValidateModel,
        ExperimentKind::GrayOneill,
        ExperimentKind::WarpedCurvature,
        ExperimentKind::FatnessScan,
        ExperimentKind::TheoremA,
        ExperimentKind::ThmMax,
        ExperimentKind::HolonomyBound,
        ExperimentKind::DualLeaf,
        ExperimentKind::ClosedLoop,
        ExperimentKind::DualitySuite,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::ValidateModel => "validate_model",
            ExperimentKind::GrayOneill => "gray_oneill",
            ExperimentKind::WarpedCurvature => "warped_curvature",
            ExperimentKind::FatnessScan => "fatness_scan",
            ExperimentKind::TheoremA => "theorem_a",
            ExperimentKind::ThmMax => "thm_max",
            ExperimentKind::HolonomyBound => "holonomy_bound",
            ExperimentKind::DualLeaf => "dual_leaf",
            ExperimentKind::ClosedLoop => "closed_loop",
            ExperimentKind::DualitySuite => "duality_suite",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL.into_iter().find(|k| k.as_str() == s).ok_or_else(|| {
            let names: Vec<_> = ExperimentKind::ALL.iter().map(|k| k.as_str()).collect();
            Error::Config(format!("unknown experiment {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub experiment: ExperimentKind,
    pub samples: usize,
    pub seed: u64,
    pub tolerance: f64,
    /// Where the JSON report goes; empty means nowhere.
    #[serde(default)]
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn new(model: ModelSpec, experiment: ExperimentKind, samples: usize, seed: u64, tolerance: f64) -> Self {
        ExperimentConfig {
            model,
            experiment,
            samples,
            seed,
            tolerance,
            output_path: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::Config("samples must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        self.model.validate()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
