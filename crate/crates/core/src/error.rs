use thiserror::Error;

/// Errors raised by geometric evaluation, transport and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {coords:?} lies outside the domain of chart {chart}")]
    Domain { chart: usize, coords: Vec<f64> },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("vertical frame is rank deficient in chart {chart} (Gram eigenvalue ratio {ratio:e})")]
    Degenerate { chart: usize, ratio: f64 },

    #[error("integration failed at t = {t}: {reason} (last good point: chart {chart}, {coords:?})")]
    Integration {
        t: f64,
        reason: String,
        chart: usize,
        coords: Vec<f64>,
    },

    #[error("model consistency check failed: {0}")]
    ModelConsistency(String),

    #[error("transport failed at t = {t}: verticality drift {drift:e}")]
    Transport { t: f64, drift: f64 },

    #[error("groupoid endpoints do not match (gap {gap:e})")]
    Groupoid { gap: f64 },

    #[error("holonomy matrix is ill-conditioned (condition number {condition:e})")]
    Conditioning { condition: f64 },

    #[error("fatness form has no kernel (smallest singular value {smallest:e})")]
    NoKernel { smallest: f64 },

    #[error("found {found} closed loops within budget, needed {needed}")]
    Sampling { found: usize, needed: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
