//! Chart-based Riemannian geometry: metrics, Christoffel symbols, the
//! Riemann tensor and geodesics.
//!
//! All evaluations are pure functions of the model and the point; models are
//! immutable after construction and can be shared across threads.

pub mod chart;
pub mod curvature;
pub mod geodesic;
pub mod metric;

pub use chart::{Atlas, ChartFactor, ChartPoint, PeriodicBox, TangentVector, CORE_DEPTH};
pub use curvature::{riemann, riemann_at, sectional_at, unreduced_sectional, unreduced_sectional_at};
pub use geodesic::{integrate_geodesic, integrate_reparametrized, GeodesicSegment, PathSample};
pub use metric::{central_difference4, Christoffels, ChristoffelFn, MetricFn, MetricModel, DEFAULT_FD_STEP};

use nalgebra::{DMatrix, SymmetricEigen};

/// Smallest eigenvalue and symmetry defect of a metric matrix.
pub fn spd_report(g: &DMatrix<f64>) -> (f64, f64) {
    let asym = (g - g.transpose()).amax();
    let sym = (g + g.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    (eig.eigenvalues.min(), asym)
}
