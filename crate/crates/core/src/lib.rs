//! Numerical laboratory for Riemannian foliations.
//!
//! The crate evaluates the O'Neill tensors of a foliation given by a vertical
//! frame on a chart-based Riemannian manifold, transports holonomy and dual
//! holonomy fields along horizontal curves, and works with the groupoid of
//! infinitesimal holonomy transformations those transports generate.
//! Everything is checked against closed-form identities on a small catalog of
//! model geometries: flat tori, the Hopf fibration of round and Berger
//! spheres, vertical warpings of it and a couple of products.
//!
//! # Modules
//!
//! - [`geometry`]: atlases, metrics, Christoffel symbols, curvature, geodesics.
//! - [`foliation`]: projectors, the `A`, `A*` and `S` tensors, warping, fatness.
//! - [`holonomy`]: horizontal paths, transport, the groupoid, supremum search,
//!   holonomy bounds, dual-leaf spans and invariant metrics.
//! - [`models`]: constructors for the built-in foliated geometries.
//! - [`experiment`]: JSON-configured verification runs and their reports.
//!
//! Curvature convention: `R(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]` and the
//! unreduced sectional curvature is `⟨R(X,Y)Y, X⟩`, so the unit round sphere
//! has curvature `+1`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiment;
pub mod foliation;
pub mod geometry;
pub mod holonomy;
pub mod models;
pub mod sampling;

pub use error::{Error, Result};
pub use foliation::FoliatedModel;
pub use geometry::{ChartPoint, MetricModel, TangentVector};
pub use models::{make_model, ModelName, ModelSpec};
