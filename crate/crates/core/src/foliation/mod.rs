//! Vertical/horizontal splitting of a foliated model and the O'Neill tensors.

mod fatness;
mod tensors;
mod warp;

pub use fatness::{fat_point_margin, fatness_form, kernel_direction, FatnessForm, KERNEL_TOLERANCE};
pub use tensors::{
    a_star, a_star_vertical_extension, a_tensor, a_tensor_parallel_extension, s_tensor, PointJet,
    TransportOps,
};
pub(crate) use tensors::transport_ops;
pub use warp::{warp_metric, CovectorFn, ScalarFn, WarpData};

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::geometry::{central_difference4, ChartPoint, MetricModel, TangentVector};
use crate::holonomy::LoopFamily;

pub type FrameFn = Arc<dyn Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync>;
pub type FrameDerivativeFn = Arc<dyn Fn(&ChartPoint) -> Vec<DMatrix<f64>> + Send + Sync>;

/// Tolerance on the verticality or horizontality of tensor arguments.
pub const SPLIT_TOLERANCE: f64 = 1e-8;

/// A Riemannian manifold with a foliation given by a frame of `k` vector
/// fields spanning the tangent spaces of the leaves.
#[derive(Clone)]
pub struct FoliatedModel {
    pub name: String,
    pub metric: MetricModel,
    vertical_frame_fn: FrameFn,
    /// `∂_i V` for each coordinate `i`, when known in closed form.
    vertical_frame_derivative: Option<FrameDerivativeFn>,
    pub leaf_dim: usize,
    pub totally_geodesic_claimed: bool,
    pub warp: Option<Arc<WarpData>>,
    pub loop_family: Option<Arc<dyn LoopFamily>>,
}

impl fmt::Debug for FoliatedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoliatedModel")
            .field("name", &self.name)
            .field("metric", &self.metric)
            .field("leaf_dim", &self.leaf_dim)
            .field("totally_geodesic_claimed", &self.totally_geodesic_claimed)
            .field("warped", &self.warp.is_some())
            .finish()
    }
}

/// `g`-orthogonal projectors onto the vertical and horizontal spaces.
#[derive(Clone, Debug)]
pub struct Projectors {
    pub base: ChartPoint,
    pub g: DMatrix<f64>,
    pub pv: DMatrix<f64>,
    pub ph: DMatrix<f64>,
}

impl Projectors {
    pub fn vertical_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.pv * v
    }

    pub fn horizontal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.ph * v
    }

    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.dot(&(&self.g * b))
    }

    pub fn norm(&self, a: &DVector<f64>) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    /// `‖Pv v‖ / ‖v‖` (0 for the zero vector).
    pub fn verticality(&self, v: &DVector<f64>) -> f64 {
        let n = self.norm(v);
        if n == 0.0 {
            0.0
        } else {
            self.norm(&self.vertical_part(v)) / n
        }
    }

    /// `‖Ph v‖ / ‖v‖` (0 for the zero vector).
    pub fn horizontality(&self, v: &DVector<f64>) -> f64 {
        let n = self.norm(v);
        if n == 0.0 {
            0.0
        } else {
            self.norm(&self.horizontal_part(v)) / n
        }
    }
}

/// Gram–Schmidt in the inner product `g`, visiting columns in order and
/// keeping at most `max` vectors whose residual exceeds `tol` times the input
/// norm.
pub fn gram_schmidt(g: &DMatrix<f64>, cols: &DMatrix<f64>, max: usize, tol: f64) -> DMatrix<f64> {
    let n = cols.nrows();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(max);
    for c in cols.column_iter() {
        if out.len() == max {
            break;
        }
        let v0: DVector<f64> = c.into_owned();
        let n0 = v0.dot(&(g * &v0)).max(0.0).sqrt();
        if n0 == 0.0 {
            continue;
        }
        let mut v = v0;
        for _ in 0..2 {
            for e in &out {
                let c = e.dot(&(g * &v));
                v -= e * c;
            }
        }
        let nv = v.dot(&(g * &v)).max(0.0).sqrt();
        if nv > tol * n0 {
            out.push(v / nv);
        }
    }
    let mut m = DMatrix::zeros(n, out.len());
    for (j, e) in out.iter().enumerate() {
        m.set_column(j, e);
    }
    m
}

impl FoliatedModel {
    pub fn new(
        name: impl Into<String>,
        metric: MetricModel,
        vertical_frame_fn: FrameFn,
        vertical_frame_derivative: Option<FrameDerivativeFn>,
        leaf_dim: usize,
        totally_geodesic_claimed: bool,
    ) -> Self {
        FoliatedModel {
            name: name.into(),
            metric,
            vertical_frame_fn,
            vertical_frame_derivative,
            leaf_dim,
            totally_geodesic_claimed,
            warp: None,
            loop_family: None,
        }
    }

    pub fn with_loop_family(mut self, family: Arc<dyn LoopFamily>) -> Self {
        self.loop_family = Some(family);
        self
    }

    pub fn dimension(&self) -> usize {
        self.metric.dimension()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.dimension() - self.leaf_dim
    }

    /// Raw vertical frame `V` (`n × k`) at `p`.
    pub fn vertical_frame(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        self.metric.check_domain(p)?;
        Ok((self.vertical_frame_fn)(p))
    }

    /// `∂_i V` at `p`, analytic when available, otherwise by differences.
    pub fn vertical_frame_derivative(&self, p: &ChartPoint) -> Result<Vec<DMatrix<f64>>> {
        self.metric.check_domain(p)?;
        if let Some(f) = &self.vertical_frame_derivative {
            return Ok(f(p));
        }
        let n = self.dimension();
        let k = self.leaf_dim;
        (0..n)
            .map(|i| {
                let e = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
                let s = self.metric.usable_step(p, &e, self.metric.fd_step)?;
                let d = central_difference4(
                    |t| Ok((self.vertical_frame_fn)(&p.displaced(&e, t)).as_slice().to_vec()),
                    s,
                )?;
                Ok(DMatrix::from_column_slice(n, k, &d))
            })
            .collect()
    }

    pub(crate) fn has_analytic_frame_derivative(&self) -> bool {
        self.vertical_frame_derivative.is_some()
    }

    pub(crate) fn frame_derivative_fn(&self) -> Option<FrameDerivativeFn> {
        self.vertical_frame_derivative.clone()
    }

    pub(crate) fn frame_fn(&self) -> FrameFn {
        self.vertical_frame_fn.clone()
    }

    fn vertical_projector_with(&self, p: &ChartPoint, g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let n = self.dimension();
        if self.leaf_dim == 0 {
            return Ok(DMatrix::zeros(n, n));
        }
        let v = (self.vertical_frame_fn)(p);
        let gv = g * &v;
        let gram = v.transpose() * &gv;
        let eig = SymmetricEigen::new(gram.clone());
        let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
        if !(hi > 0.0) || lo <= 1e-10 * hi.max(1.0) {
            return Err(Error::Degenerate {
                chart: p.chart,
                ratio: if hi > 0.0 { lo / hi } else { 0.0 },
            });
        }
        let inv = gram.try_inverse().ok_or(Error::Degenerate {
            chart: p.chart,
            ratio: 0.0,
        })?;
        Ok(&v * inv * gv.transpose())
    }

    /// `Pv` at `p`.
    pub fn vertical_projector(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let g = self.metric.metric(p)?;
        self.vertical_projector_with(p, &g)
    }

    pub fn projectors(&self, p: &ChartPoint) -> Result<Projectors> {
        let g = self.metric.metric(p)?;
        let pv = self.vertical_projector_with(p, &g)?;
        let n = self.dimension();
        let ph = DMatrix::identity(n, n) - &pv;
        Ok(Projectors {
            base: p.clone(),
            g,
            pv,
            ph,
        })
    }

    /// Directional derivative `D_dir Pv` by fourth-order differences.
    pub fn projector_derivative(&self, p: &ChartPoint, dir: &DVector<f64>) -> Result<DMatrix<f64>> {
        let n = self.dimension();
        let scale = dir.amax();
        if scale == 0.0 || self.leaf_dim == 0 {
            return Ok(DMatrix::zeros(n, n));
        }
        let unit = dir / scale;
        let s = self.metric.usable_step(p, &unit, self.metric.fd_step)?;
        let d = central_difference4(
            |t| Ok(self.vertical_projector(&p.displaced(&unit, t))?.as_slice().to_vec()),
            s,
        )?;
        Ok(DMatrix::from_column_slice(n, n, &d) * scale)
    }

    /// `g`-orthonormal vertical frame built from the raw frame in its given
    /// column order.
    pub fn vertical_orthonormal_frame(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let g = self.metric.metric(p)?;
        let v = self.vertical_frame(p)?;
        let e = gram_schmidt(&g, &v, self.leaf_dim, 1e-10);
        if e.ncols() != self.leaf_dim {
            return Err(Error::Degenerate {
                chart: p.chart,
                ratio: 0.0,
            });
        }
        Ok(e)
    }

    /// `g`-orthonormal horizontal frame from the projected coordinate axes.
    pub fn horizontal_orthonormal_frame(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let pr = self.projectors(p)?;
        let m = self.horizontal_dim();
        let e = gram_schmidt(&pr.g, &pr.ph, m, 1e-6);
        if e.ncols() != m {
            return Err(Error::Degenerate {
                chart: p.chart,
                ratio: 0.0,
            });
        }
        Ok(e)
    }

    /// Check that `v` is horizontal at its base within `SPLIT_TOLERANCE`,
    /// returning its horizontal projection.
    pub(crate) fn require_horizontal(&self, pr: &Projectors, v: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
        let r = pr.verticality(v);
        if r > SPLIT_TOLERANCE {
            return Err(Error::Argument(format!(
                "{what} is not horizontal (vertical fraction {r:e})"
            )));
        }
        Ok(pr.horizontal_part(v))
    }

    pub(crate) fn require_vertical(&self, pr: &Projectors, v: &DVector<f64>, what: &str) -> Result<DVector<f64>> {
        let r = pr.horizontality(v);
        if r > SPLIT_TOLERANCE {
            return Err(Error::Argument(format!(
                "{what} is not vertical (horizontal fraction {r:e})"
            )));
        }
        Ok(pr.vertical_part(v))
    }

    /// A random unit horizontal vector at `p`, uniform on the horizontal
    /// unit sphere.
    pub fn random_horizontal<R: rand::Rng + ?Sized>(&self, p: &ChartPoint, rng: &mut R) -> Result<TangentVector> {
        let frame = self.horizontal_orthonormal_frame(p)?;
        let c = crate::sampling::unit_sphere(rng, frame.ncols());
        let v = &frame * DVector::from_vec(c);
        Ok(TangentVector::new(p.clone(), v))
    }

    /// A random unit vertical vector at `p`.
    pub fn random_vertical<R: rand::Rng + ?Sized>(&self, p: &ChartPoint, rng: &mut R) -> Result<TangentVector> {
        let frame = self.vertical_orthonormal_frame(p)?;
        let c = crate::sampling::unit_sphere(rng, frame.ncols());
        let v = &frame * DVector::from_vec(c);
        Ok(TangentVector::new(p.clone(), v))
    }

    /// Random point of the manifold.
    pub fn sample_point<R: rand::RngCore>(&self, rng: &mut R) -> ChartPoint {
        self.metric.atlas.sample_point(rng)
    }
}
