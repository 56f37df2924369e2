//! Infinitesimal holonomy transformations and their groupoid operations.
//!
//! A transformation `h: 𝒱_p → 𝒱_q` is stored as a `k × k` matrix between the
//! orthonormal vertical frames that [`FoliatedModel::vertical_orthonormal_frame`]
//! builds at `p` and `q`. Matrices depend on those frames; singular values,
//! `ρ` and every residual used for checking do not.

use nalgebra::{DMatrix, DVector, SVD};

use super::path::{HorizontalPath, JOIN_TOLERANCE};
use super::transport::{components_at, transport_jobs, FieldKind, TransportJob};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::{ChartPoint, TangentVector};

/// Condition number above which a transformation is not inverted.
pub const MAX_CONDITION: f64 = 1e8;

#[derive(Clone, Debug)]
pub struct HolonomyTransformation {
    pub source: ChartPoint,
    pub target: ChartPoint,
    /// Orthonormal vertical frames (`n × k`) at source and target.
    pub source_frame: DMatrix<f64>,
    pub target_frame: DMatrix<f64>,
    pub source_metric: DMatrix<f64>,
    pub target_metric: DMatrix<f64>,
    pub matrix: DMatrix<f64>,
    pub path_label: String,
    /// Verticality drift of the transport that produced the matrix.
    pub drift: f64,
}

fn frame_and_metric(fm: &FoliatedModel, p: &ChartPoint) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    Ok((fm.vertical_orthonormal_frame(p)?, fm.metric.metric(p)?))
}

impl HolonomyTransformation {
    /// The identity of `𝒱_p`.
    pub fn identity(fm: &FoliatedModel, p: &ChartPoint) -> Result<Self> {
        let (e, g) = frame_and_metric(fm, p)?;
        let k = e.ncols();
        Ok(HolonomyTransformation {
            source: p.clone(),
            target: p.clone(),
            source_frame: e.clone(),
            target_frame: e,
            source_metric: g.clone(),
            target_metric: g,
            matrix: DMatrix::identity(k, k),
            path_label: "identity".into(),
            drift: 0.0,
        })
    }

    pub fn leaf_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = SVD::new(self.matrix.clone(), false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn operator_norm(&self) -> f64 {
        self.singular_values().first().copied().unwrap_or(0.0)
    }

    pub fn condition_number(&self) -> f64 {
        let s = self.singular_values();
        match (s.first(), s.last()) {
            (Some(&a), Some(&b)) if b > 0.0 => a / b,
            (Some(_), Some(_)) => f64::INFINITY,
            _ => 1.0,
        }
    }

    /// Frame coordinates of a vertical vector at the source.
    fn source_coords(&self, v: &DVector<f64>) -> DVector<f64> {
        self.source_frame.transpose() * (&self.source_metric * v)
    }

    fn source_components(&self, fm: &FoliatedModel, v: &TangentVector) -> Result<DVector<f64>> {
        components_at(fm, v, &self.source)
    }
}

/// The transformation realized by `path`: columns of the matrix are the
/// holonomy fields with orthonormal initial values, read at the end in the
/// target frame.
pub fn holonomy_transformation(fm: &FoliatedModel, path: &HorizontalPath) -> Result<HolonomyTransformation> {
    let source = path.start().point.clone();
    let (es, gs) = frame_and_metric(fm, &source)?;
    let job = TransportJob {
        kind: FieldKind::Holonomy,
        initial: es.clone(),
    };
    let tr = transport_jobs(fm, path, &[job])?.pop().expect("one job");
    let end = tr.last();
    let (et, gt) = frame_and_metric(fm, &end.point)?;
    let matrix = et.transpose() * &gt * &end.values;
    Ok(HolonomyTransformation {
        source,
        target: end.point.clone(),
        source_frame: es,
        target_frame: et,
        source_metric: gs,
        target_metric: gt,
        matrix,
        path_label: path.label.clone(),
        drift: tr.max_drift,
    })
}

/// `ĉ(t)` at every transport node of `path`.
pub fn lift_transformations(fm: &FoliatedModel, path: &HorizontalPath) -> Result<Vec<HolonomyTransformation>> {
    let source = path.start().point.clone();
    let (es, gs) = frame_and_metric(fm, &source)?;
    let job = TransportJob {
        kind: FieldKind::Holonomy,
        initial: es.clone(),
    };
    let tr = transport_jobs(fm, path, &[job])?.pop().expect("one job");
    tr.nodes
        .iter()
        .map(|node| {
            let (et, gt) = frame_and_metric(fm, &node.point)?;
            Ok(HolonomyTransformation {
                source: source.clone(),
                target: node.point.clone(),
                source_frame: es.clone(),
                target_frame: et.clone(),
                source_metric: gs.clone(),
                matrix: et.transpose() * &gt * &node.values,
                target_metric: gt,
                path_label: format!("{}@{}", path.label, node.t),
                drift: tr.max_drift,
            })
        })
        .collect()
}

/// `h2 ∘ h1`, reconciling the frames at the common point.
pub fn compose(fm: &FoliatedModel, h2: &HolonomyTransformation, h1: &HolonomyTransformation) -> Result<HolonomyTransformation> {
    let atlas = &fm.metric.atlas;
    let gap = atlas.coordinate_gap(&h2.source, &h1.target);
    if !(gap <= JOIN_TOLERANCE) {
        return Err(Error::Groupoid { gap });
    }
    let f = if h1.target.chart == h2.source.chart {
        h1.target_frame.clone()
    } else {
        let (_, j) = atlas
            .express_in(&h1.target, h2.source.chart, Some(&h2.source.coords))
            .ok_or(Error::Groupoid { gap })?;
        j * &h1.target_frame
    };
    let r = h2.source_frame.transpose() * &h2.source_metric * f;
    Ok(HolonomyTransformation {
        source: h1.source.clone(),
        target: h2.target.clone(),
        source_frame: h1.source_frame.clone(),
        target_frame: h2.target_frame.clone(),
        source_metric: h1.source_metric.clone(),
        target_metric: h2.target_metric.clone(),
        matrix: &h2.matrix * r * &h1.matrix,
        path_label: format!("{}*{}", h2.path_label, h1.path_label),
        drift: h1.drift.max(h2.drift),
    })
}

/// `h⁻¹`, realized by the reversed path.
pub fn invert(h: &HolonomyTransformation) -> Result<HolonomyTransformation> {
    let condition = h.condition_number();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning { condition });
    }
    let inv = h.matrix.clone().try_inverse().ok_or(Error::Conditioning { condition })?;
    Ok(HolonomyTransformation {
        source: h.target.clone(),
        target: h.source.clone(),
        source_frame: h.target_frame.clone(),
        target_frame: h.source_frame.clone(),
        source_metric: h.target_metric.clone(),
        target_metric: h.source_metric.clone(),
        matrix: inv,
        path_label: format!("inv({})", h.path_label),
        drift: h.drift,
    })
}

fn act(h: &HolonomyTransformation, m: &DMatrix<f64>, c: &DVector<f64>) -> TangentVector {
    TangentVector::new(h.target.clone(), &h.target_frame * (m * c))
}

/// `ζ(h, ξ₀) = h(ξ₀)`.
pub fn zeta(fm: &FoliatedModel, h: &HolonomyTransformation, xi0: &TangentVector) -> Result<TangentVector> {
    let c = h.source_coords(&h.source_components(fm, xi0)?);
    Ok(act(h, &h.matrix, &c))
}

fn inverse_transpose(h: &HolonomyTransformation) -> Result<DMatrix<f64>> {
    let condition = h.condition_number();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning { condition });
    }
    h.matrix
        .transpose()
        .try_inverse()
        .ok_or(Error::Conditioning { condition })
}

/// `ζ̄(h, ν₀) = (h*)⁻¹ ν₀`.
pub fn zeta_bar(fm: &FoliatedModel, h: &HolonomyTransformation, nu0: &TangentVector) -> Result<TangentVector> {
    let c = h.source_coords(&h.source_components(fm, nu0)?);
    Ok(act(h, &inverse_transpose(h)?, &c))
}

/// `ρ_{ν₀}(h) = ‖ζ̄(h, ν₀)‖²` for `ν₀` normalized to unit length.
pub fn rho(fm: &FoliatedModel, h: &HolonomyTransformation, nu0: &TangentVector) -> Result<f64> {
    let c = h.source_coords(&h.source_components(fm, nu0)?);
    rho_coords(h, &c)
}

/// `ρ` for `ν₀` given by coordinates in the source frame.
pub fn rho_coords(h: &HolonomyTransformation, c: &DVector<f64>) -> Result<f64> {
    let n = c.norm();
    if n == 0.0 {
        return Err(Error::Argument("ν₀ is zero".into()));
    }
    Ok((inverse_transpose(h)? * (c / n)).norm_squared())
}
