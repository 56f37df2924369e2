//! Spans of pulled-back `A`-tensor values along a horizontal curve.

use nalgebra::{DMatrix, DVector, SVD};
use serde::Serialize;

use super::groupoid::{invert, lift_transformations};
use super::path::HorizontalPath;
use super::transport::{transport_jobs, FieldKind, TransportJob};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::ChartPoint;

/// Singular values above `RANK_TOLERANCE · max(1, σ_max)` count toward the
/// rank.
pub const RANK_TOLERANCE: f64 = 1e-8;

/// Vertical vectors at a base point, stored as coordinates in the orthonormal
/// vertical frame there, with their running rank.
#[derive(Clone, Debug)]
pub struct SpanAccumulator {
    pub base: ChartPoint,
    pub frame: DMatrix<f64>,
    pub vectors: Vec<DVector<f64>>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
}

impl SpanAccumulator {
    pub fn new(base: ChartPoint, frame: DMatrix<f64>) -> Self {
        SpanAccumulator {
            base,
            frame,
            vectors: Vec::new(),
            singular_values: Vec::new(),
            rank: 0,
        }
    }

    pub fn leaf_dim(&self) -> usize {
        self.frame.ncols()
    }

    fn matrix(&self) -> DMatrix<f64> {
        let k = self.leaf_dim();
        let mut m = DMatrix::zeros(k, self.vectors.len());
        for (j, v) in self.vectors.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    fn threshold(&self) -> f64 {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        RANK_TOLERANCE * top.max(1.0)
    }

    pub fn add(&mut self, v: DVector<f64>) {
        self.vectors.push(v);
        let mut s: Vec<f64> = SVD::new(self.matrix(), false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        self.singular_values = s;
        let tol = self.threshold();
        self.rank = self.singular_values.iter().filter(|&&x| x > tol).count();
    }

    /// Orthonormal frame coordinates of the span (`k × rank`) and of its
    /// orthogonal complement (`k × (k − rank)`).
    pub fn split(&self) -> (DMatrix<f64>, DMatrix<f64>) {
        let k = self.leaf_dim();
        if self.vectors.is_empty() {
            return (DMatrix::zeros(k, 0), DMatrix::identity(k, k));
        }
        let gram = self.matrix() * self.matrix().transpose();
        let eig = nalgebra::SymmetricEigen::new(gram);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let span = DMatrix::from_fn(k, self.rank, |i, j| eig.eigenvectors[(i, order[j])]);
        let comp = DMatrix::from_fn(k, k - self.rank, |i, j| eig.eigenvectors[(i, order[self.rank + j])]);
        (span, comp)
    }
}

/// `C(c)`: the span at `c(0)` of `ĉ(t)⁻¹ A_{ċ(t)} Z` over an orthonormal
/// horizontal frame `Z` at `num_times` evenly spread transport nodes.
pub fn dual_leaf_span(fm: &FoliatedModel, path: &HorizontalPath, num_times: usize) -> Result<SpanAccumulator> {
    if num_times < 2 {
        return Err(Error::Argument("num_times must be at least 2".into()));
    }
    let lifts = lift_transformations(fm, path)?;
    let first = &lifts[0];
    let mut acc = SpanAccumulator::new(first.source.clone(), first.source_frame.clone());
    let last = lifts.len() - 1;
    let mut picked: Vec<usize> = (0..num_times)
        .map(|i| ((i * last) as f64 / (num_times - 1) as f64).round() as usize)
        .collect();
    picked.dedup();
    for i in picked {
        let h = &lifts[i];
        let node_point = &h.target;
        let velocity = node_velocity(path, i);
        let jet = fm.jet(node_point)?;
        let frame = fm.horizontal_orthonormal_frame(node_point)?;
        let a = jet.a_operator(&velocity) * &frame;
        let back = invert(h)?;
        for z in a.column_iter() {
            let d = h.target_frame.transpose() * &h.target_metric * z;
            acc.add(&back.matrix * d);
        }
    }
    Ok(acc)
}

/// Velocity at transport node `i`, matching the node order of
/// `transport_jobs`.
fn node_velocity(path: &HorizontalPath, i: usize) -> DVector<f64> {
    let mut idx = i;
    for seg in &path.segments {
        let nodes = seg.samples.len() / 2 + 1;
        if idx < nodes {
            return seg.samples[2 * idx].velocity.clone();
        }
        idx -= nodes;
    }
    path.end().velocity.clone()
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpanCheck {
    /// `C(c)` is all of `𝒱_{c(0)}`; there is no `ν₀ ⊥ C(c)`.
    NotApplicable { rank: usize },
    Checked {
        /// `max_s ‖A*_{ċ(s)} ν(s)‖`.
        a_star_max: f64,
        /// `max_s |⟨ν(s), ĉ(s) w⟩|` over unit `w ∈ C(c)`.
        orthogonality_max: f64,
        rank: usize,
    },
}

impl SpanCheck {
    pub fn residual(&self) -> Option<f64> {
        match self {
            SpanCheck::NotApplicable { .. } => None,
            SpanCheck::Checked { a_star_max, orthogonality_max, .. } => Some(a_star_max.max(*orthogonality_max)),
        }
    }
}

/// Transport a unit `ν₀ ⊥ C(c)` as a dual field and measure how far it is
/// from satisfying `ν(s) ⊥ ĉ(s) C(c)` and `A*_{ċ} ν = 0`.
pub fn dual_orthogonality_check(fm: &FoliatedModel, path: &HorizontalPath, span: &SpanAccumulator) -> Result<SpanCheck> {
    let k = span.leaf_dim();
    if span.rank >= k {
        return Ok(SpanCheck::NotApplicable { rank: span.rank });
    }
    let (basis, comp) = span.split();
    let nu0 = &span.frame * comp.column(0);
    let pushed = &span.frame * &basis;
    let jobs = [
        TransportJob {
            kind: FieldKind::Dual,
            initial: DMatrix::from_column_slice(nu0.len(), 1, nu0.as_slice()),
        },
        TransportJob {
            kind: FieldKind::Holonomy,
            initial: pushed,
        },
    ];
    let out = transport_jobs(fm, path, &jobs)?;
    let mut a_star_max: f64 = 0.0;
    let mut orthogonality_max: f64 = 0.0;
    for (dual, hol) in out[0].nodes.iter().zip(&out[1].nodes) {
        let jet = fm.jet(&dual.point)?;
        let nu = dual.values.column(0).into_owned();
        let a = jet.a_star_operator(&dual.velocity) * &nu;
        let speed = jet.proj.norm(&dual.velocity);
        if speed > 0.0 {
            a_star_max = a_star_max.max(jet.proj.norm(&a) / speed);
        }
        for w in hol.values.column_iter() {
            let w = w.into_owned();
            orthogonality_max = orthogonality_max.max(jet.proj.inner(&nu, &w).abs());
        }
    }
    Ok(SpanCheck::Checked {
        a_star_max,
        orthogonality_max,
        rank: span.rank,
    })
}
