//! RK4 transport of vertical fields along horizontal paths.
//!
//! Holonomy fields solve `ξ' = −Γ(ċ, ξ) − A*_ċ ξ − S_ċ ξ` and dual holonomy
//! fields `ν' = −Γ(ċ, ν) − A*_ċ ν + S_ċ ν` in coordinates. A step of size
//! `2h` uses the path samples at `t`, `t + h` and `t + 2h`, so the curve is
//! never re-evaluated between samples.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::path::HorizontalPath;
use crate::error::{Error, Result};
use crate::foliation::{transport_ops, FoliatedModel, TransportOps};
use crate::geometry::{ChartPoint, PathSample, TangentVector};

/// Verticality drift above which transport is aborted.
pub const DRIFT_BREACH: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Holonomy,
    Dual,
    /// Parallel vertical part with the `A*` correction only.
    VerticalParallel,
}

impl FieldKind {
    fn operator(self, ops: &TransportOps) -> DMatrix<f64> {
        match self {
            FieldKind::Holonomy => ops.holonomy(),
            FieldKind::Dual => ops.dual(),
            FieldKind::VerticalParallel => ops.vertical_parallel(),
        }
    }
}

/// Values of a transported family of vertical fields at one step node.
#[derive(Clone, Debug)]
pub struct FieldNode {
    pub t: f64,
    pub point: ChartPoint,
    pub velocity: DVector<f64>,
    /// One column per field.
    pub values: DMatrix<f64>,
}

/// Several fields transported together.
#[derive(Clone, Debug)]
pub struct MatrixTransport {
    pub kind: FieldKind,
    pub nodes: Vec<FieldNode>,
    pub max_drift: f64,
}

impl MatrixTransport {
    pub fn last(&self) -> &FieldNode {
        self.nodes.last().expect("transport has nodes")
    }
}

/// One vertical field along a path.
#[derive(Clone, Debug)]
pub struct TransportedField {
    pub path_label: String,
    pub kind: FieldKind,
    pub samples: Vec<(f64, TangentVector)>,
    pub max_drift: f64,
}

impl TransportedField {
    pub fn last(&self) -> &TangentVector {
        &self.samples.last().expect("field has samples").1
    }
}

/// A transport request: kind and initial columns in the chart of the path
/// start.
#[derive(Clone, Debug)]
pub struct TransportJob {
    pub kind: FieldKind,
    pub initial: DMatrix<f64>,
}

fn ops_in_chart(fm: &FoliatedModel, s: &PathSample, reference: &ChartPoint) -> Result<TransportOps> {
    if s.point.chart == reference.chart {
        return transport_ops(fm, &s.point, &s.velocity);
    }
    let (q, j) = fm
        .metric
        .atlas
        .express_in(&s.point, reference.chart, Some(&reference.coords))
        .ok_or_else(|| Error::Integration {
            t: s.t,
            reason: "sample cannot be expressed in the step's chart".into(),
            chart: s.point.chart,
            coords: s.point.coords.iter().copied().collect(),
        })?;
    transport_ops(fm, &q, &(j * &s.velocity))
}

/// Jacobian taking components at `from` (chart of `from`) to the chart of
/// `to`, which names the same point.
fn change_of_chart(fm: &FoliatedModel, from: &ChartPoint, to: &ChartPoint, t: f64) -> Result<DMatrix<f64>> {
    if from.chart == to.chart {
        return Ok(DMatrix::identity(from.dim(), from.dim()));
    }
    fm.metric
        .atlas
        .express_in(from, to.chart, Some(&to.coords))
        .map(|(_, j)| j)
        .ok_or_else(|| Error::Integration {
            t,
            reason: "no chart transition between consecutive samples".into(),
            chart: from.chart,
            coords: from.coords.iter().copied().collect(),
        })
}

fn column_drift(ops: &TransportOps, v: &DMatrix<f64>) -> f64 {
    let n = v.nrows();
    let ph = DMatrix::identity(n, n) - &ops.pv;
    let mut worst: f64 = 0.0;
    for c in v.column_iter() {
        let c = c.into_owned();
        let nn = c.dot(&(&ops.g * &c));
        if nn > 0.0 {
            let h = &ph * &c;
            worst = worst.max((h.dot(&(&ops.g * &h)) / nn).sqrt());
        }
    }
    worst
}

/// Transport several families of vertical fields along `path` at once.
pub fn transport_jobs(fm: &FoliatedModel, path: &HorizontalPath, jobs: &[TransportJob]) -> Result<Vec<MatrixTransport>> {
    let mut current: Vec<DMatrix<f64>> = jobs.iter().map(|j| j.initial.clone()).collect();
    let mut out: Vec<MatrixTransport> = jobs
        .iter()
        .map(|j| MatrixTransport {
            kind: j.kind,
            nodes: Vec::new(),
            max_drift: 0.0,
        })
        .collect();
    let mut prev_end: Option<&PathSample> = None;
    for seg in &path.segments {
        let first = seg.start();
        if let Some(prev) = prev_end {
            let j = change_of_chart(fm, &prev.point, &first.point, first.t)?;
            for c in &mut current {
                *c = &j * &*c;
            }
        }
        let own: Vec<TransportOps> = seg
            .samples
            .iter()
            .map(|s| transport_ops(fm, &s.point, &s.velocity))
            .collect::<Result<_>>()?;
        for (o, c) in out.iter_mut().zip(&current) {
            o.max_drift = o.max_drift.max(column_drift(&own[0], c));
            o.nodes.push(FieldNode {
                t: first.t,
                point: first.point.clone(),
                velocity: first.velocity.clone(),
                values: c.clone(),
            });
        }
        let h2 = 2.0 * seg.step;
        for a in (0..seg.samples.len() - 1).step_by(2) {
            let s0 = &seg.samples[a];
            let s1 = &seg.samples[a + 1];
            let s2 = &seg.samples[a + 2];
            let reference = &s0.point;
            let mid_ops;
            let mid = if s1.point.chart == reference.chart {
                &own[a + 1]
            } else {
                mid_ops = ops_in_chart(fm, s1, reference)?;
                &mid_ops
            };
            let end_ops;
            let end = if s2.point.chart == reference.chart {
                &own[a + 2]
            } else {
                end_ops = ops_in_chart(fm, s2, reference)?;
                &end_ops
            };
            let back = if s2.point.chart == reference.chart {
                None
            } else {
                let (q, _) = fm
                    .metric
                    .atlas
                    .express_in(&s2.point, reference.chart, Some(&reference.coords))
                    .expect("expressed above");
                Some(change_of_chart(fm, &q, &s2.point, s2.t)?)
            };
            for ((job, c), o) in jobs.iter().zip(current.iter_mut()).zip(out.iter_mut()) {
                let m0 = job.kind.operator(&own[a]);
                let m1 = job.kind.operator(mid);
                let m2 = job.kind.operator(end);
                let k1 = &m0 * &*c;
                let k2 = &m1 * (&*c + &k1 * (0.5 * h2));
                let k3 = &m1 * (&*c + &k2 * (0.5 * h2));
                let k4 = &m2 * (&*c + &k3 * h2);
                let mut next = &*c + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h2 / 6.0);
                if let Some(j) = &back {
                    next = j * next;
                }
                let drift = column_drift(&own[a + 2], &next);
                if drift > DRIFT_BREACH {
                    return Err(Error::Transport { t: s2.t, drift });
                }
                o.max_drift = o.max_drift.max(drift);
                o.nodes.push(FieldNode {
                    t: s2.t,
                    point: s2.point.clone(),
                    velocity: s2.velocity.clone(),
                    values: next.clone(),
                });
                *c = next;
            }
        }
        prev_end = Some(seg.end());
    }
    Ok(out)
}

/// Components of `v` in the chart of `at`, after checking that `v` is based
/// at the same point.
pub(crate) fn components_at(fm: &FoliatedModel, v: &TangentVector, at: &ChartPoint) -> Result<DVector<f64>> {
    let gap = fm.metric.atlas.coordinate_gap(at, &v.base);
    if !(gap <= super::path::JOIN_TOLERANCE) {
        return Err(Error::Argument(format!(
            "vector is based {gap:e} away from the expected point"
        )));
    }
    if v.base.chart == at.chart {
        return Ok(v.components.clone());
    }
    let j = change_of_chart(fm, &v.base, at, 0.0)?;
    Ok(j * &v.components)
}

fn transport_single(fm: &FoliatedModel, path: &HorizontalPath, v0: &TangentVector, kind: FieldKind) -> Result<TransportedField> {
    let start = &path.start().point;
    let c = components_at(fm, v0, start)?;
    let pr = fm.projectors(start)?;
    let c = fm.require_vertical(&pr, &c, "initial value")?;
    let job = TransportJob {
        kind,
        initial: DMatrix::from_column_slice(c.len(), 1, c.as_slice()),
    };
    let t = transport_jobs(fm, path, &[job])?.pop().expect("one job");
    Ok(TransportedField {
        path_label: path.label.clone(),
        kind,
        samples: t
            .nodes
            .into_iter()
            .map(|n| (n.t, TangentVector::new(n.point, n.values.column(0).into_owned())))
            .collect(),
        max_drift: t.max_drift,
    })
}

/// Holonomy field along `path` with initial value `xi0`.
pub fn transport_holonomy(fm: &FoliatedModel, path: &HorizontalPath, xi0: &TangentVector) -> Result<TransportedField> {
    transport_single(fm, path, xi0, FieldKind::Holonomy)
}

/// Dual holonomy field along `path` with initial value `nu0`.
pub fn transport_dual(fm: &FoliatedModel, path: &HorizontalPath, nu0: &TangentVector) -> Result<TransportedField> {
    transport_single(fm, path, nu0, FieldKind::Dual)
}
