//! The built-in foliated geometries.
//!
//! | name           | manifold        | leaves                                   |
//! |----------------|-----------------|------------------------------------------|
//! | `flat_torus`   | `Tⁿ`            | first `k` coordinate directions          |
//! | `hopf_s3`      | Berger `S³`     | Hopf circles, fiber length scaled by `ε` |
//! | `hopf_warped`  | `S³`            | Hopf circles, warped by `e^{λ z}`        |
//! | `s3_x_s1`      | Berger `S³ × S¹`| Hopf circles of the first factor         |
//! | `torus_x_hopf` | `T² × S³`       | one torus circle times the Hopf circles  |

pub mod sphere;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::{warp_metric, CovectorFn, FoliatedModel, FrameDerivativeFn, FrameFn, ScalarFn};
use crate::geometry::{Atlas, ChartPoint, Christoffels, MetricModel, PeriodicBox};
use crate::holonomy::{FlatRectangles, HopfLatitudeLoops};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    FlatTorus,
    HopfS3,
    HopfWarped,
    S3XS1,
    TorusXHopf,
}

impl ModelName {
    pub const ALL: [ModelName; 5] = [
        ModelName::FlatTorus,
        ModelName::HopfS3,
        ModelName::HopfWarped,
        ModelName::S3XS1,
        ModelName::TorusXHopf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelName::FlatTorus => "flat_torus",
            ModelName::HopfS3 => "hopf_s3",
            ModelName::HopfWarped => "hopf_warped",
            ModelName::S3XS1 => "s3_x_s1",
            ModelName::TorusXHopf => "torus_x_hopf",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ModelName::FlatTorus => "flat torus [0,1)^n, leaves along the first k axes",
            ModelName::HopfS3 => "Hopf fibration of the Berger sphere, fiber length scaled by epsilon",
            ModelName::HopfWarped => "Berger Hopf fibration warped by exp(lambda * height) (family 1) or exp(lambda) (family 0)",
            ModelName::S3XS1 => "Berger sphere times a circle of radius circle_radius, Hopf leaves",
            ModelName::TorusXHopf => "flat 2-torus times the Berger sphere, leaves = first torus circle x Hopf circle",
        }
    }

    /// Parameters and their defaults.
    pub fn defaults(self) -> BTreeMap<String, f64> {
        let pairs: &[(&str, f64)] = match self {
            ModelName::FlatTorus => &[("n", 3.0), ("k", 1.0)],
            ModelName::HopfS3 => &[("epsilon", 1.0)],
            ModelName::HopfWarped => &[("epsilon", 1.0), ("lambda", 0.3), ("family", 1.0)],
            ModelName::S3XS1 => &[("epsilon", 1.0), ("circle_radius", 1.0)],
            ModelName::TorusXHopf => &[("epsilon", 1.0)],
        };
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }
}

impl fmt::Display for ModelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ModelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ModelName::ALL.iter().map(|m| m.as_str()).collect();
                Error::Validation(format!("unknown model {s:?}; expected one of {}", names.join(", ")))
            })
    }
}

/// A model name with real parameters; missing parameters take defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: ModelName,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn new(name: ModelName) -> Self {
        ModelSpec {
            name,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Parameters with defaults filled in.
    pub fn resolved(&self) -> BTreeMap<String, f64> {
        let mut p = self.name.defaults();
        for (k, v) in &self.params {
            p.insert(k.clone(), *v);
        }
        p
    }

    pub fn validate(&self) -> Result<()> {
        let defaults = self.name.defaults();
        for k in self.params.keys() {
            if !defaults.contains_key(k) {
                let known: Vec<_> = defaults.keys().cloned().collect();
                return Err(Error::Validation(format!(
                    "{}: unknown parameter {k:?} (known: {})",
                    self.name,
                    known.join(", ")
                )));
            }
        }
        let p = self.resolved();
        let mut problems = Vec::new();
        let integer = |v: f64| v.fract() == 0.0;
        match self.name {
            ModelName::FlatTorus => {
                let (n, k) = (p["n"], p["k"]);
                if !(integer(n) && (2.0..=6.0).contains(&n)) {
                    problems.push(format!("n = {n} must be an integer in [2, 6]"));
                }
                if !(integer(k) && k >= 1.0 && k < n) {
                    problems.push(format!("k = {k} must be an integer in [1, n - 1]"));
                }
            }
            _ => {
                let e = p["epsilon"];
                if !(e > 0.0 && e < 2.0) {
                    problems.push(format!("epsilon = {e} must lie in (0, 2)"));
                }
            }
        }
        if self.name == ModelName::HopfWarped {
            if !p["lambda"].is_finite() {
                problems.push(format!("lambda = {} must be finite", p["lambda"]));
            }
            let f = p["family"];
            if f != 0.0 && f != 1.0 {
                problems.push(format!("family = {f} must be 0 (constant) or 1 (height)"));
            }
        }
        if self.name == ModelName::S3XS1 {
            let r = p["circle_radius"];
            if !(r > 0.0 && r.is_finite()) {
                problems.push(format!("circle_radius = {r} must be positive and finite"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(format!("{}: {}", self.name, problems.join("; "))))
        }
    }
}

/// Build the model described by `spec`.
pub fn make_model(spec: &ModelSpec) -> Result<FoliatedModel> {
    spec.validate()?;
    let p = spec.resolved();
    match spec.name {
        ModelName::FlatTorus => Ok(flat_torus(p["n"] as usize, p["k"] as usize)),
        ModelName::HopfS3 => hopf_s3(p["epsilon"]),
        ModelName::HopfWarped => hopf_warped(p["epsilon"], p["lambda"], p["family"] as u32),
        ModelName::S3XS1 => s3_x_s1(p["epsilon"], p["circle_radius"]),
        ModelName::TorusXHopf => torus_x_hopf(p["epsilon"]),
    }
}

/// `(name, description, defaults)` for every model.
pub fn list_models() -> Vec<(ModelName, &'static str, BTreeMap<String, f64>)> {
    ModelName::ALL
        .into_iter()
        .map(|m| (m, m.description(), m.defaults()))
        .collect()
}

fn unit_columns(n: usize, k: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |i, j| if i == j { 1.0 } else { 0.0 })
}

/// `Tⁿ = ℝⁿ/ℤⁿ` with leaves along the first `k` axes.
pub fn flat_torus(n: usize, k: usize) -> FoliatedModel {
    let atlas = Arc::new(Atlas::single(Arc::new(PeriodicBox {
        dim: n,
        lo: 0.0,
        period: 1.0,
        margin: 0.5,
    })));
    let metric = MetricModel::new(
        "flat_torus",
        atlas,
        Arc::new(move |_p: &ChartPoint| DMatrix::identity(n, n)),
        Some(Arc::new(move |_p: &ChartPoint| Christoffels::zeros(n))),
    );
    let frame = unit_columns(n, k);
    FoliatedModel::new(
        "flat_torus",
        metric,
        Arc::new(move |_p: &ChartPoint| frame.clone()),
        Some(Arc::new(move |_p: &ChartPoint| vec![DMatrix::zeros(n, k); n])),
        k,
        true,
    )
    .with_loop_family(Arc::new(FlatRectangles))
}

/// Circle of radius `r` as a model with no leaves.
fn circle(r: f64) -> FoliatedModel {
    let atlas = Arc::new(Atlas::single(Arc::new(PeriodicBox {
        dim: 1,
        lo: -std::f64::consts::PI,
        period: 2.0 * std::f64::consts::PI,
        margin: 1.0,
    })));
    let metric = MetricModel::new(
        "circle",
        atlas,
        Arc::new(move |_p: &ChartPoint| DMatrix::from_element(1, 1, r * r)),
        Some(Arc::new(|_p: &ChartPoint| Christoffels::zeros(1))),
    );
    FoliatedModel::new(
        "circle",
        metric,
        Arc::new(|_p: &ChartPoint| DMatrix::zeros(1, 0)),
        Some(Arc::new(|_p: &ChartPoint| vec![DMatrix::zeros(1, 0)])),
        0,
        true,
    )
}

/// Hopf fibration of the round unit sphere.
pub fn round_hopf() -> FoliatedModel {
    let atlas = Arc::new(Atlas::single(Arc::new(sphere::StereoS3)));
    let metric = MetricModel::new(
        "round_s3",
        atlas,
        Arc::new(|p: &ChartPoint| DMatrix::identity(3, 3) * sphere::conformal_factor(p.coords.as_slice())),
        Some(Arc::new(|p: &ChartPoint| sphere::round_christoffels(p.coords.as_slice()))),
    );
    let frame: FrameFn = Arc::new(|p: &ChartPoint| {
        let v = sphere::hopf_field(p.chart, p.coords.as_slice());
        DMatrix::from_column_slice(3, 1, v.as_slice())
    });
    let dframe: FrameDerivativeFn = Arc::new(|p: &ChartPoint| {
        let j = sphere::hopf_field_jacobian(p.chart, p.coords.as_slice());
        (0..3)
            .map(|i| DMatrix::from_column_slice(3, 1, j.column(i).as_slice()))
            .collect()
    });
    FoliatedModel::new("round_hopf", metric, frame, Some(dframe), 1, true)
        .with_loop_family(Arc::new(HopfLatitudeLoops { factor: 0 }))
}

/// Hopf fibration of the Berger sphere: the round sphere warped by the
/// constant `φ = ln ε`.
pub fn hopf_s3(epsilon: f64) -> Result<FoliatedModel> {
    let phi0 = epsilon.ln();
    let phi: ScalarFn = Arc::new(move |_p: &ChartPoint| phi0);
    let dphi: CovectorFn = Arc::new(|p: &ChartPoint| DVector::zeros(p.dim()));
    let mut fm = warp_metric(&round_hopf(), phi, dphi)?;
    fm.name = "hopf_s3".into();
    fm.metric.name = "berger_s3".into();
    Ok(fm)
}

/// The basic height function `z = 2(x₀x₂ + x₁x₃)` on the `S³` chart factor
/// `factor` and its differential in chart coordinates.
pub fn height_function(atlas: &Atlas, factor: usize, p: &ChartPoint) -> (f64, DVector<f64>) {
    let (chart, u) = atlas.factor_coords(p, factor);
    let x = sphere::to_ambient(chart, &u);
    let (z, grad) = height(&x);
    let j = sphere::ambient_jacobian(chart, &u);
    let dz = j.transpose() * DVector::from_column_slice(&grad);
    let mut d = DVector::zeros(p.dim());
    let o = atlas.offset(factor);
    d.rows_mut(o, 3).copy_from(&dz);
    (z, d)
}

use sphere::height;

/// `hopf_s3(ε)` warped by `φ = λ·z` (family 1) or `φ ≡ λ` (family 0).
pub fn hopf_warped(epsilon: f64, lambda: f64, family: u32) -> Result<FoliatedModel> {
    let base = hopf_s3(epsilon)?;
    let atlas = base.metric.atlas.clone();
    let (phi, dphi): (ScalarFn, CovectorFn) = match family {
        0 => (
            Arc::new(move |_p: &ChartPoint| lambda),
            Arc::new(|p: &ChartPoint| DVector::zeros(p.dim())),
        ),
        1 => {
            let a2 = atlas.clone();
            (
                Arc::new(move |p: &ChartPoint| lambda * height_function(&atlas, 0, p).0),
                Arc::new(move |p: &ChartPoint| height_function(&a2, 0, p).1 * lambda),
            )
        }
        f => return Err(Error::Validation(format!("unknown warping family {f}"))),
    };
    let mut fm = warp_metric(&base, phi, dphi)?;
    fm.name = "hopf_warped".into();
    Ok(fm)
}

/// Riemannian product with leaves the products of the leaves.
pub fn product(name: &str, a: &FoliatedModel, b: &FoliatedModel) -> FoliatedModel {
    let atlas = Arc::new(Atlas::product(&a.metric.atlas, &b.metric.atlas));
    let (na, nb) = (a.dimension(), b.dimension());
    let (ka, kb) = (a.leaf_dim, b.leaf_dim);
    let n = na + nb;
    let charts_a = a.metric.atlas.num_charts();
    let split = move |p: &ChartPoint| -> (ChartPoint, ChartPoint) {
        let x = p.coords.as_slice();
        (
            ChartPoint::new(p.chart % charts_a, x[..na].to_vec()),
            ChartPoint::new(p.chart / charts_a, x[na..].to_vec()),
        )
    };
    let metric_fn = {
        let (ma, mb) = (a.metric.clone(), b.metric.clone());
        Arc::new(move |p: &ChartPoint| {
            let (pa, pb) = split(p);
            let mut g = DMatrix::zeros(n, n);
            g.view_mut((0, 0), (na, na)).copy_from(&ma.metric(&pa).expect("inside product domain"));
            g.view_mut((na, na), (nb, nb)).copy_from(&mb.metric(&pb).expect("inside product domain"));
            g
        })
    };
    let christoffel_fn: Option<crate::geometry::ChristoffelFn> =
        if a.metric.has_analytic_christoffels() && b.metric.has_analytic_christoffels() {
            let (ma, mb) = (a.metric.clone(), b.metric.clone());
            Some(Arc::new(move |p: &ChartPoint| {
                let (pa, pb) = split(p);
                let ga = ma.christoffels(&pa).expect("inside product domain");
                let gb = mb.christoffels(&pb).expect("inside product domain");
                let mut c = Christoffels::zeros(n);
                for k in 0..na {
                    for i in 0..na {
                        for j in 0..na {
                            c.set(k, i, j, ga.get(k, i, j));
                        }
                    }
                }
                for k in 0..nb {
                    for i in 0..nb {
                        for j in 0..nb {
                            c.set(na + k, na + i, na + j, gb.get(k, i, j));
                        }
                    }
                }
                c
            }))
        } else {
            None
        };
    let metric = MetricModel::new(name, atlas, metric_fn, christoffel_fn);
    let frame: FrameFn = {
        let (fa, fb) = (a.clone(), b.clone());
        Arc::new(move |p: &ChartPoint| {
            let (pa, pb) = split(p);
            let mut v = DMatrix::zeros(n, ka + kb);
            v.view_mut((0, 0), (na, ka)).copy_from(&fa.vertical_frame(&pa).expect("inside product domain"));
            v.view_mut((na, ka), (nb, kb)).copy_from(&fb.vertical_frame(&pb).expect("inside product domain"));
            v
        })
    };
    let dframe: Option<FrameDerivativeFn> = if a.has_analytic_frame_derivative() && b.has_analytic_frame_derivative() {
        let (fa, fb) = (a.clone(), b.clone());
        Some(Arc::new(move |p: &ChartPoint| {
            let (pa, pb) = split(p);
            let da = fa.vertical_frame_derivative(&pa).expect("inside product domain");
            let db = fb.vertical_frame_derivative(&pb).expect("inside product domain");
            let mut out = Vec::with_capacity(n);
            for d in da {
                let mut m = DMatrix::zeros(n, ka + kb);
                m.view_mut((0, 0), (na, ka)).copy_from(&d);
                out.push(m);
            }
            for d in db {
                let mut m = DMatrix::zeros(n, ka + kb);
                m.view_mut((na, ka), (nb, kb)).copy_from(&d);
                out.push(m);
            }
            out
        }))
    } else {
        None
    };
    FoliatedModel::new(
        name,
        metric,
        frame,
        dframe,
        ka + kb,
        a.totally_geodesic_claimed && b.totally_geodesic_claimed,
    )
}

/// Berger sphere times a circle of radius `r`, leaves the Hopf circles.
pub fn s3_x_s1(epsilon: f64, r: f64) -> Result<FoliatedModel> {
    Ok(product("s3_x_s1", &hopf_s3(epsilon)?, &circle(r)).with_loop_family(Arc::new(HopfLatitudeLoops { factor: 0 })))
}

/// `T² × S³` with leaves `S¹ × (Hopf circle)`: a foliation whose
/// `A`-tensor only ever reaches the Hopf part of the vertical space.
pub fn torus_x_hopf(epsilon: f64) -> Result<FoliatedModel> {
    Ok(product("torus_x_hopf", &flat_torus(2, 1), &hopf_s3(epsilon)?)
        .with_loop_family(Arc::new(HopfLatitudeLoops { factor: 1 })))
}
