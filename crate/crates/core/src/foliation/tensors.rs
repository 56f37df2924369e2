//! The O'Neill tensors `A`, `A*` and `S` and the linear operators of the
//! holonomy and dual-holonomy transport equations.
//!
//! Everything is expressed through the projector field `Pv` and its first
//! derivatives. For horizontal `X, Y` and vertical `ξ` at `p`:
//!
//! - `A_X Y  = Pv[−(∂_X Pv) Y + Γ(X, Y)]`
//! - `A*_X ξ = −Ph[(∂_X Pv) ξ + Γ(X, ξ)]`
//! - `S_X ξ  = −Pv[−(∂_ξ Pv) X + Γ(ξ, X)]`

use nalgebra::{DMatrix, DVector};

use super::{FoliatedModel, Projectors};
use crate::error::{Error, Result};
use crate::geometry::{central_difference4, ChartPoint, Christoffels, TangentVector};

/// Projectors, Christoffel symbols and `∂_i Pv` for every coordinate `i`.
#[derive(Clone, Debug)]
pub struct PointJet {
    pub proj: Projectors,
    pub gamma: Christoffels,
    pub dpv: Vec<DMatrix<f64>>,
}

impl PointJet {
    /// `∂_v Pv`.
    pub fn dpv_along(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let n = v.len();
        let mut out = DMatrix::zeros(n, n);
        for (i, d) in self.dpv.iter().enumerate() {
            if v[i] != 0.0 {
                out += d * v[i];
            }
        }
        out
    }

    /// Matrix of `Y ↦ Pv[−(∂_X Pv) Y + Γ(X, Y)]`.
    pub fn a_operator(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = -self.dpv_along(x) + self.gamma.contract_first(x);
        &self.proj.pv * m
    }

    /// Matrix of `ξ ↦ −Ph[(∂_X Pv) ξ + Γ(X, ξ)]`.
    pub fn a_star_operator(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let m = self.dpv_along(x) + self.gamma.contract_first(x);
        -(&self.proj.ph * m)
    }

    /// `A*_X` as the metric adjoint of `A_X ∘ Ph`.
    pub fn a_star_adjoint_operator(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        let l = self.a_operator(x) * &self.proj.ph;
        let g = &self.proj.g;
        let ginv = g.clone().try_inverse().ok_or_else(|| {
            Error::Argument("metric matrix is singular".into())
        })?;
        Ok(ginv * l.transpose() * g)
    }

    /// Matrix of `ξ ↦ −Pv[−(∂_ξ Pv) X + Γ(ξ, X)]`.
    pub fn s_operator(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len();
        let mut d = DMatrix::zeros(n, n);
        for (j, dj) in self.dpv.iter().enumerate() {
            d.set_column(j, &(dj * x));
        }
        let m = -d + self.gamma.contract_first(x);
        -(&self.proj.pv * m)
    }
}

impl FoliatedModel {
    /// Projectors, Christoffels and projector derivatives at `p`.
    pub fn jet(&self, p: &ChartPoint) -> Result<PointJet> {
        let proj = self.projectors(p)?;
        let gamma = self.metric.christoffels(p)?;
        let n = self.dimension();
        let dpv = if self.leaf_dim == 0 {
            vec![DMatrix::zeros(n, n); n]
        } else if self.metric.has_analytic_christoffels() && self.has_analytic_frame_derivative() {
            analytic_projector_derivatives(self, p, &proj, &gamma)?
        } else {
            (0..n)
                .map(|i| {
                    let e = DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
                    self.projector_derivative(p, &e)
                })
                .collect::<Result<_>>()?
        };
        Ok(PointJet { proj, gamma, dpv })
    }
}

fn analytic_projector_derivatives(
    fm: &FoliatedModel,
    p: &ChartPoint,
    proj: &Projectors,
    gamma: &Christoffels,
) -> Result<Vec<DMatrix<f64>>> {
    let g = &proj.g;
    let v = fm.vertical_frame(p)?;
    let dv = fm.vertical_frame_derivative(p)?;
    let dg = gamma.metric_derivative(g);
    let gv = g * &v;
    let minv = (v.transpose() * &gv)
        .try_inverse()
        .ok_or(Error::Degenerate { chart: p.chart, ratio: 0.0 })?;
    let vt_g = gv.transpose();
    Ok(dg
        .iter()
        .zip(&dv)
        .map(|(dgi, dvi)| {
            let dm = dvi.transpose() * &gv + v.transpose() * dgi * &v + &vt_g * dvi;
            let d_vtg = dvi.transpose() * g + v.transpose() * dgi;
            dvi * &minv * &vt_g - &v * &minv * dm * &minv * &vt_g + &v * &minv * d_vtg
        })
        .collect())
}

/// Linear operators of the transport equations at one curve sample, acting on
/// coordinate components of vertical vectors.
#[derive(Clone, Debug)]
pub struct TransportOps {
    pub pv: DMatrix<f64>,
    pub g: DMatrix<f64>,
    pub gamma: DMatrix<f64>,
    pub a_star: DMatrix<f64>,
    pub s: DMatrix<f64>,
}

impl TransportOps {
    /// `ξ ↦ −(Γ(ċ, ξ) + A*_ċ ξ + S_ċ ξ)`.
    pub fn holonomy(&self) -> DMatrix<f64> {
        -(&self.gamma + &self.a_star + &self.s)
    }

    /// `ν ↦ −(Γ(ċ, ν) + A*_ċ ν − S_ċ ν)`.
    pub fn dual(&self) -> DMatrix<f64> {
        -(&self.gamma + &self.a_star - &self.s)
    }

    /// `ν ↦ −(Γ(ċ, ν) + A*_ċ ν)`: vertical parts of `ν` stay parallel.
    pub fn vertical_parallel(&self) -> DMatrix<f64> {
        -(&self.gamma + &self.a_star)
    }
}

pub(crate) fn transport_ops(fm: &FoliatedModel, p: &ChartPoint, velocity: &DVector<f64>) -> Result<TransportOps> {
    let jet = fm.jet(p)?;
    Ok(TransportOps {
        gamma: jet.gamma.contract_first(velocity),
        a_star: jet.a_star_operator(velocity),
        s: jet.s_operator(velocity),
        pv: jet.proj.pv,
        g: jet.proj.g,
    })
}

fn same_point(a: &ChartPoint, b: &ChartPoint) -> Result<()> {
    if a.chart != b.chart || (&a.coords - &b.coords).amax() > 1e-12 {
        return Err(Error::Argument("tensor arguments are based at different points".into()));
    }
    Ok(())
}

/// `A_X Y` for horizontal `X, Y`; vertical.
pub fn a_tensor(fm: &FoliatedModel, x: &TangentVector, y: &TangentVector) -> Result<TangentVector> {
    same_point(&x.base, &y.base)?;
    let jet = fm.jet(&x.base)?;
    let xh = fm.require_horizontal(&jet.proj, &x.components, "X")?;
    let yh = fm.require_horizontal(&jet.proj, &y.components, "Y")?;
    Ok(TangentVector::new(x.base.clone(), jet.a_operator(&xh) * yh))
}

/// `A*_X ξ` for horizontal `X` and vertical `ξ`: the horizontal vector with
/// `⟨A*_X ξ, Y⟩ = ⟨ξ, A_X Y⟩` for every horizontal `Y`.
pub fn a_star(fm: &FoliatedModel, x: &TangentVector, xi: &TangentVector) -> Result<TangentVector> {
    same_point(&x.base, &xi.base)?;
    let jet = fm.jet(&x.base)?;
    let xh = fm.require_horizontal(&jet.proj, &x.components, "X")?;
    let xv = fm.require_vertical(&jet.proj, &xi.components, "ξ")?;
    Ok(TangentVector::new(
        x.base.clone(),
        jet.a_star_adjoint_operator(&xh)? * xv,
    ))
}

/// `A*_X ξ` from the vertical extension of `ξ`, `−(∇_X Pv ξ̃)^h`.
pub fn a_star_vertical_extension(fm: &FoliatedModel, x: &TangentVector, xi: &TangentVector) -> Result<TangentVector> {
    same_point(&x.base, &xi.base)?;
    let jet = fm.jet(&x.base)?;
    let xh = fm.require_horizontal(&jet.proj, &x.components, "X")?;
    let xv = fm.require_vertical(&jet.proj, &xi.components, "ξ")?;
    Ok(TangentVector::new(x.base.clone(), jet.a_star_operator(&xh) * xv))
}

/// `S_X ξ` for horizontal `X` and vertical `ξ`; vertical.
pub fn s_tensor(fm: &FoliatedModel, x: &TangentVector, xi: &TangentVector) -> Result<TangentVector> {
    same_point(&x.base, &xi.base)?;
    let jet = fm.jet(&x.base)?;
    let xh = fm.require_horizontal(&jet.proj, &x.components, "X")?;
    let xv = fm.require_vertical(&jet.proj, &xi.components, "ξ")?;
    Ok(TangentVector::new(x.base.clone(), jet.s_operator(&xh) * xv))
}

/// `A_X Y` with `Y` extended by parallel transport along the geodesic through
/// `X` and then projected horizontally.
pub fn a_tensor_parallel_extension(
    fm: &FoliatedModel,
    x: &TangentVector,
    y: &TangentVector,
) -> Result<TangentVector> {
    same_point(&x.base, &y.base)?;
    let p = &x.base;
    let proj = fm.projectors(p)?;
    let xh = fm.require_horizontal(&proj, &x.components, "X")?;
    let yh = fm.require_horizontal(&proj, &y.components, "Y")?;
    let n = fm.dimension();
    let scale = xh.amax();
    if scale == 0.0 {
        return Ok(TangentVector::new(p.clone(), DVector::zeros(n)));
    }
    let dir = &xh / scale;
    let delta = fm.metric.usable_step(p, &dir, 10.0 * fm.metric.fd_step)?;
    let extended = |s: f64| -> Result<Vec<f64>> {
        let (q, w) = parallel_along_geodesic(fm, p, &dir, &yh, s)?;
        Ok((fm.projectors(&q)?.ph * w).as_slice().to_vec())
    };
    let d = DVector::from_vec(central_difference4(extended, delta)?) * scale;
    let gamma = fm.metric.christoffels(p)?;
    let cov = d + gamma.contract(&xh, &yh);
    Ok(TangentVector::new(p.clone(), &proj.pv * cov))
}

/// Point `γ(s)` of the geodesic with `γ'(0) = dir` and the parallel transport
/// of `y` to it, by RK4 in the chart of `p`.
fn parallel_along_geodesic(
    fm: &FoliatedModel,
    p: &ChartPoint,
    dir: &DVector<f64>,
    y: &DVector<f64>,
    s: f64,
) -> Result<(ChartPoint, DVector<f64>)> {
    const SUBSTEPS: usize = 8;
    let h = s / SUBSTEPS as f64;
    let rhs = |x: &DVector<f64>, w: &DVector<f64>, v: &DVector<f64>| -> Result<(DVector<f64>, DVector<f64>)> {
        let q = ChartPoint { chart: p.chart, coords: x.clone() };
        let gam = fm.metric.christoffels(&q)?;
        Ok((-gam.contract(w, w), -gam.contract(w, v)))
    };
    let (mut x, mut w, mut v) = (p.coords.clone(), dir.clone(), y.clone());
    for _ in 0..SUBSTEPS {
        let (a1, b1) = rhs(&x, &w, &v)?;
        let (x2, w2, v2) = (&x + &w * (0.5 * h), &w + &a1 * (0.5 * h), &v + &b1 * (0.5 * h));
        let (a2, b2) = rhs(&x2, &w2, &v2)?;
        let (x3, w3, v3) = (&x + &w2 * (0.5 * h), &w + &a2 * (0.5 * h), &v + &b2 * (0.5 * h));
        let (a3, b3) = rhs(&x3, &w3, &v3)?;
        let (x4, w4, v4) = (&x + &w3 * h, &w + &a3 * h, &v + &b3 * h);
        let (a4, b4) = rhs(&x4, &w4, &v4)?;
        x += (&w + &w2 * 2.0 + &w3 * 2.0 + &w4) * (h / 6.0);
        w += (a1 + a2 * 2.0 + a3 * 2.0 + a4) * (h / 6.0);
        v += (b1 + b2 * 2.0 + b3 * 2.0 + b4) * (h / 6.0);
    }
    Ok((ChartPoint { chart: p.chart, coords: x }, v))
}
