//! Riemann tensor and unreduced sectional curvature.

use nalgebra::DVector;

use super::chart::{ChartPoint, TangentVector};
use super::metric::MetricModel;
use crate::error::{Error, Result};

/// `R(X,Y)Z` in coordinates at `p`.
///
/// `(R(X,Y)Z)^l = (D_XΓ)^l(Y,Z) − (D_YΓ)^l(X,Z) + Γ^l(X, Γ(Y,Z)) − Γ^l(Y, Γ(X,Z))`
/// with the directional derivatives of `Γ` taken by finite differences.
pub fn riemann_at(
    model: &MetricModel,
    p: &ChartPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    let gam = model.christoffels(p)?;
    let dx = model.christoffel_derivative(p, x)?;
    let dy = model.christoffel_derivative(p, y)?;
    let gyz = gam.contract(y, z);
    let gxz = gam.contract(x, z);
    Ok(dx.contract(y, z) - dy.contract(x, z) + gam.contract(x, &gyz) - gam.contract(y, &gxz))
}

fn same_base(vs: &[&TangentVector]) -> Result<()> {
    let b = &vs[0].base;
    for v in &vs[1..] {
        if v.base.chart != b.chart || (&v.base.coords - &b.coords).amax() > 1e-12 {
            return Err(Error::Argument(
                "tangent vectors are based at different points".into(),
            ));
        }
    }
    Ok(())
}

/// `R(X,Y)Z` for tangent vectors based at one point.
pub fn riemann(
    model: &MetricModel,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<TangentVector> {
    same_base(&[x, y, z])?;
    let r = riemann_at(model, &x.base, &x.components, &y.components, &z.components)?;
    Ok(TangentVector::new(x.base.clone(), r))
}

/// `⟨R(X,Y)Y, X⟩` at `p`, without dividing by the area of the parallelogram.
pub fn unreduced_sectional_at(
    model: &MetricModel,
    p: &ChartPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let r = riemann_at(model, p, x, y, y)?;
    model.inner(p, &r, x)
}

pub fn unreduced_sectional(model: &MetricModel, x: &TangentVector, y: &TangentVector) -> Result<f64> {
    same_base(&[x, y])?;
    unreduced_sectional_at(model, &x.base, &x.components, &y.components)
}

/// Sectional curvature of the plane spanned by `x, y`.
pub fn sectional_at(
    model: &MetricModel,
    p: &ChartPoint,
    x: &DVector<f64>,
    y: &DVector<f64>,
) -> Result<f64> {
    let g = model.metric(p)?;
    let xx = x.dot(&(&g * x));
    let yy = y.dot(&(&g * y));
    let xy = x.dot(&(&g * y));
    let area = xx * yy - xy * xy;
    if area <= 0.0 {
        return Err(Error::Argument("degenerate plane".into()));
    }
    Ok(unreduced_sectional_at(model, p, x, y)? / area)
}
