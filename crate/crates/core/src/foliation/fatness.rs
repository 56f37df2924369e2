//! The skew form `Ω_ξ(X, Y) = ⟨A_X Y, ξ⟩` on horizontal vectors, fat points
//! and kernel directions.

use nalgebra::{DMatrix, DVector, SVD};

use super::FoliatedModel;
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, TangentVector};
use crate::sampling::sphere_directions;

/// Largest smallest-singular-value of `Ω_ξ` still treated as a kernel.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct FatnessForm {
    pub base: ChartPoint,
    pub xi: TangentVector,
    /// Orthonormal horizontal frame the form is written in, one column per
    /// vector.
    pub frame: DMatrix<f64>,
    pub omega: DMatrix<f64>,
}

impl FatnessForm {
    pub fn max_asymmetry(&self) -> f64 {
        (&self.omega + self.omega.transpose()).amax()
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Vec<f64> {
        if self.omega.nrows() == 0 {
            return Vec::new();
        }
        let mut s: Vec<f64> = SVD::new(self.omega.clone(), false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn smallest_singular_value(&self) -> f64 {
        self.singular_values().last().copied().unwrap_or(0.0)
    }
}

/// `Ω_ξ` on the horizontal frame at `p`. `ξ` is normalized.
pub fn fatness_form(fm: &FoliatedModel, p: &ChartPoint, xi: &TangentVector) -> Result<FatnessForm> {
    let jet = fm.jet(p)?;
    let xv = fm.require_vertical(&jet.proj, &xi.components, "ξ")?;
    let norm = jet.proj.norm(&xv);
    if norm == 0.0 {
        return Err(Error::Argument("ξ is zero".into()));
    }
    let xv = xv / norm;
    let frame = fm.horizontal_orthonormal_frame(p)?;
    let m = frame.ncols();
    let gxi = &jet.proj.g * &xv;
    let mut omega = DMatrix::zeros(m, m);
    for i in 0..m {
        let a = jet.a_operator(&frame.column(i).into_owned()) * &frame;
        for j in 0..m {
            omega[(i, j)] = a.column(j).dot(&gxi);
        }
    }
    Ok(FatnessForm {
        base: p.clone(),
        xi: TangentVector::new(p.clone(), xv),
        frame,
        omega,
    })
}

/// Minimum over `num_xi_samples` deterministic unit vertical `ξ` of the
/// smallest singular value of `Ω_ξ`. Positive means numerically fat at `p`.
pub fn fat_point_margin(fm: &FoliatedModel, p: &ChartPoint, num_xi_samples: usize) -> Result<f64> {
    if num_xi_samples == 0 {
        return Err(Error::Argument("num_xi_samples must be at least 1".into()));
    }
    if fm.leaf_dim == 0 {
        return Ok(0.0);
    }
    let e = fm.vertical_orthonormal_frame(p)?;
    let mut worst = f64::INFINITY;
    for c in sphere_directions(fm.leaf_dim, num_xi_samples) {
        let xi = &e * DVector::from_vec(c);
        let form = fatness_form(fm, p, &TangentVector::new(p.clone(), xi))?;
        worst = worst.min(form.smallest_singular_value());
    }
    Ok(worst)
}

/// Unit horizontal `X` with `A*_X ξ = 0`, from the null space of `Ω_ξ`.
pub fn kernel_direction(fm: &FoliatedModel, p: &ChartPoint, xi: &TangentVector) -> Result<TangentVector> {
    let form = fatness_form(fm, p, xi)?;
    let m = form.omega.nrows();
    if m == 0 {
        return Err(Error::NoKernel { smallest: f64::NAN });
    }
    let svd = SVD::new(form.omega.clone(), false, true);
    let v_t = svd.v_t.expect("requested");
    let (idx, smallest) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty");
    if smallest > KERNEL_TOLERANCE {
        return Err(Error::NoKernel { smallest });
    }
    let a: DVector<f64> = v_t.row(idx).transpose();
    let x = &form.frame * (&a / a.norm());
    Ok(TangentVector::new(p.clone(), x))
}
