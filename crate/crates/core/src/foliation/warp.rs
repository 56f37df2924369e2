//! Vertical warping `g_φ(X + ξ, X + ξ) = g₀(X, X) + e^{2φ} g₀(ξ, ξ)` of a
//! foliation with totally geodesic leaves by a basic function `φ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::{FoliatedModel, SPLIT_TOLERANCE};
use crate::error::{Error, Result};
use crate::geometry::{ChartPoint, Christoffels, MetricModel};
use crate::sampling::item_rng;

pub type ScalarFn = Arc<dyn Fn(&ChartPoint) -> f64 + Send + Sync>;
pub type CovectorFn = Arc<dyn Fn(&ChartPoint) -> DVector<f64> + Send + Sync>;

const BASIC_CHECK_POINTS: u64 = 64;
const BASIC_CHECK_SEED: u64 = 0x62_6173_6963;

/// The unwarped model and the warping function with its differential.
#[derive(Clone)]
pub struct WarpData {
    pub base: FoliatedModel,
    pub phi: ScalarFn,
    pub dphi: CovectorFn,
}

impl fmt::Debug for WarpData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WarpData").field("base", &self.base.name).finish()
    }
}

/// `B = g₀ V M⁻¹ Vᵀ g₀` with `M = Vᵀ g₀ V`: `g₀` restricted to vertical parts.
fn vertical_block(g0: &DMatrix<f64>, v: &DMatrix<f64>) -> Option<(DMatrix<f64>, DMatrix<f64>)> {
    let gv = g0 * v;
    let minv = (v.transpose() * &gv).try_inverse()?;
    Some((&gv * &minv * gv.transpose(), minv))
}

/// Largest `|dφ(ξ)|` over a `g₀`-orthonormal vertical frame at sampled points.
fn basicness_defect(base: &FoliatedModel, dphi: &CovectorFn) -> Result<f64> {
    let mut rng = item_rng(BASIC_CHECK_SEED, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..BASIC_CHECK_POINTS {
        let p = base.sample_point(&mut rng);
        let e = base.vertical_orthonormal_frame(&p)?;
        let d = dphi(&p);
        for c in e.column_iter() {
            worst = worst.max(d.dot(&c).abs());
        }
    }
    Ok(worst)
}

/// Warp `fm` vertically by `e^{φ}`. The result keeps the vertical frame and
/// the horizontal distribution, and has analytic Christoffel symbols built
/// from those of `fm`, `∂V` and `dφ`.
pub fn warp_metric(fm: &FoliatedModel, phi: ScalarFn, dphi: CovectorFn) -> Result<FoliatedModel> {
    if !fm.totally_geodesic_claimed {
        return Err(Error::Validation(format!(
            "warping requires totally geodesic leaves; {} does not claim them",
            fm.name
        )));
    }
    let defect = basicness_defect(fm, &dphi)?;
    if defect > SPLIT_TOLERANCE {
        return Err(Error::Validation(format!(
            "warping function is not basic: |dφ(vertical)| = {defect:e}"
        )));
    }
    let constant = {
        let mut rng = item_rng(BASIC_CHECK_SEED, 1);
        (0..BASIC_CHECK_POINTS).all(|_| dphi(&fm.sample_point(&mut rng)).amax() == 0.0)
    };

    let frame = fm.frame_fn();
    let base_metric = fm.metric.clone();
    let metric_fn = {
        let (base_metric, frame, phi) = (base_metric.clone(), frame.clone(), phi.clone());
        Arc::new(move |p: &ChartPoint| -> DMatrix<f64> {
            let g0 = base_metric.metric(p).expect("point checked by caller");
            let f = phi(p);
            if f == 0.0 {
                return g0;
            }
            let (b, _) = vertical_block(&g0, &frame(p)).expect("vertical frame has full rank");
            g0 + b * (2.0 * f).exp_m1()
        })
    };

    let base_fm = fm.clone();
    let christoffel_fn = {
        let (phi, dphi) = (phi.clone(), dphi.clone());
        Arc::new(move |p: &ChartPoint| -> Christoffels {
            warped_christoffels(&base_fm, p, &phi, &dphi).expect("point checked by caller")
        })
    };

    let name = format!("{}_warped", fm.metric.name);
    let mut metric = MetricModel::new(name, fm.metric.atlas.clone(), metric_fn, Some(christoffel_fn));
    metric.fd_step = fm.metric.fd_step;
    let mut out = FoliatedModel::new(
        format!("{}_warped", fm.name),
        metric,
        frame,
        fm.frame_derivative_fn(),
        fm.leaf_dim,
        constant,
    );
    out.loop_family = fm.loop_family.clone();
    out.warp = Some(Arc::new(WarpData {
        base: fm.clone(),
        phi,
        dphi,
    }));
    Ok(out)
}

fn warped_christoffels(
    fm: &FoliatedModel,
    p: &ChartPoint,
    phi: &ScalarFn,
    dphi: &CovectorFn,
) -> Result<Christoffels> {
    let g0 = fm.metric.metric(p)?;
    let gam0 = fm.metric.christoffels(p)?;
    let f = phi(p);
    let df = dphi(p);
    if f == 0.0 && df.amax() == 0.0 {
        return Ok(gam0);
    }
    let dg0 = gam0.metric_derivative(&g0);
    let v = fm.vertical_frame(p)?;
    let dv = fm.vertical_frame_derivative(p)?;
    let (b, minv) = vertical_block(&g0, &v).ok_or(Error::Degenerate { chart: p.chart, ratio: 0.0 })?;
    let w = (2.0 * f).exp();
    let gv = &g0 * &v;
    let g = &g0 + &b * (w - 1.0);
    let dg: Vec<DMatrix<f64>> = dg0
        .iter()
        .zip(&dv)
        .enumerate()
        .map(|(i, (dgi, dvi))| {
            let dgv = dgi * &v + &g0 * dvi;
            let dm = dvi.transpose() * &gv + v.transpose() * dgi * &v + v.transpose() * &g0 * dvi;
            let db = &dgv * &minv * gv.transpose() - &gv * &minv * dm * &minv * gv.transpose()
                + &gv * &minv * dgv.transpose();
            dgi + &b * (2.0 * w * df[i]) + db * (w - 1.0)
        })
        .collect();
    Ok(Christoffels::from_metric_derivative(&g, &dg))
}
