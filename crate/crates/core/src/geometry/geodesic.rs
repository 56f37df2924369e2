//! Geodesic integration with automatic chart switching.

use nalgebra::DVector;

use super::chart::{ChartPoint, TangentVector};
use super::metric::MetricModel;
use crate::error::{Error, Result};

/// One dense-output sample of a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSample {
    pub t: f64,
    pub point: ChartPoint,
    pub velocity: DVector<f64>,
}

impl PathSample {
    pub fn tangent(&self) -> TangentVector {
        TangentVector::new(self.point.clone(), self.velocity.clone())
    }
}

/// Geodesic sampled at uniform times.
#[derive(Clone, Debug)]
pub struct GeodesicSegment {
    pub samples: Vec<PathSample>,
    pub step: f64,
}

impl GeodesicSegment {
    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("segment has samples")
    }

    /// Largest `| ‖γ̇(t)‖ / ‖γ̇(0)‖ − 1 |` over the samples.
    pub fn speed_drift(&self, model: &MetricModel) -> Result<f64> {
        let speed = |s: &PathSample| -> Result<f64> {
            Ok(model.inner(&s.point, &s.velocity, &s.velocity)?.sqrt())
        };
        let v0 = speed(self.start())?;
        let mut worst: f64 = 0.0;
        for s in &self.samples {
            worst = worst.max((speed(s)? / v0 - 1.0).abs());
        }
        Ok(worst)
    }
}

fn integration_error(t: f64, reason: String, last: &ChartPoint) -> Error {
    Error::Integration {
        t,
        reason,
        chart: last.chart,
        coords: last.coords.iter().copied().collect(),
    }
}

/// Classical RK4 on `x' = r(s) w`, `w' = −r(s) Γ(w, w)`, which traces the
/// geodesic through `v0` reparametrized by `τ(s) = ∫ r`. Samples carry the
/// curve velocity `r(s) w`. The point moves to a deeper chart whenever it
/// leaves the core of the current one.
pub fn integrate_reparametrized(
    model: &MetricModel,
    v0: &TangentVector,
    total: f64,
    steps: usize,
    rate: &dyn Fn(f64) -> f64,
) -> Result<GeodesicSegment> {
    let h = total / steps as f64;
    let atlas = &model.atlas;
    let (mut p, jac) = if atlas.in_core(&v0.base) {
        (v0.base.clone(), None)
    } else {
        let (q, j) = atlas.recenter(&v0.base);
        (q, Some(j))
    };
    let mut w = match jac {
        Some(j) => j * &v0.components,
        None => v0.components.clone(),
    };
    model.check_domain(&p)?;
    let mut samples = Vec::with_capacity(steps + 1);
    samples.push(PathSample {
        t: 0.0,
        point: p.clone(),
        velocity: &w * rate(0.0),
    });
    let accel = |q: &ChartPoint, w: &DVector<f64>| -> Result<DVector<f64>> {
        Ok(-model.christoffels(q)?.contract(w, w))
    };
    for i in 0..steps {
        let s = i as f64 * h;
        let r0 = rate(s);
        let rm = rate(s + 0.5 * h);
        let r1 = rate(s + h);
        let step = || -> Result<(DVector<f64>, DVector<f64>)> {
            let k1x = &w * r0;
            let k1w = accel(&p, &w)? * r0;
            let w2 = &w + &k1w * (0.5 * h);
            let p2 = p.displaced(&k1x, 0.5 * h);
            let k2x = &w2 * rm;
            let k2w = accel(&p2, &w2)? * rm;
            let w3 = &w + &k2w * (0.5 * h);
            let p3 = p.displaced(&k2x, 0.5 * h);
            let k3x = &w3 * rm;
            let k3w = accel(&p3, &w3)? * rm;
            let w4 = &w + &k3w * h;
            let p4 = p.displaced(&k3x, h);
            let k4x = &w4 * r1;
            let k4w = accel(&p4, &w4)? * r1;
            let dx = (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
            let dw = (k1w + k2w * 2.0 + k3w * 2.0 + k4w) * (h / 6.0);
            Ok((dx, dw))
        };
        let (dx, dw) = step().map_err(|e| integration_error(s, e.to_string(), &p))?;
        let mut q = p.displaced(&dx, 1.0);
        let mut wn = &w + dw;
        if !atlas.contains(&q) {
            return Err(integration_error(
                s,
                "step left the chart domain".into(),
                &p,
            ));
        }
        if !atlas.in_core(&q) {
            let (q2, j) = atlas.recenter(&q);
            if !atlas.in_core(&q2) {
                return Err(integration_error(
                    s + h,
                    "no chart covers the next point".into(),
                    &p,
                ));
            }
            wn = j * wn;
            q = q2;
        }
        p = q;
        w = wn;
        samples.push(PathSample {
            t: s + h,
            point: p.clone(),
            velocity: &w * r1,
        });
    }
    Ok(GeodesicSegment { samples, step: h })
}

/// Geodesic with initial velocity `v0` on `[0, total]`, sampled at
/// `steps + 1` uniform times.
pub fn integrate_geodesic(
    model: &MetricModel,
    v0: &TangentVector,
    total: f64,
    steps: usize,
) -> Result<GeodesicSegment> {
    if steps < 16 {
        return Err(Error::Argument(format!("steps = {steps} < 16")));
    }
    if v0.components.amax() == 0.0 {
        return Err(Error::Argument("initial velocity is zero".into()));
    }
    integrate_reparametrized(model, v0, total, steps, &|_| 1.0)
}
