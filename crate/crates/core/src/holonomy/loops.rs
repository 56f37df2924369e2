//! Closed horizontal loops based at a point.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DVector;
use rand::Rng;

use super::path::{horizontal_geodesic, random_path_for_item, HorizontalPath, PathSegment, SegmentOrigin, DEFAULT_STEPS_PER_UNIT};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::{ChartPoint, PathSample, TangentVector};
use crate::models::sphere::{self, qconj, qexp, qmul, qnorm, qscale, Quat, QI};
use crate::sampling::item_rng;

/// Loops whose endpoints are farther apart than this are discarded.
pub const CLOSURE_TOLERANCE: f64 = 1e-6;

/// A source of closed horizontal loops at a point.
pub trait LoopFamily: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    /// Loop number `index` of a run seeded with `seed`, or `None` when the
    /// attempt did not close.
    fn closed_loop(&self, fm: &FoliatedModel, p: &ChartPoint, index: u64, seed: u64) -> Result<Option<HorizontalPath>>;
}

fn accept(fm: &FoliatedModel, path: HorizontalPath) -> Option<HorizontalPath> {
    let path = path.with_closure(fm, CLOSURE_TOLERANCE);
    path.closed.then_some(path)
}

/// Horizontal lifts of latitude circles of the Hopf fibration on the `S³`
/// factor `factor` of the atlas, closed by bisecting the fiber offset of the
/// lift.
///
/// The lift through `x₀` of the circle of latitude `κ` around the axis
/// `x̄₀ n x₀`, `n = κ i + √(1 − κ²)(cos β j + sin β k)`, is
/// `y(t) = e^{−iκt} x₀ e^{t x̄₀ n x₀}`. After `N` turns (`t = Nπ`) it ends on
/// the fiber of `x₀`, displaced by the angle `Nπ(1 − κ)`.
#[derive(Clone, Copy, Debug)]
pub struct HopfLatitudeLoops {
    pub factor: usize,
}

/// Turn counts cycled through by loop index.
const TURNS: [u32; 5] = [2, 3, 4, 5, 6];

fn wrap_angle(a: f64) -> f64 {
    let mut y = (a + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y += 2.0 * PI;
    }
    y
}

struct LatitudeLift {
    x0: Quat,
    n: Quat,
    w: Quat,
    kappa: f64,
}

impl LatitudeLift {
    fn new(x0: Quat, kappa: f64, beta: f64) -> Self {
        let s = (1.0 - kappa * kappa).max(0.0).sqrt();
        let n = [0.0, kappa, s * beta.cos(), s * beta.sin()];
        let w = qmul(&qmul(&qconj(&x0), &n), &x0);
        LatitudeLift { x0, n, w, kappa }
    }

    fn point(&self, t: f64) -> Quat {
        let a = qexp(&QI, -self.kappa * t);
        let w = qscale(&self.w, 1.0 / qnorm(&self.w));
        qmul(&qmul(&a, &self.x0), &qexp(&w, t))
    }

    /// `ẏ = −iκ y + y w`.
    fn velocity(&self, y: &Quat) -> Quat {
        let a = qscale(&qmul(&QI, y), -self.kappa);
        let b = qmul(y, &self.w);
        [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
    }

    /// Fiber angle of `y(t)` relative to `x₀`.
    fn fiber_offset(&self, t: f64) -> f64 {
        let r = qmul(&self.point(t), &qconj(&self.x0));
        wrap_angle(r[1].atan2(r[0]))
    }
}

/// Roots of the fiber offset after `turns` turns, by a coarse scan in `κ`
/// followed by bisection.
fn shoot(x0: Quat, beta: f64, turns: u32) -> Vec<f64> {
    let t = turns as f64 * PI;
    let offset = |k: f64| LatitudeLift::new(x0, k, beta).fiber_offset(t);
    const SCAN: usize = 96;
    let lo = -0.98;
    let hi = 0.98;
    let mut roots = Vec::new();
    let mut prev_k = lo;
    let mut prev_f = offset(lo);
    for i in 1..=SCAN {
        let k = lo + (hi - lo) * i as f64 / SCAN as f64;
        let f = offset(k);
        if prev_f.signum() != f.signum() && prev_f.abs() < 0.5 * PI && f.abs() < 0.5 * PI {
            let (mut a, mut b, mut fa) = (prev_k, k, prev_f);
            while b - a > 1e-13 {
                let m = 0.5 * (a + b);
                let fm = offset(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_k = k;
        prev_f = f;
    }
    roots
}

impl HopfLatitudeLoops {
    fn build(&self, fm: &FoliatedModel, p: &ChartPoint, lift: &LatitudeLift, turns: u32) -> Result<HorizontalPath> {
        let atlas = &fm.metric.atlas;
        let (chart, u) = atlas.factor_coords(p, self.factor);
        let total = turns as f64 * PI;
        let speed = (1.0 - lift.kappa * lift.kappa).sqrt();
        let mut steps = ((DEFAULT_STEPS_PER_UNIT * total * speed).ceil() as usize).max(64);
        steps += steps % 2;
        let h = total / steps as f64;
        let o = atlas.offset(self.factor);
        let n = fm.dimension();
        let mut samples = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let t = i as f64 * h;
            let y = lift.point(t);
            let dy = lift.velocity(&y);
            let (c, uy, du) = if i == 0 {
                let du = sphere::chart_velocity(chart, &y, &dy);
                (chart, [u[0], u[1], u[2]], du)
            } else {
                sphere::chart_state(&y, &dy)
            };
            let point = atlas.with_factor(p, self.factor, c, &uy);
            let mut v = DVector::zeros(n);
            v.as_mut_slice()[o..o + 3].copy_from_slice(&du);
            samples.push(PathSample { t, point, velocity: v });
        }
        let seg = PathSegment::new(samples, h, SegmentOrigin::Curve)?;
        HorizontalPath::from_segments(
            format!("hopf-latitude:N={turns},kappa={:.12},n=[{:.6},{:.6},{:.6}]", lift.kappa, lift.n[1], lift.n[2], lift.n[3]),
            vec![seg],
        )
    }
}

impl LoopFamily for HopfLatitudeLoops {
    fn name(&self) -> &'static str {
        "hopf_latitude"
    }

    fn closed_loop(&self, fm: &FoliatedModel, p: &ChartPoint, index: u64, seed: u64) -> Result<Option<HorizontalPath>> {
        let mut rng = item_rng(seed, index);
        let turns = TURNS[(index % TURNS.len() as u64) as usize];
        let beta = 2.0 * PI * rng.random::<f64>();
        let (chart, u) = fm.metric.atlas.factor_coords(p, self.factor);
        let x0 = sphere::to_ambient(chart, &u);
        let roots = shoot(x0, beta, turns);
        if roots.is_empty() {
            return Ok(None);
        }
        let kappa = roots[rng.random_range(0..roots.len())];
        let lift = LatitudeLift::new(x0, kappa, beta);
        Ok(accept(fm, self.build(fm, p, &lift, turns)?))
    }
}

/// Rectangles along pairs of horizontal coordinate axes of a flat torus, or
/// out-and-back segments when the horizontal space is a line.
#[derive(Clone, Copy, Debug)]
pub struct FlatRectangles;

impl LoopFamily for FlatRectangles {
    fn name(&self) -> &'static str {
        "flat_rectangles"
    }

    fn closed_loop(&self, fm: &FoliatedModel, p: &ChartPoint, index: u64, seed: u64) -> Result<Option<HorizontalPath>> {
        let mut rng = item_rng(seed, index);
        let n = fm.dimension();
        let k = fm.leaf_dim;
        if n == k {
            return Ok(None);
        }
        let axis = |i: usize| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 });
        let a = k + rng.random_range(0..n - k);
        let b = if n - k >= 2 {
            let mut b = k + rng.random_range(0..n - k - 1);
            if b >= a {
                b += 1;
            }
            b
        } else {
            a
        };
        let la = 0.2 + 0.6 * rng.random::<f64>();
        let lb = 0.2 + 0.6 * rng.random::<f64>();
        let legs: Vec<(DVector<f64>, f64)> = if a == b {
            vec![(axis(a), la), (-axis(a), la)]
        } else {
            vec![(axis(a), la), (axis(b), lb), (-axis(a), la), (-axis(b), lb)]
        };
        let mut path: Option<HorizontalPath> = None;
        let mut here = p.clone();
        for (dir, len) in legs {
            let x = TangentVector::new(here.clone(), dir);
            let leg = horizontal_geodesic(fm, &x, len, 32)?;
            here = leg.end().point.clone();
            path = Some(match path {
                None => leg,
                Some(prev) => prev.concat(fm, &leg)?,
            });
        }
        Ok(path.and_then(|p| accept(fm, p)))
    }
}

/// A random broken geodesic followed by its reverse; always closed, and its
/// transformation is the identity.
#[derive(Clone, Copy, Debug)]
pub struct RetraceLoops;

impl LoopFamily for RetraceLoops {
    fn name(&self) -> &'static str {
        "retrace"
    }

    fn closed_loop(&self, fm: &FoliatedModel, p: &ChartPoint, index: u64, seed: u64) -> Result<Option<HorizontalPath>> {
        let out = random_path_for_item(fm, p, 2, 0.5, 64, seed, index)?;
        let back = out.reversed();
        match out.concat(fm, &back) {
            Ok(path) => Ok(accept(fm, path)),
            Err(Error::Groupoid { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Latitudes `κ` whose lifts from `x₀` close after `turns` turns.
pub fn latitude_roots(x0: &Quat, beta: f64, turns: u32) -> Vec<f64> {
    shoot(*x0, beta, turns)
}

/// The lift `y(t)` of the latitude circle `(κ, β)` through `x₀`.
pub fn latitude_lift_point(x0: &Quat, kappa: f64, beta: f64, t: f64) -> Quat {
    LatitudeLift::new(*x0, kappa, beta).point(t)
}
