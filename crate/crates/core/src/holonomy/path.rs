//! Piecewise horizontal curves with dense samples.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::{integrate_geodesic, integrate_reparametrized, ChartPoint, PathSample, TangentVector};
use crate::sampling::derive_seed;

/// Samples per unit parameter length used when no resolution is given.
pub const DEFAULT_STEPS_PER_UNIT: f64 = 256.0;

/// Above this horizontality drift a geodesic is taken as evidence of a broken
/// model.
pub const GEODESIC_DRIFT_LIMIT: f64 = 1e-5;

/// Tolerance on endpoint gaps when joining paths.
pub const JOIN_TOLERANCE: f64 = 1e-7;

#[derive(Clone, Debug)]
pub enum SegmentOrigin {
    /// Geodesic with the given initial velocity, run for `duration`.
    Geodesic { initial: TangentVector, duration: f64 },
    /// Any other sampled curve.
    Curve,
}

/// A smooth piece of a path: an odd number of samples at uniform spacing.
#[derive(Clone, Debug)]
pub struct PathSegment {
    pub samples: Vec<PathSample>,
    pub step: f64,
    pub origin: SegmentOrigin,
}

impl PathSegment {
    pub fn new(samples: Vec<PathSample>, step: f64, origin: SegmentOrigin) -> Result<Self> {
        if samples.len() < 3 || samples.len().is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "a segment needs an odd number of at least 3 samples, got {}",
                samples.len()
            )));
        }
        Ok(PathSegment { samples, step, origin })
    }

    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("segment has samples")
    }

    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    fn shifted(&self, dt: f64) -> PathSegment {
        let mut s = self.clone();
        for x in &mut s.samples {
            x.t += dt;
        }
        s
    }
}

/// A piecewise smooth horizontal curve.
#[derive(Clone, Debug)]
pub struct HorizontalPath {
    pub label: String,
    pub segments: Vec<PathSegment>,
    pub closed: bool,
    pub closure_gap: f64,
}

impl HorizontalPath {
    pub fn from_segments(label: impl Into<String>, segments: Vec<PathSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Argument("a path needs at least one segment".into()));
        }
        Ok(HorizontalPath {
            label: label.into(),
            segments,
            closed: false,
            closure_gap: f64::NAN,
        })
    }

    /// The constant curve at `p`, realizing the identity.
    pub fn constant(fm: &FoliatedModel, p: &ChartPoint) -> Self {
        let n = fm.dimension();
        let samples = (0..3)
            .map(|i| PathSample {
                t: 0.5 * i as f64,
                point: p.clone(),
                velocity: DVector::zeros(n),
            })
            .collect();
        HorizontalPath {
            label: "constant".into(),
            segments: vec![PathSegment {
                samples,
                step: 0.5,
                origin: SegmentOrigin::Curve,
            }],
            closed: true,
            closure_gap: 0.0,
        }
    }

    pub fn start(&self) -> &PathSample {
        self.segments[0].start()
    }

    pub fn end(&self) -> &PathSample {
        self.segments.last().expect("path has segments").end()
    }

    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    pub fn num_samples(&self) -> usize {
        self.segments.iter().map(|s| s.samples.len()).sum()
    }

    pub fn samples(&self) -> impl Iterator<Item = &PathSample> {
        self.segments.iter().flat_map(|s| s.samples.iter())
    }

    /// Length by Simpson's rule on each segment.
    pub fn length(&self, fm: &FoliatedModel) -> Result<f64> {
        let mut total = 0.0;
        for seg in &self.segments {
            let speeds = seg
                .samples
                .iter()
                .map(|s| Ok(fm.metric.inner(&s.point, &s.velocity, &s.velocity)?.max(0.0).sqrt()))
                .collect::<Result<Vec<f64>>>()?;
            let m = speeds.len() - 1;
            let mut acc = speeds[0] + speeds[m];
            for (i, v) in speeds.iter().enumerate().take(m).skip(1) {
                acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            total += acc * seg.step / 3.0;
        }
        Ok(total)
    }

    /// Largest `‖Pv ċ‖ / ‖ċ‖` over the samples.
    pub fn horizontality_drift(&self, fm: &FoliatedModel) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in self.samples() {
            let pr = fm.projectors(&s.point)?;
            worst = worst.max(pr.verticality(&s.velocity));
        }
        Ok(worst)
    }

    /// Mark the path closed when its endpoints are within `tol`.
    pub fn with_closure(mut self, fm: &FoliatedModel, tol: f64) -> Self {
        self.closure_gap = fm.metric.atlas.coordinate_gap(&self.start().point, &self.end().point);
        self.closed = self.closure_gap <= tol;
        self
    }

    /// This path followed by `next`.
    pub fn concat(&self, fm: &FoliatedModel, next: &HorizontalPath) -> Result<HorizontalPath> {
        let gap = fm.metric.atlas.coordinate_gap(&self.end().point, &next.start().point);
        if !(gap <= JOIN_TOLERANCE) {
            return Err(Error::Groupoid { gap });
        }
        let dt = self.end().t - next.start().t;
        let mut segments = self.segments.clone();
        segments.extend(next.segments.iter().map(|s| s.shifted(dt)));
        Ok(HorizontalPath {
            label: format!("{}+{}", self.label, next.label),
            segments,
            closed: false,
            closure_gap: f64::NAN,
        }
        .with_closure(fm, JOIN_TOLERANCE))
    }

    /// The curve `t ↦ c(T − t)`.
    pub fn reversed(&self) -> HorizontalPath {
        let total = self.end().t;
        let t0 = self.start().t;
        let segments = self
            .segments
            .iter()
            .rev()
            .map(|seg| PathSegment {
                samples: seg
                    .samples
                    .iter()
                    .rev()
                    .map(|s| PathSample {
                        t: total + t0 - s.t,
                        point: s.point.clone(),
                        velocity: -&s.velocity,
                    })
                    .collect(),
                step: seg.step,
                origin: SegmentOrigin::Curve,
            })
            .collect();
        HorizontalPath {
            label: format!("reverse({})", self.label),
            segments,
            closed: self.closed,
            closure_gap: self.closure_gap,
        }
    }
}

fn even_steps(steps: usize) -> usize {
    let s = steps.max(16);
    s + s % 2
}

/// Steps for a geodesic of parameter length `len` at the default resolution.
pub fn default_steps(len: f64) -> usize {
    even_steps((DEFAULT_STEPS_PER_UNIT * len.abs()).ceil() as usize)
}

fn geodesic_segment(fm: &FoliatedModel, x: &TangentVector, total: f64, steps: usize) -> Result<PathSegment> {
    let steps = even_steps(steps);
    let g = integrate_geodesic(&fm.metric, x, total, steps)?;
    PathSegment::new(
        g.samples,
        g.step,
        SegmentOrigin::Geodesic {
            initial: x.clone(),
            duration: total,
        },
    )
}

fn check_drift(fm: &FoliatedModel, path: &HorizontalPath) -> Result<()> {
    let drift = path.horizontality_drift(fm)?;
    if drift > GEODESIC_DRIFT_LIMIT {
        return Err(Error::ModelConsistency(format!(
            "horizontal geodesic lost horizontality on {} (drift {drift:e})",
            fm.name
        )));
    }
    Ok(())
}

/// The geodesic with horizontal initial velocity `x` on `[0, total]`.
pub fn horizontal_geodesic(fm: &FoliatedModel, x: &TangentVector, total: f64, steps: usize) -> Result<HorizontalPath> {
    let pr = fm.projectors(&x.base)?;
    let xh = fm.require_horizontal(&pr, &x.components, "initial velocity")?;
    let x = TangentVector::new(x.base.clone(), xh);
    let path = HorizontalPath::from_segments("geodesic", vec![geodesic_segment(fm, &x, total, steps)?])?;
    check_drift(fm, &path)?;
    Ok(path)
}

/// Broken horizontal geodesic from `p` with `num_segments` unit-speed pieces
/// of parameter length `seg_len` in uniformly random horizontal directions.
pub fn random_horizontal_path(
    fm: &FoliatedModel,
    p: &ChartPoint,
    num_segments: usize,
    seg_len: f64,
    seed: u64,
) -> Result<HorizontalPath> {
    random_horizontal_path_with(fm, p, num_segments, seg_len, seed, default_steps(seg_len))
}

/// As [`random_horizontal_path`] with an explicit number of steps per piece.
pub fn random_horizontal_path_with(
    fm: &FoliatedModel,
    p: &ChartPoint,
    num_segments: usize,
    seg_len: f64,
    seed: u64,
    steps_per_segment: usize,
) -> Result<HorizontalPath> {
    if num_segments == 0 {
        return Err(Error::Argument("num_segments must be at least 1".into()));
    }
    let mut rng = crate::sampling::item_rng(seed, 0);
    let mut segments: Vec<PathSegment> = Vec::with_capacity(num_segments);
    let mut here = p.clone();
    let mut t0 = 0.0;
    for _ in 0..num_segments {
        let x = fm.random_horizontal(&here, &mut rng)?;
        let seg = geodesic_segment(fm, &x, seg_len, steps_per_segment)?.shifted(t0);
        t0 = seg.end().t;
        here = seg.end().point.clone();
        segments.push(seg);
    }
    let path = HorizontalPath::from_segments(format!("random:{seed:016x}"), segments)?;
    check_drift(fm, &path)?;
    Ok(path)
}

/// Random path seeded per work item.
pub fn random_path_for_item(
    fm: &FoliatedModel,
    p: &ChartPoint,
    num_segments: usize,
    seg_len: f64,
    steps_per_segment: usize,
    seed: u64,
    index: u64,
) -> Result<HorizontalPath> {
    random_horizontal_path_with(fm, p, num_segments, seg_len, derive_seed(seed, index), steps_per_segment)
}

/// The same broken geodesic traced with speed `1 + amplitude·sin(2πs/T)` on
/// every piece. Only geodesic pieces can be re-traced.
pub fn reparametrized(fm: &FoliatedModel, path: &HorizontalPath, amplitude: f64) -> Result<HorizontalPath> {
    if !(amplitude.abs() < 1.0) {
        return Err(Error::Argument(format!("|amplitude| = {} must be < 1", amplitude.abs())));
    }
    let mut segments = Vec::with_capacity(path.segments.len());
    let mut t0 = path.start().t;
    for seg in &path.segments {
        let SegmentOrigin::Geodesic { initial, duration } = &seg.origin else {
            return Err(Error::Argument("only geodesic pieces can be reparametrized".into()));
        };
        let d = *duration;
        let rate = move |s: f64| 1.0 + amplitude * (2.0 * std::f64::consts::PI * s / d).sin();
        let steps = seg.samples.len() - 1;
        let g = integrate_reparametrized(&fm.metric, initial, d, steps, &rate)?;
        let s = PathSegment::new(g.samples, g.step, SegmentOrigin::Curve)?.shifted(t0);
        t0 = s.end().t;
        segments.push(s);
    }
    HorizontalPath::from_segments(format!("reparam({})", path.label), segments)
}
