//! Points, tangent vectors and product atlases.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::RngCore;

/// Depth below which a point is considered to have left the core of its
/// chart. Depth is 1 at the chart centre and 0 on its boundary.
pub const CORE_DEPTH: f64 = 0.1;

/// A point expressed in one chart of an atlas.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub chart: usize,
    pub coords: DVector<f64>,
}

impl ChartPoint {
    pub fn new(chart: usize, coords: impl Into<Vec<f64>>) -> Self {
        let coords: Vec<f64> = coords.into();
        ChartPoint {
            chart,
            coords: DVector::from_vec(coords),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// The same chart, coordinates shifted by `s * dir`.
    pub fn displaced(&self, dir: &DVector<f64>, s: f64) -> ChartPoint {
        ChartPoint {
            chart: self.chart,
            coords: &self.coords + dir * s,
        }
    }
}

/// Components of a tangent vector in the coordinate frame of its base chart.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub base: ChartPoint,
    pub components: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: ChartPoint, components: DVector<f64>) -> Self {
        TangentVector { base, components }
    }

    pub fn from_slice(base: &ChartPoint, components: &[f64]) -> Self {
        TangentVector {
            base: base.clone(),
            components: DVector::from_column_slice(components),
        }
    }
}

/// One factor of a product atlas: a manifold covered by finitely many charts
/// whose domains are boxes or balls.
pub trait ChartFactor: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn num_charts(&self) -> usize;

    /// 1 at the chart centre, 0 on the boundary, negative outside.
    fn depth(&self, chart: usize, x: &[f64]) -> f64;

    /// Re-express `x` from chart `from` in chart `to`. Periodic factors pick
    /// the representative nearest `near` when given. Returns the new
    /// coordinates and the Jacobian `d(new)/d(old)`, or `None` when the point
    /// is not in the target domain.
    fn transition(
        &self,
        from: usize,
        x: &[f64],
        to: usize,
        near: Option<&[f64]>,
    ) -> Option<(Vec<f64>, DMatrix<f64>)>;

    /// The deepest available representation of the point.
    fn recenter(&self, chart: usize, x: &[f64]) -> (usize, Vec<f64>, DMatrix<f64>);

    /// A random point, uniform for the factor's natural measure.
    fn sample(&self, rng: &mut dyn RngCore) -> (usize, Vec<f64>);
}

/// Flat periodic box `[lo, lo + period)^dim` with a single chart whose domain
/// overhangs the fundamental cell by `margin` on every side.
#[derive(Clone, Debug)]
pub struct PeriodicBox {
    pub dim: usize,
    pub lo: f64,
    pub period: f64,
    pub margin: f64,
}

impl PeriodicBox {
    fn half_width(&self) -> f64 {
        0.5 * self.period + self.margin
    }

    fn wrap(&self, x: f64) -> f64 {
        let mut y = (x - self.lo).rem_euclid(self.period) + self.lo;
        if y >= self.lo + self.period {
            y -= self.period;
        }
        y
    }
}

impl ChartFactor for PeriodicBox {
    fn dim(&self) -> usize {
        self.dim
    }

    fn num_charts(&self) -> usize {
        1
    }

    fn depth(&self, _chart: usize, x: &[f64]) -> f64 {
        let a = self.lo - self.margin;
        let b = self.lo + self.period + self.margin;
        x.iter()
            .map(|&v| (v - a).min(b - v) / self.half_width())
            .fold(1.0, f64::min)
    }

    fn transition(
        &self,
        _from: usize,
        x: &[f64],
        _to: usize,
        near: Option<&[f64]>,
    ) -> Option<(Vec<f64>, DMatrix<f64>)> {
        let y: Vec<f64> = match near {
            Some(r) => x
                .iter()
                .zip(r)
                .map(|(&v, &rv)| v + ((rv - v) / self.period).round() * self.period)
                .collect(),
            None => x.to_vec(),
        };
        if self.depth(0, &y) <= 0.0 {
            return None;
        }
        Some((y, DMatrix::identity(self.dim, self.dim)))
    }

    fn recenter(&self, _chart: usize, x: &[f64]) -> (usize, Vec<f64>, DMatrix<f64>) {
        let y = x.iter().map(|&v| self.wrap(v)).collect();
        (0, y, DMatrix::identity(self.dim, self.dim))
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (usize, Vec<f64>) {
        use rand::Rng;
        let y = (0..self.dim)
            .map(|_| self.lo + self.period * rng.random::<f64>())
            .collect();
        (0, y)
    }
}

/// Product of chart factors. Chart ids are mixed-radix encodings of the
/// per-factor chart ids (first factor least significant); coordinates are
/// concatenated.
#[derive(Clone, Debug)]
pub struct Atlas {
    factors: Vec<Arc<dyn ChartFactor>>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Atlas {
    pub fn new(factors: Vec<Arc<dyn ChartFactor>>) -> Self {
        let mut offsets = Vec::with_capacity(factors.len());
        let mut dim = 0;
        for f in &factors {
            offsets.push(dim);
            dim += f.dim();
        }
        Atlas {
            factors,
            offsets,
            dim,
        }
    }

    pub fn single(factor: Arc<dyn ChartFactor>) -> Self {
        Atlas::new(vec![factor])
    }

    pub fn product(a: &Atlas, b: &Atlas) -> Self {
        let mut f = a.factors.clone();
        f.extend(b.factors.iter().cloned());
        Atlas::new(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Arc<dyn ChartFactor>] {
        &self.factors
    }

    /// Coordinate offset of factor `i`.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn num_charts(&self) -> usize {
        self.factors.iter().map(|f| f.num_charts()).product()
    }

    /// Per-factor chart ids of a product chart id.
    pub fn decode(&self, chart: usize) -> Vec<usize> {
        let mut rest = chart;
        self.factors
            .iter()
            .map(|f| {
                let c = rest % f.num_charts();
                rest /= f.num_charts();
                c
            })
            .collect()
    }

    pub fn encode(&self, ids: &[usize]) -> usize {
        let mut chart = 0;
        let mut radix = 1;
        for (f, &c) in self.factors.iter().zip(ids) {
            chart += c * radix;
            radix *= f.num_charts();
        }
        chart
    }

    fn slice<'a>(&self, i: usize, x: &'a [f64]) -> &'a [f64] {
        &x[self.offsets[i]..self.offsets[i] + self.factors[i].dim()]
    }

    pub fn depth(&self, p: &ChartPoint) -> f64 {
        if p.chart >= self.num_charts() || p.coords.len() != self.dim {
            return f64::NEG_INFINITY;
        }
        let ids = self.decode(p.chart);
        let x = p.coords.as_slice();
        self.factors
            .iter()
            .enumerate()
            .map(|(i, f)| f.depth(ids[i], self.slice(i, x)))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: &ChartPoint) -> bool {
        self.depth(p) > 0.0
    }

    pub fn in_core(&self, p: &ChartPoint) -> bool {
        self.depth(p) >= CORE_DEPTH
    }

    /// Re-express `p` in chart `chart`, choosing periodic representatives
    /// nearest `near` when given. The Jacobian maps vector components from
    /// the old chart to the new one.
    pub fn express_in(
        &self,
        p: &ChartPoint,
        chart: usize,
        near: Option<&DVector<f64>>,
    ) -> Option<(ChartPoint, DMatrix<f64>)> {
        let from = self.decode(p.chart);
        let to = self.decode(chart);
        let x = p.coords.as_slice();
        let mut coords = vec![0.0; self.dim];
        let mut jac = DMatrix::zeros(self.dim, self.dim);
        for (i, f) in self.factors.iter().enumerate() {
            let near_i = near.map(|r| self.slice(i, r.as_slice()));
            let (y, j) = f.transition(from[i], self.slice(i, x), to[i], near_i)?;
            let o = self.offsets[i];
            let d = f.dim();
            coords[o..o + d].copy_from_slice(&y);
            jac.view_mut((o, o), (d, d)).copy_from(&j);
        }
        Some((ChartPoint::new(chart, coords), jac))
    }

    /// Deepest representation of `p`, with the component Jacobian.
    pub fn recenter(&self, p: &ChartPoint) -> (ChartPoint, DMatrix<f64>) {
        let from = self.decode(p.chart);
        let x = p.coords.as_slice();
        let mut ids = vec![0; self.factors.len()];
        let mut coords = vec![0.0; self.dim];
        let mut jac = DMatrix::zeros(self.dim, self.dim);
        for (i, f) in self.factors.iter().enumerate() {
            let (c, y, j) = f.recenter(from[i], self.slice(i, x));
            ids[i] = c;
            let o = self.offsets[i];
            let d = f.dim();
            coords[o..o + d].copy_from_slice(&y);
            jac.view_mut((o, o), (d, d)).copy_from(&j);
        }
        (ChartPoint::new(self.encode(&ids), coords), jac)
    }

    pub fn sample_point(&self, rng: &mut dyn RngCore) -> ChartPoint {
        let mut ids = Vec::with_capacity(self.factors.len());
        let mut coords = Vec::with_capacity(self.dim);
        for f in &self.factors {
            let (c, y) = f.sample(rng);
            ids.push(c);
            coords.extend(y);
        }
        ChartPoint::new(self.encode(&ids), coords)
    }

    /// Coordinate distance between `p` and `q`, measured in the chart of `p`.
    /// Infinite when `q` cannot be expressed there.
    pub fn coordinate_gap(&self, p: &ChartPoint, q: &ChartPoint) -> f64 {
        match self.express_in(q, p.chart, Some(&p.coords)) {
            Some((q2, _)) => (&q2.coords - &p.coords).norm(),
            None => f64::INFINITY,
        }
    }

    /// Replace the coordinates of factor `i` in `p`.
    pub fn with_factor(&self, p: &ChartPoint, i: usize, chart: usize, x: &[f64]) -> ChartPoint {
        let mut ids = self.decode(p.chart);
        ids[i] = chart;
        let mut coords = p.coords.clone();
        let o = self.offsets[i];
        coords.as_mut_slice()[o..o + x.len()].copy_from_slice(x);
        ChartPoint {
            chart: self.encode(&ids),
            coords,
        }
    }

    /// Chart id and coordinates of factor `i` in `p`.
    pub fn factor_coords(&self, p: &ChartPoint, i: usize) -> (usize, Vec<f64>) {
        let ids = self.decode(p.chart);
        (ids[i], self.slice(i, p.coords.as_slice()).to_vec())
    }
}
