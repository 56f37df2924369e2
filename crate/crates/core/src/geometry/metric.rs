use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::{Atlas, ChartPoint};
use crate::error::{Error, Result};

pub type MetricFn = Arc<dyn Fn(&ChartPoint) -> DMatrix<f64> + Send + Sync>;
pub type ChristoffelFn = Arc<dyn Fn(&ChartPoint) -> Christoffels + Send + Sync>;

/// Default coordinate step of every finite-difference stencil.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Christoffel symbols `Γ^k_{ij}` at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffels {
    n: usize,
    data: Vec<f64>,
}

impl Christoffels {
    pub fn zeros(n: usize) -> Self {
        Christoffels {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n * n);
        Christoffels { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `Γ^k(v, w) = Γ^k_{ij} v^i w^j`.
    pub fn contract(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |k, _| {
            let mut s = 0.0;
            for i in 0..n {
                if v[i] == 0.0 {
                    continue;
                }
                let mut t = 0.0;
                for j in 0..n {
                    t += self.get(k, i, j) * w[j];
                }
                s += v[i] * t;
            }
            s
        })
    }

    /// Matrix of `w ↦ Γ(v, w)`.
    pub fn contract_first(&self, v: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |k, j| (0..n).map(|i| self.get(k, i, j) * v[i]).sum())
    }

    /// Largest `|Γ^k_{ij} − Γ^k_{ji}|`.
    pub fn max_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    m = m.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Christoffels) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    /// Levi-Civita symbols from the metric and its partial derivatives
    /// `dg[k] = ∂_k g`.
    pub fn from_metric_derivative(g: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Self {
        let n = g.nrows();
        let ginv = g
            .clone()
            .try_inverse()
            .expect("metric must be invertible");
        // first kind: Γ_{m i j} = ½ (∂_i g_{mj} + ∂_j g_{mi} − ∂_m g_{ij})
        let mut first = vec![0.0; n * n * n];
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    first[(m * n + i) * n + j] =
                        0.5 * (dg[i][(m, j)] + dg[j][(m, i)] - dg[m][(i, j)]);
                }
            }
        }
        let mut out = Christoffels::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut s = 0.0;
                    for m in 0..n {
                        s += ginv[(k, m)] * first[(m * n + i) * n + j];
                    }
                    out.set(k, i, j, s);
                }
            }
        }
        out
    }

    /// Partial derivatives of the metric implied by these symbols:
    /// `∂_k g_{ij} = g_{lj} Γ^l_{ki} + g_{il} Γ^l_{kj}`.
    pub fn metric_derivative(&self, g: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        let n = self.n;
        (0..n)
            .map(|k| {
                DMatrix::from_fn(n, n, |i, j| {
                    (0..n)
                        .map(|l| g[(l, j)] * self.get(l, k, i) + g[(i, l)] * self.get(l, k, j))
                        .sum()
                })
            })
            .collect()
    }
}

/// Fourth-order central difference `f'(0)` with step `s` of a vector-valued
/// function given as flat slices.
pub fn central_difference4<F>(f: F, s: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<Vec<f64>>,
{
    let p2 = f(2.0 * s)?;
    let p1 = f(s)?;
    let m1 = f(-s)?;
    let m2 = f(-2.0 * s)?;
    Ok((0..p1.len())
        .map(|i| (-p2[i] + 8.0 * p1[i] - 8.0 * m1[i] + m2[i]) / (12.0 * s))
        .collect())
}

/// A chart-based Riemannian manifold.
#[derive(Clone)]
pub struct MetricModel {
    pub name: String,
    pub atlas: Arc<Atlas>,
    metric_fn: MetricFn,
    christoffel_fn: Option<ChristoffelFn>,
    pub fd_step: f64,
}

impl fmt::Debug for MetricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricModel")
            .field("name", &self.name)
            .field("dimension", &self.dimension())
            .field("analytic_christoffels", &self.christoffel_fn.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

impl MetricModel {
    pub fn new(
        name: impl Into<String>,
        atlas: Arc<Atlas>,
        metric_fn: MetricFn,
        christoffel_fn: Option<ChristoffelFn>,
    ) -> Self {
        MetricModel {
            name: name.into(),
            atlas,
            metric_fn,
            christoffel_fn,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn dimension(&self) -> usize {
        self.atlas.dim()
    }

    pub fn has_analytic_christoffels(&self) -> bool {
        self.christoffel_fn.is_some()
    }

    /// Copy of the model that always uses finite-difference Christoffels.
    pub fn without_analytic_christoffels(&self) -> MetricModel {
        MetricModel {
            christoffel_fn: None,
            ..self.clone()
        }
    }

    pub fn with_fd_step(mut self, step: f64) -> MetricModel {
        self.fd_step = step;
        self
    }

    pub(crate) fn check_domain(&self, p: &ChartPoint) -> Result<()> {
        if self.atlas.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain {
                chart: p.chart,
                coords: p.coords.iter().copied().collect(),
            })
        }
    }

    /// Metric matrix `g_{ij}` at `p`.
    pub fn metric(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        self.check_domain(p)?;
        Ok((self.metric_fn)(p))
    }

    pub fn inner(&self, p: &ChartPoint, a: &DVector<f64>, b: &DVector<f64>) -> Result<f64> {
        let g = self.metric(p)?;
        Ok(a.dot(&(&g * b)))
    }

    /// Christoffel symbols at `p`: analytic when the model supplies them,
    /// otherwise fourth-order differences of the metric.
    pub fn christoffels(&self, p: &ChartPoint) -> Result<Christoffels> {
        match &self.christoffel_fn {
            Some(f) => {
                self.check_domain(p)?;
                Ok(f(p))
            }
            None => self.christoffels_fd(p, self.fd_step),
        }
    }

    /// Finite-difference Christoffel symbols with coordinate step `h`.
    pub fn christoffels_fd(&self, p: &ChartPoint, h: f64) -> Result<Christoffels> {
        let g = self.metric(p)?;
        let n = self.dimension();
        let mut dg = Vec::with_capacity(n);
        for k in 0..n {
            let e = DVector::from_fn(n, |i, _| if i == k { 1.0 } else { 0.0 });
            let s = self.usable_step(p, &e, h)?;
            let d = central_difference4(
                |t| Ok((self.metric_fn)(&p.displaced(&e, t)).as_slice().to_vec()),
                s,
            )?;
            dg.push(DMatrix::from_column_slice(n, n, &d));
        }
        Ok(Christoffels::from_metric_derivative(&g, &dg))
    }

    /// Largest step `≤ h` (halving at most four times) for which the
    /// five-point stencil along `dir` stays inside the chart.
    pub(crate) fn usable_step(&self, p: &ChartPoint, dir: &DVector<f64>, h: f64) -> Result<f64> {
        let mut s = h;
        for _ in 0..5 {
            if self.atlas.contains(&p.displaced(dir, 2.0 * s))
                && self.atlas.contains(&p.displaced(dir, -2.0 * s))
            {
                return Ok(s);
            }
            s *= 0.5;
        }
        Err(Error::Domain {
            chart: p.chart,
            coords: p.coords.iter().copied().collect(),
        })
    }

    /// Directional derivative `D_v Γ` by fourth-order differences of the
    /// Christoffel evaluator.
    pub fn christoffel_derivative(&self, p: &ChartPoint, v: &DVector<f64>) -> Result<Christoffels> {
        let n = self.dimension();
        let scale = v.amax();
        if scale == 0.0 {
            return Ok(Christoffels::zeros(n));
        }
        let dir = v / scale;
        let s = self.usable_step(p, &dir, self.fd_step)?;
        let d = central_difference4(
            |t| Ok(self.christoffels(&p.displaced(&dir, t))?.data),
            s,
        )?;
        Ok(Christoffels::from_vec(
            n,
            d.into_iter().map(|x| x * scale).collect(),
        ))
    }
}
