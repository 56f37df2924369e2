//! The unit sphere `S³ ⊂ ℍ` in two stereographic charts and the Hopf action
//! field `x ↦ i·x`.
//!
//! Chart 0 projects from `−1`, `u = x⃗ / (1 + x₀)`; chart 1 projects from
//! `+1`, `u = x⃗ / (1 − x₀)`. The transition is the inversion `u ↦ u/|u|²`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::RngCore;

use crate::geometry::{ChartFactor, Christoffels};
use crate::sampling::gaussian_vector;

pub type Quat = [f64; 4];

/// Chart domain radius in coordinate units.
pub const BALL_RADIUS: f64 = 1.5;

pub fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub fn qconj(a: &Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

pub fn qnorm(a: &Quat) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn qscale(a: &Quat, s: f64) -> Quat {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

/// `e^{t u}` for a unit pure-imaginary `u`.
pub fn qexp(u: &Quat, t: f64) -> Quat {
    let (s, c) = t.sin_cos();
    [c, s * u[1], s * u[2], s * u[3]]
}

pub const QI: Quat = [0.0, 1.0, 0.0, 0.0];
pub const QJ: Quat = [0.0, 0.0, 1.0, 0.0];
pub const QK: Quat = [0.0, 0.0, 0.0, 1.0];

/// `i·x`, the Hopf action field.
pub fn hopf_action(x: &Quat) -> Quat {
    [-x[1], x[0], -x[3], x[2]]
}

/// Hopf projection `x̄ i x` as a point of the unit 2-sphere.
pub fn hopf_projection(x: &Quat) -> [f64; 3] {
    [
        x[0] * x[0] + x[1] * x[1] - x[2] * x[2] - x[3] * x[3],
        2.0 * (x[1] * x[2] - x[0] * x[3]),
        2.0 * (x[0] * x[2] + x[1] * x[3]),
    ]
}

/// Third coordinate of the Hopf projection and its ambient gradient.
pub fn height(x: &Quat) -> (f64, Quat) {
    (
        2.0 * (x[0] * x[2] + x[1] * x[3]),
        [2.0 * x[2], 2.0 * x[3], 2.0 * x[0], 2.0 * x[1]],
    )
}

fn sign(chart: usize) -> f64 {
    if chart == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn to_ambient(chart: usize, u: &[f64]) -> Quat {
    let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let d = 1.0 + r2;
    [
        sign(chart) * (1.0 - r2) / d,
        2.0 * u[0] / d,
        2.0 * u[1] / d,
        2.0 * u[2] / d,
    ]
}

pub fn from_ambient(chart: usize, x: &Quat) -> [f64; 3] {
    let den = 1.0 + sign(chart) * x[0];
    [x[1] / den, x[2] / den, x[3] / den]
}

/// `∂x/∂u` (4 × 3).
pub fn ambient_jacobian(chart: usize, u: &[f64]) -> DMatrix<f64> {
    let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let d = 1.0 + r2;
    let mut j = DMatrix::zeros(4, 3);
    for i in 0..3 {
        j[(0, i)] = -sign(chart) * 4.0 * u[i] / (d * d);
        for a in 0..3 {
            let delta = if a == i { 2.0 / d } else { 0.0 };
            j[(a + 1, i)] = delta - 4.0 * u[a] * u[i] / (d * d);
        }
    }
    j
}

/// Chart components of the ambient tangent vector `dx` at `x`.
pub fn chart_velocity(chart: usize, x: &Quat, dx: &Quat) -> [f64; 3] {
    let s = sign(chart);
    let den = 1.0 + s * x[0];
    [
        dx[1] / den - s * x[1] * dx[0] / (den * den),
        dx[2] / den - s * x[2] * dx[0] / (den * den),
        dx[3] / den - s * x[3] * dx[0] / (den * den),
    ]
}

/// Conformal factor `4 / (1 + |u|²)²` of the round metric.
pub fn conformal_factor(u: &[f64]) -> f64 {
    let d = 1.0 + u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    4.0 / (d * d)
}

pub fn round_metric(u: &[f64]) -> Matrix3<f64> {
    Matrix3::identity() * conformal_factor(u)
}

/// Christoffel symbols of the round metric,
/// `Γᵏᵢⱼ = δₖᵢ σⱼ + δₖⱼ σᵢ − δᵢⱼ σₖ` with `σ = −2u / (1 + |u|²)`.
pub fn round_christoffels(u: &[f64]) -> Christoffels {
    let d = 1.0 + u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    let sigma = [-2.0 * u[0] / d, -2.0 * u[1] / d, -2.0 * u[2] / d];
    let mut c = Christoffels::zeros(3);
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                if k == i {
                    v += sigma[j];
                }
                if k == j {
                    v += sigma[i];
                }
                if i == j {
                    v -= sigma[k];
                }
                c.set(k, i, j, v);
            }
        }
    }
    c
}

/// The Hopf field `i·x` in chart coordinates.
pub fn hopf_field(chart: usize, u: &[f64]) -> Vector3<f64> {
    let (a, b, c) = (u[0], u[1], u[2]);
    let r2 = a * a + b * b + c * c;
    if chart == 0 {
        Vector3::new(0.5 * (1.0 - r2) + a * a, a * b - c, a * c + b)
    } else {
        Vector3::new(0.5 * (r2 - 1.0) - a * a, -a * b - c, b - a * c)
    }
}

/// `∂(hopf_field)_a / ∂u_i` as the matrix entry `(a, i)`.
pub fn hopf_field_jacobian(chart: usize, u: &[f64]) -> Matrix3<f64> {
    let (a, b, c) = (u[0], u[1], u[2]);
    if chart == 0 {
        Matrix3::new(a, -b, -c, b, a, -1.0, c, 1.0, a)
    } else {
        Matrix3::new(-a, b, c, -b, -a, -1.0, -c, 1.0, -a)
    }
}

/// The round three-sphere as a chart factor.
#[derive(Clone, Copy, Debug, Default)]
pub struct StereoS3;

fn inversion(u: &[f64]) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    if r2 == 0.0 {
        return None;
    }
    let y = u.iter().map(|v| v / r2).collect();
    let mut j = DMatrix::identity(3, 3) / r2;
    for a in 0..3 {
        for b in 0..3 {
            j[(a, b)] -= 2.0 * u[a] * u[b] / (r2 * r2);
        }
    }
    Some((y, j))
}

impl ChartFactor for StereoS3 {
    fn dim(&self) -> usize {
        3
    }

    fn num_charts(&self) -> usize {
        2
    }

    fn depth(&self, _chart: usize, x: &[f64]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        1.0 - r / BALL_RADIUS
    }

    fn transition(
        &self,
        from: usize,
        x: &[f64],
        to: usize,
        _near: Option<&[f64]>,
    ) -> Option<(Vec<f64>, DMatrix<f64>)> {
        let (y, j) = if from == to {
            (x.to_vec(), DMatrix::identity(3, 3))
        } else {
            inversion(x)?
        };
        if self.depth(to, &y) <= 0.0 {
            return None;
        }
        Some((y, j))
    }

    fn recenter(&self, chart: usize, x: &[f64]) -> (usize, Vec<f64>, DMatrix<f64>) {
        let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        if r2 > 1.0 {
            let (y, j) = inversion(x).expect("r2 > 1");
            (1 - chart, y, j)
        } else {
            (chart, x.to_vec(), DMatrix::identity(3, 3))
        }
    }

    fn sample(&self, rng: &mut dyn RngCore) -> (usize, Vec<f64>) {
        let g = gaussian_vector(rng, 4);
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x = [g[0] / n, g[1] / n, g[2] / n, g[3] / n];
        let chart = if x[0] >= 0.0 { 0 } else { 1 };
        (chart, from_ambient(chart, &x).to_vec())
    }
}

/// Chart point coordinates and chart velocity of the ambient pair `(x, ẋ)`,
/// in the chart where `x` is deepest.
pub fn chart_state(x: &Quat, dx: &Quat) -> (usize, [f64; 3], [f64; 3]) {
    let chart = if x[0] >= 0.0 { 0 } else { 1 };
    (chart, from_ambient(chart, x), chart_velocity(chart, x, dx))
}

pub fn to_dvector(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}
