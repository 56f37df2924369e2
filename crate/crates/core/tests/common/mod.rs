//! Test-only oracles, written independently of the library's tensor code.
#![allow(dead_code)]

use folilab::geometry::ChartPoint;
use folilab::models::{flat_torus, hopf_s3, hopf_warped, s3_x_s1, torus_x_hopf};
use folilab::sampling::item_rng;
use folilab::FoliatedModel;
use nalgebra::DVector;

pub type Q = [f64; 4];

pub fn mul(a: &Q, b: &Q) -> Q {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

pub const UNITS: [Q; 3] = [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

/// Point of the unit sphere from stereographic coordinates `u` of chart
/// `chart` (0 projects from −1, 1 from +1).
pub fn unproject(chart: usize, u: &[f64]) -> Q {
    let r2: f64 = u.iter().map(|v| v * v).sum();
    let s = if chart == 0 { 1.0 } else { -1.0 };
    let d = 1.0 + r2;
    [s * (1.0 - r2) / d, 2.0 * u[0] / d, 2.0 * u[1] / d, 2.0 * u[2] / d]
}

pub fn project(chart: usize, x: &Q) -> [f64; 3] {
    let s = if chart == 0 { 1.0 } else { -1.0 };
    let d = 1.0 + s * x[0];
    [x[1] / d, x[2] / d, x[3] / d]
}

/// Chart components of the ambient tangent vector `dx` at `x`, by a
/// central difference of the projection along the great circle through `dx`.
pub fn push_to_chart(chart: usize, x: &Q, dx: &Q) -> DVector<f64> {
    let n = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        return DVector::zeros(3);
    }
    let e: Q = [dx[0] / n, dx[1] / n, dx[2] / n, dx[3] / n];
    let curve = |t: f64| -> [f64; 3] {
        let (s, c) = t.sin_cos();
        project(chart, &[c * x[0] + s * e[0], c * x[1] + s * e[1], c * x[2] + s * e[2], c * x[3] + s * e[3]])
    };
    let h = 1e-3;
    let (a, b, c, d) = (curve(-2.0 * h), curve(-h), curve(h), curve(2.0 * h));
    DVector::from_fn(3, |i, _| n * (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
}

/// Right-invariant field `x ↦ u·x` for a unit imaginary quaternion `u`, in
/// chart components at a point of the `S³` factor with chart `chart`.
pub fn right_invariant(chart: usize, coords: &[f64], u: &Q) -> DVector<f64> {
    let x = unproject(chart, coords);
    push_to_chart(chart, &x, &mul(u, &x))
}

/// Curvature data of a Lie group frame `E_a` with constant metric
/// `diag(m)` and brackets `[E_a, E_b] = Σ_c c[a][b][c] E_c`, via Koszul.
pub struct KoszulFrame {
    pub m: [f64; 3],
    pub c: [[[f64; 3]; 3]; 3],
}

impl KoszulFrame {
    /// Right-invariant fields `R_i, R_j, R_k` on `S³` with the fiber
    /// direction `R_i` scaled to length `eps`: `[R_u, R_v] = R_{vu − uv}`.
    pub fn berger(eps: f64) -> Self {
        let mut c = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let ab = mul(&UNITS[a], &UNITS[b]);
                let ba = mul(&UNITS[b], &UNITS[a]);
                for k in 0..3 {
                    c[a][b][k] = ba[k + 1] - ab[k + 1];
                }
            }
        }
        KoszulFrame { m: [eps * eps, 1.0, 1.0], c }
    }

    fn bracket_inner(&self, a: usize, b: usize, d: usize) -> f64 {
        self.c[a][b][d] * self.m[d]
    }

    /// `Γ[a][b][d]`: `∇_{E_a} E_b = Σ_d Γ[a][b][d] E_d`.
    pub fn connection(&self) -> [[[f64; 3]; 3]; 3] {
        let mut g = [[[0.0; 3]; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    let k = 0.5 * (self.bracket_inner(a, b, d) - self.bracket_inner(b, d, a) + self.bracket_inner(d, a, b));
                    g[a][b][d] = k / self.m[d];
                }
            }
        }
        g
    }

    /// `∇_X Y` for constant-coefficient fields.
    pub fn covariant(&self, x: &[f64; 3], y: &[f64; 3]) -> [f64; 3] {
        let g = self.connection();
        let mut out = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                for d in 0..3 {
                    out[d] += x[a] * y[b] * g[a][b][d];
                }
            }
        }
        out
    }

    /// `R(E_a, E_b) E_c` coefficients.
    fn riemann_basis(&self, a: usize, b: usize, c: usize) -> [f64; 3] {
        let g = self.connection();
        let mut out = [0.0; 3];
        for d in 0..3 {
            for e in 0..3 {
                out[e] += g[b][c][d] * g[a][d][e] - g[a][c][d] * g[b][d][e];
            }
        }
        for f in 0..3 {
            for e in 0..3 {
                out[e] -= self.c[a][b][f] * g[f][c][e];
            }
        }
        out
    }

    /// `⟨R(X,Y)Y, X⟩`.
    pub fn unreduced_sectional(&self, x: &[f64; 3], y: &[f64; 3]) -> f64 {
        let mut r = [0.0; 3];
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let w = x[a] * y[b] * y[c];
                    if w != 0.0 {
                        let v = self.riemann_basis(a, b, c);
                        for e in 0..3 {
                            r[e] += w * v[e];
                        }
                    }
                }
            }
        }
        (0..3).map(|e| r[e] * x[e] * self.m[e]).sum()
    }
}

/// The models the acceptance criteria quantify over, by name.
pub fn all_models() -> Vec<(&'static str, FoliatedModel)> {
    vec![
        ("flat_torus", flat_torus(3, 1)),
        ("hopf_s3", hopf_s3(1.0).unwrap()),
        ("hopf_s3_0.8", hopf_s3(0.8).unwrap()),
        ("hopf_warped", hopf_warped(1.0, 0.3, 1).unwrap()),
        ("s3_x_s1", s3_x_s1(1.0, 1.0).unwrap()),
        ("torus_x_hopf", torus_x_hopf(1.0).unwrap()),
    ]
}

pub fn point(fm: &FoliatedModel, seed: u64, i: u64) -> ChartPoint {
    fm.sample_point(&mut item_rng(seed, i))
}

/// `g`-norm of `v` at `p`.
pub fn norm(fm: &FoliatedModel, p: &ChartPoint, v: &DVector<f64>) -> f64 {
    fm.metric.inner(p, v, v).unwrap().sqrt()
}
