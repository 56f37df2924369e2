use std::time::Instant;

use nalgebra::DVector;
use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{DetailRecord, ExperimentReport};
use crate::error::{Error, Result};
use crate::foliation::{a_star, fat_point_margin, fatness_form, kernel_direction, FoliatedModel};
use crate::geometry::{spd_report, unreduced_sectional, unreduced_sectional_at, ChartPoint, TangentVector};
use crate::holonomy::{
    default_steps, dual_leaf_span, dual_orthogonality_check, holonomy_bound_detailed, holonomy_transformation,
    horizontal_geodesic, lift_transformations, random_path_for_item, rho_of_matrix, thm_max_search,
    transport_jobs, zeta_bar, FieldKind, PathShape, SearchOptions, TransportJob,
};
use crate::models::{make_model, sphere};
use crate::sampling::{derive_seed, item_rng};

/// Outcome of one suite before the config and timing are attached.
struct Outcome {
    columns: &'static [&'static str],
    details: Vec<DetailRecord>,
    max_residual: f64,
    margin: f64,
    pass: bool,
}

fn record(columns: &[&str], values: &[f64]) -> DetailRecord {
    debug_assert_eq!(columns.len(), values.len());
    DetailRecord(columns.iter().zip(values).map(|(c, v)| (c.to_string(), *v)).collect())
}

/// Maximum ignoring `NaN`; `NaN` when nothing is finite or infinite.
fn nan_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().filter(|v| !v.is_nan()).fold(f64::NAN, f64::max)
}

fn nan_min(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().filter(|v| !v.is_nan()).fold(f64::NAN, f64::min)
}

/// Parallel map over sample indices, collected in index order.
fn per_sample<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

/// Run the suite named by `config`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let fm = make_model(&config.model)?;
    let start = Instant::now();
    let out = match config.experiment {
        ExperimentKind::ValidateModel => validate_model(&fm, config),
        ExperimentKind::GrayOneill => gray_oneill(&fm, config),
        ExperimentKind::WarpedCurvature => warped_curvature(&fm, config),
        ExperimentKind::FatnessScan => fatness_scan(&fm, config),
        ExperimentKind::TheoremA => theorem_a(&fm, config),
        ExperimentKind::ThmMax => thm_max(&fm, config),
        ExperimentKind::HolonomyBound => holonomy_bound(&fm, config),
        ExperimentKind::DualLeaf => dual_leaf(&fm, config),
        ExperimentKind::ClosedLoop => closed_loop(&fm, config),
        ExperimentKind::DualitySuite => duality_suite(&fm, config),
    }?;
    let mut echo = config.clone();
    echo.model.params = config.model.resolved();
    Ok(ExperimentReport {
        config: echo,
        timing_s: Some(start.elapsed().as_secs_f64()),
        num_samples: config.samples,
        max_residual: out.max_residual,
        margin: out.margin,
        pass: out.pass,
        columns: out.columns.iter().map(|c| c.to_string()).collect(),
        details: out.details,
    })
}

fn residual_outcome(columns: &'static [&'static str], details: Vec<DetailRecord>, tol: f64) -> Outcome {
    let max_residual = nan_max(details.iter().filter_map(|d| d.get("residual")));
    Outcome {
        columns,
        details,
        max_residual,
        margin: f64::NAN,
        pass: max_residual <= tol,
    }
}

/// Disagreement between the data at `p` and the same data expressed in every
/// other chart containing `p`, including periodic translates.
fn overlap_residual(fm: &FoliatedModel, p: &ChartPoint) -> Result<f64> {
    let atlas = &fm.metric.atlas;
    let g = fm.metric.metric(p)?;
    let pv = fm.vertical_projector(p)?;
    let n = p.dim();
    let mut nears: Vec<Option<DVector<f64>>> = vec![None];
    for i in 0..n {
        for s in [-0.75, 0.75] {
            let mut c = p.coords.clone();
            c[i] += s;
            nears.push(Some(c));
        }
    }
    let mut worst: f64 = 0.0;
    for chart in 0..atlas.num_charts() {
        for near in &nears {
            let Some((q, j)) = atlas.express_in(p, chart, near.as_ref()) else {
                continue;
            };
            if !atlas.in_core(&q) || (q.chart == p.chart && (&q.coords - &p.coords).amax() < 1e-12) {
                continue;
            }
            let gq = fm.metric.metric(&q)?;
            let pull = j.transpose() * gq * &j;
            worst = worst.max((pull - &g).amax() / g.amax());
            let pvq = fm.vertical_projector(&q)?;
            worst = worst.max((pvq * &j - &j * &pv).amax());
        }
    }
    Ok(worst)
}

const VALIDATE_COLUMNS: &[&str] = &[
    "sample",
    "min_eigenvalue",
    "metric_asymmetry",
    "overlap_residual",
    "projector_residual",
    "christoffel_fd_gap",
    "residual",
];

fn validate_model(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    let k = fm.leaf_dim as f64;
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let g = fm.metric.metric(&p)?;
        let (min_eig, asym) = spd_report(&g);
        let projector = match fm.projectors(&p) {
            Ok(pr) => {
                let idem = (&pr.pv * &pr.pv - &pr.pv).amax();
                let gpv = &g * &pr.pv;
                let adj = (&gpv - gpv.transpose()).amax();
                idem.max(adj).max((pr.pv.trace() - k).abs())
            }
            Err(Error::Degenerate { .. }) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let overlap = if projector.is_finite() {
            overlap_residual(fm, &p)?
        } else {
            f64::INFINITY
        };
        let fd_gap = if fm.metric.has_analytic_christoffels() {
            let h = fm.metric.fd_step;
            fm.metric.christoffels_fd(&p, h)?.max_abs_diff(&fm.metric.christoffels(&p)?)
        } else {
            f64::NAN
        };
        let mut residual = asym.max(overlap).max(projector);
        if !(min_eig > 0.0) {
            residual = f64::INFINITY;
        }
        Ok(record(
            VALIDATE_COLUMNS,
            &[i as f64, min_eig, asym, overlap, projector, fd_gap, residual],
        ))
    })?;
    let mut out = residual_outcome(VALIDATE_COLUMNS, details, cfg.tolerance);
    out.margin = nan_min(out.details.iter().filter_map(|d| d.get("min_eigenvalue")));
    Ok(out)
}

const GRAY_ONEILL_COLUMNS: &[&str] = &["t", "K_riemann", "K_formula", "residual"];
const GEODESIC_LENGTH: f64 = 0.5;
const GEODESIC_STEPS: usize = 128;

/// Fourth-order central second difference from five equally spaced values.
fn second_difference(f: &[f64], h: f64) -> f64 {
    (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
}

/// Two rows per sample: the dual field identity
/// `K = ½f″ − 3‖Sν‖² + ‖A*ν‖²` and the holonomy field identity
/// `K = −½f″ + ‖Sξ‖² + ‖A*ξ‖²`, with `f` the squared norm of the field, at
/// the midpoint of a horizontal geodesic.
fn gray_oneill(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let rows = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let x = fm.random_horizontal(&p, &mut rng)?;
        let nu0 = fm.random_vertical(&p, &mut rng)?;
        let xi0 = fm.random_vertical(&p, &mut rng)?;
        let path = horizontal_geodesic(fm, &x, GEODESIC_LENGTH, GEODESIC_STEPS)?;
        let column = |v: &TangentVector| nalgebra::DMatrix::from_column_slice(v.components.len(), 1, v.components.as_slice());
        let jobs = [
            TransportJob {
                kind: FieldKind::Dual,
                initial: column(&nu0),
            },
            TransportJob {
                kind: FieldKind::Holonomy,
                initial: column(&xi0),
            },
        ];
        let out = transport_jobs(fm, &path, &jobs)?;
        let mut rows = Vec::with_capacity(2);
        for (tr, sign) in out.iter().zip([1.0, -1.0]) {
            let m = tr.nodes.len() / 2;
            let window = &tr.nodes[m - 2..=m + 2];
            let mut f = [0.0; 5];
            for (fj, node) in f.iter_mut().zip(window) {
                let v = node.values.column(0).into_owned();
                *fj = fm.metric.inner(&node.point, &v, &v)?;
            }
            let h = window[3].t - window[2].t;
            let node = &tr.nodes[m];
            let v = node.values.column(0).into_owned();
            let jet = fm.jet(&node.point)?;
            let a = jet.a_star_operator(&node.velocity) * &v;
            let s = jet.s_operator(&node.velocity) * &v;
            let a2 = jet.proj.inner(&a, &a);
            let s2 = jet.proj.inner(&s, &s);
            let k = unreduced_sectional_at(&fm.metric, &node.point, &node.velocity, &v)?;
            let k_formula = if sign > 0.0 {
                0.5 * second_difference(&f, h) - 3.0 * s2 + a2
            } else {
                -0.5 * second_difference(&f, h) + s2 + a2
            };
            let residual = (k - k_formula).abs() / k.abs().max(1.0);
            rows.push(record(GRAY_ONEILL_COLUMNS, &[node.t, k, k_formula, residual]));
        }
        Ok(rows)
    })?;
    Ok(residual_outcome(GRAY_ONEILL_COLUMNS, rows.into_iter().flatten().collect(), cfg.tolerance))
}

fn require_leaves(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<()> {
    if fm.leaf_dim == 0 {
        return Err(Error::Config(format!("{} needs a foliation with leaves", cfg.experiment)));
    }
    Ok(())
}

const WARPED_COLUMNS: &[&str] = &[
    "sample",
    "phi",
    "K",
    "a_star_sq",
    "hess_phi",
    "residual",
    "residual_corrected",
];

/// Value of `φ` along the horizontal geodesic with initial velocity `x`, at
/// parameters `±δ, ±2δ` (and `0`).
fn phi_along_geodesic(fm: &FoliatedModel, phi: &crate::foliation::ScalarFn, x: &TangentVector, delta: f64) -> Result<[f64; 5]> {
    let steps = 16;
    let fwd = horizontal_geodesic(fm, x, 2.0 * delta, steps)?;
    let back = horizontal_geodesic(fm, &TangentVector::new(x.base.clone(), -&x.components), 2.0 * delta, steps)?;
    let at = |path: &crate::holonomy::HorizontalPath, idx: usize| phi(&path.samples().nth(idx).expect("sample").point);
    Ok([at(&back, steps), at(&back, steps / 2), phi(&x.base), at(&fwd, steps / 2), at(&fwd, steps)])
}

const HESSIAN_STEP: f64 = 0.01;

/// Minimum points of `φ` on the minimum fiber of the height family, spread
/// along that fiber.
fn warping_minimum(fm: &FoliatedModel, phi: &crate::foliation::ScalarFn, rng: &mut impl rand::Rng) -> Result<ChartPoint> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let theta: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let rot = [theta.cos(), theta.sin(), 0.0, 0.0];
    let mut best: Option<(f64, ChartPoint)> = None;
    for x in [[s, 0.0, -s, 0.0], [s, 0.0, s, 0.0]] {
        let y = sphere::qmul(&rot, &x);
        let (chart, u, _) = sphere::chart_state(&y, &[0.0; 4]);
        let p = fm.metric.atlas.with_factor(&ChartPoint::new(0, vec![0.0; fm.dimension()]), 0, chart, &u);
        let v = phi(&p);
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, p));
        }
    }
    Ok(best.expect("two candidates").1)
}

/// Vertizontal curvature of a warped connection metric. With constant `φ`,
/// `K(ξ, ċ) = ‖A*_ċ ξ‖²_φ` at random points; otherwise, at minima of `φ`,
/// `K(ξ, ċ) = −½‖ξ‖₀² Hess φ(ċ, ċ) + ‖A*_ċ ξ‖²_φ` as stated for warped
/// connection metrics. The column `residual_corrected` uses the coefficient
/// `‖ξ‖²_φ` instead of `½‖ξ‖₀²`, which is what the holonomy field identity
/// gives at a critical point of `φ`.
fn warped_curvature(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    let warp = fm
        .warp
        .clone()
        .ok_or_else(|| Error::Config(format!("{} needs a warped model", cfg.experiment)))?;
    let mut probe = item_rng(cfg.seed, u64::MAX);
    let constant = (0..16).all(|_| {
        let p = fm.sample_point(&mut probe);
        (warp.dphi)(&p).amax() == 0.0
    });
    if !constant && fm.name != "hopf_warped" {
        return Err(Error::Config(format!(
            "{}: minima of φ are only known for the height family",
            cfg.experiment
        )));
    }
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = if constant {
            fm.sample_point(&mut rng)
        } else {
            warping_minimum(fm, &warp.phi, &mut rng)?
        };
        let x = fm.random_horizontal(&p, &mut rng)?;
        let xi = fm.random_vertical(&p, &mut rng)?;
        let k = unreduced_sectional(&fm.metric, &xi, &x)?;
        let a = a_star(fm, &x, &xi)?;
        let a2 = fm.metric.inner(&p, &a.components, &a.components)?;
        let phi = (warp.phi)(&p);
        let (hess, residual, corrected) = if constant {
            (0.0, (k - a2).abs(), (k - a2).abs())
        } else {
            let f = phi_along_geodesic(fm, &warp.phi, &x, HESSIAN_STEP)?;
            let hess = second_difference(&f, HESSIAN_STEP);
            let xi0_sq = warp.base.metric.inner(&p, &xi.components, &xi.components)?;
            let xi_sq = fm.metric.inner(&p, &xi.components, &xi.components)?;
            (
                hess,
                (k + 0.5 * xi0_sq * hess - a2).abs(),
                (k + xi_sq * hess - a2).abs(),
            )
        };
        Ok(record(WARPED_COLUMNS, &[i as f64, phi, k, a2, hess, residual, corrected]))
    })?;
    Ok(residual_outcome(WARPED_COLUMNS, details, cfg.tolerance))
}

const FATNESS_COLUMNS: &[&str] = &["sample", "margin", "residual"];
const FATNESS_DIRECTIONS: usize = 16;

/// Smallest singular value of the fatness form over sampled `ξ`; the residual
/// is the skew-symmetry defect of the form.
fn fatness_scan(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let xi = fm.random_vertical(&p, &mut rng)?;
        let skew = fatness_form(fm, &p, &xi)?.max_asymmetry();
        let margin = fat_point_margin(fm, &p, FATNESS_DIRECTIONS)?;
        Ok(record(FATNESS_COLUMNS, &[i as f64, margin, skew]))
    })?;
    let mut out = residual_outcome(FATNESS_COLUMNS, details, cfg.tolerance);
    out.margin = nan_min(out.details.iter().filter_map(|d| d.get("margin")));
    Ok(out)
}

const THEOREM_A_COLUMNS: &[&str] = &["sample", "found", "a_star_norm", "K", "smallest_singular_value"];

/// At random points and unit vertical `ξ`, find `X` with `A*_X ξ = 0` and
/// report `K(X, ξ)`. Passes when a kernel exists everywhere and the largest
/// curvature found is at most the tolerance.
fn theorem_a(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let xi = fm.random_vertical(&p, &mut rng)?;
        match kernel_direction(fm, &p, &xi) {
            Ok(x) => {
                let a = a_star(fm, &x, &xi)?;
                let an = fm.metric.inner(&p, &a.components, &a.components)?.sqrt();
                let k = unreduced_sectional(&fm.metric, &x, &xi)?;
                Ok(record(THEOREM_A_COLUMNS, &[i as f64, 1.0, an, k, f64::NAN]))
            }
            Err(Error::NoKernel { smallest }) => Ok(record(
                THEOREM_A_COLUMNS,
                &[i as f64, 0.0, f64::NAN, f64::NAN, smallest],
            )),
            Err(e) => Err(e),
        }
    })?;
    let all_found = details.iter().all(|d| d.get("found") == Some(1.0));
    let max_residual = nan_max(details.iter().filter_map(|d| d.get("a_star_norm")));
    let margin = if all_found {
        nan_max(details.iter().filter_map(|d| d.get("K")))
    } else {
        f64::INFINITY
    };
    Ok(Outcome {
        columns: THEOREM_A_COLUMNS,
        details,
        max_residual,
        margin,
        pass: all_found && margin <= cfg.tolerance,
    })
}

const THM_MAX_COLUMNS: &[&str] = &["evaluated", "best_rho"];

/// Search `ℰ_p` for large `ρ_{ν₀}` with a budget of `samples` transformations;
/// the margin is `max_X K(X, ν) − ‖A*_X ν‖²` at the best one.
fn thm_max(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let mut rng = item_rng(cfg.seed, u64::MAX);
    let p = fm.sample_point(&mut rng);
    let nu0 = fm.random_vertical(&p, &mut rng)?;
    let res = thm_max_search(fm, &p, &nu0, cfg.samples, derive_seed(cfg.seed, 1), &SearchOptions::default())?;
    let details = res
        .history
        .iter()
        .map(|(n, r)| record(THM_MAX_COLUMNS, &[*n as f64, *r]))
        .collect();
    Ok(Outcome {
        columns: THM_MAX_COLUMNS,
        details,
        max_residual: f64::NAN,
        margin: res.worst_margin,
        pass: res.worst_margin <= cfg.tolerance,
    })
}

const BOUND_COLUMNS: &[&str] = &["set", "index", "sigma_max", "sigma_min", "rho", "residual"];

/// Shape of the random paths behind bound estimates.
pub(crate) fn bound_shape() -> PathShape {
    PathShape::new(3, 0.7)
}

/// Operator norms of `samples` random transformations from a random point.
/// `L̂ = max(σ_max, 1/σ_min)` bounds the sampled transformations and their
/// inverses; `ρ_{ν₀}` of a second, independent set of transformations is
/// checked against `[L̂⁻², L̂²]`. The residual is the relative excess outside
/// that interval, the margin the largest operator norm.
fn holonomy_bound(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let mut rng = item_rng(cfg.seed, u64::MAX);
    let p = fm.sample_point(&mut rng);
    let nu0 = fm.random_vertical(&p, &mut rng)?;
    let shape = bound_shape();
    let bound = holonomy_bound_detailed(fm, &p, cfg.samples, &shape, derive_seed(cfg.seed, 1))?;
    let check = holonomy_bound_detailed(fm, &p, cfg.samples, &shape, derive_seed(cfg.seed, 2))?;
    let frame = fm.vertical_orthonormal_frame(&p)?;
    let c = frame.transpose() * fm.metric.metric(&p)? * &nu0.components;
    let k = fm.leaf_dim;
    let lo = bound.l_hat.powi(-2);
    let hi = bound.l_hat.powi(2);
    let mut details = Vec::with_capacity(2 * cfg.samples);
    for s in &bound.samples {
        details.push(record(
            BOUND_COLUMNS,
            &[0.0, s.index as f64, s.sigma_max, s.sigma_min, f64::NAN, f64::NAN],
        ));
    }
    for s in &check.samples {
        let m = nalgebra::DMatrix::from_row_slice(k, k, &s.matrix);
        let rho = rho_of_matrix(&m, &c).unwrap_or(f64::INFINITY);
        let excess = (rho / hi - 1.0).max(lo / rho - 1.0).max(0.0);
        details.push(record(
            BOUND_COLUMNS,
            &[1.0, s.index as f64, s.sigma_max, s.sigma_min, rho, excess],
        ));
    }
    let mut out = residual_outcome(BOUND_COLUMNS, details, cfg.tolerance);
    out.margin = bound.estimate;
    Ok(out)
}

const DUAL_LEAF_COLUMNS: &[&str] = &["sample", "rank", "leaf_dim", "a_star_max", "orthogonality_max", "residual"];
const SPAN_GEODESIC_LENGTH: f64 = 1.0;
const SPAN_TIMES: usize = 8;

/// Rank of `C(c)` along random horizontal geodesics; where the rank is below
/// the leaf dimension, a dual field starting orthogonal to `C(c)` is checked
/// to stay orthogonal with `A*_ċ ν = 0`.
fn dual_leaf(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let x = fm.random_horizontal(&p, &mut rng)?;
        let path = horizontal_geodesic(fm, &x, SPAN_GEODESIC_LENGTH, default_steps(SPAN_GEODESIC_LENGTH))?;
        let span = dual_leaf_span(fm, &path, SPAN_TIMES)?;
        let check = dual_orthogonality_check(fm, &path, &span)?;
        let (a, o) = match check {
            crate::holonomy::SpanCheck::Checked {
                a_star_max,
                orthogonality_max,
                ..
            } => (a_star_max, orthogonality_max),
            crate::holonomy::SpanCheck::NotApplicable { .. } => (f64::NAN, f64::NAN),
        };
        Ok(record(
            DUAL_LEAF_COLUMNS,
            &[i as f64, span.rank as f64, fm.leaf_dim as f64, a, o, check.residual().unwrap_or(f64::NAN)],
        ))
    })?;
    let mut out = residual_outcome(DUAL_LEAF_COLUMNS, details, cfg.tolerance);
    out.pass = out.max_residual.is_nan() || out.max_residual <= cfg.tolerance;
    out.margin = nan_min(out.details.iter().filter_map(|d| d.get("rank")));
    Ok(out)
}

const CLOSED_LOOP_COLUMNS: &[&str] = &["index", "found", "closure_gap", "length", "residual"];

/// Holonomy of `samples` closed horizontal loops at a random point, from
/// the model's loop family. The residual is `max |h − I|`.
fn closed_loop(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let family = fm
        .loop_family
        .clone()
        .ok_or_else(|| Error::Config(format!("model {} has no closed loop family", fm.name)))?;
    let mut rng = item_rng(cfg.seed, u64::MAX);
    let p = fm.sample_point(&mut rng);
    let k = fm.leaf_dim;
    let details = per_sample(cfg.samples, |i| {
        match family.closed_loop(fm, &p, i as u64, cfg.seed)? {
            Some(path) => {
                let h = holonomy_transformation(fm, &path)?;
                let residual = (&h.matrix - nalgebra::DMatrix::<f64>::identity(k, k)).amax();
                Ok(record(
                    CLOSED_LOOP_COLUMNS,
                    &[i as f64, 1.0, path.closure_gap, path.length(fm)?, residual],
                ))
            }
            None => Ok(record(CLOSED_LOOP_COLUMNS, &[i as f64, 0.0, f64::NAN, f64::NAN, f64::NAN])),
        }
    })?;
    let found = details.iter().filter(|d| d.get("found") == Some(1.0)).count();
    let mut out = residual_outcome(CLOSED_LOOP_COLUMNS, details, cfg.tolerance);
    out.pass = found > 0 && out.max_residual <= cfg.tolerance;
    out.margin = found as f64;
    Ok(out)
}

const DUALITY_COLUMNS: &[&str] = &[
    "sample",
    "pairing_drift",
    "inverse_transpose_gap",
    "verticality_drift",
    "residual",
];
const DUALITY_SEGMENTS: usize = 3;
const DUALITY_SEGMENT_LENGTH: f64 = 0.6;

/// Along random broken horizontal geodesics: drift of `⟨ξ(t), ν(t)⟩`, the
/// gap between the dual field from its ODE and `ζ̄(ĉ(t), ν₀)`, and the
/// verticality drift of both transports.
fn duality_suite(fm: &FoliatedModel, cfg: &ExperimentConfig) -> Result<Outcome> {
    require_leaves(fm, cfg)?;
    let details = per_sample(cfg.samples, |i| {
        let mut rng = item_rng(cfg.seed, i as u64);
        let p = fm.sample_point(&mut rng);
        let nu0 = fm.random_vertical(&p, &mut rng)?;
        let xi0 = fm.random_vertical(&p, &mut rng)?;
        let path = random_path_for_item(
            fm,
            &p,
            DUALITY_SEGMENTS,
            DUALITY_SEGMENT_LENGTH,
            default_steps(DUALITY_SEGMENT_LENGTH),
            cfg.seed,
            i as u64,
        )?;
        let column = |v: &TangentVector| nalgebra::DMatrix::from_column_slice(v.components.len(), 1, v.components.as_slice());
        let jobs = [
            TransportJob {
                kind: FieldKind::Dual,
                initial: column(&nu0),
            },
            TransportJob {
                kind: FieldKind::Holonomy,
                initial: column(&xi0),
            },
        ];
        let out = transport_jobs(fm, &path, &jobs)?;
        let lifts = lift_transformations(fm, &path)?;
        let pairing0 = fm.metric.inner(&p, &xi0.components, &nu0.components)?;
        let mut pairing: f64 = 0.0;
        let mut gap: f64 = 0.0;
        for ((dual, hol), h) in out[0].nodes.iter().zip(&out[1].nodes).zip(&lifts) {
            let nu = dual.values.column(0).into_owned();
            let xi = hol.values.column(0).into_owned();
            pairing = pairing.max((fm.metric.inner(&dual.point, &xi, &nu)? - pairing0).abs());
            let nu_bar = zeta_bar(fm, h, &nu0)?;
            if nu_bar.base.chart != dual.point.chart {
                return Err(Error::ModelConsistency("lift and transport nodes disagree".into()));
            }
            let d = &nu_bar.components - &nu;
            gap = gap.max(fm.metric.inner(&dual.point, &d, &d)?.sqrt());
        }
        let drift = out[0].max_drift.max(out[1].max_drift);
        let residual = pairing.max(gap).max(drift);
        Ok(record(DUALITY_COLUMNS, &[i as f64, pairing, gap, drift, residual]))
    })?;
    Ok(residual_outcome(DUALITY_COLUMNS, details, cfg.tolerance))
}
