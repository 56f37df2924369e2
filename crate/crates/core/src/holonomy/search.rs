//! Empirical holonomy bounds and the search for large `ρ_{ν₀}`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::groupoid::{compose, holonomy_transformation, rho_coords, zeta_bar, HolonomyTransformation};
use super::path::{horizontal_geodesic, random_path_for_item};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::{unreduced_sectional_at, ChartPoint, TangentVector};
use crate::sampling::{item_rng, sphere_directions};

/// One sampled transformation.
#[derive(Clone, Debug, Serialize)]
pub struct BoundSample {
    pub index: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    /// Matrix in row-major order.
    pub matrix: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HolonomyBound {
    /// Largest operator norm seen.
    pub estimate: f64,
    /// `max(σ_max, 1/σ_min)` over the samples: a bound for the transformations
    /// and their inverses.
    pub l_hat: f64,
    pub samples: Vec<BoundSample>,
}

/// Path shape used when sampling transformations.
#[derive(Clone, Copy, Debug)]
pub struct PathShape {
    pub num_segments: usize,
    pub seg_len: f64,
    pub steps_per_segment: usize,
}

impl PathShape {
    pub fn new(num_segments: usize, seg_len: f64) -> Self {
        PathShape {
            num_segments,
            seg_len,
            steps_per_segment: super::path::default_steps(seg_len),
        }
    }
}

fn sampled_transformation(fm: &FoliatedModel, p: &ChartPoint, shape: &PathShape, seed: u64, index: u64) -> Result<HolonomyTransformation> {
    let path = random_path_for_item(fm, p, shape.num_segments, shape.seg_len, shape.steps_per_segment, seed, index)?;
    holonomy_transformation(fm, &path)
}

/// Largest singular value over `budget` random transformations from `p`.
pub fn holonomy_bound_estimate(
    fm: &FoliatedModel,
    p: &ChartPoint,
    budget: usize,
    num_segments: usize,
    seg_len: f64,
    seed: u64,
) -> Result<f64> {
    Ok(holonomy_bound_detailed(fm, p, budget, &PathShape::new(num_segments, seg_len), seed)?.estimate)
}

pub fn holonomy_bound_detailed(
    fm: &FoliatedModel,
    p: &ChartPoint,
    budget: usize,
    shape: &PathShape,
    seed: u64,
) -> Result<HolonomyBound> {
    if budget == 0 {
        return Err(Error::Argument("budget must be at least 1".into()));
    }
    let samples = (0..budget)
        .into_par_iter()
        .map(|i| {
            let h = sampled_transformation(fm, p, shape, seed, i as u64)?;
            let s = h.singular_values();
            Ok(BoundSample {
                index: i,
                sigma_max: s.first().copied().unwrap_or(1.0),
                sigma_min: s.last().copied().unwrap_or(1.0),
                matrix: h.matrix.transpose().as_slice().to_vec(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let estimate = samples.iter().map(|s| s.sigma_max).fold(0.0, f64::max);
    let l_hat = samples
        .iter()
        .map(|s| s.sigma_max.max(1.0 / s.sigma_min))
        .fold(0.0, f64::max);
    Ok(HolonomyBound { estimate, l_hat, samples })
}

/// Settings of the `ρ` search.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub shape: PathShape,
    /// Longest extension segment in the greedy phase.
    pub extension_len: f64,
    pub extension_steps: usize,
    pub batch: usize,
    /// Horizontal directions tried when evaluating the margin.
    pub margin_directions: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            shape: PathShape {
                num_segments: 2,
                seg_len: 0.5,
                steps_per_segment: 24,
            },
            extension_len: 0.5,
            extension_steps: 24,
            batch: 8,
            margin_directions: 16,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub best: HolonomyTransformation,
    pub best_rho: f64,
    /// `ζ̄(best, ν₀)`.
    pub nu: TangentVector,
    /// `max_X K(X, ν) − ‖A*_X ν‖²` over unit horizontal `X` at `τ(best)`.
    pub worst_margin: f64,
    pub evaluated: usize,
    /// `(evaluated, best ρ)` after each improvement.
    pub history: Vec<(usize, f64)>,
}

/// `max_X K(X, ν) − ‖A*_X ν‖²` over `count` unit horizontal directions at
/// the base of `nu`.
pub fn vertizontal_margin(fm: &FoliatedModel, nu: &TangentVector, count: usize) -> Result<f64> {
    let p = &nu.base;
    let jet = fm.jet(p)?;
    let frame = fm.horizontal_orthonormal_frame(p)?;
    let mut worst = f64::NEG_INFINITY;
    for c in sphere_directions(frame.ncols(), count) {
        let x = &frame * DVector::from_vec(c);
        let k = unreduced_sectional_at(&fm.metric, p, &x, &nu.components)?;
        let a = jet.a_star_operator(&x) * &nu.components;
        worst = worst.max(k - jet.proj.inner(&a, &a));
    }
    Ok(worst)
}

/// Maximize `ρ_{ν₀}` over `budget` sampled elements of `ℰ_p` and report the
/// margin of the resulting `ν`. Half of the budget samples random paths from
/// `p`; the rest extends the incumbent by short random horizontal geodesics,
/// `batch` candidates at a time.
pub fn thm_max_search(
    fm: &FoliatedModel,
    p: &ChartPoint,
    nu0: &TangentVector,
    budget: usize,
    seed: u64,
    opts: &SearchOptions,
) -> Result<SearchResult> {
    if budget == 0 {
        return Err(Error::Argument("budget must be at least 1".into()));
    }
    let identity = HolonomyTransformation::identity(fm, p)?;
    let c = identity.source_frame.transpose() * &identity.source_metric * &super::transport::components_at(fm, nu0, p)?;
    if c.norm() == 0.0 {
        return Err(Error::Argument("ν₀ has no vertical component".into()));
    }
    let mut best = identity;
    let mut best_rho = rho_coords(&best, &c)?;
    let mut history = vec![(0, best_rho)];
    let random_count = budget.div_ceil(2);
    let rhos = (0..random_count)
        .into_par_iter()
        .map(|i| {
            let h = sampled_transformation(fm, p, &opts.shape, seed, i as u64)?;
            let r = rho_coords(&h, &c)?;
            Ok((h, r))
        })
        .collect::<Result<Vec<_>>>()?;
    for (i, (h, r)) in rhos.into_iter().enumerate() {
        if r > best_rho {
            best = h;
            best_rho = r;
            history.push((i + 1, r));
        }
    }
    let mut evaluated = random_count;
    while evaluated < budget {
        let n = opts.batch.min(budget - evaluated);
        let start = evaluated;
        let incumbent = &best;
        let candidates = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut rng = item_rng(seed, (start + j) as u64);
                let q = &incumbent.target;
                let x = fm.random_horizontal(q, &mut rng)?;
                let len = opts.extension_len * (0.25 + 0.75 * rng.random::<f64>());
                let seg = horizontal_geodesic(fm, &x, len, opts.extension_steps)?;
                let h_seg = holonomy_transformation(fm, &seg)?;
                let h = compose(fm, &h_seg, incumbent)?;
                let r = rho_coords(&h, &c)?;
                Ok((h, r))
            })
            .collect::<Result<Vec<_>>>()?;
        evaluated += n;
        let mut improved: Option<(HolonomyTransformation, f64)> = None;
        for (h, r) in candidates {
            if r > improved.as_ref().map_or(best_rho, |x| x.1) {
                improved = Some((h, r));
            }
        }
        if let Some((h, r)) = improved {
            best = h;
            best_rho = r;
            history.push((evaluated, r));
        }
    }
    let nu = zeta_bar(fm, &best, &TangentVector::new(p.clone(), &best.source_frame * (&c / c.norm())))?;
    let worst_margin = vertizontal_margin(fm, &nu, opts.margin_directions)?;
    Ok(SearchResult {
        best,
        best_rho,
        nu,
        worst_margin,
        evaluated,
        history,
    })
}

/// `ρ` of `h` for `ν₀` given by source-frame coordinates `c`; convenience for
/// reports that store matrices.
pub fn rho_of_matrix(matrix: &DMatrix<f64>, c: &DVector<f64>) -> Option<f64> {
    let it = matrix.transpose().try_inverse()?;
    Some((it * (c / c.norm())).norm_squared())
}
