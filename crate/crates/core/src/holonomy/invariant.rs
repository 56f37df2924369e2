//! Monte Carlo `H_p`-invariant inner products on `𝒱_p`.

use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::groupoid::holonomy_transformation;
use super::loops::{LoopFamily, RetraceLoops};
use crate::error::{Error, Result};
use crate::foliation::FoliatedModel;
use crate::geometry::ChartPoint;

#[derive(Clone, Debug)]
pub struct InvariantMetric {
    /// Mean of `gᵀ g` over the averaging loops, in the orthonormal vertical
    /// frame at `p`.
    pub q: DMatrix<f64>,
    /// `max ‖gᵀ Q g − Q‖_F` over the check loops.
    pub residual: f64,
    pub averaged: usize,
    pub checked: usize,
    pub max_closure_gap: f64,
    pub family: &'static str,
}

/// Average `gᵀ g` over closed-loop transformations `g` at `p`. Attempts with
/// even index feed the average and odd ones the invariance check.
pub fn invariant_metric_average(fm: &FoliatedModel, p: &ChartPoint, loop_budget: usize, seed: u64) -> Result<InvariantMetric> {
    let family: Arc<dyn LoopFamily> = fm.loop_family.clone().unwrap_or_else(|| Arc::new(RetraceLoops));
    let found = (0..loop_budget as u64)
        .into_par_iter()
        .map(|i| -> Result<Option<(u64, DMatrix<f64>, f64)>> {
            let Some(path) = family.closed_loop(fm, p, i, seed)? else {
                return Ok(None);
            };
            let h = holonomy_transformation(fm, &path)?;
            Ok(Some((i, h.matrix, path.closure_gap)))
        })
        .collect::<Result<Vec<_>>>()?;
    let found: Vec<_> = found.into_iter().flatten().collect();
    let (avg, check): (Vec<_>, Vec<_>) = found.iter().partition(|(i, _, _)| i % 2 == 0);
    if avg.is_empty() || check.is_empty() {
        return Err(Error::Sampling {
            found: found.len(),
            needed: 2,
        });
    }
    let k = fm.leaf_dim;
    let mut q = DMatrix::zeros(k, k);
    for (_, g, _) in &avg {
        q += g.transpose() * g;
    }
    q /= avg.len() as f64;
    let residual = check
        .iter()
        .map(|(_, g, _)| (g.transpose() * &q * g - &q).norm())
        .fold(0.0, f64::max);
    Ok(InvariantMetric {
        q,
        residual,
        averaged: avg.len(),
        checked: check.len(),
        max_closure_gap: found.iter().map(|x| x.2).fold(0.0, f64::max),
        family: family.name(),
    })
}
