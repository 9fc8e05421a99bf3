//! Evidence that each `z` in the disk carries many independent eigenfunctions:
//! `h_z` built from several kernel observables and the rank of their Gram matrix.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::kernel::{build_kernel, KernelConstruction};
use super::series::{h_series, SeriesSpec};
use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{complex_to_f64, rat, Interval, Rational, C64};
use crate::observables::ExactStep;

/// Relative singular-value threshold for the numerical rank.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub d: usize,
    pub rank: usize,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub tolerance: f64,
}

/// `d` linear contrasts on branches 0 and 1 over `K_j = [j/d, (j+1)/d)`.
pub fn shifted_contrasts(map: &PiecewiseMap, d: usize, scale: &Rational) -> Result<Vec<ExactStep>> {
    if d == 0 {
        return Err(Error::Validation("need at least one observable".into()));
    }
    (0..d)
        .map(|j| {
            let k = Interval::new(rat(j as i64, d as i64), rat(j as i64 + 1, d as i64))?;
            let kern = build_kernel(
                map,
                &KernelConstruction::LinearContrast {
                    k,
                    branches: (0, 1),
                    scale: scale.clone(),
                },
            )?;
            Ok(kern.psi.as_exact().expect("linear contrasts are exact").clone())
        })
        .collect()
}

/// Numerical rank of the Gram matrix of the truncated `h_z` built from each
/// observable in `psis`.
pub fn independence_rank(map: &PiecewiseMap, psis: &[ExactStep], spec: &SeriesSpec) -> Result<IndependenceReport> {
    let hs = psis
        .iter()
        .map(|p| h_series(map, p, spec).map(|h| h.sum))
        .collect::<Result<Vec<_>>>()?;
    let d = hs.len();
    let gram = DMatrix::<C64>::from_fn(d, d, |i, j| complex_to_f64(&hs[i].inner_product(&hs[j])));
    let mut sv: Vec<f64> = gram.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let top = sv.first().copied().unwrap_or(0.0);
    let rank = sv.iter().filter(|s| **s > RANK_TOL * top).count();
    Ok(IndependenceReport {
        d,
        rank,
        singular_values: sv,
        tolerance: RANK_TOL,
    })
}
