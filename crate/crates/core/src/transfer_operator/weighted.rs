use nalgebra::DMatrix;

use super::spectrum::spectrum;
use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::rational_powf;

/// Transition matrix weighted by `(1/|slope_i|)^beta`; its spectral radius is
/// `exp P_top(-beta log|DT|)` for piecewise-linear Markov maps.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMatrix {
    pub beta: f64,
    pub entries: DMatrix<f64>,
}

pub fn weighted_transfer_matrix(map: &PiecewiseMap, beta: f64) -> Result<WeightedMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be finite and nonnegative, got {beta}")));
    }
    let branches = map
        .linear_branches()
        .map_err(|_| Error::Validation("the weighted matrix needs a piecewise-linear Markov map".into()))?;
    if !map.markov {
        return Err(Error::Validation(
            "the weighted matrix needs a Markov map: some branch image is not a union of domains".into(),
        ));
    }
    let k = branches.len();
    let entries = DMatrix::from_fn(k, k, |i, j| {
        if branches[i].image.contains_interval(&branches[j].domain) {
            rational_powf(&branches[i].inverse_derivative(), beta)
        } else {
            0.0
        }
    });
    Ok(WeightedMatrix { beta, entries })
}

impl WeightedMatrix {
    pub fn spectral_radius(&self) -> Result<f64> {
        Ok(spectrum(&self.entries)?.spectral_radius())
    }
}
