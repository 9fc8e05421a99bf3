use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_maps::{theta_infinity, PiecewiseMap};
use crate::registry::Registry;
use crate::transfer_operator::weighted_transfer_matrix;

/// A way of computing `exp P_top(-beta log |DT|)`.
pub trait PressureMethod: Send + Sync {
    fn name(&self) -> &'static str;
    /// Returns the estimate and the depth used, if any.
    fn exp_pressure(&self, map: &PiecewiseMap, beta: f64, k_max: usize) -> Result<(f64, Option<usize>)>;
}

/// Spectral radius of the weighted transition matrix (piecewise-linear Markov maps).
pub struct WeightedMatrixMethod;

/// Fekete limit `min_k Theta^k(beta)^{1/k}` over `k <= k_max`.
pub struct ThetaLimitMethod;

impl PressureMethod for WeightedMatrixMethod {
    fn name(&self) -> &'static str {
        "weighted_matrix"
    }

    fn exp_pressure(&self, map: &PiecewiseMap, beta: f64, _k_max: usize) -> Result<(f64, Option<usize>)> {
        Ok((weighted_transfer_matrix(map, beta)?.spectral_radius()?, None))
    }
}

impl PressureMethod for ThetaLimitMethod {
    fn name(&self) -> &'static str {
        "theta_limit"
    }

    fn exp_pressure(&self, map: &PiecewiseMap, beta: f64, k_max: usize) -> Result<(f64, Option<usize>)> {
        if k_max == 0 {
            return Err(Error::Validation("theta_limit needs k_max >= 1".into()));
        }
        Ok((theta_infinity(map, beta, k_max)?.fekete_estimate, Some(k_max)))
    }
}

pub fn pressure_registry() -> Registry<dyn PressureMethod> {
    let mut reg: Registry<dyn PressureMethod> = Registry::new("pressure method");
    reg.register("weighted_matrix", |_| Ok(Arc::new(WeightedMatrixMethod) as Arc<dyn PressureMethod>));
    reg.register("theta_limit", |_| Ok(Arc::new(ThetaLimitMethod) as Arc<dyn PressureMethod>));
    reg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureReport {
    pub beta: f64,
    /// `exp P_top(-beta log |DT|)`.
    pub exp_pressure: f64,
    pub method: String,
    pub k_max: Option<usize>,
}

impl PressureReport {
    /// `P_top(-beta log |DT|)` itself.
    pub fn pressure(&self) -> f64 {
        self.exp_pressure.ln()
    }
}

/// The method used when none is named: the matrix for piecewise-linear Markov
/// maps, the Theta limit otherwise.
pub fn default_method(map: &PiecewiseMap) -> &'static str {
    if map.is_linear() && map.markov {
        "weighted_matrix"
    } else {
        "theta_limit"
    }
}

pub fn pressure(map: &PiecewiseMap, beta: f64, method: &str, k_max: usize) -> Result<PressureReport> {
    let m = pressure_registry().resolve(method)?;
    pressure_with(map, beta, m.as_ref(), k_max)
}

pub fn pressure_with(map: &PiecewiseMap, beta: f64, method: &dyn PressureMethod, k_max: usize) -> Result<PressureReport> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be finite and nonnegative, got {beta}")));
    }
    let (exp_pressure, k_used) = method.exp_pressure(map, beta, k_max)?;
    if !(exp_pressure > 0.0 && exp_pressure.is_finite()) {
        return Err(Error::Numeric(format!(
            "{} returned a non-positive pressure exponential {exp_pressure}",
            method.name()
        )));
    }
    Ok(PressureReport {
        beta,
        exp_pressure,
        method: method.name().to_string(),
        k_max: k_used,
    })
}
