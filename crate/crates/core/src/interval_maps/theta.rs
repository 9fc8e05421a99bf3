use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{partition_levels, Cylinder, PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::error::{Error, Result};
use crate::numeric::{rational_powf, Rational};

/// `Theta^k(beta)` for `k = 1..=k_max` and the running Fekete minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub beta: f64,
    pub per_k: Vec<(usize, f64)>,
    /// `min_{j <= k} Theta^j(beta)^{1/j}` for each recorded k.
    pub fekete_running: Vec<f64>,
    pub fekete_estimate: f64,
    pub k_max: usize,
}

impl ThetaReport {
    pub fn theta(&self, k: usize) -> Option<f64> {
        self.per_k.iter().find(|(j, _)| *j == k).map(|(_, t)| *t)
    }
}

fn level_sum(cylinders: &[Cylinder], beta: f64) -> f64 {
    if cylinders.iter().all(|c| c.exact_theta.is_some()) {
        // group equal thetas so uniform maps give count * theta^beta
        let mut groups: BTreeMap<&Rational, usize> = BTreeMap::new();
        for c in cylinders {
            *groups.entry(c.exact_theta.as_ref().unwrap()).or_default() += 1;
        }
        groups
            .into_iter()
            .map(|(t, n)| n as f64 * rational_powf(t, beta))
            .sum()
    } else {
        cylinders.iter().map(|c| c.theta.powf(beta)).sum()
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Domain(format!("beta must be finite and nonnegative, got {beta}")));
    }
    Ok(())
}

/// `Theta^k(beta) = sum_i (theta^k_i)^beta` over the level-k cylinders.
pub fn theta_sum(map: &PiecewiseMap, beta: f64, k: usize) -> Result<f64> {
    check_beta(beta)?;
    let levels = partition_levels(map, k, DEFAULT_CYLINDER_CAP)?;
    Ok(level_sum(levels.last().unwrap(), beta))
}

/// Sub-multiplicative growth rate estimate `min_k Theta^k(beta)^{1/k}`.
pub fn theta_infinity(map: &PiecewiseMap, beta: f64, k_max: usize) -> Result<ThetaReport> {
    check_beta(beta)?;
    let levels = partition_levels(map, k_max, DEFAULT_CYLINDER_CAP)?;
    let mut per_k = Vec::with_capacity(k_max);
    let mut fekete_running = Vec::with_capacity(k_max);
    let mut best = f64::INFINITY;
    for (idx, level) in levels.iter().enumerate() {
        let k = idx + 1;
        let t = level_sum(level, beta);
        best = best.min(t.powf(1.0 / k as f64));
        per_k.push((k, t));
        fekete_running.push(best);
    }
    Ok(ThetaReport {
        beta,
        per_k,
        fekete_running,
        fekete_estimate: best,
        k_max,
    })
}

/// Theta sums for several exponents sharing one partition build.
pub fn theta_table(map: &PiecewiseMap, betas: &[f64], k_max: usize) -> Result<Vec<ThetaReport>> {
    for &b in betas {
        check_beta(b)?;
    }
    let levels = partition_levels(map, k_max, DEFAULT_CYLINDER_CAP)?;
    Ok(betas
        .iter()
        .map(|&beta| {
            let mut best = f64::INFINITY;
            let mut per_k = Vec::new();
            let mut running = Vec::new();
            for (idx, level) in levels.iter().enumerate() {
                let t = level_sum(level, beta);
                best = best.min(t.powf(1.0 / (idx + 1) as f64));
                per_k.push((idx + 1, t));
                running.push(best);
            }
            ThetaReport {
                beta,
                per_k,
                fekete_running: running,
                fekete_estimate: best,
                k_max,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn doubling_sums() {
        let d2 = fixtures::d2();
        assert_eq!(theta_sum(&d2, 1.0, 3).unwrap(), 1.0);
        assert_eq!(theta_sum(&d2, 0.0, 3).unwrap(), 8.0);
        let r = theta_infinity(&d2, 0.5, 6).unwrap();
        assert!((r.fekete_estimate - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn l3_sums() {
        let l3 = fixtures::l3();
        assert_eq!(theta_sum(&l3, 1.0, 1).unwrap(), 1.0);
        let r = theta_infinity(&l3, 1.0, 5).unwrap();
        assert_eq!(r.fekete_estimate, 1.0);
        assert!(r.per_k.iter().all(|&(_, t)| t == 1.0));
        let r = theta_infinity(&l3, 0.0, 1).unwrap();
        assert_eq!(r.fekete_estimate, 3.0);
    }

    #[test]
    fn uniform_slope_closed_form() {
        for kappa in [2usize, 3, 5] {
            let map = crate::interval_maps::PiecewiseMap::uniform(kappa);
            for beta in [0.0, 0.25, 0.5, 1.0, 1.5] {
                for k in 1..=5 {
                    let t = theta_sum(&map, beta, k).unwrap();
                    let expected = (kappa as f64).powf(k as f64 * (1.0 - beta));
                    assert!((t - expected).abs() <= 1e-14 * expected, "{kappa} {beta} {k}");
                }
            }
        }
    }

    #[test]
    fn rejects_negative_beta() {
        assert!(matches!(theta_sum(&fixtures::d2(), -1.0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn smooth_theta_one_is_near_one() {
        // sum over cylinders of sup|S_w'| is at least sum |C| = 1 and stays
        // bounded by the distortion constant
        let r = theta_infinity(&fixtures::w2(), 1.0, 6).unwrap();
        for &(_, t) in &r.per_k {
            assert!((1.0..2.0).contains(&t), "{t}");
        }
    }
}
