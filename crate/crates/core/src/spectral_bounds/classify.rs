use serde::{Deserialize, Serialize};

use super::bounds::{bound_main, INVARIANCE_TOL};
use crate::error::{Error, Result};
use crate::function_norms::{default_scales, homogeneity_probe, HomogeneityReport, ProbeFamily, PseudoNorm};
use crate::interval_maps::{verify_lebesgue_invariance, PiecewiseMap};

/// Default half-width of the band `|t_max| <= tol` read as Case I.
pub const CLASSIFICATION_TOL: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub family: ProbeFamily,
    pub scales: Vec<f64>,
    pub tolerance: f64,
    /// Depth for the `Theta^infinity` estimate in Case II.
    pub k_max: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            family: ProbeFamily::Indicators,
            scales: default_scales(),
            tolerance: CLASSIFICATION_TOL,
            k_max: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// `|1_P|` bounded above and below.
    I,
    /// `|1_P| ~ |P|^{1-s}` for some `s` in `(0, 1)`.
    II,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseClassification {
    pub case: Case,
    /// Fitted exponent with `|1_Q| ~ C |Q|^{-t_max}`.
    pub t_max: f64,
    pub s: Option<f64>,
    pub lower_bound: f64,
    pub scaling_constant: f64,
    pub probe: HomogeneityReport,
}

/// Reads the homogeneity exponent of `norm` on indicators and returns the
/// matching lower bound: `1/k` in Case I, `1/Theta^infinity(1 - s)` with
/// `s = 1 + t_max` in Case II.
pub fn classify_norm(map: &PiecewiseMap, norm: &dyn PseudoNorm, config: &ProbeConfig) -> Result<CaseClassification> {
    if !(map.markov && map.full_branch) {
        return Err(Error::Validation("classification needs a Markov map whose branches are all onto".into()));
    }
    let (invariant, defect) = verify_lebesgue_invariance(map, INVARIANCE_TOL);
    if !invariant {
        return Err(Error::Validation(format!(
            "classification needs a Lebesgue-invariant map (defect {defect:e})"
        )));
    }
    let tol = config.tolerance;
    let probe = homogeneity_probe(norm, config.family, &config.scales)?;
    let t = probe.t;
    if t > tol {
        return Err(Error::Classification(format!(
            "{}: fitted t_max = {t} is positive; a norm on which L has a spectral gap must have t_max <= 0",
            probe.norm_id
        )));
    }
    if t <= -1.0 + tol {
        return Err(Error::Classification(format!(
            "{}: fitted t_max = {t} reaches the boundary -1; embedded in L1 with a spectral gap forces t_max > -1",
            probe.norm_id
        )));
    }
    let (case, s, lower_bound) = if t.abs() <= tol {
        (Case::I, None, 1.0 / map.branch_count() as f64)
    } else {
        let s = 1.0 + t;
        (Case::II, Some(s), bound_main(map, s, config.k_max)?.lower_bound)
    };
    Ok(CaseClassification {
        case,
        t_max: t,
        s,
        lower_bound,
        scaling_constant: probe.constant,
        probe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::function_norms::norm_registry;

    fn classify(name: &str) -> Result<CaseClassification> {
        let norm = norm_registry().resolve(name).unwrap();
        classify_norm(&fixtures::d2(), norm.as_ref(), &ProbeConfig::default())
    }

    #[test]
    fn known_norms() {
        let c = classify("bv").unwrap();
        assert_eq!(c.case, Case::I);
        assert_eq!(c.lower_bound, 0.5);
        assert_eq!(classify("sup").unwrap().case, Case::I);
        for s in [0.25, 0.5, 0.75] {
            let c = classify(&format!("besov:{s}")).unwrap();
            assert_eq!(c.case, Case::II);
            assert!((c.s.unwrap() - s).abs() < 0.02);
            assert!((c.lower_bound - 2f64.powf(-s)).abs() < 1e-3);
            assert!(c.t_max > -1.0 && c.t_max <= 0.0);
        }
        let c = classify("l2").unwrap();
        assert!((c.s.unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn l1_hits_the_boundary() {
        match classify("l1") {
            Err(Error::Classification(msg)) => assert!(msg.contains("boundary")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn needs_full_branch_markov() {
        let norm = norm_registry().resolve("bv").unwrap();
        assert!(classify_norm(&fixtures::markov3(), norm.as_ref(), &ProbeConfig::default()).is_err());
    }
}
