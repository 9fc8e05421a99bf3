use serde::{Deserialize, Serialize};

use super::pressure::{default_method, pressure};
use crate::error::{Error, Result};
use crate::interval_maps::{theta_infinity, verify_lebesgue_invariance, PiecewiseMap};

/// Largest `sup |sum_i 1/|DT(s_i x)| - 1|` accepted as Lebesgue invariance.
pub const INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// `1 / Theta^infinity(1 - s)` for norms with `|1_J| <= C |J|^{1-s}`.
    Main,
    /// `1/k` for piecewise-linear maps and norms bounded on indicators.
    Bb,
    /// `1/k` for smooth full-branch Markov maps with small pressure.
    New,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub ok: bool,
    pub value: Option<f64>,
}

impl HypothesisCheck {
    fn new(name: &str, ok: bool, value: Option<f64>) -> Self {
        HypothesisCheck {
            name: name.to_string(),
            ok,
            value: value.filter(|v| v.is_finite()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub s: Option<f64>,
    pub lower_bound: f64,
    pub hypothesis_checks: Vec<HypothesisCheck>,
    /// `exp P_top(-(r+1) log |DT|)`.
    pub collet_isola_upper: Option<f64>,
    /// `P_top(-(r+1) log |DT|)` without the exponential, for comparison with
    /// the hypothesis as literally stated.
    pub literal_pressure: Option<f64>,
    pub r: Option<f64>,
    pub k_max: Option<usize>,
    /// Statements about the norm supplied by the caller, kept as given.
    pub caller_assertions: Vec<String>,
    /// False as soon as one hypothesis check fails.
    pub ok: bool,
}

impl BoundReport {
    fn finish(mut self) -> Self {
        self.ok = self.hypothesis_checks.iter().all(|c| c.ok);
        self
    }

    /// Records a norm property asserted by the caller (e.g. `|1_J|_B <= C`).
    pub fn with_assertion(mut self, text: &str) -> Self {
        self.caller_assertions.push(text.to_string());
        self
    }

    pub fn check(&self, name: &str) -> Option<&HypothesisCheck> {
        self.hypothesis_checks.iter().find(|c| c.name == name)
    }
}

fn invariance_check(map: &PiecewiseMap) -> HypothesisCheck {
    let (ok, defect) = verify_lebesgue_invariance(map, INVARIANCE_TOL);
    HypothesisCheck::new("lebesgue_invariance", ok, Some(defect))
}

/// `r_ess >= 1 / Theta^infinity(1 - s)`, with `Theta^infinity` estimated by
/// the Fekete minimum up to `k_max`.
pub fn bound_main(map: &PiecewiseMap, s: f64, k_max: usize) -> Result<BoundReport> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
    }
    if k_max == 0 {
        return Err(Error::Validation("k_max must be at least 1".into()));
    }
    let theta = theta_infinity(map, 1.0 - s, k_max)?;
    let lower_bound = 1.0 / theta.fekete_estimate;
    let smooth_ok = map.smoothness.map_or(true, |beta| s < beta);
    let checks = vec![
        invariance_check(map),
        HypothesisCheck::new("s_below_smoothness", smooth_ok, map.smoothness),
        HypothesisCheck::new(
            "lower_bound_in_unit_interval",
            lower_bound > 0.0 && lower_bound <= 1.0 + 1e-12,
            Some(lower_bound),
        ),
    ];
    Ok(BoundReport {
        theorem: Theorem::Main,
        s: Some(s),
        lower_bound,
        hypothesis_checks: checks,
        collet_isola_upper: None,
        literal_pressure: None,
        r: None,
        k_max: Some(k_max),
        caller_assertions: vec![],
        ok: false,
    }
    .finish())
}

/// `r_ess >= 1/k`. Without `r` this is the piecewise-linear statement; with
/// `r` the full-branch Markov statement, whose pressure hypothesis is checked
/// in the exponentiated form `exp P_top(-(r+1) log |DT|) < 1/k`.
pub fn bound_bb_new(map: &PiecewiseMap, r: Option<f64>, k_max: usize) -> Result<BoundReport> {
    let k = map.branch_count();
    let lower_bound = 1.0 / k as f64;
    let mut checks = vec![invariance_check(map)];
    let (theorem, upper, literal) = match r {
        None => {
            checks.push(HypothesisCheck::new("linear_branches", map.is_linear(), None));
            (Theorem::Bb, None, None)
        }
        Some(r) => {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Domain(format!("r must be positive, got {r}")));
            }
            if !(map.markov && map.full_branch) {
                return Err(Error::Validation(
                    "the smooth 1/k bound needs a Markov map whose branches are all onto".into(),
                ));
            }
            checks.push(HypothesisCheck::new(
                "smoothness_r_plus_1",
                map.smoothness.map_or(true, |beta| beta >= r),
                map.smoothness,
            ));
            let p = pressure(map, r + 1.0, default_method(map), k_max)?;
            checks.push(HypothesisCheck::new(
                "collet_isola_below_inverse_k",
                p.exp_pressure < lower_bound,
                Some(p.exp_pressure),
            ));
            (Theorem::New, Some(p.exp_pressure), Some(p.pressure()))
        }
    };
    Ok(BoundReport {
        theorem,
        s: None,
        lower_bound,
        hypothesis_checks: checks,
        collet_isola_upper: upper,
        literal_pressure: literal,
        r,
        k_max: r.map(|_| k_max),
        caller_assertions: vec![],
        ok: false,
    }
    .finish())
}
