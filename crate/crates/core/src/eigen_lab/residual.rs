use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::series::{h_series, SeriesSpec};
use super::symbolic::SymbolicFunction;
use crate::error::{Error, Result};
use crate::interval_maps::{PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::numeric::{ComplexRational, Rational};
use crate::observables::{check_iterate_cap, pullback, ExactStep};
use crate::registry::Registry;
use crate::transfer_operator::apply_exact_power;

/// Result of checking `L^n sum_N = z^n sum_{N-1} + L^n psi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResidual {
    pub engine: String,
    pub spec: SeriesSpec,
    /// The shift identity holds exactly.
    pub exact_shift_ok: bool,
    /// `|L^n sum_N - z^n sum_N - L^n psi|_1`.
    pub residual_l1: f64,
    /// `|z|^{(N+1)n} |psi|_1`, the norm of the dropped term.
    pub dropped_term_l1: f64,
    pub tail_bound: f64,
}

impl EigenResidual {
    /// `residual_l1 <= dropped_term_l1`, up to rounding of the two norms.
    pub fn bound_ok(&self) -> bool {
        self.residual_l1 <= self.dropped_term_l1 * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }
}

/// Result of checking `-z^{-n} psi = sum o T^n - z^{-n} sum` up to truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyResidual {
    pub engine: String,
    pub spec: SeriesSpec,
    /// `|(-z^{-n} psi) - (sum o T^n - z^{-n} sum)|_1`.
    pub residual_l1: f64,
    /// `|z|^{Nn} |psi|_1`.
    pub dropped_term_l1: f64,
    /// `|z|^{Nn} |psi|_1 (1 + |z|^{-n})`.
    pub bound: f64,
}

/// A way of evaluating the eigen-shift and cohomology residuals exactly.
pub trait ResidualEngine: Send + Sync {
    fn name(&self) -> &'static str;
    /// `Ok(())` when the engine can handle this input.
    fn supports(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<()>;
    fn eigen_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<EigenResidual>;
    fn cohomology_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<CohomologyResidual>;
}

fn dropped(spec: &SeriesSpec, psi: &ExactStep, power: usize) -> f64 {
    spec.z_f64().norm().powi(power as i32) * psi.l1_norm()
}

fn z_inverse_n(spec: &SeriesSpec) -> Result<ComplexRational> {
    let zn = spec.zn();
    if zn.is_zero() {
        return Err(Error::Domain("the cohomological equation needs z != 0".into()));
    }
    Ok(Complex::new(Rational::one(), Rational::zero()) / zn)
}

fn cohomology_report(engine: &str, spec: &SeriesSpec, psi: &ExactStep, residual_l1: f64) -> CohomologyResidual {
    let d = dropped(spec, psi, spec.big_n * spec.n);
    CohomologyResidual {
        engine: engine.to_string(),
        spec: spec.clone(),
        residual_l1,
        dropped_term_l1: d,
        bound: d * (1.0 + 1.0 / spec.abs_zn()),
    }
}

/// Materializes the series as exact step functions; needs `k^{(N+1)n}`
/// within the cylinder cap and a piecewise-linear map.
pub struct StepEngine;

impl ResidualEngine for StepEngine {
    fn name(&self) -> &'static str {
        "step"
    }

    fn supports(&self, map: &PiecewiseMap, _psi: &ExactStep, spec: &SeriesSpec) -> Result<()> {
        map.linear_branches()?;
        check_iterate_cap(map, spec.depth(), DEFAULT_CYLINDER_CAP)
    }

    fn eigen_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<EigenResidual> {
        map.linear_branches()?;
        let h = h_series(map, psi, spec)?;
        let zn = Complex::new(spec.zn().re, spec.zn().im);
        let lhs = apply_exact_power(map, &h.sum, spec.n)?;
        let lpsi = apply_exact_power(map, psi, spec.n)?;
        let shorter = h.sum.sub(&h.terms[spec.big_n]);
        let rhs = shorter.scale(&zn).add(&lpsi);
        let exact_shift_ok = lhs.sub(&rhs).is_zero();
        let residual_l1 = lhs.sub(&h.sum.scale(&zn)).sub(&lpsi).l1_norm();
        Ok(EigenResidual {
            engine: self.name().into(),
            spec: spec.clone(),
            exact_shift_ok,
            residual_l1,
            dropped_term_l1: dropped(spec, psi, spec.depth()),
            tail_bound: h.tail_bound,
        })
    }

    fn cohomology_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<CohomologyResidual> {
        let zinv = z_inverse_n(spec)?;
        check_iterate_cap(map, spec.depth(), DEFAULT_CYLINDER_CAP)?;
        let h = h_series(map, psi, spec)?;
        let shifted = pullback(map, &h.sum, spec.n)?;
        let target = psi.scale(&-zinv.clone());
        let diff = target.sub(&shifted.sub(&h.sum.scale(&zinv)));
        Ok(cohomology_report(self.name(), spec, psi, diff.l1_norm()))
    }
}

/// Works on itineraries: full-branch linear maps with `psi` constant on
/// each branch domain. Cost grows with `N`, not with `k^{Nn}`.
pub struct SymbolicEngine;

impl SymbolicEngine {
    fn series(f: &SymbolicFunction, spec: &SeriesSpec) -> (SymbolicFunction, SymbolicFunction) {
        let zn = spec.zn();
        let mut sum = f.zero_like();
        let mut top = f.zero_like();
        let mut coeff = Complex::new(Rational::one(), Rational::zero());
        for l in 0..=spec.big_n {
            if l > 0 {
                coeff = coeff * zn.clone();
            }
            top = f.compose_power(l * spec.n).scale(&coeff);
            sum = sum.add(&top);
        }
        (sum, top)
    }
}

impl ResidualEngine for SymbolicEngine {
    fn name(&self) -> &'static str {
        "symbolic"
    }

    fn supports(&self, map: &PiecewiseMap, psi: &ExactStep, _spec: &SeriesSpec) -> Result<()> {
        SymbolicFunction::from_step(map, psi).map(|_| ())
    }

    fn eigen_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<EigenResidual> {
        let f = SymbolicFunction::from_step(map, psi)?;
        let (sum, top) = Self::series(&f, spec);
        let zn = spec.zn();
        let lhs = sum.transfer_power(spec.n);
        let lpsi = f.transfer_power(spec.n);
        let rhs = sum.sub(&top).scale(&zn).add(&lpsi);
        let exact_shift_ok = lhs.sub(&rhs).is_zero();
        let residual_l1 = lhs.sub(&sum.scale(&zn)).sub(&lpsi).l1_norm()?;
        Ok(EigenResidual {
            engine: self.name().into(),
            spec: spec.clone(),
            exact_shift_ok,
            residual_l1,
            dropped_term_l1: dropped(spec, psi, spec.depth()),
            tail_bound: spec.tail_bound(psi.sup_norm()),
        })
    }

    fn cohomology_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<CohomologyResidual> {
        let zinv = z_inverse_n(spec)?;
        let f = SymbolicFunction::from_step(map, psi)?;
        let (sum, _) = Self::series(&f, spec);
        let minus = Complex::new(-Rational::one(), Rational::zero());
        let target = f.scale(&(zinv.clone() * minus));
        let diff = target.sub(&sum.compose_power(spec.n).sub(&sum.scale(&zinv)));
        Ok(cohomology_report(self.name(), spec, psi, diff.l1_norm()?))
    }
}

/// Symbolic when it applies, step functions otherwise.
pub struct AutoEngine;

impl AutoEngine {
    fn pick(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<&'static dyn ResidualEngine> {
        if SymbolicEngine.supports(map, psi, spec).is_ok() {
            return Ok(&SymbolicEngine);
        }
        StepEngine.supports(map, psi, spec)?;
        Ok(&StepEngine)
    }
}

impl ResidualEngine for AutoEngine {
    fn name(&self) -> &'static str {
        "auto"
    }

    fn supports(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<()> {
        self.pick(map, psi, spec).map(|_| ())
    }

    fn eigen_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<EigenResidual> {
        self.pick(map, psi, spec)?.eigen_residual(map, psi, spec)
    }

    fn cohomology_residual(&self, map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec) -> Result<CohomologyResidual> {
        self.pick(map, psi, spec)?.cohomology_residual(map, psi, spec)
    }
}

pub fn residual_engine_registry() -> Registry<dyn ResidualEngine> {
    let mut reg: Registry<dyn ResidualEngine> = Registry::new("residual engine");
    reg.register("step", |_| Ok(Arc::new(StepEngine) as Arc<dyn ResidualEngine>));
    reg.register("symbolic", |_| Ok(Arc::new(SymbolicEngine) as Arc<dyn ResidualEngine>));
    reg.register("auto", |_| Ok(Arc::new(AutoEngine) as Arc<dyn ResidualEngine>));
    reg
}

/// `eigen_residual` with the engine picked by name.
pub fn eigen_residual(map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec, engine: &str) -> Result<EigenResidual> {
    residual_engine_registry().resolve(engine)?.eigen_residual(map, psi, spec)
}

pub fn cohomology_residual(
    map: &PiecewiseMap,
    psi: &ExactStep,
    spec: &SeriesSpec,
    engine: &str,
) -> Result<CohomologyResidual> {
    residual_engine_registry().resolve(engine)?.cohomology_residual(map, psi, spec)
}
