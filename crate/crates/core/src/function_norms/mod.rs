//! Norms and pseudo-norms on step functions: p-variation, atomic Besov
//! `B^s_{1,1}` upper bounds, bounded variation, and homogeneity probes.

mod besov;
mod homogeneity;
mod pvariation;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use besov::{
    atomic_cost, besov_atomic_upper, besov_dyadic_upper, dyadic_constant, Atom, AtomicRepresentation,
    DyadicReport, DyadicSource, MAX_DYADIC_DEPTH,
};
pub use homogeneity::{default_scales, homogeneity_probe, HomogeneityReport, ProbeFamily};
pub use pvariation::{
    p_variation, p_variation_pow, p_variation_pow_exact, p_variation_sampled, sequence_variation_pow,
    sequence_variation_pow_exact, values_on,
};

use crate::error::{Error, Result};
use crate::numeric::{Interval, Real};
use crate::observables::{ExactStep, FloatStep, StepFunction};
use crate::registry::Registry;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormParameters {
    pub s: f64,
    pub p: f64,
}

impl NormParameters {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("s must lie in (0, 1), got {s}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p must be a finite number >= 1, got {p}")));
        }
        Ok(NormParameters { s, p })
    }

    /// Whether the dyadic construction applies (`1/p > s`).
    pub fn dyadic_ok(&self) -> bool {
        self.s * self.p < 1.0
    }
}

/// `v_1(f, [0, 1]) + |f|_1`.
pub fn bv_norm<R: Real>(f: &StepFunction<R>) -> f64 {
    p_variation(f, &unit_closed(), 1.0).expect("p = 1 is valid") + f.l1_norm()
}

/// A black-box (pseudo-)norm on step functions.
pub trait PseudoNorm: Send + Sync {
    fn id(&self) -> String;
    fn norm(&self, f: &ExactStep) -> Result<f64>;
    fn norm_float(&self, f: &FloatStep) -> Result<f64>;
}

/// Implements [`PseudoNorm`] from a generic function `fn(&StepFunction<R>, param) -> Result<f64>`.
macro_rules! generic_norm {
    ($ty:ident, $body:expr) => {
        impl PseudoNorm for $ty {
            fn id(&self) -> String {
                self.name()
            }
            fn norm(&self, f: &ExactStep) -> Result<f64> {
                $body(self, f)
            }
            fn norm_float(&self, f: &FloatStep) -> Result<f64> {
                $body(self, f)
            }
        }
    };
}

pub struct SupNorm;
pub struct LpNorm(pub f64);
pub struct BvNorm;
pub struct PVariation(pub f64);
/// Cost of [`besov_atomic_upper`] at smoothness `s`.
pub struct AtomicBesov(pub f64);

impl SupNorm {
    fn name(&self) -> String {
        "sup".into()
    }
    fn eval<R: Real>(&self, f: &StepFunction<R>) -> Result<f64> {
        Ok(f.sup_norm())
    }
}

impl LpNorm {
    fn name(&self) -> String {
        match self.0 {
            p if p == 1.0 => "l1".into(),
            p if p == 2.0 => "l2".into(),
            p => format!("lp:{p}"),
        }
    }
    fn eval<R: Real>(&self, f: &StepFunction<R>) -> Result<f64> {
        f.lp_norm(self.0)
    }
}

impl BvNorm {
    fn name(&self) -> String {
        "bv".into()
    }
    fn eval<R: Real>(&self, f: &StepFunction<R>) -> Result<f64> {
        Ok(bv_norm(f))
    }
}

impl PVariation {
    fn name(&self) -> String {
        format!("pvar:{}", self.0)
    }
    fn eval<R: Real>(&self, f: &StepFunction<R>) -> Result<f64> {
        p_variation(f, &unit_closed(), self.0)
    }
}

impl AtomicBesov {
    fn name(&self) -> String {
        format!("besov:{}", self.0)
    }
    fn eval<R: Real>(&self, f: &StepFunction<R>) -> Result<f64> {
        atomic_cost(f, self.0)
    }
}

generic_norm!(SupNorm, |n: &SupNorm, f| n.eval(f));
generic_norm!(LpNorm, |n: &LpNorm, f| n.eval(f));
generic_norm!(BvNorm, |n: &BvNorm, f| n.eval(f));
generic_norm!(PVariation, |n: &PVariation, f| n.eval(f));
generic_norm!(AtomicBesov, |n: &AtomicBesov, f| n.eval(f));

fn unit_closed() -> Interval {
    let u = Interval::unit();
    Interval::with_closure(u.lo, u.hi, true, true).expect("unit interval")
}

fn required(name: &str, param: Option<f64>) -> Result<f64> {
    param.ok_or_else(|| Error::Validation(format!("norm {name:?} needs a parameter, e.g. {name}:0.5")))
}

/// Built-in norms: `sup`, `l1`, `l2`, `lp:p`, `bv`, `pvar:p`, `besov:s`.
pub fn norm_registry() -> Registry<dyn PseudoNorm> {
    let mut reg: Registry<dyn PseudoNorm> = Registry::new("norm");
    reg.register("sup", |_| Ok(Arc::new(SupNorm) as Arc<dyn PseudoNorm>));
    reg.register("l1", |_| Ok(Arc::new(LpNorm(1.0)) as Arc<dyn PseudoNorm>));
    reg.register("l2", |_| Ok(Arc::new(LpNorm(2.0)) as Arc<dyn PseudoNorm>));
    reg.register("lp", |p| {
        let p = required("lp", p)?;
        if !(p >= 1.0) {
            return Err(Error::Domain(format!("L^p needs p >= 1, got {p}")));
        }
        Ok(Arc::new(LpNorm(p)) as Arc<dyn PseudoNorm>)
    });
    reg.register("bv", |_| Ok(Arc::new(BvNorm) as Arc<dyn PseudoNorm>));
    reg.register("pvar", |p| {
        let p = required("pvar", p)?;
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!("p-variation needs p >= 1, got {p}")));
        }
        Ok(Arc::new(PVariation(p)) as Arc<dyn PseudoNorm>)
    });
    reg.register("besov", |s| {
        let s = required("besov", s)?;
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::Domain(format!("Besov smoothness must lie in (0, 1), got {s}")));
        }
        Ok(Arc::new(AtomicBesov(s)) as Arc<dyn PseudoNorm>)
    });
    reg
}
