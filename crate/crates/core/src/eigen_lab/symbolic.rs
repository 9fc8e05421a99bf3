//! Functions of the itinerary on full-branch piecewise-linear maps.
//!
//! Under Lebesgue measure the branch symbols `w_l(x)` (branch of `T^l x`) of
//! a full-branch linear map are independent with `P(w_l = i) = 1/|slope_i|`.
//! An observable constant on the branch domains is a function `g(w_0)`, its
//! pullback by `T^l` is `g(w_l)`, and the transfer operator sends `g(w_l)`
//! to `g(w_{l-1})` and `g(w_0)` to the constant `E g`.

use std::collections::BTreeMap;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{complex_to_f64, ComplexRational, Rational};
use crate::observables::ExactStep;

/// Largest number of itineraries enumerated by [`SymbolicFunction::l1_norm`].
pub const ENUMERATION_CAP: usize = 1 << 22;

/// `c + sum_l g_l(w_l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicFunction {
    probs: Vec<Rational>,
    constant: ComplexRational,
    terms: BTreeMap<usize, Vec<ComplexRational>>,
}

fn czero() -> ComplexRational {
    Complex::new(Rational::zero(), Rational::zero())
}

impl SymbolicFunction {
    /// Branch probabilities `1/|slope_i|`; the map must be linear, full-branch
    /// and Lebesgue-invariant.
    pub fn probabilities(map: &PiecewiseMap) -> Result<Vec<Rational>> {
        let branches = map.linear_branches()?;
        if !map.full_branch {
            return Err(Error::Unsupported("the symbolic engine needs every branch to be onto".into()));
        }
        let probs: Vec<Rational> = branches.iter().map(|b| b.inverse_derivative()).collect();
        let total = probs.iter().fold(Rational::zero(), |a, p| a + p);
        if total != Rational::from_integer(1.into()) {
            return Err(Error::Unsupported("the symbolic engine needs Lebesgue invariance".into()));
        }
        Ok(probs)
    }

    /// `psi` as `g(w_0)`; fails unless `psi` is constant on every branch domain.
    pub fn from_step(map: &PiecewiseMap, psi: &ExactStep) -> Result<Self> {
        let probs = Self::probabilities(map)?;
        let branches = map.linear_branches()?;
        let mut g = Vec::with_capacity(branches.len());
        for b in branches {
            let vals = crate::function_norms::values_on(psi, &b.domain.lo, &b.domain.hi);
            if vals.windows(2).any(|w| w[0] != w[1]) {
                return Err(Error::Unsupported(
                    "the symbolic engine needs an observable constant on each branch domain".into(),
                ));
            }
            g.push(vals[0].clone());
        }
        let mut terms = BTreeMap::new();
        terms.insert(0, g);
        Ok(SymbolicFunction {
            probs,
            constant: czero(),
            terms,
        }
        .canonical())
    }

    pub fn zero_like(&self) -> Self {
        SymbolicFunction {
            probs: self.probs.clone(),
            constant: czero(),
            terms: BTreeMap::new(),
        }
    }

    fn mean(&self, g: &[ComplexRational]) -> ComplexRational {
        g.iter()
            .zip(&self.probs)
            .fold(czero(), |acc, (v, p)| acc + v.clone() * p.clone())
    }

    /// Centres every term so that `E g_l = 0`; in this form equal functions
    /// have equal representations.
    pub fn canonical(mut self) -> Self {
        let terms = std::mem::take(&mut self.terms);
        for (l, mut g) in terms {
            let m = self.mean(&g);
            for v in g.iter_mut() {
                *v = v.clone() - m.clone();
            }
            self.constant = self.constant.clone() + m;
            if g.iter().any(|v| !v.is_zero()) {
                self.terms.insert(l, g);
            }
        }
        self
    }

    /// `f o T^m`.
    pub fn compose_power(&self, m: usize) -> Self {
        SymbolicFunction {
            probs: self.probs.clone(),
            constant: self.constant.clone(),
            terms: self.terms.iter().map(|(l, g)| (l + m, g.clone())).collect(),
        }
    }

    /// `L^m f`.
    pub fn transfer_power(&self, m: usize) -> Self {
        let mut out = self.zero_like();
        out.constant = self.constant.clone();
        for (l, g) in &self.terms {
            if *l >= m {
                out.terms.insert(l - m, g.clone());
            } else {
                out.constant = out.constant.clone() + self.mean(g);
            }
        }
        out.canonical()
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        SymbolicFunction {
            probs: self.probs.clone(),
            constant: self.constant.clone() * c.clone(),
            terms: self
                .terms
                .iter()
                .map(|(l, g)| (*l, g.iter().map(|v| v.clone() * c.clone()).collect()))
                .collect(),
        }
        .canonical()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.constant = out.constant.clone() + other.constant.clone();
        for (l, g) in &other.terms {
            let slot = out.terms.entry(*l).or_insert_with(|| vec![czero(); g.len()]);
            for (a, b) in slot.iter_mut().zip(g) {
                *a = a.clone() + b.clone();
            }
        }
        out.canonical()
    }

    pub fn sub(&self, other: &Self) -> Self {
        let minus = Complex::new(Rational::from_integer((-1).into()), Rational::zero());
        self.add(&other.scale(&minus))
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.terms.is_empty()
    }

    /// Offsets with a nonzero centred term.
    pub fn active_offsets(&self) -> Vec<usize> {
        self.terms.keys().copied().collect()
    }

    /// `E |f|`, by enumerating the symbols at the active offsets.
    pub fn l1_norm(&self) -> Result<f64> {
        let k = self.probs.len();
        let active: Vec<&Vec<ComplexRational>> = self.terms.values().collect();
        let count = (k as u128).checked_pow(active.len() as u32);
        match count {
            Some(c) if c <= ENUMERATION_CAP as u128 => {}
            _ => {
                return Err(Error::Resource(format!(
                    "L1 norm needs {k}^{} itineraries, above the cap of {ENUMERATION_CAP}",
                    active.len()
                )))
            }
        }
        let probs: Vec<f64> = self.probs.iter().map(crate::numeric::rational_to_f64).collect();
        let mut total = 0.0;
        let mut idx = vec![0usize; active.len()];
        loop {
            let mut v = self.constant.clone();
            let mut p = 1.0;
            for (g, &i) in active.iter().zip(&idx) {
                v = v + g[i].clone();
                p *= probs[i];
            }
            total += p * complex_to_f64(&v).norm();
            // odometer increment
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return Ok(total);
                }
                idx[pos] += 1;
                if idx[pos] < k {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }
}
