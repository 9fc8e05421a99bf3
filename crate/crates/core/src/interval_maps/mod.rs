//! Piecewise expanding maps of `[0, 1]`: evaluation, inverse branches,
//! monotonicity partitions and the growth sums `Theta^k(beta)`.

mod definition;
mod partition;
mod theta;
mod weights;

pub use definition::{BranchDefinition, MapDefinition};
pub use partition::{monotonicity_partition, monotonicity_partition_capped, partition_levels, Cylinder};
pub use theta::{theta_infinity, theta_sum, theta_table, ThetaReport};
pub use weights::{coefficient_sum, WeightFunction, WeightKind};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{format_rational, rational_to_f64, Interval, Rational, Real};

/// Default cap on the number of cylinders any single partition may hold.
pub const DEFAULT_CYLINDER_CAP: usize = 1_000_000;

/// Bisection tolerance for inverting smooth branches.
pub const INVERSION_TOL: f64 = 1e-12;

/// Affine branch `x -> slope * x + offset` on a half-open domain.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBranch {
    pub domain: Interval,
    pub slope: Rational,
    pub offset: Rational,
    pub image: Interval,
}

impl LinearBranch {
    pub fn new(domain: Interval, slope: Rational, offset: Rational) -> Result<Self> {
        if slope.abs() <= Rational::one() {
            return Err(Error::Validation(format!(
                "branch on {domain} has slope {} with |slope| <= 1",
                format_rational(&slope)
            )));
        }
        let a = &slope * &domain.lo + &offset;
        let b = &slope * &domain.hi + &offset;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let image = Interval::new(lo, hi).map_err(|e| {
            Error::Validation(format!("branch on {domain} maps outside [0,1]: {e}"))
        })?;
        Ok(LinearBranch {
            domain,
            slope,
            offset,
            image,
        })
    }

    pub fn increasing(&self) -> bool {
        self.slope.is_positive()
    }

    pub fn apply<R: Real>(&self, x: &R) -> R {
        R::from_rational(&self.slope) * x.clone() + R::from_rational(&self.offset)
    }

    pub fn inverse<R: Real>(&self, y: &R) -> R {
        (y.clone() - R::from_rational(&self.offset)) / R::from_rational(&self.slope)
    }

    /// `1 / |slope|`, the constant derivative of the inverse branch.
    pub fn inverse_derivative(&self) -> Rational {
        Rational::one() / self.slope.abs()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapVariant {
    LinearMarkov {
        branches: Vec<LinearBranch>,
    },
    /// Full increasing branches with inverse branches
    /// `s_i(x) = a_i + int_0^x p_i`.
    SmoothFullBranch {
        weights: Vec<WeightFunction>,
        /// `a_i`, with a trailing entry equal to the total length.
        starts: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMap {
    pub variant: MapVariant,
    pub k: usize,
    /// Hoelder exponent of the branch derivatives; `None` means smooth.
    pub smoothness: Option<f64>,
    pub markov: bool,
    pub full_branch: bool,
    pub name: Option<String>,
}

impl PiecewiseMap {
    /// Builds a piecewise-linear map. Branch domains must tile `[0, 1)`.
    pub fn linear(branches: Vec<LinearBranch>) -> Result<Self> {
        if branches.is_empty() {
            return Err(Error::Validation("map needs at least one branch".into()));
        }
        let mut branches = branches;
        branches.sort_by(|a, b| a.domain.lo.cmp(&b.domain.lo));
        let mut cursor = Rational::zero();
        for b in &branches {
            if b.domain.lo != cursor {
                return Err(Error::Validation(format!(
                    "branch domains must tile [0,1): gap or overlap at {}",
                    format_rational(&cursor)
                )));
            }
            cursor = b.domain.hi.clone();
        }
        if !cursor.is_one() {
            return Err(Error::Validation("branch domains do not reach 1".into()));
        }
        let endpoints: Vec<&Rational> = branches
            .iter()
            .map(|b| &b.domain.lo)
            .chain(std::iter::once(&cursor))
            .collect();
        let markov = branches
            .iter()
            .all(|b| endpoints.contains(&&b.image.lo) && endpoints.contains(&&b.image.hi));
        let full_branch = branches.iter().all(|b| b.image.lo.is_zero() && b.image.hi.is_one());
        Ok(PiecewiseMap {
            k: branches.len(),
            variant: MapVariant::LinearMarkov { branches },
            smoothness: None,
            markov,
            full_branch,
            name: None,
        })
    }

    /// Uniform full-branch map `x -> kappa x mod 1`.
    pub fn uniform(kappa: usize) -> Self {
        let kap = Rational::from_integer(kappa.into());
        let branches = (0..kappa)
            .map(|i| {
                let lo = Rational::new(i.into(), kappa.into());
                let hi = Rational::new((i + 1).into(), kappa.into());
                LinearBranch::new(Interval::new(lo, hi).unwrap(), kap.clone(), -Rational::from_integer(i.into()))
                    .unwrap()
            })
            .collect();
        PiecewiseMap::linear(branches).unwrap()
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn with_smoothness(mut self, beta: Option<f64>) -> Self {
        self.smoothness = beta;
        self
    }

    pub fn branch_count(&self) -> usize {
        self.k
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.variant, MapVariant::LinearMarkov { .. })
    }

    pub fn linear_branches(&self) -> Result<&[LinearBranch]> {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => Ok(branches),
            MapVariant::SmoothFullBranch { .. } => Err(Error::Unsupported(
                "operation needs a piecewise-linear map; use the discretized path".into(),
            )),
        }
    }

    pub fn weights(&self) -> Option<&[WeightFunction]> {
        match &self.variant {
            MapVariant::SmoothFullBranch { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn increasing(&self, i: usize) -> bool {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => branches[i].increasing(),
            MapVariant::SmoothFullBranch { .. } => true,
        }
    }

    pub fn domain<R: Real>(&self, i: usize) -> (R, R) {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => branches[i].domain.bounds(),
            MapVariant::SmoothFullBranch { starts, .. } => (snap_start::<R>(starts, i), snap_start::<R>(starts, i + 1)),
        }
    }

    /// Image of branch `i`, sorted.
    pub fn image<R: Real>(&self, i: usize) -> (R, R) {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => branches[i].image.bounds(),
            MapVariant::SmoothFullBranch { .. } => (R::zero(), R::one()),
        }
    }

    /// Inverse branch `s_i(y)`; `y` must lie in the image of branch `i`.
    pub fn inverse_branch<R: Real>(&self, i: usize, y: &R) -> R {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => branches[i].inverse(y),
            MapVariant::SmoothFullBranch { .. } => {
                let yf = y.to_f64();
                // keep shared endpoints identical across branches
                if yf <= 0.0 {
                    return self.domain::<R>(i).0;
                }
                if yf >= 1.0 {
                    return self.domain::<R>(i).1;
                }
                R::from_f64_snapped(self.smooth_inverse(i, yf))
            }
        }
    }

    pub(crate) fn smooth_inverse(&self, i: usize, y: f64) -> f64 {
        match &self.variant {
            MapVariant::SmoothFullBranch { weights, starts } => starts[i] + weights[i].primitive(y),
            MapVariant::LinearMarkov { branches } => branches[i].inverse(&y),
        }
    }

    /// `|s_i'(y)|`, i.e. `1 / |DT|` at the preimage of `y` under branch `i`.
    pub fn inverse_derivative(&self, i: usize, y: f64) -> f64 {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => rational_to_f64(&branches[i].inverse_derivative()),
            MapVariant::SmoothFullBranch { weights, .. } => weights[i].eval(y),
        }
    }

    /// Index of the half-open branch domain containing `x`.
    pub fn branch_of(&self, x: f64) -> Result<usize> {
        if !(0.0..1.0).contains(&x) {
            return Err(Error::Domain(format!("x = {x} is outside [0, 1)")));
        }
        let k = self.k;
        let idx = (0..k)
            .rev()
            .find(|&i| self.domain::<f64>(i).0 <= x)
            .unwrap_or(0);
        Ok(idx)
    }

    /// `(T x, DT x, branch)` with the right-continuous convention.
    pub fn evaluate(&self, x: f64) -> Result<(f64, f64, usize)> {
        let i = self.branch_of(x)?;
        match &self.variant {
            MapVariant::LinearMarkov { branches } => {
                let b = &branches[i];
                Ok((b.apply(&x), rational_to_f64(&b.slope), i))
            }
            MapVariant::SmoothFullBranch { weights, .. } => {
                let y = self.invert_smooth(i, x);
                Ok((y, 1.0 / weights[i].eval(y), i))
            }
        }
    }

    /// Exact evaluation on a piecewise-linear map.
    pub fn evaluate_exact(&self, x: &Rational) -> Result<(Rational, Rational, usize)> {
        let branches = self.linear_branches()?;
        if x.is_negative() || x >= &Rational::one() {
            return Err(Error::Domain(format!("x = {} is outside [0, 1)", format_rational(x))));
        }
        let i = branches.iter().rposition(|b| &b.domain.lo <= x).unwrap_or(0);
        let b = &branches[i];
        Ok((b.apply(x), b.slope.clone(), i))
    }

    /// Solves `s_i(y) = x` by bisection.
    fn invert_smooth(&self, i: usize, x: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > INVERSION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.smooth_inverse(i, mid) <= x {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Maximal deviation of `sum_i |s_i'|` from 1 over the image; zero means
    /// Lebesgue measure is invariant.
    pub fn lebesgue_defect(&self) -> f64 {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => {
                let mut cuts: Vec<Rational> = vec![Rational::zero(), Rational::one()];
                for b in branches {
                    cuts.push(b.image.lo.clone());
                    cuts.push(b.image.hi.clone());
                }
                cuts.sort();
                cuts.dedup();
                let two = Rational::from_integer(2.into());
                cuts.windows(2)
                    .map(|w| {
                        let mid = (&w[0] + &w[1]) / &two;
                        let total: Rational = branches
                            .iter()
                            .filter(|b| b.image.contains(&mid))
                            .map(|b| b.inverse_derivative())
                            .sum();
                        rational_to_f64(&(total - Rational::one()).abs())
                    })
                    .fold(0.0, f64::max)
            }
            MapVariant::SmoothFullBranch { weights, .. } => {
                let n = 1024;
                (0..=n)
                    .map(|j| {
                        let x = j as f64 / n as f64;
                        (weights.iter().map(|w| w.eval(x)).sum::<f64>() - 1.0).abs()
                    })
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Largest inverse-branch derivative, `sup 1/|DT|`.
    pub fn max_inverse_derivative(&self) -> f64 {
        match &self.variant {
            MapVariant::LinearMarkov { branches } => branches
                .iter()
                .map(|b| rational_to_f64(&b.inverse_derivative()))
                .fold(0.0, f64::max),
            MapVariant::SmoothFullBranch { weights, .. } => {
                weights.iter().map(|w| w.upper_bound()).fold(0.0, f64::max)
            }
        }
    }
}

fn snap_start<R: Real>(starts: &[f64], i: usize) -> R {
    if i == 0 {
        R::zero()
    } else if i + 1 == starts.len() {
        R::one()
    } else {
        R::from_f64_snapped(starts[i])
    }
}

/// Options for [`build_map_from_weights`].
#[derive(Debug, Clone, Copy)]
pub struct WeightOptions {
    /// Rescale the weights when their sum is a constant other than 1.
    pub renormalize: bool,
    pub tolerance: f64,
}

impl Default for WeightOptions {
    fn default() -> Self {
        WeightOptions {
            renormalize: false,
            tolerance: 1e-12,
        }
    }
}

/// Smooth full-branch map whose inverse branches have derivatives `p_i`.
/// Requires `p_i > 0` and `sum_i p_i == 1`, so the transfer operator of the
/// result fixes constants.
pub fn build_map_from_weights(weights: Vec<WeightFunction>, options: WeightOptions) -> Result<PiecewiseMap> {
    if weights.len() < 2 {
        return Err(Error::Validation("an expanding full-branch map needs at least two weights".into()));
    }
    for (i, w) in weights.iter().enumerate() {
        w.validate_shape()?;
        let lb = w.lower_bound();
        if lb <= 0.0 {
            return Err(Error::Validation(format!(
                "weight {i} is not strictly positive (certified lower bound {lb})"
            )));
        }
    }
    let sum = coefficient_sum(&weights);
    let oscillating = sum[1..].iter().map(|c| c.abs()).sum::<f64>();
    let mut weights = weights;
    if (sum[0] - 1.0).abs() > options.tolerance || oscillating > options.tolerance {
        if options.renormalize && oscillating <= options.tolerance && sum[0] > 0.0 {
            weights = weights.iter().map(|w| w.scaled(1.0 / sum[0])).collect();
        } else {
            return Err(Error::Validation(format!(
                "weights sum to {:?} instead of 1 (max defect {})",
                sum,
                (sum[0] - 1.0).abs() + oscillating
            )));
        }
    }
    Ok(smooth_unchecked(weights))
}

/// Builds the smooth map without checking normalization. Used to diagnose
/// weight families that fail the invariance check.
pub fn smooth_unchecked(weights: Vec<WeightFunction>) -> PiecewiseMap {
    let mut starts = Vec::with_capacity(weights.len() + 1);
    let mut acc = 0.0;
    starts.push(0.0);
    for w in &weights {
        acc += w.mean();
        starts.push(acc);
    }
    PiecewiseMap {
        k: weights.len(),
        variant: MapVariant::SmoothFullBranch { weights, starts },
        smoothness: None,
        markov: true,
        full_branch: true,
        name: None,
    }
}

/// `(ok, max_defect)` with `max_defect = sup |sum_i 1/|DT(s_i x)| - 1|`.
pub fn verify_lebesgue_invariance(map: &PiecewiseMap, tol: f64) -> (bool, f64) {
    let defect = map.lebesgue_defect();
    (defect <= tol, defect)
}
