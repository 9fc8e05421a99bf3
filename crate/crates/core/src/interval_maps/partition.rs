use num_traits::{One, Signed, Zero};

use super::{MapVariant, PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::error::{Error, Result};
use crate::numeric::{rational_to_f64, Interval, Rational, Real};

/// Samples per cylinder when estimating `sup 1/|DT^k|` on smooth maps.
pub const THETA_SAMPLES: usize = 64;

/// A maximal interval of monotonicity of `T^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cylinder {
    /// Branch indices visited by `x, Tx, ..., T^{k-1}x`.
    pub index_word: Vec<usize>,
    pub support: Interval,
    /// `sup_{support} 1/|DT^k|`.
    pub theta: f64,
    /// Exact theta on piecewise-linear maps.
    pub exact_theta: Option<Rational>,
    /// Absolute inflation added to the sampled supremum (zero when exact).
    pub theta_tolerance: f64,
}

pub fn monotonicity_partition(map: &PiecewiseMap, k: usize) -> Result<Vec<Cylinder>> {
    monotonicity_partition_capped(map, k, DEFAULT_CYLINDER_CAP)
}

pub fn monotonicity_partition_capped(map: &PiecewiseMap, k: usize, cap: usize) -> Result<Vec<Cylinder>> {
    Ok(partition_levels(map, k, cap)?.pop().expect("k >= 1 levels"))
}

/// Partitions `P^1, ..., P^{k_max}` built by successive refinement.
pub fn partition_levels(map: &PiecewiseMap, k_max: usize, cap: usize) -> Result<Vec<Vec<Cylinder>>> {
    if k_max == 0 {
        return Err(Error::Validation("partition level must be at least 1".into()));
    }
    match &map.variant {
        MapVariant::LinearMarkov { .. } => linear_levels(map, k_max, cap),
        MapVariant::SmoothFullBranch { .. } => smooth_levels(map, k_max, cap),
    }
}

fn cap_error(level: usize, cap: usize) -> Error {
    Error::Resource(format!("level-{level} partition exceeds the cylinder cap of {cap}"))
}

struct AffineCylinder {
    word: Vec<usize>,
    lo: Rational,
    hi: Rational,
    slope: Rational,
    offset: Rational,
}

impl AffineCylinder {
    fn to_cylinder(&self) -> Cylinder {
        let theta = Rational::one() / self.slope.abs();
        Cylinder {
            index_word: self.word.clone(),
            support: Interval::new(self.lo.clone(), self.hi.clone()).expect("nonempty cylinder"),
            theta: rational_to_f64(&theta),
            exact_theta: Some(theta),
            theta_tolerance: 0.0,
        }
    }
}

fn linear_levels(map: &PiecewiseMap, k_max: usize, cap: usize) -> Result<Vec<Vec<Cylinder>>> {
    let branches = map.linear_branches()?;
    if branches.len() > cap {
        return Err(cap_error(1, cap));
    }
    let mut current: Vec<AffineCylinder> = branches
        .iter()
        .enumerate()
        .map(|(i, b)| AffineCylinder {
            word: vec![i],
            lo: b.domain.lo.clone(),
            hi: b.domain.hi.clone(),
            slope: b.slope.clone(),
            offset: b.offset.clone(),
        })
        .collect();
    let mut levels = vec![current.iter().map(AffineCylinder::to_cylinder).collect::<Vec<_>>()];
    for level in 2..=k_max {
        let mut next = Vec::new();
        for c in &current {
            let a = &c.slope * &c.lo + &c.offset;
            let b = &c.slope * &c.hi + &c.offset;
            let (img_lo, img_hi) = if a < b { (a, b) } else { (b, a) };
            for (j, br) in branches.iter().enumerate() {
                let lo = if img_lo > br.domain.lo { &img_lo } else { &br.domain.lo };
                let hi = if img_hi < br.domain.hi { &img_hi } else { &br.domain.hi };
                if lo >= hi {
                    continue;
                }
                let x1 = (lo - &c.offset) / &c.slope;
                let x2 = (hi - &c.offset) / &c.slope;
                let (xlo, xhi) = if x1 < x2 { (x1, x2) } else { (x2, x1) };
                let mut word = c.word.clone();
                word.push(j);
                next.push(AffineCylinder {
                    word,
                    lo: xlo,
                    hi: xhi,
                    slope: &br.slope * &c.slope,
                    offset: &br.slope * &c.offset + &br.offset,
                });
                if next.len() > cap {
                    return Err(cap_error(level, cap));
                }
            }
        }
        next.sort_by(|a, b| a.lo.cmp(&b.lo));
        levels.push(next.iter().map(AffineCylinder::to_cylinder).collect());
        current = next;
    }
    Ok(levels)
}

/// Composition `s_{w_0} o ... o s_{w_{n-1}}` applied to `y`.
fn compose_inverse(map: &PiecewiseMap, word: &[usize], y: f64) -> f64 {
    word.iter().rev().fold(y, |acc, &i| map.smooth_inverse(i, acc))
}

/// Sampled `sup |(s_w)'|` with a Lipschitz inflation of the log-derivative.
fn smooth_theta(map: &PiecewiseMap, word: &[usize], lipschitz: f64) -> (f64, f64) {
    let h = 1.0 / (THETA_SAMPLES - 1) as f64;
    let sampled = (0..THETA_SAMPLES)
        .map(|m| {
            let mut y = m as f64 * h;
            let mut der = 1.0;
            for &i in word.iter().rev() {
                der *= map.inverse_derivative(i, y);
                y = map.smooth_inverse(i, y);
            }
            der
        })
        .fold(0.0, f64::max);
    let inflated = sampled * (lipschitz * h / 2.0).exp();
    (inflated, inflated - sampled)
}

fn smooth_levels(map: &PiecewiseMap, k_max: usize, cap: usize) -> Result<Vec<Vec<Cylinder>>> {
    let weights = map.weights().expect("smooth map");
    let k = weights.len();
    let p_max = map.max_inverse_derivative();
    let log_lip = weights
        .iter()
        .map(|w| w.derivative_bound() / w.lower_bound())
        .fold(0.0, f64::max);
    let mut levels: Vec<Vec<Cylinder>> = Vec::new();
    // words in lexicographic order are in spatial order: all branches increase
    let mut words: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    let mut lefts: Vec<f64> = (0..k).map(|i| map.domain::<f64>(i).0).collect();
    for level in 1..=k_max {
        if level > 1 {
            let mut next_words = Vec::with_capacity(words.len() * k);
            let mut next_lefts = Vec::with_capacity(words.len() * k);
            for w in &words {
                for i in 0..k {
                    let start = map.domain::<f64>(i).0;
                    let mut nw = w.clone();
                    nw.push(i);
                    next_lefts.push(compose_inverse(map, w, start));
                    next_words.push(nw);
                    if next_words.len() > cap {
                        return Err(cap_error(level, cap));
                    }
                }
            }
            words = next_words;
            lefts = next_lefts;
        } else if words.len() > cap {
            return Err(cap_error(1, cap));
        }
        let lipschitz = log_lip * (0..level).map(|m| p_max.powi(m as i32)).sum::<f64>();
        let mut cylinders = Vec::with_capacity(words.len());
        for (idx, w) in words.iter().enumerate() {
            let lo = if idx == 0 { Rational::zero() } else { Rational::from_f64_snapped(lefts[idx]) };
            let hi = if idx + 1 == words.len() {
                Rational::one()
            } else {
                Rational::from_f64_snapped(lefts[idx + 1])
            };
            let support = Interval::new(lo, hi).map_err(|_| {
                Error::Numeric(format!("level-{level} cylinder {w:?} collapsed below the breakpoint grid"))
            })?;
            let (theta, tol) = smooth_theta(map, w, lipschitz);
            cylinders.push(Cylinder {
                index_word: w.clone(),
                support,
                theta,
                exact_theta: None,
                theta_tolerance: tol,
            });
        }
        levels.push(cylinders);
    }
    Ok(levels)
}
