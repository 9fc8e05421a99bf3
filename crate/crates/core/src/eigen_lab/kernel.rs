use num_complex::Complex;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_maps::{MapVariant, PiecewiseMap};
use crate::numeric::{rational_to_f64, Interval, Rational, C64};
use crate::observables::{real, ExactStep, FloatStep, SampledObservable, StepFunction, DEFAULT_QUANTIZATION_BITS};
use crate::transfer_operator::{apply_exact, project_transfer, transfer_at};

/// Residual tolerance for quantized kernel observables.
pub const KERNEL_TOLERANCE: f64 = 1e-6;

/// Midpoints used for the pointwise estimate of `|L psi|_1`.
const POINTWISE_SAMPLES: usize = 1 << 12;

/// How a kernel observable is built.
#[derive(Debug, Clone)]
pub enum KernelConstruction {
    /// `c_1 1_{s_a(K)} - c_2 1_{s_b(K)}` with `c_i = scale * |slope|`.
    LinearContrast {
        k: Interval,
        branches: (usize, usize),
        scale: Rational,
    },
    /// `c_1 1_{I_1} - c_2 1_{I_2}` given directly; rejected unless `L psi = 0`.
    ExplicitContrast {
        c1: Rational,
        c2: Rational,
        i1: Interval,
        i2: Interval,
    },
    /// `g(T.)/p_a(T.)` on `s_a(K)` minus `g(T.)/p_b(T.)` on `s_b(K)`,
    /// quantized on the preimages of the dyadic cells of mesh `2^-bits`.
    WeightCancellation {
        k: Interval,
        g: SampledObservable,
        branches: (usize, usize),
        bits: u32,
    },
}

impl KernelConstruction {
    pub fn name(&self) -> &'static str {
        match self {
            KernelConstruction::LinearContrast { .. } | KernelConstruction::ExplicitContrast { .. } => {
                "linear_contrast"
            }
            KernelConstruction::WeightCancellation { .. } => "weight_cancellation",
        }
    }

    pub fn weight_cancellation(k: Interval, g: SampledObservable) -> Self {
        KernelConstruction::WeightCancellation {
            k,
            g,
            branches: (0, 1),
            bits: DEFAULT_QUANTIZATION_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelPsi {
    Exact(ExactStep),
    Float(FloatStep),
}

impl KernelPsi {
    pub fn as_exact(&self) -> Option<&ExactStep> {
        match self {
            KernelPsi::Exact(f) => Some(f),
            KernelPsi::Float(_) => None,
        }
    }

    pub fn to_float(&self) -> FloatStep {
        match self {
            KernelPsi::Exact(f) => f.to_f64(),
            KernelPsi::Float(f) => f.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualMethod {
    /// `|L psi|_1` from exact step arithmetic.
    Exact,
    /// `|P L psi|_1` where `P` averages over the dyadic cells of the
    /// quantization grid.
    UlamProjection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelObservable {
    pub psi: KernelPsi,
    pub construction: &'static str,
    pub residual: f64,
    pub residual_method: ResidualMethod,
    pub tolerance: f64,
    /// Midpoint-rule estimate of `|L psi|_1` (smooth maps only); not a bound.
    pub pointwise_residual: Option<f64>,
}

pub fn build_kernel(map: &PiecewiseMap, construction: &KernelConstruction) -> Result<KernelObservable> {
    match construction {
        KernelConstruction::LinearContrast { k, branches, scale } => linear_contrast(map, k, *branches, scale),
        KernelConstruction::ExplicitContrast { c1, c2, i1, i2 } => {
            if !map.is_linear() {
                return Err(Error::Validation("a linear contrast needs a piecewise-linear map".into()));
            }
            explicit_contrast(map, c1, c2, i1, i2)
        }
        KernelConstruction::WeightCancellation { k, g, branches, bits } => {
            weight_cancellation(map, k, g, *branches, *bits)
        }
    }
}

fn linear_contrast(map: &PiecewiseMap, k: &Interval, (a, b): (usize, usize), scale: &Rational) -> Result<KernelObservable> {
    let branches = map.linear_branches().map_err(|_| {
        Error::Validation("a linear contrast needs a piecewise-linear Markov map".into())
    })?;
    if a == b || a >= branches.len() || b >= branches.len() {
        return Err(Error::Validation(format!(
            "branches ({a}, {b}) must be distinct indices below {}",
            branches.len()
        )));
    }
    if !scale.is_positive() {
        return Err(Error::Validation("the contrast scale must be positive".into()));
    }
    let mut sides = Vec::with_capacity(2);
    for i in [a, b] {
        let br = &branches[i];
        if !br.image.contains_interval(k) {
            return Err(Error::Validation(format!(
                "K = [{}, {}) is not inside the image of branch {i}",
                k.lo, k.hi
            )));
        }
        let (x0, x1) = (br.inverse(&k.lo), br.inverse(&k.hi));
        let (lo, hi) = if x0 < x1 { (x0, x1) } else { (x1, x0) };
        sides.push((Interval::new(lo, hi)?, scale * br.slope.abs()));
    }
    let (i1, c1) = sides.remove(0);
    let (i2, c2) = sides.remove(0);
    explicit_contrast(map, &c1, &c2, &i1, &i2)
}

fn explicit_contrast(
    map: &PiecewiseMap,
    c1: &Rational,
    c2: &Rational,
    i1: &Interval,
    i2: &Interval,
) -> Result<KernelObservable> {
    if !(c1.is_positive() && c2.is_positive()) {
        return Err(Error::Validation("contrast weights c1, c2 must be positive".into()));
    }
    if i1.intersect(i2).is_some() {
        return Err(Error::Validation("contrast intervals must be disjoint".into()));
    }
    let psi = ExactStep::scaled_indicator(i1.lo.clone(), i1.hi.clone(), real(c1.clone()))?.sub(
        &ExactStep::scaled_indicator(i2.lo.clone(), i2.hi.clone(), real(c2.clone()))?,
    );
    let lpsi = apply_exact(map, &psi)?;
    if !lpsi.is_zero() {
        return Err(Error::Validation(format!(
            "intervals are not preimage-compatible: |L psi|_1 = {:e}",
            lpsi.l1_norm()
        )));
    }
    Ok(KernelObservable {
        psi: KernelPsi::Exact(psi),
        construction: "linear_contrast",
        residual: 0.0,
        residual_method: ResidualMethod::Exact,
        tolerance: 0.0,
        pointwise_residual: None,
    })
}

fn weight_cancellation(
    map: &PiecewiseMap,
    k: &Interval,
    g: &SampledObservable,
    (a, b): (usize, usize),
    bits: u32,
) -> Result<KernelObservable> {
    if !matches!(map.variant, MapVariant::SmoothFullBranch { .. }) {
        return Err(Error::Validation("weight cancellation needs a smooth full-branch map".into()));
    }
    if a == b || a >= map.branch_count() || b >= map.branch_count() {
        return Err(Error::Validation(format!("branches ({a}, {b}) must be distinct")));
    }
    if bits > 24 {
        return Err(Error::Resource(format!("quantization 2^-{bits} exceeds the 2^-24 limit")));
    }
    let m = 1usize << bits;
    let (klo, khi) = (rational_to_f64(&k.lo), rational_to_f64(&k.hi));
    let mut ys = vec![klo];
    let first = (klo * m as f64).floor() as usize + 1;
    ys.extend((first..m).map(|j| j as f64 / m as f64).take_while(|y| *y < khi));
    ys.push(khi);
    let masses: Vec<C64> = ys.windows(2).map(|w| g.integral(w[0], w[1])).collect();
    if masses.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::Validation("g integrates to zero on every cell of K, so psi would vanish".into()));
    }
    let mut pieces: Vec<(f64, f64, C64)> = Vec::with_capacity(2 * masses.len());
    for (branch, sign) in [(a, 1.0), (b, -1.0)] {
        let xs: Vec<f64> = ys.iter().map(|y| map.inverse_branch::<f64>(branch, y)).collect();
        for (w, mass) in xs.windows(2).zip(&masses) {
            let (lo, hi) = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
            if hi > lo {
                pieces.push((lo, hi, mass * (sign / (hi - lo))));
            }
        }
    }
    pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut bps = vec![0.0];
    let mut vals = vec![];
    for (lo, hi, v) in pieces {
        let last = *bps.last().unwrap();
        if lo > last {
            vals.push(Complex::zero());
            bps.push(lo);
        }
        vals.push(v);
        bps.push(hi);
    }
    if *bps.last().unwrap() < 1.0 {
        vals.push(Complex::zero());
        bps.push(1.0);
    }
    let psi = StepFunction::new(bps, vals)?.canonicalize();
    let residual = project_transfer(map, &psi, bits)?.l1_norm();
    let h = 1.0 / POINTWISE_SAMPLES as f64;
    let pointwise = (0..POINTWISE_SAMPLES)
        .map(|j| transfer_at(map, &psi, (j as f64 + 0.5) * h).norm() * h)
        .sum();
    if residual > KERNEL_TOLERANCE {
        return Err(Error::Numeric(format!(
            "quantized kernel residual {residual:e} exceeds the tolerance {KERNEL_TOLERANCE:e}"
        )));
    }
    Ok(KernelObservable {
        psi: KernelPsi::Float(psi),
        construction: "weight_cancellation",
        residual,
        residual_method: ResidualMethod::UlamProjection,
        tolerance: KERNEL_TOLERANCE,
        pointwise_residual: Some(pointwise),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::rat;
    use crate::observables::Interpolation;

    fn contrast(map: &PiecewiseMap, branches: (usize, usize), scale: Rational) -> Result<KernelObservable> {
        build_kernel(
            map,
            &KernelConstruction::LinearContrast {
                k: Interval::unit(),
                branches,
                scale,
            },
        )
    }

    #[test]
    fn doubling_and_three_branch_contrasts() {
        let d2 = contrast(&fixtures::d2(), (0, 1), rat(1, 2)).unwrap();
        let psi = d2.psi.as_exact().unwrap();
        assert_eq!(psi.breakpoints(), &[rat(0, 1), rat(1, 2), rat(1, 1)]);
        assert_eq!(psi.values(), &[real(rat(1, 1)), real(rat(-1, 1))]);
        assert_eq!(d2.residual, 0.0);

        let l3 = contrast(&fixtures::l3(), (0, 1), rat(1, 1)).unwrap();
        let psi = l3.psi.as_exact().unwrap();
        assert_eq!(psi.eval(&rat(1, 4)), real(rat(2, 1)));
        assert_eq!(psi.eval(&rat(5, 8)), real(rat(-4, 1)));
        assert_eq!(psi.eval(&rat(7, 8)), real(rat(0, 1)));
        assert!(apply_exact(&fixtures::l3(), psi).unwrap().is_zero());
    }

    #[test]
    fn rejects_incompatible_intervals() {
        let c = KernelConstruction::ExplicitContrast {
            c1: rat(1, 1),
            c2: rat(1, 1),
            i1: Interval::from_ints((0, 1), (1, 4)).unwrap(),
            i2: Interval::from_ints((1, 2), (1, 1)).unwrap(),
        };
        assert!(matches!(build_kernel(&fixtures::d2(), &c), Err(Error::Validation(_))));
        assert!(contrast(&fixtures::d2(), (0, 0), rat(1, 1)).is_err());
        assert!(contrast(&fixtures::w2(), (0, 1), rat(1, 1)).is_err());
        let c = KernelConstruction::ExplicitContrast {
            c1: rat(-1, 1),
            c2: rat(-1, 1),
            i1: Interval::from_ints((0, 1), (1, 2)).unwrap(),
            i2: Interval::from_ints((1, 2), (1, 1)).unwrap(),
        };
        assert!(build_kernel(&fixtures::d2(), &c).is_err());
    }

    #[test]
    fn smooth_weight_cancellation() {
        let g = SampledObservable::constant(Complex::new(1.0, 0.0));
        let k = KernelConstruction::WeightCancellation {
            k: Interval::unit(),
            g,
            branches: (0, 1),
            bits: 12,
        };
        let w2 = fixtures::w2();
        let kern = build_kernel(&w2, &k).unwrap();
        assert!(kern.residual <= 1e-12, "{}", kern.residual);
        let psi = kern.psi.to_float();
        assert!(psi.integrate().norm() < 1e-12);
        // 1/p_1 at the first cell, about 1/0.6
        assert!((psi.values()[0].re - 1.0 / 0.6).abs() < 1e-2);
        assert!(kern.pointwise_residual.unwrap() < 1e-2);
        let bump = SampledObservable::from_fn(257, Interpolation::PiecewiseLinear, |x| {
            Complex::new((x * (1.0 - x)).max(0.0), 0.0)
        })
        .unwrap();
        let k = KernelConstruction::weight_cancellation(Interval::from_ints((1, 4), (3, 4)).unwrap(), bump);
        let kern = build_kernel(&w2, &k).unwrap();
        assert!(kern.residual <= KERNEL_TOLERANCE);
        assert!(build_kernel(&fixtures::d2(), &k).is_err());
    }
}
