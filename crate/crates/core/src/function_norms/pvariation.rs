use std::any::Any;

use num_complex::Complex;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{complex_to_f64, rational_pow, Interval, Rational, Real, C64};
use crate::observables::{ExactStep, Interpolation, SampledObservable, StepFunction};

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(Error::Domain(format!("p-variation needs a finite p >= 1, got {p}")));
    }
    Ok(())
}

/// Values taken by `f` on the open interval `(lo, hi)`, in order.
pub fn values_on<'a, R: Real>(f: &'a StepFunction<R>, lo: &R, hi: &R) -> &'a [Complex<R>] {
    if !(lo < hi) {
        return &[];
    }
    let first = f.piece_index(lo);
    let last = f.breakpoints().partition_point(|b| b < hi).saturating_sub(1);
    &f.values()[first..=last.max(first)]
}

/// Drops repeated neighbours and, for real data, the interior points of
/// monotone runs. Neither changes the p-variation when `p >= 1`.
fn turning_points<T: PartialOrd + Clone>(xs: &[T]) -> Vec<T> {
    let mut dedup: Vec<T> = Vec::with_capacity(xs.len());
    for x in xs {
        if dedup.last() != Some(x) {
            dedup.push(x.clone());
        }
    }
    if dedup.len() <= 2 {
        return dedup;
    }
    let mut out = vec![dedup[0].clone()];
    for w in dedup.windows(3) {
        let monotone = (w[0] < w[1] && w[1] < w[2]) || (w[0] > w[1] && w[1] > w[2]);
        if !monotone {
            out.push(w[1].clone());
        }
    }
    out.push(dedup[dedup.len() - 1].clone());
    out
}

fn dedup_complex(xs: &[C64]) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(xs.len());
    for x in xs {
        if out.last() != Some(x) {
            out.push(*x);
        }
    }
    out
}

/// `max_{i_0 < ... < i_n} sum |w_{i_{m+1}} - w_{i_m}|^p` over subsequences.
pub fn sequence_variation_pow(values: &[C64], p: f64) -> Result<f64> {
    check_p(p)?;
    let w = if values.iter().all(|v| v.im == 0.0) {
        let re: Vec<f64> = values.iter().map(|v| v.re).collect();
        turning_points(&re).into_iter().map(|x| C64::new(x, 0.0)).collect()
    } else {
        dedup_complex(values)
    };
    if p == 1.0 {
        // the triangle inequality makes the full chain optimal
        return Ok(w.windows(2).map(|d| (d[1] - d[0]).norm()).sum());
    }
    let mut best = vec![0.0f64; w.len()];
    let mut total = 0.0f64;
    for i in 1..w.len() {
        let mut b = 0.0f64;
        for j in 0..i {
            b = b.max(best[j] + (w[i] - w[j]).norm().powf(p));
        }
        best[i] = b;
        total = total.max(b);
    }
    Ok(total)
}

/// Exact version of [`sequence_variation_pow`] for real rational data and an
/// integer exponent.
pub fn sequence_variation_pow_exact(values: &[Rational], p: u32) -> Result<Rational> {
    if p == 0 {
        return Err(Error::Domain("p-variation needs p >= 1, got 0".into()));
    }
    let w = turning_points(values);
    if p == 1 {
        return Ok(w.windows(2).fold(Rational::zero(), |acc, d| acc + (&d[1] - &d[0]).abs()));
    }
    let mut best = vec![Rational::zero(); w.len()];
    let mut total = Rational::zero();
    for i in 1..w.len() {
        let mut b = Rational::zero();
        for j in 0..i {
            let cand = &best[j] + rational_pow(&(&w[i] - &w[j]).abs(), p as usize);
            if cand > b {
                b = cand;
            }
        }
        if b > total {
            total = b.clone();
        }
        best[i] = b;
    }
    Ok(total)
}

/// `v_p(f, J)^p` computed exactly on real rational step functions.
pub fn p_variation_pow_exact(f: &ExactStep, j: &Interval, p: u32) -> Result<Rational> {
    let vals = values_on(f, &j.lo, &j.hi);
    if vals.iter().any(|v| !v.im.is_zero()) {
        return Err(Error::Unsupported("exact p-variation needs real values".into()));
    }
    let re: Vec<Rational> = vals.iter().map(|v| v.re.clone()).collect();
    sequence_variation_pow_exact(&re, p)
}

/// `v_p(f, J)^p`, the sup over point sequences inside `J` of
/// `sum |f(x_{i+1}) - f(x_i)|^p`. Exact rational arithmetic is used when
/// possible (rational real data, integer `p`).
pub fn p_variation_pow<R: Real>(f: &StepFunction<R>, j: &Interval, p: f64) -> Result<f64> {
    check_p(p)?;
    if p.fract() == 0.0 && p <= 64.0 {
        if let Some(exact) = (f as &dyn Any).downcast_ref::<ExactStep>() {
            if exact.is_real() {
                return Ok(Real::to_f64(&p_variation_pow_exact(exact, j, p as u32)?));
            }
        }
    }
    let (lo, hi) = j.bounds::<R>();
    let vals: Vec<C64> = values_on(f, &lo, &hi).iter().map(complex_to_f64).collect();
    sequence_variation_pow(&vals, p)
}

pub fn p_variation<R: Real>(f: &StepFunction<R>, j: &Interval, p: f64) -> Result<f64> {
    Ok(p_variation_pow(f, j, p)?.powf(1.0 / p))
}

/// `v_p(g, (lo, hi))` for a sampled observable. For the linear interpolant
/// the sup is attained on the nodes and the limits at `lo` and `hi`.
pub fn p_variation_sampled(g: &SampledObservable, lo: f64, hi: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(lo < hi) {
        return Ok(0.0);
    }
    let s = g.samples();
    let n = s.len();
    let vals: Vec<C64> = match g.interpolation() {
        Interpolation::PiecewiseConstant => {
            let first = ((lo * n as f64).floor() as usize).min(n - 1);
            let last = ((hi * n as f64).ceil() as usize).clamp(first + 1, n);
            s[first..last].to_vec()
        }
        Interpolation::PiecewiseLinear => {
            let h = (n - 1) as f64;
            let first = (lo * h).floor() as usize + 1;
            let last = ((hi * h).ceil() as usize).min(n - 1);
            let mut v = vec![g.eval(lo)];
            v.extend((first..last).map(|j| s[j]));
            v.push(g.eval(hi));
            v
        }
    };
    Ok(sequence_variation_pow(&vals, p)?.powf(1.0 / p))
}
