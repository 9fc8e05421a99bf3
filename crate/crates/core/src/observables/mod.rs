//! Step functions on `[0, 1]`, sampled observables and Koopman pullbacks.

mod format;
mod sampled;
mod step;

pub use format::{step_from_json, step_to_csv, step_to_json};
pub use sampled::{Interpolation, Quantized, SampledObservable, DEFAULT_QUANTIZATION_BITS};
pub use step::{real, ExactStep, FloatStep, StepFunction};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::interval_maps::{PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::numeric::Real;

/// `f o T^ell`.
pub fn pullback<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>, ell: usize) -> Result<StepFunction<R>> {
    pullback_capped(map, f, ell, DEFAULT_CYLINDER_CAP)
}

/// Checks that `T^ell` has at most `cap` cylinders.
pub fn check_iterate_cap(map: &PiecewiseMap, ell: usize, cap: usize) -> Result<()> {
    let count = (map.branch_count() as u128).checked_pow(ell as u32);
    match count {
        Some(c) if c <= cap as u128 => Ok(()),
        _ => Err(Error::Resource(format!(
            "T^{ell} of a {}-branch map exceeds the cylinder cap of {cap}",
            map.branch_count()
        ))),
    }
}

pub fn pullback_capped<R: Real>(
    map: &PiecewiseMap,
    f: &StepFunction<R>,
    ell: usize,
    cap: usize,
) -> Result<StepFunction<R>> {
    check_iterate_cap(map, ell, cap)?;
    let mut g = f.clone();
    for _ in 0..ell {
        g = pullback_once(map, &g);
    }
    Ok(g)
}

/// `f o T`: each branch contributes the preimages of the breakpoints of `f`
/// inside its image.
pub fn pullback_once<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>) -> StepFunction<R> {
    let bps = f.breakpoints();
    let vals = f.values();
    let mut out_bps: Vec<R> = vec![R::zero()];
    let mut out_vals: Vec<Complex<R>> = Vec::new();
    for i in 0..map.branch_count() {
        let (ylo, yhi) = map.image::<R>(i);
        let (xlo, xhi) = map.domain::<R>(i);
        // pieces of f meeting the image, as (left end in y, value)
        let first = bps.partition_point(|b| b <= &ylo).saturating_sub(1);
        let mut ys: Vec<R> = vec![ylo.clone()];
        let mut pv: Vec<Complex<R>> = Vec::new();
        let mut j = first;
        while j < vals.len() && bps[j] < yhi {
            pv.push(vals[j].clone());
            let right = &bps[j + 1];
            ys.push(if right < &yhi { right.clone() } else { yhi.clone() });
            j += 1;
        }
        let mut xs: Vec<R> = ys.iter().map(|y| map.inverse_branch::<R>(i, y)).collect();
        if !map.increasing(i) {
            xs.reverse();
            pv.reverse();
        }
        let last = xs.len() - 1;
        xs[0] = xlo;
        xs[last] = xhi;
        for (k, v) in pv.into_iter().enumerate() {
            let right = &xs[k + 1];
            // drop pieces that rounding collapsed on the approximate path
            if right <= out_bps.last().unwrap() {
                continue;
            }
            if out_vals.last() == Some(&v) {
                *out_bps.last_mut().unwrap() = right.clone();
            } else {
                out_vals.push(v);
                out_bps.push(right.clone());
            }
        }
    }
    StepFunction::from_parts(out_bps, out_vals)
}
