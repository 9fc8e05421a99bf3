use num_complex::Complex;

use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{rat, Real, C64};
use crate::observables::StepFunction;

/// `(Lf)(y) = sum over branches with y in the image of f(s_i y) / |slope_i|`,
/// exact on piecewise-linear maps.
pub fn apply_exact<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>) -> Result<StepFunction<R>> {
    let branches = map.linear_branches()?;
    let bps = f.breakpoints();
    let vals = f.values();
    let mut pushed = Vec::with_capacity(branches.len());
    for b in branches {
        let (xlo, xhi) = b.domain.bounds::<R>();
        let weight = R::from_rational(&b.inverse_derivative());
        let mut xs = vec![xlo.clone()];
        let mut pv = Vec::new();
        let mut j = bps.partition_point(|p| p <= &xlo).saturating_sub(1);
        while j < vals.len() && bps[j] < xhi {
            pv.push(Complex::new(vals[j].re.clone() * weight.clone(), vals[j].im.clone() * weight.clone()));
            let right = &bps[j + 1];
            xs.push(if right < &xhi { right.clone() } else { xhi.clone() });
            j += 1;
        }
        let mut ys: Vec<R> = xs.iter().map(|x| b.apply(x)).collect();
        if !b.increasing() {
            ys.reverse();
            pv.reverse();
        }
        let (ylo, yhi) = b.image.bounds::<R>();
        let last = ys.len() - 1;
        ys[0] = ylo.clone();
        ys[last] = yhi.clone();
        let mut out_b = Vec::with_capacity(ys.len() + 2);
        let mut out_v = Vec::with_capacity(pv.len() + 2);
        out_b.push(R::zero());
        if !ylo.is_zero() {
            out_v.push(Complex::new(R::zero(), R::zero()));
            out_b.push(ylo);
        }
        for (v, y) in pv.into_iter().zip(ys.into_iter().skip(1)) {
            out_v.push(v);
            out_b.push(y);
        }
        if !yhi.is_one() {
            out_v.push(Complex::new(R::zero(), R::zero()));
            out_b.push(R::one());
        }
        pushed.push(StepFunction::new(out_b, out_v)?);
    }
    let ones = vec![Complex::new(R::one(), R::zero()); pushed.len()];
    StepFunction::combine(&ones, &pushed)
}

/// `L^n f` by repeated exact application.
pub fn apply_exact_power<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>, n: usize) -> Result<StepFunction<R>> {
    let mut g = f.clone();
    for _ in 0..n {
        g = apply_exact(map, &g)?;
    }
    Ok(g)
}

/// Cell averages of `Lf` on the dyadic grid of mesh `2^-bits`, computed from
/// `int_{cell} Lf = sum_i int_{s_i(cell)} f`. This is the Ulam projection of
/// `Lf` and works for every map variant.
pub fn project_transfer<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>, bits: u32) -> Result<StepFunction<R>> {
    if bits > 24 {
        return Err(Error::Resource(format!("projection grid 2^-{bits} exceeds the 2^-24 limit")));
    }
    let m = 1usize << bits;
    let grid: Vec<R> = (0..=m).map(|j| R::from_rational(&rat(j as i64, m as i64))).collect();
    let cell = R::from_rational(&rat(1, m as i64));
    let mut avgs = vec![Complex::new(R::zero(), R::zero()); m];
    for i in 0..map.branch_count() {
        let (ilo, ihi) = map.image::<R>(i);
        let pre: Vec<R> = grid.iter().map(|y| map.inverse_branch::<R>(i, y)).collect();
        for j in 0..m {
            let (a, b) = (&grid[j], &grid[j + 1]);
            if b <= &ilo || a >= &ihi {
                continue;
            }
            // clip the cell to the branch image before pulling back
            let ya = if a < &ilo { &ilo } else { a };
            let yb = if b > &ihi { &ihi } else { b };
            let xa = if ya == a { pre[j].clone() } else { map.inverse_branch::<R>(i, ya) };
            let xb = if yb == b { pre[j + 1].clone() } else { map.inverse_branch::<R>(i, yb) };
            let (lo, hi) = if xa < xb { (xa, xb) } else { (xb, xa) };
            let int = f.integrate_over(&lo, &hi);
            avgs[j] = avgs[j].clone() + Complex::new(int.re / cell.clone(), int.im / cell.clone());
        }
    }
    Ok(StepFunction::new(grid, avgs)?.canonicalize())
}

/// Pointwise `(Lf)(y)` for any map, using the branch derivatives.
pub fn transfer_at<R: Real>(map: &PiecewiseMap, f: &StepFunction<R>, y: f64) -> C64 {
    let mut acc = Complex::new(0.0, 0.0);
    for i in 0..map.branch_count() {
        let (lo, hi) = map.image::<f64>(i);
        if y < lo || y >= hi {
            continue;
        }
        let x = map.inverse_branch::<f64>(i, &y);
        let v = f.eval(&R::from_f64(x));
        acc += Complex::new(v.re.to_f64(), v.im.to_f64()) * map.inverse_derivative(i, y);
    }
    acc
}
