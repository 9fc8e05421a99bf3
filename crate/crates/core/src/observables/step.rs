use std::fmt;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::numeric::{modulus, Interval, Rational, Real};

/// Complex, right-continuous step function on `[0, 1]`.
///
/// `values[j]` is the value on `[breakpoints[j], breakpoints[j + 1])`; the
/// last value also holds at `x = 1`. With `R = Rational` every operation is
/// exact.
#[derive(Clone, PartialEq)]
pub struct StepFunction<R: Real = Rational> {
    breakpoints: Vec<R>,
    values: Vec<Complex<R>>,
}

pub type ExactStep = StepFunction<Rational>;
pub type FloatStep = StepFunction<f64>;

fn czero<R: Real>() -> Complex<R> {
    Complex::new(R::zero(), R::zero())
}

impl<R: Real> StepFunction<R> {
    pub fn new(breakpoints: Vec<R>, values: Vec<Complex<R>>) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::Validation(format!(
                "step function needs n+1 breakpoints for n values (got {} and {})",
                breakpoints.len(),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::Validation("breakpoints must start at 0 and end at 1".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Validation("breakpoints must be strictly increasing".into()));
        }
        Ok(StepFunction { breakpoints, values })
    }

    pub(crate) fn from_parts(breakpoints: Vec<R>, values: Vec<Complex<R>>) -> Self {
        debug_assert_eq!(breakpoints.len(), values.len() + 1);
        debug_assert!(breakpoints.windows(2).all(|w| w[0] < w[1]));
        StepFunction { breakpoints, values }
    }

    pub fn constant(c: Complex<R>) -> Self {
        StepFunction {
            breakpoints: vec![R::zero(), R::one()],
            values: vec![c],
        }
    }

    pub fn real_constant(c: R) -> Self {
        Self::constant(Complex::new(c, R::zero()))
    }

    pub fn zero() -> Self {
        Self::constant(czero())
    }

    /// `value * 1_[lo, hi)`.
    pub fn scaled_indicator(lo: R, hi: R, value: Complex<R>) -> Result<Self> {
        if lo < R::zero() || hi > R::one() || !(lo < hi) {
            return Err(Error::Validation(format!(
                "indicator needs 0 <= lo < hi <= 1, got [{lo:?}, {hi:?})"
            )));
        }
        let mut bps = vec![R::zero()];
        let mut vals = Vec::new();
        if !lo.is_zero() {
            bps.push(lo.clone());
            vals.push(czero());
        }
        vals.push(value);
        bps.push(hi.clone());
        if !hi.is_one() {
            vals.push(czero());
            bps.push(R::one());
        }
        Ok(StepFunction {
            breakpoints: bps,
            values: vals,
        })
    }

    pub fn indicator(lo: R, hi: R) -> Result<Self> {
        Self::scaled_indicator(lo, hi, Complex::new(R::one(), R::zero()))
    }

    pub fn indicator_of(interval: &Interval) -> Self {
        let (lo, hi) = interval.bounds::<R>();
        Self::indicator(lo, hi).expect("interval endpoints are valid")
    }

    pub fn breakpoints(&self) -> &[R] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex<R>] {
        &self.values
    }

    pub fn piece_count(&self) -> usize {
        self.values.len()
    }

    /// `(lo, hi, value)` for each piece.
    pub fn pieces(&self) -> impl Iterator<Item = (&R, &R, &Complex<R>)> + '_ {
        self.breakpoints
            .windows(2)
            .zip(&self.values)
            .map(|(w, v)| (&w[0], &w[1], v))
    }

    /// Merges adjacent pieces carrying equal values.
    pub fn canonicalize(&self) -> Self {
        let mut bps = Vec::with_capacity(self.breakpoints.len());
        let mut vals: Vec<Complex<R>> = Vec::with_capacity(self.values.len());
        bps.push(self.breakpoints[0].clone());
        for (j, v) in self.values.iter().enumerate() {
            if vals.last() == Some(v) {
                *bps.last_mut().unwrap() = self.breakpoints[j + 1].clone();
            } else {
                vals.push(v.clone());
                bps.push(self.breakpoints[j + 1].clone());
            }
        }
        StepFunction {
            breakpoints: bps,
            values: vals,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.values.windows(2).all(|w| w[0] != w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Index of the piece containing `x` (right-continuous, clamped).
    pub fn piece_index(&self, x: &R) -> usize {
        let idx = self.breakpoints.partition_point(|b| b <= x);
        idx.saturating_sub(1).min(self.values.len() - 1)
    }

    /// Right-continuous evaluation; points outside `[0, 1]` are clamped.
    pub fn eval(&self, x: &R) -> Complex<R> {
        self.values[self.piece_index(x)].clone()
    }

    pub fn integrate(&self) -> Complex<R> {
        self.pieces().fold(czero(), |acc, (lo, hi, v)| {
            let len = hi.clone() - lo.clone();
            acc + v.clone() * len
        })
    }

    /// `int_lo^hi f`.
    pub fn integrate_over(&self, lo: &R, hi: &R) -> Complex<R> {
        let mut acc = czero();
        if !(lo < hi) {
            return acc;
        }
        let start = self.piece_index(lo);
        for j in start..self.values.len() {
            let a = if &self.breakpoints[j] > lo { &self.breakpoints[j] } else { lo };
            let b = if &self.breakpoints[j + 1] < hi { &self.breakpoints[j + 1] } else { hi };
            if a >= hi {
                break;
            }
            if a < b {
                acc = acc + self.values[j].clone() * (b.clone() - a.clone());
            }
        }
        acc
    }

    /// Average `m(f, [lo, hi)) = (1/|J|) int_J f`.
    pub fn mean_over(&self, lo: &R, hi: &R) -> Complex<R> {
        let len = hi.clone() - lo.clone();
        let total = self.integrate_over(lo, hi);
        Complex::new(total.re / len.clone(), total.im / len)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(modulus).fold(0.0, f64::max)
    }

    /// `(sum_j |v_j|^p |piece_j|)^{1/p}`; `p = f64::INFINITY` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::Domain(format!("L^p norm needs p >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.sup_norm());
        }
        if p == 2.0 {
            return Ok(self.l2_norm_squared().to_f64().sqrt());
        }
        let s: f64 = self
            .pieces()
            .map(|(lo, hi, v)| modulus(v).powf(p) * (hi.clone() - lo.clone()).to_f64())
            .sum();
        Ok(s.powf(1.0 / p))
    }

    /// `int |f|`. Lengths are summed per distinct `|v|^2` in `R` before
    /// rounding, so a real function on the rational path is rounded once.
    pub fn l1_norm(&self) -> f64 {
        if self.values.iter().all(|v| v.im.is_zero()) {
            let total = self.pieces().fold(R::zero(), |acc, (lo, hi, v)| {
                let a = if v.re < R::zero() { R::zero() - v.re.clone() } else { v.re.clone() };
                acc + a * (hi.clone() - lo.clone())
            });
            return total.to_f64();
        }
        let mut groups: Vec<(R, R)> = self
            .pieces()
            .map(|(lo, hi, v)| (v.re.clone() * v.re.clone() + v.im.clone() * v.im.clone(), hi.clone() - lo.clone()))
            .collect();
        groups.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut total = 0.0;
        let mut i = 0;
        while i < groups.len() {
            let mut len = groups[i].1.clone();
            let mut j = i + 1;
            while j < groups.len() && groups[j].0 == groups[i].0 {
                len = len + groups[j].1.clone();
                j += 1;
            }
            total += groups[i].0.to_f64().sqrt() * len.to_f64();
            i = j;
        }
        total
    }

    /// `int |f|^2`, exact on the rational path.
    pub fn l2_norm_squared(&self) -> R {
        self.pieces().fold(R::zero(), |acc, (lo, hi, v)| {
            acc + (v.re.clone() * v.re.clone() + v.im.clone() * v.im.clone()) * (hi.clone() - lo.clone())
        })
    }

    /// Walks the common refinement of `self` and `other`.
    fn merge_walk<F: FnMut(&R, &R, &Complex<R>, &Complex<R>)>(&self, other: &Self, mut visit: F) {
        let (mut i, mut j) = (0usize, 0usize);
        let mut lo = R::zero();
        while i < self.values.len() && j < other.values.len() {
            let a = &self.breakpoints[i + 1];
            let b = &other.breakpoints[j + 1];
            let hi = if a < b { a } else { b };
            if &lo < hi {
                visit(&lo, hi, &self.values[i], &other.values[j]);
            }
            let hi = hi.clone();
            if a <= &hi {
                i += 1;
            }
            if b <= &hi {
                j += 1;
            }
            lo = hi;
        }
    }

    /// Pointwise `op(f, g)` on the common refinement (not canonicalized).
    pub fn zip_with<F>(&self, other: &Self, mut op: F) -> Self
    where
        F: FnMut(&Complex<R>, &Complex<R>) -> Complex<R>,
    {
        let mut bps = vec![R::zero()];
        let mut vals = Vec::with_capacity(self.values.len() + other.values.len());
        self.merge_walk(other, |_, hi, a, b| {
            vals.push(op(a, b));
            bps.push(hi.clone());
        });
        StepFunction {
            breakpoints: bps,
            values: vals,
        }
    }

    /// `int f * conj(g)` on the common refinement.
    pub fn inner_product(&self, other: &Self) -> Complex<R> {
        let mut acc = czero();
        self.merge_walk(other, |lo, hi, a, b| {
            acc = acc.clone() + a.clone() * b.conj() * (hi.clone() - lo.clone());
        });
        acc
    }

    pub fn map_values<F: FnMut(&Complex<R>) -> Complex<R>>(&self, f: F) -> Self {
        StepFunction {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(f).collect(),
        }
        .canonicalize()
    }

    pub fn scale(&self, c: &Complex<R>) -> Self {
        self.map_values(|v| v.clone() * c.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone()).canonicalize()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone()).canonicalize()
    }

    /// Canonical `sum_i c_i f_i`.
    pub fn combine(coeffs: &[Complex<R>], fs: &[Self]) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != fs.len() {
            return Err(Error::Validation(format!(
                "combine needs equally long nonempty lists (got {} coefficients, {} functions)",
                coeffs.len(),
                fs.len()
            )));
        }
        let mut bps: Vec<R> = fs.iter().flat_map(|f| f.breakpoints.iter().cloned()).collect();
        bps.sort_by(|a, b| a.partial_cmp(b).expect("comparable breakpoints"));
        bps.dedup();
        let mut cursors = vec![0usize; fs.len()];
        let mut vals = Vec::with_capacity(bps.len() - 1);
        for w in bps.windows(2) {
            let mut acc = czero();
            for (f, (c, cur)) in fs.iter().zip(coeffs.iter().zip(cursors.iter_mut())) {
                while f.breakpoints[*cur + 1] <= w[0] {
                    *cur += 1;
                }
                if !c.is_zero() {
                    acc = acc + c.clone() * f.values[*cur].clone();
                }
            }
            vals.push(acc);
        }
        Ok(StepFunction {
            breakpoints: bps,
            values: vals,
        }
        .canonicalize())
    }

    /// `f` on `[lo, hi)` and zero elsewhere.
    pub fn restrict(&self, lo: &R, hi: &R) -> Self {
        let window = Self::indicator(lo.clone(), hi.clone()).expect("valid window");
        self.zip_with(&window, |a, b| a.clone() * b.clone()).canonicalize()
    }

    /// `x -> f((x - lo) / (hi - lo))` on `[lo, hi)`, zero elsewhere: the
    /// affine transplant of `f` onto a subinterval.
    pub fn transplant(&self, lo: &R, hi: &R) -> Result<Self> {
        if lo < &R::zero() || hi > &R::one() || !(lo < hi) {
            return Err(Error::Validation(format!("bad transplant window [{lo:?}, {hi:?})")));
        }
        let len = hi.clone() - lo.clone();
        let mut bps = Vec::with_capacity(self.breakpoints.len() + 2);
        let mut vals = Vec::with_capacity(self.values.len() + 2);
        if !lo.is_zero() {
            bps.push(R::zero());
            vals.push(czero());
        }
        for (b, v) in self.breakpoints.iter().zip(&self.values) {
            bps.push(lo.clone() + b.clone() * len.clone());
            vals.push(v.clone());
        }
        bps.push(hi.clone());
        if !hi.is_one() {
            vals.push(czero());
            bps.push(R::one());
        }
        Ok(StepFunction {
            breakpoints: bps,
            values: vals,
        }
        .canonicalize())
    }

    /// `x -> f(a x + b)` for an affine `u` with `u([0, 1]) within [0, 1]`.
    pub fn compose_affine(&self, a: &R, b: &R) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Validation("affine change of variable must be invertible".into()));
        }
        let u0 = b.clone();
        let u1 = a.clone() + b.clone();
        let (ulo, uhi) = if u0 < u1 { (u0, u1) } else { (u1, u0) };
        if ulo < R::zero() || uhi > R::one() {
            return Err(Error::Validation("affine change of variable leaves [0, 1]".into()));
        }
        let increasing = a > &R::zero();
        let start = self.piece_index(&ulo);
        let mut xs = vec![R::zero()];
        let mut vals = Vec::new();
        let mut pts: Vec<(R, Complex<R>)> = Vec::new();
        for j in start..self.values.len() {
            if self.breakpoints[j] >= uhi {
                break;
            }
            let next = if self.breakpoints[j + 1] < uhi { self.breakpoints[j + 1].clone() } else { uhi.clone() };
            pts.push((next, self.values[j].clone()));
        }
        if increasing {
            for (y, v) in pts {
                vals.push(v);
                xs.push((y - b.clone()) / a.clone());
            }
        } else {
            // walk the pieces from right to left in x
            let mut lefts: Vec<R> = vec![ulo.clone()];
            lefts.extend(pts.iter().take(pts.len() - 1).map(|(y, _)| y.clone()));
            for ((_, v), left) in pts.iter().zip(lefts).rev() {
                vals.push(v.clone());
                xs.push((left - b.clone()) / a.clone());
            }
        }
        *xs.last_mut().unwrap() = R::one();
        Ok(StepFunction {
            breakpoints: xs,
            values: vals,
        }
        .canonicalize())
    }

    pub fn to_f64(&self) -> StepFunction<f64> {
        StepFunction {
            breakpoints: self.breakpoints.iter().map(Real::to_f64).collect(),
            values: self
                .values
                .iter()
                .map(|v| Complex::new(v.re.to_f64(), v.im.to_f64()))
                .collect(),
        }
        .canonicalize()
    }

    /// Whether every value is real.
    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im.is_zero())
    }
}

impl<R: Real> fmt::Debug for StepFunction<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StepFunction[")?;
        for (j, (lo, _, v)) in self.pieces().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}: {:.6}{:+.6}i", lo.to_f64(), v.re.to_f64(), v.im.to_f64())?;
        }
        write!(f, "]")
    }
}

/// Complex scalar from a real.
pub fn real<R: Real>(x: R) -> Complex<R> {
    Complex::new(x, R::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn q(n: i64, d: i64) -> Complex<Rational> {
        real(rat(n, d))
    }

    fn psi() -> ExactStep {
        ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap()
    }

    fn a_p() -> ExactStep {
        let q1 = ExactStep::indicator(rat(0, 1), rat(1, 8)).unwrap();
        let q2 = ExactStep::indicator(rat(1, 8), rat(1, 4)).unwrap();
        ExactStep::combine(&[q(8, 1), q(-8, 1)], &[q1, q2]).unwrap()
    }

    #[test]
    fn integrals() {
        assert_eq!(ExactStep::indicator(rat(0, 1), rat(1, 2)).unwrap().integrate(), q(1, 2));
        assert!(psi().integrate().is_zero());
        assert!(a_p().integrate().is_zero());
        assert_eq!(psi().integrate_over(&rat(1, 4), &rat(3, 4)), q(0, 1));
        assert_eq!(psi().integrate_over(&rat(0, 1), &rat(1, 4)), q(1, 4));
    }

    #[test]
    fn norms() {
        assert_eq!(psi().lp_norm(2.0).unwrap(), 1.0);
        assert_eq!(ExactStep::indicator(rat(0, 1), rat(1, 4)).unwrap().lp_norm(1.0).unwrap(), 0.25);
        let c = ExactStep::constant(Complex::new(rat(3, 1), rat(-4, 1)));
        assert_eq!(c.lp_norm(f64::INFINITY).unwrap(), 5.0);
        assert!(matches!(psi().lp_norm(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn inner_products() {
        let p = psi();
        assert_eq!(p.inner_product(&p), q(1, 1));
        let f = a_p();
        assert_eq!(ExactStep::real_constant(rat(1, 1)).inner_product(&f), f.integrate().conj());
        let g = ExactStep::scaled_indicator(rat(1, 3), rat(2, 3), Complex::new(rat(0, 1), rat(1, 1))).unwrap();
        // <f, i g> = -i <f, g>
        assert_eq!(p.inner_product(&g), Complex::new(rat(0, 1), rat(-1, 6) + rat(1, 6)));
        assert_eq!(g.inner_product(&p), p.inner_product(&g).conj());
    }

    #[test]
    fn combine_cases() {
        let half = ExactStep::indicator(rat(0, 1), rat(1, 2)).unwrap();
        let z = ExactStep::combine(&[q(1, 1), q(-1, 1)], &[half.clone(), half]).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.piece_count(), 1);
        let ap = a_p();
        assert_eq!(ap.breakpoints(), &[rat(0, 1), rat(1, 8), rat(1, 4), rat(1, 1)]);
        assert_eq!(ap.values(), &[q(8, 1), q(-8, 1), q(0, 1)]);
        assert!(ExactStep::combine(&[], &[]).is_err());
        assert!(ExactStep::combine(&[q(1, 1)], &[]).is_err());
    }

    #[test]
    fn validation() {
        assert!(ExactStep::new(vec![rat(0, 1), rat(1, 1)], vec![]).is_err());
        assert!(ExactStep::new(vec![rat(0, 1), rat(1, 2)], vec![q(1, 1)]).is_err());
        assert!(ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 2), rat(1, 1)], vec![q(1, 1), q(1, 1), q(1, 1)]).is_err());
        assert!(ExactStep::indicator(rat(1, 2), rat(1, 2)).is_err());
    }

    #[test]
    fn evaluation_is_right_continuous() {
        let p = psi();
        assert_eq!(p.eval(&rat(1, 2)), q(-1, 1));
        assert_eq!(p.eval(&rat(0, 1)), q(1, 1));
        assert_eq!(p.eval(&rat(1, 1)), q(-1, 1));
    }

    #[test]
    fn transplant_and_affine() {
        let p = psi();
        let t = p.transplant(&rat(1, 4), &rat(1, 2)).unwrap();
        assert_eq!(t.breakpoints(), &[rat(0, 1), rat(1, 4), rat(3, 8), rat(1, 2), rat(1, 1)]);
        let back = t.compose_affine(&rat(1, 4), &rat(1, 4)).unwrap();
        assert_eq!(back, p);
        let flipped = p.compose_affine(&rat(-1, 1), &rat(1, 1)).unwrap();
        assert_eq!(flipped.values(), &[q(-1, 1), q(1, 1)]);
        assert!(p.compose_affine(&rat(2, 1), &rat(0, 1)).is_err());
    }
}
