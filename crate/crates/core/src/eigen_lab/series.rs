use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_maps::{PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::numeric::{
    complex_from_rational, complex_to_f64, cpow, parse_complex_rational, ComplexRational, Rational, Real, C64,
};
use crate::observables::{check_iterate_cap, pullback_once, ExactStep, StepFunction};

/// Parameters of `h_{z,n} = sum_{l=0}^{N} z^{ln} psi o T^{ln}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    #[serde(with = "complex_text")]
    pub z: ComplexRational,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
}

mod complex_text {
    use super::*;
    use crate::numeric::format_rational;

    pub fn serialize<S: serde::Serializer>(z: &ComplexRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{},{}", format_rational(&z.re), format_rational(&z.im)))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<ComplexRational, D::Error> {
        let text = <String as Deserialize>::deserialize(d)?;
        parse_complex_rational(&text).map_err(serde::de::Error::custom)
    }
}

impl SeriesSpec {
    pub fn new(z: ComplexRational, n: usize, big_n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("block length n must be at least 1".into()));
        }
        let norm_sqr = z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone();
        if norm_sqr >= Rational::one() {
            return Err(Error::Domain(format!("|z| must be below 1, got {}", complex_to_f64(&z).norm())));
        }
        Ok(SeriesSpec { z, n, big_n })
    }

    /// `z` given as text (`"0.3"`, `"-0.45"`, `"0.4i"`, `"1/3+1/5i"`), read exactly.
    pub fn parse(z: &str, n: usize, big_n: usize) -> Result<Self> {
        Self::new(parse_complex_rational(z)?, n, big_n)
    }

    pub fn z_f64(&self) -> C64 {
        complex_to_f64(&self.z)
    }

    /// `z^n`, exact.
    pub fn zn(&self) -> ComplexRational {
        cpow(&self.z, self.n)
    }

    /// `|z|^n` in floating point.
    pub fn abs_zn(&self) -> f64 {
        self.z_f64().norm().powi(self.n as i32)
    }

    /// `|z|^{(N+1)n} sup|psi| / (1 - |z|^n)`.
    pub fn tail_bound(&self, psi_sup: f64) -> f64 {
        let q = self.abs_zn();
        q.powi(self.big_n as i32 + 1) * psi_sup / (1.0 - q)
    }

    /// Deepest iterate of `T` materialized by the residual checks.
    pub fn depth(&self) -> usize {
        (self.big_n + 1) * self.n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedEigenSeries<R: Real = Rational> {
    pub spec: SeriesSpec,
    /// `z^{ln} psi o T^{ln}` for `l = 0..=N`.
    pub terms: Vec<StepFunction<R>>,
    pub sum: StepFunction<R>,
    /// Bound on `sup |h_{z,n} - sum|`.
    pub tail_bound: f64,
}

/// Materializes the truncated series.
pub fn h_series<R: Real>(map: &PiecewiseMap, psi: &StepFunction<R>, spec: &SeriesSpec) -> Result<TruncatedEigenSeries<R>> {
    check_iterate_cap(map, spec.big_n * spec.n, DEFAULT_CYLINDER_CAP)?;
    let zn: Complex<R> = complex_from_rational(&spec.zn());
    let mut terms = Vec::with_capacity(spec.big_n + 1);
    let mut pulled = psi.clone();
    let mut coeff = Complex::new(R::one(), R::zero());
    for l in 0..=spec.big_n {
        if l > 0 {
            for _ in 0..spec.n {
                pulled = pullback_once(map, &pulled);
            }
            coeff = coeff * zn.clone();
        }
        terms.push(pulled.scale(&coeff));
    }
    let ones = vec![Complex::new(R::one(), R::zero()); terms.len()];
    let sum = StepFunction::combine(&ones, &terms)?;
    Ok(TruncatedEigenSeries {
        spec: spec.clone(),
        tail_bound: spec.tail_bound(psi.sup_norm()),
        terms,
        sum,
    })
}

/// `T^m x` exactly; the orbit must stay in `[0, 1)`.
pub fn iterate_exact(map: &PiecewiseMap, x: &Rational, m: usize) -> Result<Rational> {
    let mut y = x.clone();
    for _ in 0..m {
        y = map.evaluate_exact(&y)?.0;
    }
    Ok(y)
}

/// `sum_{l=0}^{N} z^{ln} psi(T^{ln} x)`, summed along the orbit of `x`.
pub fn series_value_at(map: &PiecewiseMap, psi: &ExactStep, spec: &SeriesSpec, x: &Rational) -> Result<ComplexRational> {
    let zn = spec.zn();
    let mut y = x.clone();
    let mut coeff = Complex::new(Rational::one(), Rational::zero());
    let mut acc = Complex::new(Rational::zero(), Rational::zero());
    for l in 0..=spec.big_n {
        if l > 0 {
            y = iterate_exact(map, &y, spec.n)?;
            coeff = coeff * zn.clone();
        }
        acc = acc + coeff.clone() * psi.eval(&y);
    }
    Ok(acc)
}
