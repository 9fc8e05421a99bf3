//! Scalar plumbing shared by the exact (rational) and floating-point paths.

use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary precision rational in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// Complex number over the exact rationals.
pub type ComplexRational = Complex<Rational>;

pub type C64 = Complex<f64>;

/// Breakpoints produced by floating-point inverse branches are snapped to
/// this dyadic grid (about 9.1e-13) when they enter the exact path.
pub const GRID_BITS: u32 = 40;

/// Real field used as breakpoint coordinate and as the real part of step
/// function values. Implemented by [`Rational`] (exact) and `f64`.
pub trait Real:
    Clone
    + Debug
    + PartialOrd
    + PartialEq
    + Send
    + Sync
    + 'static
    + num_traits::Num
    + Signed
{
    const EXACT: bool;

    fn from_rational(r: &Rational) -> Self;

    /// Conversion from a float. For rationals this is the exact dyadic value.
    fn from_f64(x: f64) -> Self;

    /// Conversion from a computed float coordinate, snapped to the
    /// [`GRID_BITS`] grid on the exact path.
    fn from_f64_snapped(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Wire form: a number for floats, a `"p/q"` string for rationals.
    fn to_json(&self) -> serde_json::Value;

    /// Accepts either a number or a rational string.
    fn from_json(v: &serde_json::Value) -> Result<Self>;

    fn from_usize(n: usize) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_rational(r: &Rational) -> Self {
        rational_to_f64(r)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn from_f64_snapped(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(*self)
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| Error::Validation(format!("bad number {n}"))),
            serde_json::Value::String(s) => Ok(rational_to_f64(&parse_rational(s)?)),
            other => Err(Error::Validation(format!("expected a number, got {other}"))),
        }
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }
}

impl Real for Rational {
    const EXACT: bool = true;

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn from_f64_snapped(x: f64) -> Self {
        snap_to_grid(x)
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => match n.as_i64() {
                Some(i) => Ok(rat_int(i)),
                None => match n.as_f64() {
                    Some(x) if x.is_finite() => Ok(<Rational as Real>::from_f64(x)),
                    _ => Err(Error::Validation(format!("bad number {n}"))),
                },
            },
            other => Err(Error::Validation(format!("expected a rational, got {other}"))),
        }
    }
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    if let Some(v) = ToPrimitive::to_f64(r) {
        if v.is_finite() {
            return v;
        }
    }
    // numerator/denominator too large for a direct conversion
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let scaled = if shift > 0 {
        Rational::new(r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        r.clone()
    };
    ToPrimitive::to_f64(&scaled).unwrap_or(f64::NAN)
}

pub fn snap_to_grid(x: f64) -> Rational {
    let scale = (1u64 << GRID_BITS) as f64;
    let n = (x * scale).round();
    Rational::new(
        BigInt::from(n as i64),
        BigInt::from(1u64 << GRID_BITS),
    )
}

/// Fixed float formatting for CSV output: 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"-0.45"` or
/// `"1.5e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Validation(format!("cannot parse rational from {s:?}"));
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Validation(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a complex literal: `"0.3"`, `"0.4i"`, `"-i"`, `"0.1+0.2i"`, or `"re,im"`.
pub fn parse_complex_rational(s: &str) -> Result<ComplexRational> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some((re, im)) = t.split_once(',') {
        return Ok(Complex::new(parse_rational(re)?, parse_rational(im)?));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not part of an exponent
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                split = Some(i);
                break;
            }
        }
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            other => other,
        };
        return Ok(Complex::new(parse_rational(re)?, parse_rational(im)?));
    }
    Ok(Complex::new(parse_rational(&t)?, Rational::zero()))
}

pub fn complex_to_f64<R: Real>(z: &Complex<R>) -> C64 {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn complex_from_rational<R: Real>(z: &ComplexRational) -> Complex<R> {
    Complex::new(R::from_rational(&z.re), R::from_rational(&z.im))
}

/// Modulus of a complex value, as a float.
pub fn modulus<R: Real>(z: &Complex<R>) -> f64 {
    if z.im.is_zero() {
        return z.re.to_f64().abs();
    }
    let c = complex_to_f64(z);
    c.re.hypot(c.im)
}

pub fn cpow<R: Real>(z: &Complex<R>, n: usize) -> Complex<R> {
    let mut acc = Complex::new(R::one(), R::zero());
    let mut base = z.clone();
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base.clone();
        }
        base = base.clone() * base;
        e >>= 1;
    }
    acc
}

pub fn rational_pow(r: &Rational, n: usize) -> Rational {
    num_traits::pow(r.clone(), n)
}

/// Exact `r^beta` when `beta` is a nonnegative integer, otherwise via floats.
pub fn rational_powf(r: &Rational, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    if beta.fract() == 0.0 && beta > 0.0 && beta < 64.0 {
        return rational_to_f64(&rational_pow(r, beta as usize));
    }
    // for 1/q use q^-beta to keep the integer exact
    if r.numer().is_one() {
        if let Some(q) = r.denom().to_f64() {
            return q.powf(-beta);
        }
    }
    rational_to_f64(r).powf(beta)
}

pub fn gcd_of(values: &[BigInt]) -> BigInt {
    values.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

/// A subinterval of `[0, 1]` with exact rational endpoints.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
    pub closed_left: bool,
    pub closed_right: bool,
}

impl Interval {
    /// Half-open `[lo, hi)`.
    pub fn new(lo: Rational, hi: Rational) -> Result<Self> {
        Self::with_closure(lo, hi, true, false)
    }

    pub fn with_closure(lo: Rational, hi: Rational, closed_left: bool, closed_right: bool) -> Result<Self> {
        if lo.is_negative() || hi > Rational::one() || lo >= hi {
            return Err(Error::Validation(format!(
                "interval [{}, {}] must satisfy 0 <= lo < hi <= 1",
                format_rational(&lo),
                format_rational(&hi)
            )));
        }
        Ok(Interval {
            lo,
            hi,
            closed_left,
            closed_right,
        })
    }

    pub fn unit() -> Self {
        Interval::new(Rational::zero(), Rational::one()).unwrap()
    }

    pub fn from_ints(lo: (i64, i64), hi: (i64, i64)) -> Result<Self> {
        Interval::new(rat(lo.0, lo.1), rat(hi.0, hi.1))
    }

    pub fn parse(lo: &str, hi: &str) -> Result<Self> {
        Interval::new(parse_rational(lo)?, parse_rational(hi)?)
    }

    pub fn length(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let left = if self.closed_left { x >= &self.lo } else { x > &self.lo };
        let right = if self.closed_right { x <= &self.hi } else { x < &self.hi };
        left && right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.lo >= self.lo && other.hi <= self.hi
    }

    /// Intersection with positive length, as a half-open interval.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo > other.lo { &self.lo } else { &other.lo };
        let hi = if self.hi < other.hi { &self.hi } else { &other.hi };
        if lo < hi {
            Some(Interval::new(lo.clone(), hi.clone()).unwrap())
        } else {
            None
        }
    }

    pub fn bounds<R: Real>(&self) -> (R, R) {
        (R::from_rational(&self.lo), R::from_rational(&self.hi))
    }
}

impl Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.closed_left { '[' } else { '(' },
            format_rational(&self.lo),
            format_rational(&self.hi),
            if self.closed_right { ']' } else { ')' }
        )
    }
}

/// `["lo", "hi"]` on the wire.
impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [format_rational(&self.lo), format_rational(&self.hi)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        Interval::parse(&lo, &hi).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for rationals written as `"p/q"` strings.
pub mod rational_string {
    use super::*;

    pub fn serialize<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-6/8").unwrap(), rat(-3, 4));
        assert_eq!(parse_rational("0.45").unwrap(), rat(9, 20));
        assert_eq!(parse_rational("-0.3").unwrap(), rat(-3, 10));
        assert_eq!(parse_rational("2").unwrap(), rat_int(2));
        assert_eq!(parse_rational("1.5e-3").unwrap(), rat(3, 2000));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn parses_complex_literals() {
        let z = parse_complex_rational("0.4i").unwrap();
        assert_eq!(z, Complex::new(rat_int(0), rat(2, 5)));
        let z = parse_complex_rational("-0.45").unwrap();
        assert_eq!(z, Complex::new(rat(-9, 20), rat_int(0)));
        let z = parse_complex_rational("0.1-0.2i").unwrap();
        assert_eq!(z, Complex::new(rat(1, 10), rat(-1, 5)));
        let z = parse_complex_rational("0.5,0.25").unwrap();
        assert_eq!(z, Complex::new(rat(1, 2), rat(1, 4)));
        let z = parse_complex_rational("-i").unwrap();
        assert_eq!(z, Complex::new(rat_int(0), rat_int(-1)));
    }

    #[test]
    fn interval_validation() {
        assert!(Interval::from_ints((1, 2), (1, 4)).is_err());
        assert!(Interval::from_ints((0, 1), (3, 2)).is_err());
        let i = Interval::from_ints((1, 4), (1, 2)).unwrap();
        assert!(i.contains(&rat(1, 4)));
        assert!(!i.contains(&rat(1, 2)));
        assert_eq!(i.length(), rat(1, 4));
        let j = Interval::from_ints((3, 8), (1, 1)).unwrap();
        assert_eq!(i.intersect(&j).unwrap(), Interval::from_ints((3, 8), (1, 2)).unwrap());
    }

    #[test]
    fn snapping_and_powers() {
        assert_eq!(snap_to_grid(0.5), rat(1, 2));
        assert!((rational_to_f64(&snap_to_grid(1.0 / 3.0)) - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(rational_powf(&rat(1, 8), 1.0), 0.125);
        assert_eq!(rational_powf(&rat(1, 4), 0.5), 0.5);
        let z = Complex::new(rat(1, 2), rat(1, 2));
        assert_eq!(cpow(&z, 2), Complex::new(rat_int(0), rat(1, 2)));
    }

    #[test]
    fn huge_rationals_convert() {
        let big = rational_pow(&rat(3, 7), 900);
        let v = rational_to_f64(&big);
        assert!(v == 0.0 || v.is_finite());
        let r = Rational::new(BigInt::from(1) << 2000usize, (BigInt::from(1) << 2000usize) * 3);
        assert!((rational_to_f64(&r) - 1.0 / 3.0).abs() < 1e-15);
    }
}
