use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::series::iterate_exact;
use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{complex_to_f64, cpow, format_rational, ComplexRational, Rational, C64};
use crate::observables::ExactStep;

/// Largest word count enumerated by [`truncation_value_count`].
pub const WORD_CAP: usize = 1 << 22;

/// Lexicographic order on `(re, im)`.
pub fn cmp_complex(a: &ComplexRational, b: &ComplexRational) -> Ordering {
    a.re.cmp(&b.re).then_with(|| a.im.cmp(&b.im))
}

/// Distinct values of `psi`, sorted by `(re, im)`.
pub fn distinct_values(psi: &ExactStep) -> Vec<ComplexRational> {
    let mut v: Vec<ComplexRational> = psi.values().to_vec();
    v.sort_by(cmp_complex);
    v.dedup();
    v
}

/// The contractions `v -> z^n v + q`, `q` in the value set of `psi`, with
/// the ball-separation certificate around `B(q_0, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineIFS {
    pub z: ComplexRational,
    pub n: usize,
    pub values: Vec<ComplexRational>,
    pub q0: ComplexRational,
    /// `2 diam`, in floating point.
    pub radius: f64,
    pub zn: ComplexRational,
    /// `|z^n q_0 + q - q_0| + |z|^n R <= R` for every `q`.
    pub containment_ok: bool,
    /// `min |q_1 - q_2| > 2 |z|^n R`.
    pub disjoint_ok: bool,
    pub separation_ok: bool,
    pub min_gap: f64,
    /// `R - max_q (|z^n q_0 + q - q_0| + |z|^n R)`.
    pub containment_margin: f64,
    /// `q / (1 - z^n)`.
    pub fixed_points: Vec<ComplexRational>,
}

/// JSON certificate `{z, n, separation_ok, min_gap, containment_margin}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IfsCertificate {
    pub z: C64,
    pub n: usize,
    pub separation_ok: bool,
    pub min_gap: f64,
    pub containment_margin: f64,
    pub disjoint_margin: f64,
    pub radius: f64,
    pub values: Vec<C64>,
    pub fixed_points: Vec<String>,
}

fn dist(a: &ComplexRational, b: &ComplexRational) -> f64 {
    complex_to_f64(&(a.clone() - b.clone())).norm()
}

fn format_complex(z: &ComplexRational) -> String {
    if z.im.is_zero() {
        format_rational(&z.re)
    } else {
        format!("{},{}", format_rational(&z.re), format_rational(&z.im))
    }
}

pub fn cantor_ifs(values: &[ComplexRational], z: &ComplexRational, n: usize) -> Result<AffineIFS> {
    let mut values = values.to_vec();
    values.sort_by(cmp_complex);
    values.dedup();
    if values.len() < 2 {
        return Err(Error::Validation(format!(
            "the value set needs at least two elements, got {}",
            values.len()
        )));
    }
    if n == 0 {
        return Err(Error::Validation("block length n must be at least 1".into()));
    }
    if z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone() >= Rational::one() {
        return Err(Error::Domain("|z| must be below 1".into()));
    }
    let zn = cpow(z, n);
    let abs_zn = complex_to_f64(&zn).norm();
    let q0 = values[0].clone();
    let mut diam = 0.0f64;
    let mut min_gap = f64::INFINITY;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let d = dist(a, b);
            diam = diam.max(d);
            min_gap = min_gap.min(d);
        }
    }
    let radius = 2.0 * diam;
    let reach = values
        .iter()
        .map(|q| dist(&(zn.clone() * q0.clone() + q.clone()), &q0) + abs_zn * radius)
        .fold(0.0f64, f64::max);
    let containment_margin = radius - reach;
    let containment_ok = containment_margin >= 0.0;
    let disjoint_ok = min_gap > 2.0 * abs_zn * radius;
    let one = Complex::new(Rational::one(), Rational::zero());
    let fixed_points = values.iter().map(|q| q.clone() / (one.clone() - zn.clone())).collect();
    Ok(AffineIFS {
        z: z.clone(),
        n,
        q0,
        radius,
        zn,
        containment_ok,
        disjoint_ok,
        separation_ok: containment_ok && disjoint_ok,
        min_gap,
        containment_margin,
        fixed_points,
        values,
    })
}

impl AffineIFS {
    pub fn abs_zn(&self) -> f64 {
        complex_to_f64(&self.zn).norm()
    }

    /// `min |q_1 - q_2| - 2 |z|^n R`.
    pub fn disjoint_margin(&self) -> f64 {
        self.min_gap - 2.0 * self.abs_zn() * self.radius
    }

    pub fn certificate(&self) -> IfsCertificate {
        IfsCertificate {
            z: complex_to_f64(&self.z),
            n: self.n,
            separation_ok: self.separation_ok,
            min_gap: self.min_gap,
            containment_margin: self.containment_margin,
            disjoint_margin: self.disjoint_margin(),
            radius: self.radius,
            values: self.values.iter().map(complex_to_f64).collect(),
            fixed_points: self.fixed_points.iter().map(format_complex).collect(),
        }
    }

    /// `v -> z^n v + q`.
    pub fn apply_inverse(&self, q: &ComplexRational, v: &ComplexRational) -> ComplexRational {
        self.zn.clone() * v.clone() + q.clone()
    }

    /// Whether `v` lies in the closed ball `B(q_0, R)`.
    pub fn in_ball(&self, v: &ComplexRational) -> bool {
        dist(v, &self.q0) <= self.radius
    }
}

/// Depth-`K` backward composition at `x`, seeded with `q_0`:
/// `sum_{l<=K} z^{ln} psi(T^{ln} x) + z^{(K+1)n} q_0`.
pub fn backward_limit(
    map: &PiecewiseMap,
    ifs: &AffineIFS,
    psi: &ExactStep,
    x: &Rational,
    depth: usize,
) -> Result<ComplexRational> {
    backward_limit_seeded(map, ifs, psi, x, depth, &ifs.q0)
}

/// As [`backward_limit`] with an arbitrary seed.
pub fn backward_limit_seeded(
    map: &PiecewiseMap,
    ifs: &AffineIFS,
    psi: &ExactStep,
    x: &Rational,
    depth: usize,
    seed: &ComplexRational,
) -> Result<ComplexRational> {
    let mut orbit = Vec::with_capacity(depth + 1);
    let mut y = x.clone();
    for l in 0..=depth {
        if l > 0 {
            y = iterate_exact(map, &y, ifs.n)?;
        }
        let q = psi.eval(&y);
        if ifs.values.binary_search_by(|v| cmp_complex(v, &q)).is_err() {
            return Err(Error::Validation(format!(
                "psi takes the value {} outside the IFS value set",
                format_complex(&q)
            )));
        }
        orbit.push(q);
    }
    let mut v = seed.clone();
    for q in orbit.iter().rev() {
        v = ifs.apply_inverse(q, &v);
    }
    Ok(v)
}

/// Number of distinct values `sum_{l<=K} z^{ln} q_l` over all words
/// `(q_0, ..., q_K)` of the value set.
pub fn truncation_value_count(ifs: &AffineIFS, depth: usize) -> Result<usize> {
    let words = (ifs.values.len() as u128).checked_pow(depth as u32 + 1);
    if !matches!(words, Some(w) if w <= WORD_CAP as u128) {
        return Err(Error::Resource(format!(
            "{}^{} words exceed the cap of {WORD_CAP}",
            ifs.values.len(),
            depth + 1
        )));
    }
    // build from the deepest level outwards: S_{j} = q + z^n S_{j+1}
    let mut level: Vec<ComplexRational> = ifs.values.clone();
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * ifs.values.len());
        for q in &ifs.values {
            for v in &level {
                next.push(ifs.apply_inverse(q, v));
            }
        }
        next.sort_by(cmp_complex);
        next.dedup();
        level = next;
    }
    Ok(level.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen_lab::series::{h_series, series_value_at, SeriesSpec};
    use crate::fixtures;
    use crate::numeric::{rat, parse_complex_rational};
    use crate::observables::real;

    fn pm1() -> Vec<ComplexRational> {
        vec![real(rat(1, 1)), real(rat(-1, 1))]
    }

    fn d2_psi() -> ExactStep {
        ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![real(rat(1, 1)), real(rat(-1, 1))]).unwrap()
    }

    #[test]
    fn separation_examples() {
        let half = real(rat(1, 2));
        let a = cantor_ifs(&pm1(), &half, 3).unwrap();
        assert!(a.separation_ok);
        assert_eq!(a.fixed_points, vec![real(rat(-8, 7)), real(rat(8, 7))]);
        assert_eq!(a.q0, real(rat(-1, 1)));
        assert_eq!(a.radius, 4.0);
        assert!(!cantor_ifs(&pm1(), &half, 1).unwrap().separation_ok);
        assert!(cantor_ifs(&[real(rat(1, 1))], &half, 1).is_err());
        let cert = serde_json::to_value(a.certificate()).unwrap();
        assert_eq!(cert["separation_ok"], true);
        assert_eq!(cert["fixed_points"][1], "8/7");
    }

    #[test]
    fn separation_is_monotone_in_n() {
        let vals = vec![real(rat(1, 1)), real(rat(-1, 1)), Complex::new(rat(0, 1), rat(1, 1))];
        for z in ["0.5", "0.7i", "-0.3+0.4i", "0.9"] {
            let z = parse_complex_rational(z).unwrap();
            let mut seen = false;
            for n in 1..30 {
                let ok = cantor_ifs(&vals, &z, n).unwrap().separation_ok;
                assert!(!seen || ok);
                seen |= ok;
            }
            assert!(seen);
        }
    }

    #[test]
    fn backward_limit_examples() {
        let d2 = fixtures::d2();
        let z = parse_complex_rational("0.4").unwrap();
        let ifs = cantor_ifs(&pm1(), &z, 2).unwrap();
        let x = rat(3, 10);
        let v = backward_limit(&d2, &ifs, &d2_psi(), &x, 0).unwrap();
        assert_eq!(v, d2_psi().eval(&x) + ifs.zn.clone() * ifs.q0.clone());
        // x = 0 is fixed and psi(0) = 1
        let v = backward_limit(&d2, &ifs, &d2_psi(), &rat(0, 1), 40).unwrap();
        assert!((complex_to_f64(&v).re - 1.0 / 0.84).abs() < 1e-15);
    }

    #[test]
    fn backward_limit_minus_series_is_the_seed_term() {
        let d2 = fixtures::d2();
        let z = parse_complex_rational("0.5").unwrap();
        let ifs = cantor_ifs(&pm1(), &z, 3).unwrap();
        for k in 0..=10 {
            for j in 0..7 {
                let x = rat(2 * j + 1, 17);
                let v = backward_limit(&d2, &ifs, &d2_psi(), &x, k).unwrap();
                let s = series_value_at(&d2, &d2_psi(), &SeriesSpec::new(z.clone(), 3, k).unwrap(), &x).unwrap();
                assert_eq!(v - s, cpow(&ifs.zn, k + 1) * ifs.q0.clone());
                assert!(ifs.in_ball(&backward_limit(&d2, &ifs, &d2_psi(), &x, k).unwrap()));
            }
        }
    }

    #[test]
    fn seeds_contract_together() {
        let d2 = fixtures::d2();
        let z = parse_complex_rational("0.3+0.3i").unwrap();
        let ifs = cantor_ifs(&pm1(), &z, 2).unwrap();
        let seed = Complex::new(rat(5, 1), rat(-2, 1));
        for k in [0, 3, 7] {
            let a = backward_limit(&d2, &ifs, &d2_psi(), &rat(1, 5), k).unwrap();
            let b = backward_limit_seeded(&d2, &ifs, &d2_psi(), &rat(1, 5), k, &seed).unwrap();
            assert_eq!(a - b, cpow(&ifs.zn, k + 1) * (ifs.q0.clone() - seed.clone()));
        }
    }

    #[test]
    fn value_counts() {
        let z = parse_complex_rational("0.5").unwrap();
        let ifs = cantor_ifs(&pm1(), &z, 3).unwrap();
        for k in 0..=10 {
            assert_eq!(truncation_value_count(&ifs, k).unwrap(), 1 << (k + 1));
        }
        // signed binary sums stay distinct without separation; {0, 1, 2} collides
        let ifs = cantor_ifs(&pm1(), &z, 1).unwrap();
        assert_eq!(truncation_value_count(&ifs, 3).unwrap(), 16);
        let ifs = cantor_ifs(&[real(rat(0, 1)), real(rat(1, 1)), real(rat(2, 1))], &z, 1).unwrap();
        assert!(truncation_value_count(&ifs, 3).unwrap() < 81);
        // the materialized truncation realizes every word on the doubling map
        let h = h_series(&fixtures::d2(), &d2_psi(), &SeriesSpec::new(z.clone(), 1, 5).unwrap()).unwrap();
        let ifs = cantor_ifs(&pm1(), &z, 1).unwrap();
        assert_eq!(distinct_values(&h.sum).len(), truncation_value_count(&ifs, 5).unwrap());
    }
}
