use std::any::Any;
use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::pvariation::{p_variation, p_variation_sampled};
use crate::error::{Error, Result};
use crate::numeric::{complex_to_f64, rat, rational_powf, Interval, Rational, Real, C64};
use crate::observables::{FloatStep, Interpolation, SampledObservable, StepFunction};

/// Deepest dyadic level accepted by [`besov_dyadic_upper`].
pub const MAX_DYADIC_DEPTH: u32 = 20;

/// `c |Q|^{s-1} 1_Q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub c: C64,
    pub q: Interval,
}

/// A finite representation `sum c_n |Q_n|^{s-1} 1_{Q_n}`; `cost = sum |c_n|`
/// bounds the `B^s_{1,1}` norm of the function it reconstructs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomicRepresentation {
    pub s: f64,
    pub atoms: Vec<Atom>,
    pub cost: f64,
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::Domain(format!("Besov smoothness must lie in (0, 1), got {s}")));
    }
    Ok(())
}

impl AtomicRepresentation {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("atoms serialize")
    }

    /// `sum c_n |Q_n|^{s-1} 1_{Q_n}` as a float step function.
    pub fn reconstruct(&self) -> FloatStep {
        let mut ends: Vec<&Rational> = vec![];
        for a in &self.atoms {
            ends.push(&a.q.lo);
            ends.push(&a.q.hi);
        }
        let zero = Rational::zero();
        let one = Rational::one();
        ends.push(&zero);
        ends.push(&one);
        ends.sort();
        ends.dedup();
        let mut diff = vec![C64::new(0.0, 0.0); ends.len()];
        for a in &self.atoms {
            let amp = a.c * rational_powf(&a.q.length(), self.s - 1.0);
            let i = ends.binary_search(&&a.q.lo).expect("endpoint present");
            let k = ends.binary_search(&&a.q.hi).expect("endpoint present");
            diff[i] += amp;
            diff[k] -= amp;
        }
        let mut acc = C64::new(0.0, 0.0);
        let mut vals = Vec::with_capacity(ends.len() - 1);
        for d in &diff[..ends.len() - 1] {
            acc += d;
            vals.push(acc);
        }
        let bps: Vec<f64> = ends.iter().map(|r| Real::to_f64(*r)).collect();
        StepFunction::new(bps, vals).expect("sorted endpoints").canonicalize()
    }

    /// `|f - reconstruction|_1`.
    pub fn l1_error<R: Real>(&self, f: &StepFunction<R>) -> f64 {
        f.to_f64().sub(&self.reconstruct()).l1_norm()
    }
}

/// One atom per canonical piece: the value `v` on `P` becomes the coefficient
/// `v |P|^{1-s}`.
pub fn besov_atomic_upper<R: Real>(f: &StepFunction<R>, s: f64) -> Result<AtomicRepresentation> {
    check_s(s)?;
    let f = f.canonicalize();
    let mut atoms = Vec::new();
    // group equal (|v|, |P|) so repeated pieces sum as count * term
    let mut groups: BTreeMap<(u64, Rational), usize> = BTreeMap::new();
    for (lo, hi, v) in f.pieces() {
        if v.re.is_zero() && v.im.is_zero() {
            continue;
        }
        let q = Interval::new(to_rational(lo), to_rational(hi))?;
        let len = q.length();
        let c = complex_to_f64(v);
        atoms.push(Atom {
            c: c * rational_powf(&len, 1.0 - s),
            q,
        });
        *groups.entry((c.norm().to_bits(), len)).or_default() += 1;
    }
    let cost = groups
        .iter()
        .map(|((m, len), count)| *count as f64 * f64::from_bits(*m) * rational_powf(len, 1.0 - s))
        .sum();
    Ok(AtomicRepresentation { s, atoms, cost })
}

/// Exact for rationals; the exact binary value for floats.
fn to_rational<R: Real>(x: &R) -> Rational {
    match (x as &dyn Any).downcast_ref::<Rational>() {
        Some(r) => r.clone(),
        None => <Rational as Real>::from_f64(x.to_f64()),
    }
}

/// What the dyadic construction needs from an observable.
pub trait DyadicSource {
    /// `m(f, [lo, hi])`.
    fn mean(&self, lo: &Rational, hi: &Rational) -> C64;
    /// `v_p(f, (lo, hi))`.
    fn variation(&self, lo: &Rational, hi: &Rational, p: f64) -> Result<f64>;
    /// `int_lo^hi |f - c|`.
    fn deviation(&self, lo: &Rational, hi: &Rational, c: C64) -> f64;
    /// `int |f|` over the complement of `[lo, hi]`.
    fn mass_outside(&self, lo: &Rational, hi: &Rational) -> f64;
}

impl<R: Real> DyadicSource for StepFunction<R> {
    fn mean(&self, lo: &Rational, hi: &Rational) -> C64 {
        complex_to_f64(&self.mean_over(&R::from_rational(lo), &R::from_rational(hi)))
    }

    fn variation(&self, lo: &Rational, hi: &Rational, p: f64) -> Result<f64> {
        p_variation(self, &Interval::with_closure(lo.clone(), hi.clone(), true, true)?, p)
    }

    fn deviation(&self, lo: &Rational, hi: &Rational, c: C64) -> f64 {
        let (lo, hi) = (R::from_rational(lo), R::from_rational(hi));
        let mut acc = 0.0;
        for j in self.piece_index(&lo)..self.piece_count() {
            let (a, b) = (&self.breakpoints()[j], &self.breakpoints()[j + 1]);
            if a >= &hi {
                break;
            }
            let a = if a > &lo { a.clone() } else { lo.clone() };
            let b = if b < &hi { b.clone() } else { hi.clone() };
            acc += (complex_to_f64(&self.values()[j]) - c).norm() * (b - a).to_f64();
        }
        acc
    }

    fn mass_outside(&self, lo: &Rational, hi: &Rational) -> f64 {
        self.l1_norm() - self.deviation(lo, hi, C64::new(0.0, 0.0))
    }
}

/// `int_0^1 |u + v t| dt`.
fn linear_abs_integral(u: C64, v: C64) -> f64 {
    let vv = v.norm_sqr();
    if vv == 0.0 {
        return u.norm();
    }
    let t0 = (u.conj() * v).re / vv;
    let d2 = (u.norm_sqr() / vv - t0 * t0).max(0.0);
    let d = d2.sqrt();
    let prim = |x: f64| {
        if d == 0.0 {
            0.5 * x * x.abs()
        } else {
            0.5 * (x * (x * x + d2).sqrt() + d2 * (x / d).asinh())
        }
    };
    vv.sqrt() * (prim(1.0 + t0) - prim(t0))
}

impl DyadicSource for SampledObservable {
    fn mean(&self, lo: &Rational, hi: &Rational) -> C64 {
        let (a, b) = (Real::to_f64(lo), Real::to_f64(hi));
        self.integral(a, b) / (b - a)
    }

    fn variation(&self, lo: &Rational, hi: &Rational, p: f64) -> Result<f64> {
        p_variation_sampled(self, Real::to_f64(lo), Real::to_f64(hi), p)
    }

    fn deviation(&self, lo: &Rational, hi: &Rational, c: C64) -> f64 {
        let (a, b) = (Real::to_f64(lo), Real::to_f64(hi));
        if !(a < b) {
            return 0.0;
        }
        let n = self.grid_size();
        // split [a, b] at the grid nodes; the interpolant is affine in between
        let (h, cells) = match self.interpolation() {
            Interpolation::PiecewiseConstant => (1.0 / n as f64, n),
            Interpolation::PiecewiseLinear => (1.0 / (n - 1) as f64, n - 1),
        };
        let first = ((a / h).floor() as usize).min(cells - 1);
        let mut acc = 0.0;
        for j in first..cells {
            let x0 = (j as f64 * h).max(a);
            let x1 = ((j + 1) as f64 * h).min(b);
            if x0 >= b {
                break;
            }
            if x1 <= x0 {
                continue;
            }
            match self.interpolation() {
                Interpolation::PiecewiseConstant => acc += (self.samples()[j] - c).norm() * (x1 - x0),
                Interpolation::PiecewiseLinear => {
                    let u = self.eval(x0) - c;
                    let w = self.eval(x1) - c;
                    acc += (x1 - x0) * linear_abs_integral(u, w - u);
                }
            }
        }
        acc
    }

    fn mass_outside(&self, lo: &Rational, hi: &Rational) -> f64 {
        let zero = C64::new(0.0, 0.0);
        self.deviation(&Rational::zero(), lo, zero) + self.deviation(hi, &Rational::one(), zero)
    }
}

/// The constant `4 / (1 - 2^{-(1/p - s)})` from summing the Hölder estimate
/// over dyadic levels.
pub fn dyadic_constant(s: f64, p: f64) -> Result<f64> {
    check_s(s)?;
    if p.is_nan() || p < 1.0 {
        return Err(Error::Domain(format!("variation exponent must be >= 1, got {p}")));
    }
    if s * p >= 1.0 {
        return Err(Error::Domain(format!("the dyadic bound needs s p < 1, got s={s}, p={p}")));
    }
    Ok(4.0 / (1.0 - 2f64.powf(-(1.0 / p - s))))
}

/// Output of [`besov_dyadic_upper`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicReport {
    /// Level-0 atom `m(f, J) |J|^{1-s}` on `J` followed by the telescoping
    /// atoms of `f_{k+1} - f_k`, `k < depth`.
    pub rep: AtomicRepresentation,
    /// `C |J|^{1-s} v_p(f, J)`, which dominates the telescoping cost.
    pub bound: f64,
    pub constant: f64,
    pub variation: f64,
    /// `|m(f, J)| |J|^{1-s}`.
    pub mean_cost: f64,
    /// Cost of the telescoping atoms alone.
    pub telescoping_cost: f64,
    /// `|f - f_depth|_1`.
    pub reconstruction_error: f64,
    pub depth: u32,
}

/// Dyadic averages `f_k = sum_{P in D^k} m(f, P) 1_P` of `f` on `J`, with
/// atoms `(m(f, P) - m(f, Q)) |P|^{1-s}` for each child `P` of `Q`.
pub fn besov_dyadic_upper<F: DyadicSource + ?Sized>(
    f: &F,
    j: &Interval,
    s: f64,
    p: f64,
    depth: u32,
) -> Result<DyadicReport> {
    let constant = dyadic_constant(s, p)?;
    if depth > MAX_DYADIC_DEPTH {
        return Err(Error::Resource(format!(
            "dyadic depth {depth} exceeds the cap of {MAX_DYADIC_DEPTH}"
        )));
    }
    let outside = f.mass_outside(&j.lo, &j.hi);
    if outside > 1e-12 {
        return Err(Error::Validation(format!(
            "the observable must vanish outside J; it has L1 mass {outside:e} there"
        )));
    }
    let len = j.length();
    let scale = |level: u32| rational_powf(&(&len / Rational::from_integer((1u64 << level).into())), 1.0 - s);
    let m0 = f.mean(&j.lo, &j.hi);
    let mean_cost = m0.norm() * scale(0);
    let mut atoms = Vec::new();
    if m0.norm() > 0.0 {
        atoms.push(Atom {
            c: m0 * scale(0),
            q: j.clone(),
        });
    }
    let mut means = vec![m0];
    let mut telescoping_cost = 0.0;
    for k in 0..depth {
        let cells = 1i64 << (k + 1);
        let child_scale = scale(k + 1);
        let mut next = Vec::with_capacity(cells as usize);
        for c in 0..cells {
            let lo = &j.lo + &len * rat(c, cells);
            let hi = &j.lo + &len * rat(c + 1, cells);
            let m = f.mean(&lo, &hi);
            let diff = m - means[(c / 2) as usize];
            if diff.norm() > 0.0 {
                telescoping_cost += diff.norm() * child_scale;
                atoms.push(Atom {
                    c: diff * child_scale,
                    q: Interval::new(lo, hi)?,
                });
            }
            next.push(m);
        }
        means = next;
    }
    let cells = 1i64 << depth;
    let reconstruction_error = (0..cells)
        .map(|c| {
            let lo = &j.lo + &len * rat(c, cells);
            let hi = &j.lo + &len * rat(c + 1, cells);
            f.deviation(&lo, &hi, means[c as usize])
        })
        .sum();
    let variation = f.variation(&j.lo, &j.hi, p)?;
    let bound = constant * rational_powf(&len, 1.0 - s) * variation;
    Ok(DyadicReport {
        rep: AtomicRepresentation {
            s,
            atoms,
            cost: mean_cost + telescoping_cost,
        },
        bound,
        constant,
        variation,
        mean_cost,
        telescoping_cost,
        reconstruction_error,
        depth,
    })
}

/// Atomic cost of `f` from [`besov_atomic_upper`], usable as a norm.
pub fn atomic_cost<R: Real>(f: &StepFunction<R>, s: f64) -> Result<f64> {
    Ok(besov_atomic_upper(f, s)?.cost)
}
