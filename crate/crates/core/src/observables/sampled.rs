use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::step::StepFunction;
use crate::error::{Error, Result};
use crate::numeric::{Real, C64};

/// Default quantization resolution `2^-16`.
pub const DEFAULT_QUANTIZATION_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// `samples[j]` holds on the cell `[j/N, (j+1)/N)`.
    PiecewiseConstant,
    /// `samples[j]` is the value at the node `j/(N-1)`.
    PiecewiseLinear,
}

/// An observable known through samples on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledObservable {
    samples: Vec<C64>,
    interpolation: Interpolation,
    /// Integral of the interpolant from 0 to each grid node.
    prefix: Vec<C64>,
}

fn prefix_integrals(samples: &[C64], interpolation: Interpolation) -> Vec<C64> {
    let n = samples.len();
    let mut acc = Complex::new(0.0, 0.0);
    let mut out = vec![acc];
    match interpolation {
        Interpolation::PiecewiseConstant => {
            let h = 1.0 / n as f64;
            for s in samples {
                acc += s * h;
                out.push(acc);
            }
        }
        Interpolation::PiecewiseLinear => {
            let h = 1.0 / (n - 1) as f64;
            for w in samples.windows(2) {
                acc += (w[0] + w[1]) * (0.5 * h);
                out.push(acc);
            }
        }
    }
    out
}

/// Result of [`SampledObservable::quantize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Quantized<R: Real> {
    pub step: StepFunction<R>,
    /// Bound on `sup |g - step|`.
    pub sup_error: f64,
    pub bits: u32,
}

impl SampledObservable {
    pub fn new(samples: Vec<C64>, interpolation: Interpolation) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Validation("a sampled observable needs at least two samples".into()));
        }
        if samples.iter().any(|s| !(s.re.is_finite() && s.im.is_finite())) {
            return Err(Error::Validation("samples must be finite".into()));
        }
        let prefix = prefix_integrals(&samples, interpolation);
        Ok(SampledObservable {
            samples,
            interpolation,
            prefix,
        })
    }

    /// Samples `f` at the nodes (linear) or cell midpoints (constant).
    pub fn from_fn<F: Fn(f64) -> C64>(n: usize, interpolation: Interpolation, f: F) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation("grid size must be at least 2".into()));
        }
        let samples = (0..n)
            .map(|j| match interpolation {
                Interpolation::PiecewiseLinear => f(j as f64 / (n - 1) as f64),
                Interpolation::PiecewiseConstant => f((j as f64 + 0.5) / n as f64),
            })
            .collect();
        Self::new(samples, interpolation)
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c, c], Interpolation::PiecewiseLinear).expect("finite constant")
    }

    pub fn grid_size(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn eval(&self, x: f64) -> C64 {
        let n = self.samples.len();
        let x = x.clamp(0.0, 1.0);
        match self.interpolation {
            Interpolation::PiecewiseConstant => self.samples[((x * n as f64) as usize).min(n - 1)],
            Interpolation::PiecewiseLinear => {
                let t = x * (n - 1) as f64;
                let j = (t as usize).min(n - 2);
                let frac = t - j as f64;
                self.samples[j] * (1.0 - frac) + self.samples[j + 1] * frac
            }
        }
    }

    /// Antiderivative of the interpolant, `int_0^x g`.
    fn primitive(&self, x: f64) -> C64 {
        let n = self.samples.len();
        let x = x.clamp(0.0, 1.0);
        match self.interpolation {
            Interpolation::PiecewiseConstant => {
                let h = 1.0 / n as f64;
                let j = ((x * n as f64) as usize).min(n - 1);
                self.prefix[j] + self.samples[j] * (x - j as f64 * h)
            }
            Interpolation::PiecewiseLinear => {
                let h = 1.0 / (n - 1) as f64;
                let t = x / h;
                let j = (t as usize).min(n - 2);
                let d = x - j as f64 * h;
                let a = self.samples[j];
                let slope = (self.samples[j + 1] - a) / h;
                self.prefix[j] + a * d + slope * (0.5 * d * d)
            }
        }
    }

    /// `int_a^b g` for the interpolant.
    pub fn integral(&self, a: f64, b: f64) -> C64 {
        self.primitive(b) - self.primitive(a)
    }

    /// Integrals over the `2^bits` dyadic cells, computed in one sweep.
    pub fn cell_integrals(&self, bits: u32) -> Vec<C64> {
        let m = 1usize << bits;
        let mut prev = Complex::new(0.0, 0.0);
        (1..=m)
            .map(|j| {
                let cur = self.primitive(j as f64 / m as f64);
                let out = cur - prev;
                prev = cur;
                out
            })
            .collect()
    }

    /// Sup of `|g|` over the interpolant.
    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }

    /// Largest increment between neighbouring samples, per unit length.
    pub fn lipschitz_estimate(&self) -> f64 {
        let n = self.samples.len();
        let h = match self.interpolation {
            Interpolation::PiecewiseConstant => 1.0 / n as f64,
            Interpolation::PiecewiseLinear => 1.0 / (n - 1) as f64,
        };
        self.samples
            .windows(2)
            .map(|w| (w[1] - w[0]).norm() / h)
            .fold(0.0, f64::max)
    }

    /// Cell averages on the dyadic grid of mesh `2^-bits`.
    pub fn quantize<R: Real>(&self, bits: u32) -> Result<Quantized<R>> {
        if bits > 30 {
            return Err(Error::Resource(format!("quantization at 2^-{bits} exceeds the 2^-30 limit")));
        }
        let m = 1usize << bits;
        let integrals = self.cell_integrals(bits);
        let mut bps = Vec::with_capacity(m + 1);
        bps.push(R::zero());
        let mut vals = Vec::with_capacity(m);
        for (j, int) in integrals.iter().enumerate() {
            let avg = int * m as f64;
            vals.push(Complex::new(R::from_f64(avg.re), R::from_f64(avg.im)));
            bps.push(if j + 1 == m {
                R::one()
            } else {
                R::from_rational(&crate::numeric::rat((j + 1) as i64, m as i64))
            });
        }
        let sup_error = match self.interpolation {
            Interpolation::PiecewiseLinear => self.lipschitz_estimate() / m as f64,
            Interpolation::PiecewiseConstant => {
                if m % self.samples.len() == 0 {
                    0.0
                } else {
                    self.lipschitz_estimate() / self.samples.len() as f64
                }
            }
        };
        Ok(Quantized {
            step: StepFunction::from_parts(bps, vals).canonicalize(),
            sup_error,
            bits,
        })
    }
}
