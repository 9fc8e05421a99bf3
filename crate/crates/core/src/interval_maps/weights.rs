use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Constant,
    Fourier,
}

/// Strictly positive weight `p(x) = a0 + sum_m (c_m cos 2 pi m x + s_m sin 2 pi m x)`.
///
/// Coefficients are stored as `[a0, c1, s1, c2, s2, ...]`; a constant weight
/// carries only `a0`. The weight is the derivative of an inverse branch, so
/// `1 / p(Tx)` is the derivative of the map on that branch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub kind: WeightKind,
    #[serde(rename = "coeffs")]
    pub coefficients: Vec<f64>,
}

impl WeightFunction {
    pub fn constant(value: f64) -> Self {
        WeightFunction {
            kind: WeightKind::Constant,
            coefficients: vec![value],
        }
    }

    pub fn fourier(coefficients: Vec<f64>) -> Self {
        WeightFunction {
            kind: WeightKind::Fourier,
            coefficients,
        }
    }

    pub fn validate_shape(&self) -> Result<()> {
        if self.coefficients.is_empty() {
            return Err(Error::Validation("weight has no coefficients".into()));
        }
        if self.kind == WeightKind::Constant && self.coefficients.len() != 1 {
            return Err(Error::Validation("constant weight takes exactly one coefficient".into()));
        }
        if self.coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Validation("weight coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.coefficients[0]
    }

    fn harmonics(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        // (frequency 2 pi m, cosine coefficient, sine coefficient)
        self.coefficients[1..].chunks(2).enumerate().map(|(i, pair)| {
            let w = 2.0 * PI * (i + 1) as f64;
            (w, pair[0], pair.get(1).copied().unwrap_or(0.0))
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mean()
            + self
                .harmonics()
                .map(|(w, c, s)| c * (w * x).cos() + s * (w * x).sin())
                .sum::<f64>()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.harmonics()
            .map(|(w, c, s)| w * (s * (w * x).cos() - c * (w * x).sin()))
            .sum()
    }

    /// `int_0^x p`.
    pub fn primitive(&self, x: f64) -> f64 {
        self.mean() * x
            + self
                .harmonics()
                .map(|(w, c, s)| c * (w * x).sin() / w + s * (1.0 - (w * x).cos()) / w)
                .sum::<f64>()
    }

    /// `sum |c_m| + |s_m|`, bounding the oscillation around the mean.
    pub fn amplitude_bound(&self) -> f64 {
        self.coefficients[1..].iter().map(|c| c.abs()).sum()
    }

    /// Bound on `sup |p'|`.
    pub fn derivative_bound(&self) -> f64 {
        self.harmonics().map(|(w, c, s)| w * (c.abs() + s.abs())).sum()
    }

    pub fn upper_bound(&self) -> f64 {
        self.mean() + self.amplitude_bound()
    }

    /// Certified lower bound on `inf p`: the coefficient bound when it is
    /// positive, otherwise a dense grid minimum less a Lipschitz margin.
    pub fn lower_bound(&self) -> f64 {
        let coarse = self.mean() - self.amplitude_bound();
        if coarse > 0.0 {
            return coarse;
        }
        let n = 4096;
        let h = 1.0 / n as f64;
        let grid_min = (0..=n).map(|i| self.eval(i as f64 * h)).fold(f64::INFINITY, f64::min);
        (grid_min - self.derivative_bound() * h / 2.0).max(coarse)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        WeightFunction {
            kind: self.kind,
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }
}

/// Coefficientwise sum of weights, padding shorter series with zeros.
pub fn coefficient_sum(weights: &[WeightFunction]) -> Vec<f64> {
    let len = weights.iter().map(|w| w.coefficients.len()).max().unwrap_or(0);
    let mut out = vec![0.0; len];
    for w in weights {
        for (o, c) in out.iter_mut().zip(&w.coefficients) {
            *o += c;
        }
    }
    out
}
