use serde::{Deserialize, Serialize};

use super::PseudoNorm;
use crate::error::{Error, Result};
use crate::numeric::{format_float, rat, Rational, Real};
use crate::observables::{real, ExactStep};

/// Test functions transplanted onto intervals `Q` centred at `1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFamily {
    /// `1_Q`.
    Indicators,
    /// A three-step bump `1, 2, 1` on the quarters `1/4, 1/2, 1/4` of `Q`.
    FixedShape,
}

/// Fit of `log n(phi o u) = log C + t log |u'|` over affine rescalings `u`
/// of `[0, 1]` onto `Q`, with `|u'| = 1/|Q|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityReport {
    pub norm_id: String,
    pub t: f64,
    #[serde(rename = "C")]
    pub constant: f64,
    /// Root mean square of the fit residuals in log space.
    pub residual: f64,
    pub scales: Vec<f64>,
    pub values: Vec<f64>,
}

impl HomogeneityReport {
    pub fn csv_header() -> &'static str {
        "norm_id,t,C,residual\n"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{}\n",
            self.norm_id,
            format_float(self.t),
            format_float(self.constant),
            format_float(self.residual)
        )
    }
}

/// `|Q| = 2^-4, ..., 2^-16`.
pub fn default_scales() -> Vec<f64> {
    (4..=16).map(|k| 2f64.powi(-k)).collect()
}

fn probe_function(family: ProbeFamily, len: &Rational) -> Result<ExactStep> {
    let half = rat(1, 2);
    let lo = &half - len / Rational::from_integer(2.into());
    let hi = &lo + len;
    let shape = match family {
        ProbeFamily::Indicators => ExactStep::real_constant(rat(1, 1)),
        ProbeFamily::FixedShape => ExactStep::new(
            vec![rat(0, 1), rat(1, 4), rat(3, 4), rat(1, 1)],
            vec![real(rat(1, 1)), real(rat(2, 1)), real(rat(1, 1))],
        )?,
    };
    shape.transplant(&lo, &hi)
}

pub fn homogeneity_probe(norm: &dyn PseudoNorm, family: ProbeFamily, scales: &[f64]) -> Result<HomogeneityReport> {
    if scales.len() < 4 {
        return Err(Error::Validation(format!("the probe needs at least 4 scales, got {}", scales.len())));
    }
    if let Some(bad) = scales.iter().find(|q| !(**q > 0.0 && **q <= 1.0)) {
        return Err(Error::Validation(format!("probe scales must lie in (0, 1], got {bad}")));
    }
    let (min, max) = scales.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &q| (a.min(q), b.max(q)));
    if max / min < 100.0 {
        return Err(Error::Validation(format!(
            "probe scales must span at least two decades, got [{min:e}, {max:e}]"
        )));
    }
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    let mut values = Vec::with_capacity(scales.len());
    for &q in scales {
        let len = <Rational as Real>::from_f64(q);
        let phi = probe_function(family, &len)?;
        let v = norm.norm(&phi).map_err(|e| Error::Probe {
            scale: q,
            message: e.to_string(),
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Probe {
                scale: q,
                message: format!("{} returned {v}; the fit needs a finite positive value", norm.id()),
            });
        }
        xs.push(-q.ln());
        ys.push(v.ln());
        values.push(v);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let t = sxy / sxx;
    let intercept = my - t * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - t * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(HomogeneityReport {
        norm_id: norm.id(),
        t,
        constant: intercept.exp(),
        residual,
        scales: scales.to_vec(),
        values,
    })
}
