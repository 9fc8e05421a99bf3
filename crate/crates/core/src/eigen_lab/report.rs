use serde::{Deserialize, Serialize};

use super::residual::{CohomologyResidual, EigenResidual};
use crate::numeric::{format_float, C64};

/// One eigen-residual report, `{z, n, N, residual_l1, tail_bound, gram_offdiag_max}`
/// plus the engine and the exact checks behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub z: C64,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub residual_l1: f64,
    pub tail_bound: f64,
    pub gram_offdiag_max: Option<f64>,
    pub engine: String,
    pub exact_shift_ok: bool,
    pub dropped_term_l1: f64,
    pub cohomology_residual_l1: Option<f64>,
}

impl EigenReport {
    pub fn new(res: &EigenResidual, cohomology: Option<&CohomologyResidual>, gram_offdiag_max: Option<f64>) -> Self {
        EigenReport {
            z: res.spec.z_f64(),
            n: res.spec.n,
            big_n: res.spec.big_n,
            residual_l1: res.residual_l1,
            tail_bound: res.tail_bound,
            gram_offdiag_max,
            engine: res.engine.clone(),
            exact_shift_ok: res.exact_shift_ok,
            dropped_term_l1: res.dropped_term_l1,
            cohomology_residual_l1: cohomology.map(|c| c.residual_l1),
        }
    }

    pub fn csv_header() -> &'static str {
        "z_re,z_im,n,N,residual_l1,tail_bound,gram_offdiag_max,engine,exact_shift_ok\n"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}\n",
            format_float(self.z.re),
            format_float(self.z.im),
            self.n,
            self.big_n,
            format_float(self.residual_l1),
            format_float(self.tail_bound),
            self.gram_offdiag_max.map(format_float).unwrap_or_default(),
            self.engine,
            self.exact_shift_ok
        )
    }
}

/// A value of the depth-`K` backward composition at `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorSample {
    /// Exact rational, as text.
    pub x: String,
    pub value: C64,
    pub depth: usize,
}

/// CSV `x,re,im,depth`.
pub fn cantor_samples_csv(samples: &[CantorSample]) -> String {
    let mut out = String::from("x,re,im,depth\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.x,
            format_float(s.value.re),
            format_float(s.value.im),
            s.depth
        ));
    }
    out
}
