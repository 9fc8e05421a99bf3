use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function_norms::PseudoNorm;
use crate::interval_maps::{partition_levels, PiecewiseMap, DEFAULT_CYLINDER_CAP};
use crate::numeric::{format_float, Interval, Rational};
use crate::observables::{real, ExactStep};
use crate::transfer_operator::apply_exact_power;

/// One row of [`contrast_decay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub k: usize,
    /// Number of cylinders `P` in `P^{k+1}` that have two children.
    pub cylinders: usize,
    /// Whether every contrast integrates to zero exactly.
    pub mean_zero: bool,
    pub lk_l1_min: f64,
    pub lk_l1_max: f64,
    /// `(norm id, min over P of |a_P|)`.
    pub norms: Vec<(String, f64)>,
}

/// `1_{Q1}/|Q1| - 1_{Q2}/|Q2|`.
pub fn contrast(q1: &Interval, q2: &Interval) -> Result<ExactStep> {
    let a = ExactStep::scaled_indicator(q1.lo.clone(), q1.hi.clone(), real(q1.length().recip()))?;
    let b = ExactStep::scaled_indicator(q2.lo.clone(), q2.hi.clone(), real(q2.length().recip()))?;
    Ok(a.sub(&b))
}

/// For each `k`, the contrasts `a_P` built on the two leftmost children of
/// each `P` in `P^{k+1}`, with `|L^k a_P|_1` and `min_P |a_P|` per norm.
pub fn contrast_decay(
    map: &PiecewiseMap,
    ks: &[usize],
    norms: &[Arc<dyn PseudoNorm>],
) -> Result<Vec<ContrastRow>> {
    if !(map.is_linear() && map.markov) {
        return Err(Error::Validation("contrast decay needs a piecewise-linear Markov map".into()));
    }
    let Some(&k_top) = ks.iter().max() else {
        return Ok(vec![]);
    };
    let levels = partition_levels(map, k_top + 2, DEFAULT_CYLINDER_CAP)?;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        let parents = &levels[k];
        let children = &levels[k + 1];
        let mut ci = 0;
        let mut mean_zero = true;
        let mut count = 0;
        let (mut lo_l1, mut hi_l1) = (f64::INFINITY, 0.0f64);
        let mut mins = vec![f64::INFINITY; norms.len()];
        for p in parents {
            let mut kids: Vec<&Interval> = vec![];
            while ci < children.len() && children[ci].support.lo < p.support.hi {
                if p.support.contains_interval(&children[ci].support) && kids.len() < 2 {
                    kids.push(&children[ci].support);
                }
                ci += 1;
            }
            if kids.len() < 2 {
                continue;
            }
            count += 1;
            let a = contrast(kids[0], kids[1])?;
            let integral = a.integrate();
            mean_zero &= integral.re.is_zero() && integral.im == Rational::zero();
            let l1 = apply_exact_power(map, &a, k)?.l1_norm();
            lo_l1 = lo_l1.min(l1);
            hi_l1 = hi_l1.max(l1);
            for (m, n) in mins.iter_mut().zip(norms) {
                *m = m.min(n.norm(&a)?);
            }
        }
        rows.push(ContrastRow {
            k,
            cylinders: count,
            mean_zero,
            lk_l1_min: lo_l1,
            lk_l1_max: hi_l1,
            norms: norms.iter().map(|n| n.id()).zip(mins).collect(),
        });
    }
    Ok(rows)
}

pub fn contrast_csv(rows: &[ContrastRow]) -> String {
    let mut out = String::from("k,cylinders,mean_zero,lk_l1_min,lk_l1_max");
    if let Some(r) = rows.first() {
        for (id, _) in &r.norms {
            out.push(',');
            out.push_str(id);
        }
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}",
            r.k,
            r.cylinders,
            r.mean_zero,
            format_float(r.lk_l1_min),
            format_float(r.lk_l1_max)
        ));
        for (_, v) in &r.norms {
            out.push(',');
            out.push_str(&format_float(*v));
        }
        out.push('\n');
    }
    out
}
