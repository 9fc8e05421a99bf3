use std::any::Any;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::kernel::KernelPsi;
use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{complex_to_f64, format_rational, Rational, Real, C64};
use crate::observables::{check_iterate_cap, pullback_once, StepFunction};

/// Largest total piece count of `psi o T^l` kept in memory at once.
pub const GRAM_PIECE_CAP: usize = 1 << 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramReport {
    pub l_max: usize,
    /// `G[i][j] = <psi o T^i, psi o T^j>` as `[re, im]`.
    pub entries: Vec<Vec<C64>>,
    pub offdiag_max: f64,
    pub diag_min: f64,
    pub diag_max: f64,
    /// Exact arithmetic: every off-diagonal entry is 0.
    pub exact_offdiag_zero: Option<bool>,
    /// Exact arithmetic: the common diagonal value, when constant.
    pub exact_diagonal: Option<String>,
}

/// `<psi o T^i, psi o T^j>` for `0 <= i, j <= l_max`.
pub fn gram_matrix<R: Real>(map: &PiecewiseMap, psi: &StepFunction<R>, l_max: usize) -> Result<Vec<Vec<Complex<R>>>> {
    check_iterate_cap(map, l_max, GRAM_PIECE_CAP)?;
    let total: u128 = (0..=l_max as u32)
        .map(|l| psi.piece_count() as u128 * (map.branch_count() as u128).pow(l))
        .sum();
    if total > GRAM_PIECE_CAP as u128 {
        return Err(Error::Resource(format!(
            "Gram matrix needs {total} pieces, above the cap of {GRAM_PIECE_CAP}"
        )));
    }
    let mut fs = vec![psi.clone()];
    for l in 1..=l_max {
        let next = pullback_once(map, &fs[l - 1]);
        fs.push(next);
    }
    let n = l_max + 1;
    let zero = Complex::new(R::zero(), R::zero());
    let mut g = vec![vec![zero; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = fs[i].inner_product(&fs[j]);
            g[j][i] = v.conj();
            g[i][j] = v;
        }
    }
    Ok(g)
}

fn summarize<R: Real>(g: &[Vec<Complex<R>>]) -> GramReport {
    let n = g.len();
    let entries: Vec<Vec<C64>> = g.iter().map(|r| r.iter().map(complex_to_f64).collect()).collect();
    let mut offdiag_max = 0.0f64;
    let (mut diag_min, mut diag_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                diag_min = diag_min.min(entries[i][i].re);
                diag_max = diag_max.max(entries[i][i].re);
            } else {
                offdiag_max = offdiag_max.max(entries[i][j].norm());
            }
        }
    }
    let (mut exact_offdiag_zero, mut exact_diagonal) = (None, None);
    if R::EXACT {
        let exact: Vec<Vec<Complex<Rational>>> = g
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| {
                        let re = (&v.re as &dyn Any).downcast_ref::<Rational>().cloned().unwrap_or_default();
                        let im = (&v.im as &dyn Any).downcast_ref::<Rational>().cloned().unwrap_or_default();
                        Complex::new(re, im)
                    })
                    .collect()
            })
            .collect();
        exact_offdiag_zero = Some((0..n).all(|i| (0..n).all(|j| i == j || exact[i][j].is_zero())));
        let d0 = &exact[0][0];
        if (0..n).all(|i| &exact[i][i] == d0) && d0.im.is_zero() {
            exact_diagonal = Some(format_rational(&d0.re));
        }
    }
    GramReport {
        l_max: n - 1,
        entries,
        offdiag_max,
        diag_min,
        diag_max,
        exact_offdiag_zero,
        exact_diagonal,
    }
}

/// Gram matrix of `{psi o T^l}` with its orthogonality summary; exact for
/// exact observables.
pub fn orthogonality_gram(map: &PiecewiseMap, psi: &KernelPsi, l_max: usize) -> Result<GramReport> {
    match psi {
        KernelPsi::Exact(f) => Ok(summarize(&gram_matrix(map, f, l_max)?)),
        KernelPsi::Float(f) => Ok(summarize(&gram_matrix(map, f, l_max)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::rat;
    use crate::observables::{real, ExactStep};

    #[test]
    fn rademacher_system() {
        let psi = ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![real(rat(1, 1)), real(rat(-1, 1))]).unwrap();
        let r = orthogonality_gram(&fixtures::d2(), &KernelPsi::Exact(psi), 4).unwrap();
        assert_eq!(r.exact_offdiag_zero, Some(true));
        assert_eq!(r.exact_diagonal.as_deref(), Some("1"));
        assert_eq!(r.offdiag_max, 0.0);
    }

    #[test]
    fn three_branch_diagonal_is_six() {
        let psi = ExactStep::new(
            vec![rat(0, 1), rat(1, 2), rat(3, 4), rat(1, 1)],
            vec![real(rat(2, 1)), real(rat(-4, 1)), real(rat(0, 1))],
        )
        .unwrap();
        let r = orthogonality_gram(&fixtures::l3(), &KernelPsi::Exact(psi), 4).unwrap();
        assert_eq!(r.exact_offdiag_zero, Some(true));
        assert_eq!(r.exact_diagonal.as_deref(), Some("6"));
    }

    #[test]
    fn non_kernel_observables_are_not_orthogonal() {
        let psi = ExactStep::indicator(rat(0, 1), rat(1, 3)).unwrap();
        let g = gram_matrix(&fixtures::d2(), &psi, 3).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(g[i][j], g[j][i].conj());
            }
        }
        let r = orthogonality_gram(&fixtures::d2(), &KernelPsi::Exact(psi), 3).unwrap();
        assert_eq!(r.exact_offdiag_zero, Some(false));
        // invariance keeps the diagonal at |psi|_2^2 = 1/3
        assert_eq!(r.exact_diagonal.as_deref(), Some("1/3"));
    }
}
