use std::cmp::Ordering;

use nalgebra::{DMatrix, Schur};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{format_float, C64};

/// Largest matrix dimension accepted by [`spectrum`].
pub const SPECTRUM_DIMENSION_CAP: usize = 4096;

/// Required backward accuracy relative to the Frobenius norm.
pub const BACKWARD_ERROR_TOL: f64 = 1e-8;

const SCHUR_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// Sorted by modulus, descending; ties by real then imaginary part.
    pub eigenvalues: Vec<C64>,
    pub leading: C64,
    /// Second largest modulus over the largest (0 for a 1x1 or zero matrix).
    pub gap_rate: f64,
    /// `|A - Q T Q*|_F / |A|_F` of the Schur factorization.
    pub backward_error: f64,
}

impl SpectrumReport {
    pub fn spectral_radius(&self) -> f64 {
        self.leading.norm()
    }

    /// CSV with header `re,im,modulus`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,modulus\n");
        for z in &self.eigenvalues {
            out.push_str(&format!("{},{},{}\n", format_float(z.re), format_float(z.im), format_float(z.norm())));
        }
        out
    }
}

fn order(a: &C64, b: &C64) -> Ordering {
    b.norm()
        .total_cmp(&a.norm())
        .then(b.re.total_cmp(&a.re))
        .then(b.im.total_cmp(&a.im))
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::Validation(format!("spectrum needs a square matrix, got {rows}x{cols}")));
    }
    if rows == 0 {
        return Err(Error::Validation("spectrum of an empty matrix".into()));
    }
    if rows > SPECTRUM_DIMENSION_CAP {
        return Err(Error::Resource(format!(
            "matrix dimension {rows} exceeds the cap of {SPECTRUM_DIMENSION_CAP}"
        )));
    }
    Ok(())
}

fn report(mut eigenvalues: Vec<C64>, backward_error: f64) -> Result<SpectrumReport> {
    // clean signed zeros and round-off imaginary parts on real matrices
    for z in eigenvalues.iter_mut() {
        if z.re == 0.0 {
            z.re = 0.0;
        }
        if z.im == 0.0 {
            z.im = 0.0;
        }
    }
    eigenvalues.sort_by(order);
    if backward_error > BACKWARD_ERROR_TOL {
        return Err(Error::Numeric(format!(
            "Schur backward error {backward_error:e} exceeds {BACKWARD_ERROR_TOL:e}; eigenvalues unreliable: {eigenvalues:?}"
        )));
    }
    let leading = eigenvalues[0];
    let gap_rate = match eigenvalues.get(1) {
        Some(second) if leading.norm() > 0.0 => second.norm() / leading.norm(),
        _ => 0.0,
    };
    Ok(SpectrumReport {
        eigenvalues,
        leading,
        gap_rate,
        backward_error,
    })
}

/// All eigenvalues of a dense real matrix via a real Schur decomposition.
pub fn spectrum(matrix: &DMatrix<f64>) -> Result<SpectrumReport> {
    check_shape(matrix.nrows(), matrix.ncols())?;
    let norm = matrix.norm();
    if norm == 0.0 {
        return report(vec![C64::new(0.0, 0.0); matrix.nrows()], 0.0);
    }
    let schur = Schur::try_new(matrix.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric(format!("Schur iteration did not converge in {SCHUR_MAX_ITER} sweeps")))?;
    let eig: Vec<C64> = schur.complex_eigenvalues().iter().copied().collect();
    let (q, t) = schur.unpack();
    let backward = (matrix - &q * &t * q.transpose()).norm() / norm;
    report(eig, backward)
}

/// All eigenvalues of a dense complex matrix via a complex Schur decomposition.
pub fn spectrum_complex(matrix: &DMatrix<C64>) -> Result<SpectrumReport> {
    check_shape(matrix.nrows(), matrix.ncols())?;
    let norm = matrix.norm();
    if norm == 0.0 {
        return report(vec![C64::new(0.0, 0.0); matrix.nrows()], 0.0);
    }
    let schur = Schur::try_new(matrix.clone(), f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Numeric(format!("Schur iteration did not converge in {SCHUR_MAX_ITER} sweeps")))?;
    let (q, t) = schur.unpack();
    let eig: Vec<C64> = t.diagonal().iter().copied().collect();
    let backward = (matrix - &q * &t * q.adjoint()).norm() / norm;
    report(eig, backward)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx(got: &[C64], want: &[C64]) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn examples() {
        let r = spectrum(&DMatrix::from_element(2, 2, 0.5)).unwrap();
        approx(&r.eigenvalues, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert!(r.gap_rate < 1e-15);
        let r = spectrum(&DMatrix::identity(3, 3)).unwrap();
        approx(&r.eigenvalues, &[C64::new(1.0, 0.0); 3]);
        let r = spectrum(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).unwrap();
        approx(&r.eigenvalues, &[C64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn rotation_has_complex_pair() {
        let r = spectrum(&DMatrix::from_row_slice(2, 2, &[0.0, -2.0, 2.0, 0.0])).unwrap();
        approx(&r.eigenvalues, &[C64::new(0.0, 2.0), C64::new(0.0, -2.0)]);
        assert_eq!(r.gap_rate, 1.0);
    }

    #[test]
    fn complex_matrices() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(0.0, 1.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.5, 0.0)],
        );
        let r = spectrum_complex(&m).unwrap();
        approx(&r.eigenvalues, &[C64::new(0.0, 1.0), C64::new(0.5, 0.0)]);
    }

    #[test]
    fn shape_errors() {
        assert!(matches!(spectrum(&DMatrix::zeros(2, 3)), Err(Error::Validation(_))));
        assert!(matches!(spectrum(&DMatrix::zeros(5000, 5000)), Err(Error::Resource(_))));
    }

    #[test]
    fn random_matrices_meet_backward_error() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [3, 10, 40] {
            let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            let r = spectrum(&m).unwrap();
            assert!(r.backward_error < 1e-12);
            // trace equals the eigenvalue sum
            let s: C64 = r.eigenvalues.iter().sum();
            assert!((s.re - m.trace()).abs() < 1e-10 && s.im.abs() < 1e-10);
        }
    }
}
