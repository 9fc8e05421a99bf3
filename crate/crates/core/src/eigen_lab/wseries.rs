use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval_maps::PiecewiseMap;
use crate::numeric::{Real, C64};
use crate::observables::{FloatStep, StepFunction};
use crate::transfer_operator::{spectrum, ulam_matrix, UlamMatrix};

/// Terms below this fraction of the largest term are rounding noise and are
/// left out of the ratio fit.
pub const NOISE_FLOOR: f64 = 1e-13;

/// `w_{z,n} = sum_{l>=1} z^{-ln} L^{ln} psi` on the Ulam surrogate of `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WSeries {
    pub z: C64,
    pub n: usize,
    pub resolution: usize,
    pub l_max: usize,
    /// Cell averages of `L^{ln} psi`, `l = 0..=l_max`.
    pub l_powers: Vec<Vec<C64>>,
    /// `|z^{-ln} L^{ln} psi|_1`, `l = 1..=l_max`.
    pub term_norms: Vec<f64>,
    /// `|sum_{m<=l} z^{-mn} L^{mn} psi|_1`, `l = 1..=l_max`.
    pub partial_sum_norms: Vec<f64>,
    /// Fitted geometric decay ratio of the terms; 0 when every term vanishes.
    pub ratio: Option<f64>,
    pub converged: bool,
    /// `|t_last| r / (1 - r)`; infinite when not converged.
    pub tail_estimate: f64,
    /// `|L^n w - z^n w + L^n psi|_1` on the surrogate.
    pub identity_residual: f64,
    /// Residual allowed by rounding of the partial sums alone.
    pub roundoff_floor: f64,
    pub identity_ok: bool,
    /// Second eigenvalue modulus of the Ulam matrix, when computed.
    pub lambda2: Option<f64>,
    /// `(|lambda2| / |z|)^n`.
    pub predicted_ratio: Option<f64>,
    /// Cell averages of the final partial sum.
    pub w: Vec<C64>,
}

impl WSeries {
    pub fn w_step(&self, matrix: &UlamMatrix) -> FloatStep {
        matrix.lift(&self.w)
    }
}

fn weighted_l1(v: &[C64], m: &[f64]) -> f64 {
    v.iter().zip(m).map(|(a, w)| a.norm() * w).sum()
}

fn power(matrix: &UlamMatrix, v: &[C64], n: usize) -> Vec<C64> {
    let mut out = v.to_vec();
    for _ in 0..n {
        out = matrix.apply_to_averages(&out);
    }
    out
}

/// Least-squares slope of `ln y` against the index, over the entries above
/// the noise floor.
fn fit_ratio(norms: &[f64]) -> Option<f64> {
    let top = norms.iter().cloned().fold(0.0f64, f64::max);
    if top == 0.0 {
        return Some(0.0);
    }
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > NOISE_FLOOR * top)
        .map(|(i, &y)| (i as f64, y.ln()))
        .collect();
    // a run that drops below the floor right away decays faster than we can see
    if pts.len() < 2 {
        return Some(NOISE_FLOOR);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some((sxy / sxx).exp())
}

/// Builds the Ulam matrix at `resolution` and runs [`w_series_with`]; also
/// records the second eigenvalue of the matrix when `with_spectrum`.
pub fn w_series<R: Real>(
    map: &PiecewiseMap,
    psi: &StepFunction<R>,
    z: C64,
    n: usize,
    resolution: usize,
    l_max: usize,
    with_spectrum: bool,
) -> Result<WSeries> {
    let matrix = ulam_matrix(map, resolution)?;
    let mut w = w_series_with(&matrix, psi, z, n, l_max)?;
    if with_spectrum {
        let spec = spectrum(&matrix.entries)?;
        let l2 = spec.eigenvalues.get(1).map(|e| e.norm()).unwrap_or(0.0);
        w.lambda2 = Some(l2);
        w.predicted_ratio = Some((l2 / z.norm()).powi(n as i32));
    }
    Ok(w)
}

pub fn w_series_with<R: Real>(matrix: &UlamMatrix, psi: &StepFunction<R>, z: C64, n: usize, l_max: usize) -> Result<WSeries> {
    if n == 0 || l_max == 0 {
        return Err(Error::Validation("n and l_max must be at least 1".into()));
    }
    if !(z.norm() > 0.0 && z.norm().is_finite()) {
        return Err(Error::Domain("the w series needs z != 0".into()));
    }
    let m = matrix.cell_lengths();
    let zinv_n = Complex::new(1.0, 0.0) / z.powu(n as u32);
    let mut l_powers = vec![matrix.project(psi)];
    let mut term_norms = Vec::with_capacity(l_max);
    let mut partial_sum_norms = Vec::with_capacity(l_max);
    let mut sum = vec![Complex::new(0.0, 0.0); m.len()];
    let mut coeff = Complex::new(1.0, 0.0);
    let mut abs_sum = 0.0;
    for _ in 1..=l_max {
        let next = power(matrix, l_powers.last().unwrap(), n);
        coeff *= zinv_n;
        let term: Vec<C64> = next.iter().map(|v| v * coeff).collect();
        term_norms.push(weighted_l1(&term, &m));
        abs_sum += weighted_l1(&term, &m);
        for (s, t) in sum.iter_mut().zip(&term) {
            *s += t;
        }
        partial_sum_norms.push(weighted_l1(&sum, &m));
        l_powers.push(next);
    }
    let ratio = fit_ratio(&term_norms);
    let converged = matches!(ratio, Some(r) if r < 1.0);
    let last = *term_norms.last().unwrap();
    let tail_estimate = match ratio {
        Some(r) if r < 1.0 => last * r / (1.0 - r),
        _ => f64::INFINITY,
    };
    let zn = z.powu(n as u32);
    let lw = power(matrix, &sum, n);
    let resid: Vec<C64> = lw
        .iter()
        .zip(&sum)
        .zip(&l_powers[1])
        .map(|((a, w), lp)| a - zn * w + lp)
        .collect();
    let identity_residual = weighted_l1(&resid, &m);
    let roundoff_floor = 1e-14 * (abs_sum + weighted_l1(&l_powers[0], &m));
    let identity_ok = converged && identity_residual <= 10.0 * tail_estimate + roundoff_floor;
    Ok(WSeries {
        z,
        n,
        resolution: matrix.resolution,
        l_max,
        l_powers,
        term_norms,
        partial_sum_norms,
        ratio,
        converged,
        tail_estimate,
        identity_residual,
        roundoff_floor,
        identity_ok,
        lambda2: None,
        predicted_ratio: None,
        w: sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::rat;
    use crate::observables::{real, ExactStep};

    fn sign() -> ExactStep {
        ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![real(rat(1, 1)), real(rat(-1, 1))]).unwrap()
    }

    #[test]
    fn kernel_observables_give_zero() {
        let d2 = fixtures::d2();
        let w = w_series(&d2, &sign(), Complex::new(0.5, 0.0), 2, 64, 6, false).unwrap();
        assert!(w.w.iter().all(|v| *v == Complex::new(0.0, 0.0)));
        assert!(w.converged && w.identity_ok);
        assert_eq!(w.identity_residual, 0.0);
        // centred indicator of [0, 1/2) is also killed
        let c = ExactStep::indicator(rat(0, 1), rat(1, 2))
            .unwrap()
            .sub(&ExactStep::real_constant(rat(1, 2)));
        let w = w_series(&d2, &c, Complex::new(0.3, 0.1), 1, 64, 6, false).unwrap();
        assert!(w.w.iter().all(|v| *v == Complex::new(0.0, 0.0)));
    }

    #[test]
    fn smooth_map_converges_at_the_gap_rate() {
        let w2 = fixtures::w2();
        let w = w_series(&w2, &sign(), Complex::new(0.9, 0.0), 4, 512, 8, true).unwrap();
        assert!(w.converged, "{:?}", w.term_norms);
        assert!(w.identity_ok, "{} vs {}", w.identity_residual, w.tail_estimate);
        assert!(w.predicted_ratio.unwrap() < 1.0);
        assert!(w.ratio.unwrap() < 1.0);
    }

    #[test]
    fn slow_decay_is_reported_not_raised() {
        let d2 = fixtures::d2();
        let f = ExactStep::indicator(rat(0, 1), rat(1, 3)).unwrap().sub(&ExactStep::real_constant(rat(1, 3)));
        // |z| far below the decay rate of L on this observable
        let w = w_series(&d2, &f, Complex::new(0.01, 0.0), 1, 64, 10, false).unwrap();
        assert!(!w.converged);
        assert!(!w.identity_ok);
        assert!(w.tail_estimate.is_infinite());
    }
}
