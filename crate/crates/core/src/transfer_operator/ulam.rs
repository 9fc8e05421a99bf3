use std::cmp::Reverse;
use std::collections::BinaryHeap;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde_json::json;

use crate::error::{Error, Result};
use crate::interval_maps::{MapVariant, PiecewiseMap};
use crate::numeric::{format_float, rat, rational_to_f64, Interval, Rational, Real, C64};
use crate::observables::{FloatStep, StepFunction};

/// Largest Ulam resolution accepted (dense matrices of this size fit in memory).
pub const ULAM_RESOLUTION_CAP: usize = 4096;

/// Cell-transition discretization of the transfer operator:
/// `P[i][j] = m(cell_i ∩ T^{-1} cell_j) / m(cell_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UlamMatrix {
    pub resolution: usize,
    pub entries: DMatrix<f64>,
    pub partition: Vec<Interval>,
    /// Entries are exact rationals rounded once.
    pub exact: bool,
    /// Bound on the absolute error of each entry.
    pub tolerance: f64,
}

/// Refines the branch domains by repeatedly halving the largest cell
/// (leftmost first) until `resolution` cells exist.
pub fn map_adapted_cells(map: &PiecewiseMap, resolution: usize) -> Result<Vec<Interval>> {
    if resolution < 2 {
        return Err(Error::Validation(format!("Ulam resolution must be at least 2, got {resolution}")));
    }
    if resolution > ULAM_RESOLUTION_CAP {
        return Err(Error::Resource(format!(
            "Ulam resolution {resolution} exceeds the cap of {ULAM_RESOLUTION_CAP}"
        )));
    }
    if resolution < map.branch_count() {
        return Err(Error::Validation(format!(
            "Ulam resolution {resolution} is below the branch count {}",
            map.branch_count()
        )));
    }
    let mut heap: BinaryHeap<(Rational, Reverse<Rational>, Rational)> = (0..map.branch_count())
        .map(|i| {
            let (lo, hi) = map.domain::<Rational>(i);
            (&hi - &lo, Reverse(lo.clone()), hi)
        })
        .collect();
    while heap.len() < resolution {
        let (len, Reverse(lo), hi) = heap.pop().expect("nonempty");
        let half = len / rat(2, 1);
        let mid = &lo + &half;
        heap.push((half.clone(), Reverse(lo), mid.clone()));
        heap.push((half, Reverse(mid), hi));
    }
    let mut cells: Vec<Interval> = heap
        .into_iter()
        .map(|(_, Reverse(lo), hi)| Interval::new(lo, hi).expect("valid cell"))
        .collect();
    cells.sort();
    Ok(cells)
}

pub fn ulam_matrix(map: &PiecewiseMap, resolution: usize) -> Result<UlamMatrix> {
    let cells = map_adapted_cells(map, resolution)?;
    let n = cells.len();
    let mut entries = DMatrix::<f64>::zeros(n, n);
    let los: Vec<&Rational> = cells.iter().map(|c| &c.lo).collect();
    match &map.variant {
        MapVariant::LinearMarkov { branches } => {
            for (i, cell) in cells.iter().enumerate() {
                let b = branches
                    .iter()
                    .find(|b| b.domain.contains_interval(cell))
                    .expect("cells refine the branch domains");
                let a = b.apply(&cell.lo);
                let c = b.apply(&cell.hi);
                let (ylo, yhi) = if a < c { (a, c) } else { (c, a) };
                let width = &yhi - &ylo;
                let mut j = los.partition_point(|l| *l <= &ylo).saturating_sub(1);
                while j < n && cells[j].lo < yhi {
                    let lo = if cells[j].lo > ylo { &cells[j].lo } else { &ylo };
                    let hi = if cells[j].hi < yhi { &cells[j].hi } else { &yhi };
                    if lo < hi {
                        entries[(i, j)] = rational_to_f64(&((hi - lo) / &width));
                    }
                    j += 1;
                }
            }
            Ok(UlamMatrix {
                resolution: n,
                entries,
                partition: cells,
                exact: true,
                tolerance: 0.0,
            })
        }
        MapVariant::SmoothFullBranch { .. } => {
            let fcells: Vec<(f64, f64)> = cells.iter().map(|c| c.bounds::<f64>()).collect();
            for b in 0..map.branch_count() {
                // x-intervals s_b(cell_j) tile the domain of branch b
                let pre: Vec<f64> = std::iter::once(fcells[0].0)
                    .chain(fcells.iter().map(|c| c.1))
                    .map(|y| map.inverse_branch::<f64>(b, &y))
                    .collect();
                let (dlo, dhi) = map.domain::<f64>(b);
                for (i, &(clo, chi)) in fcells.iter().enumerate() {
                    if clo < dlo || chi > dhi {
                        continue;
                    }
                    let mut j = pre.partition_point(|&x| x <= clo).saturating_sub(1);
                    while j < n && pre[j] < chi {
                        let lo = pre[j].max(clo);
                        let hi = pre[j + 1].min(chi);
                        if lo < hi {
                            entries[(i, j)] = (hi - lo) / (chi - clo);
                        }
                        j += 1;
                    }
                }
            }
            Ok(UlamMatrix {
                resolution: n,
                entries,
                partition: cells,
                exact: false,
                tolerance: 1e-14,
            })
        }
    }
}

impl UlamMatrix {
    pub fn cell_lengths(&self) -> Vec<f64> {
        self.partition.iter().map(|c| rational_to_f64(&c.length())).collect()
    }

    pub fn row_sum_defect(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Cell averages of `f`.
    pub fn project<R: Real>(&self, f: &StepFunction<R>) -> Vec<C64> {
        self.partition
            .iter()
            .map(|c| {
                let (lo, hi) = c.bounds::<R>();
                let m = f.mean_over(&lo, &hi);
                Complex::new(m.re.to_f64(), m.im.to_f64())
            })
            .collect()
    }

    /// One step of the discretized operator on cell averages:
    /// `g_j = sum_i f_i P_ij m_i / m_j`.
    pub fn apply_to_averages(&self, f: &[C64]) -> Vec<C64> {
        let m = self.cell_lengths();
        let n = self.resolution;
        let mut g = vec![Complex::new(0.0, 0.0); n];
        for i in 0..n {
            let fi = f[i] * m[i];
            if fi == Complex::new(0.0, 0.0) {
                continue;
            }
            for (j, gj) in g.iter_mut().enumerate() {
                let p = self.entries[(i, j)];
                if p != 0.0 {
                    *gj += fi * p;
                }
            }
        }
        for (gj, mj) in g.iter_mut().zip(&m) {
            *gj /= *mj;
        }
        g
    }

    /// Cellwise-constant step function with the given cell values.
    pub fn lift(&self, values: &[C64]) -> FloatStep {
        let mut bps = vec![0.0];
        bps.extend(self.partition.iter().map(|c| rational_to_f64(&c.hi)));
        StepFunction::new(bps, values.to_vec())
            .expect("cells tile [0,1]")
            .canonicalize()
    }

    /// Dense CSV, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in self.entries.row_iter() {
            let row: Vec<String> = r.iter().map(|v| format_float(*v)).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Sidecar metadata `{resolution, partition, map_hash}`.
    pub fn sidecar(&self, map_hash: &str) -> serde_json::Value {
        json!({
            "resolution": self.resolution,
            "partition": self.partition,
            "map_hash": map_hash,
            "exact": self.exact,
            "tolerance": self.tolerance,
        })
    }
}

/// Ulam-projected `Lf` as a cellwise-constant function.
pub fn apply_discretized<R: Real>(matrix: &UlamMatrix, f: &StepFunction<R>) -> FloatStep {
    let avg = matrix.project(f);
    matrix.lift(&matrix.apply_to_averages(&avg))
}

/// Density of the leading left eigenvector (`pi P = pi`) by power iteration,
/// normalized to integrate to 1. Returns `(density per cell, iterations)`.
pub fn leading_density(matrix: &UlamMatrix, tol: f64, max_iter: usize) -> Result<(Vec<f64>, usize)> {
    let m = matrix.cell_lengths();
    let n = matrix.resolution;
    // a non-uniform start so that convergence is actually exercised
    let mut pi: Vec<f64> = (0..n).map(|i| m[i] * (1.0 + (i as f64 + 0.5) / n as f64)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= total);
    for it in 1..=max_iter {
        let mut next = vec![0.0; n];
        for i in 0..n {
            if pi[i] == 0.0 {
                continue;
            }
            for (j, nj) in next.iter_mut().enumerate() {
                *nj += pi[i] * matrix.entries[(i, j)];
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|p| *p /= total);
        let change = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum::<f64>();
        pi = next;
        if change < tol {
            return Ok((pi.iter().zip(&m).map(|(p, l)| p / l).collect(), it));
        }
    }
    Err(Error::Numeric(format!("power iteration did not converge in {max_iter} steps")))
}
