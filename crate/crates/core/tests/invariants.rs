//! Property tests for the algebraic and dynamical invariants.

use esspec::eigen_lab::{build_kernel, cantor_ifs, eigen_residual, KernelConstruction, SeriesSpec};
use esspec::fixtures;
use esspec::function_norms::{besov_atomic_upper, p_variation};
use esspec::interval_maps::{theta_table, PiecewiseMap};
use esspec::numeric::{rat, ComplexRational, Interval, Rational};
use esspec::observables::{pullback, real, ExactStep};
use esspec::spectral_bounds::bound_main;
use esspec::transfer_operator::{apply_exact, ulam_matrix};
use num_complex::Complex;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn crat(re: i64, im: i64) -> ComplexRational {
    Complex::new(rat(re, 1), rat(im, 1))
}

/// Step functions with breakpoints on the grid `j/64` and small complex values.
fn step_fn() -> impl Strategy<Value = ExactStep> {
    prop::collection::btree_set(1i64..64, 0..8).prop_flat_map(|cuts| {
        let pieces = cuts.len() + 1;
        prop::collection::vec((-4i64..=4, -4i64..=4), pieces).prop_map(move |vals| {
            let mut bps = vec![rat(0, 1)];
            bps.extend(cuts.iter().map(|&c| rat(c, 64)));
            bps.push(rat(1, 1));
            ExactStep::new(bps, vals.into_iter().map(|(a, b)| crat(a, b)).collect()).unwrap()
        })
    })
}

fn real_step_fn() -> impl Strategy<Value = ExactStep> {
    step_fn().prop_map(|f| f.map_values(|v| real(v.re.clone())))
}

fn linear_map() -> impl Strategy<Value = PiecewiseMap> {
    prop_oneof![Just(fixtures::d2()), Just(fixtures::l3())]
}

fn same(f: &ExactStep, g: &ExactStep) -> bool {
    f.canonicalize() == g.canonicalize()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonicalize_is_idempotent(f in step_fn()) {
        let c = f.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert!(c.is_canonical());
        prop_assert_eq!(c.integrate(), f.integrate());
    }

    #[test]
    fn integral_is_linear(f in step_fn(), g in step_fn(), a in -5i64..=5, b in -5i64..=5) {
        let coeffs = vec![crat(a, 1), crat(b, -2)];
        let h = ExactStep::combine(&coeffs, &[f.clone(), g.clone()]).unwrap();
        prop_assert_eq!(h.integrate(), coeffs[0].clone() * f.integrate() + coeffs[1].clone() * g.integrate());
    }

    #[test]
    fn inner_product_laws(f in step_fn(), g in step_fn(), h in step_fn(), a in -3i64..=3) {
        let fg = f.inner_product(&g);
        prop_assert_eq!(fg.conj(), g.inner_product(&f));
        let lhs = f.scale(&crat(a, 1)).add(&g).inner_product(&h);
        prop_assert_eq!(lhs, crat(a, 1) * f.inner_product(&h) + g.inner_product(&h));
        let fl = f.to_f64();
        let gl = g.to_f64();
        let ip = fl.inner_product(&gl).norm();
        prop_assert!(ip <= fl.lp_norm(2.0).unwrap() * gl.lp_norm(2.0).unwrap() + 1e-12);
    }

    #[test]
    fn pullback_preserves_norms(map in linear_map(), f in step_fn(), ell in 1usize..4) {
        let g = pullback(&map, &f, ell).unwrap();
        prop_assert_eq!(g.l2_norm_squared(), f.l2_norm_squared());
        prop_assert_eq!(g.sup_norm(), f.sup_norm());
        prop_assert!((g.l1_norm() - f.l1_norm()).abs() <= 1e-15 * f.l1_norm().max(1.0));
        prop_assert_eq!(g.integrate(), f.integrate());
    }

    #[test]
    fn pullbacks_compose(map in linear_map(), f in step_fn(), a in 0usize..3, b in 0usize..3) {
        let once = pullback(&map, &f, a + b).unwrap();
        let twice = pullback(&map, &pullback(&map, &f, b).unwrap(), a).unwrap();
        prop_assert!(same(&once, &twice));
    }

    #[test]
    fn transfer_is_dual_to_pullback(map in linear_map(), f in step_fn(), g in step_fn()) {
        let lf = apply_exact(&map, &f).unwrap();
        prop_assert_eq!(lf.inner_product(&g), f.inner_product(&pullback(&map, &g, 1).unwrap()));
    }

    #[test]
    fn transfer_inverts_pullback(map in linear_map(), f in step_fn()) {
        let back = apply_exact(&map, &pullback(&map, &f, 1).unwrap()).unwrap();
        prop_assert!(same(&back, &f));
    }

    #[test]
    fn transfer_is_positive_and_keeps_mass(map in linear_map(), f in real_step_fn()) {
        let pos = f.map_values(|v| real(v.re.abs()));
        let lf = apply_exact(&map, &pos).unwrap();
        prop_assert!(lf.values().iter().all(|v| !v.re.is_negative()));
        prop_assert_eq!(lf.integrate(), pos.integrate());
        prop_assert_eq!(apply_exact(&map, &f).unwrap().integrate(), f.integrate());
    }

    #[test]
    fn p_variation_decreases_in_p(f in step_fn(), p in 1.0f64..3.0, dq in 0.0f64..3.0) {
        let j = Interval::unit();
        let vp = p_variation(&f, &j, p).unwrap();
        let vq = p_variation(&f, &j, p + dq).unwrap();
        prop_assert!(vq <= vp * (1.0 + 1e-12) + 1e-12, "v_{} = {vq} > v_{p} = {vp}", p + dq);
    }

    #[test]
    fn atomic_cost_scales(f in step_fn(), a in -6i64..=6, s in 0.05f64..0.95) {
        let rep = besov_atomic_upper(&f, s).unwrap();
        prop_assert!(rep.cost >= 0.0);
        prop_assert!(rep.l1_error(&f) <= 1e-12);
        let scaled = besov_atomic_upper(&f.scale(&crat(a, 0)), s).unwrap();
        prop_assert!((scaled.cost - a.unsigned_abs() as f64 * rep.cost).abs() <= 1e-12 * rep.cost.max(1.0));
    }

    #[test]
    fn separation_is_monotone_in_n(re in -9i64..=9, im in -9i64..=9, n in 1usize..5) {
        let z = Complex::new(rat(re, 10), rat(im, 10));
        prop_assume!(z.norm_sqr() < Rational::from_integer(1.into()));
        prop_assume!(!z.is_zero());
        let values = vec![crat(-1, 0), crat(1, 0)];
        if cantor_ifs(&values, &z, n).unwrap().separation_ok {
            for m in n + 1..n + 4 {
                prop_assert!(cantor_ifs(&values, &z, m).unwrap().separation_ok, "n = {n}, m = {m}");
            }
        }
    }

    #[test]
    fn eigen_shift_holds_at_every_truncation(re in -9i64..=9, im in -9i64..=9, big_n in 0usize..7) {
        let z = Complex::new(rat(re, 10), rat(im, 10));
        prop_assume!(z.norm_sqr() < Rational::from_integer(1.into()));
        let d2 = fixtures::d2();
        let k = build_kernel(
            &d2,
            &KernelConstruction::LinearContrast { k: Interval::unit(), branches: (0, 1), scale: rat(1, 2) },
        )
        .unwrap();
        let psi = k.psi.as_exact().unwrap();
        let spec = SeriesSpec::new(z, 1, big_n).unwrap();
        let r = eigen_residual(&d2, psi, &spec, "step").unwrap();
        prop_assert!(r.exact_shift_ok);
        prop_assert!(r.residual_l1 <= r.tail_bound * (1.0 + 1e-12));
    }

    #[test]
    fn ulam_rows_are_stochastic(pick in 0usize..3, res in 3usize..80) {
        let map = [fixtures::d2(), fixtures::l3(), fixtures::w2()][pick].clone();
        let m = ulam_matrix(&map, res).unwrap();
        prop_assert!(m.entries.iter().all(|&e| e >= 0.0));
        prop_assert!(m.row_sum_defect() <= 1e-12);
    }
}

#[test]
fn theta_is_submultiplicative() {
    let betas: Vec<f64> = (0..=6).map(|i| 0.25 * i as f64).collect();
    for map in [fixtures::d2(), fixtures::l3(), fixtures::markov3()] {
        for r in theta_table(&map, &betas, 8).unwrap() {
            let t = |k: usize| r.per_k[k - 1].1;
            for k in 1..=8 {
                for j in 1..=8 - k {
                    assert!(t(k + j) <= t(k) * t(j) * (1.0 + 1e-12), "{:?} beta {} k {k} j {j}", map.name, r.beta);
                }
                for m in 1..=8 / k {
                    assert!(t(k * m).powf(1.0 / (k * m) as f64) <= t(k).powf(1.0 / k as f64) * (1.0 + 1e-12));
                }
            }
        }
    }
}

#[test]
fn main_bound_decreases_in_s() {
    let d2 = fixtures::d2();
    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let bounds: Vec<f64> = grid.iter().map(|&s| bound_main(&d2, s, 8).unwrap().lower_bound).collect();
    assert!(bounds.windows(2).all(|w| w[1] <= w[0]));
    let near_one = bound_main(&d2, 0.9999, 8).unwrap().lower_bound;
    assert!((near_one - 0.5).abs() < 1e-3);
}
