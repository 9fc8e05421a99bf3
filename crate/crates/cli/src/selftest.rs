//! Quick checks over the bundled maps, run by `esspec selftest`.

use esspec::eigen_lab::{build_kernel, eigen_residual, KernelConstruction, SeriesSpec};
use esspec::fixtures;
use esspec::interval_maps::theta_infinity;
use esspec::numeric::{rat, Interval};
use esspec::spectral_bounds::{bound_main, pressure};
use esspec::transfer_operator::{spectrum, ulam_matrix};
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Serialize)]
struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn check(name: &'static str, f: impl FnOnce() -> esspec::Result<(bool, String)>) -> Check {
    match f() {
        Ok((ok, detail)) => Check { name, ok, detail },
        Err(e) => Check {
            name,
            ok: false,
            detail: format!("{}: {e}", e.kind()),
        },
    }
}

fn checks() -> Vec<Check> {
    vec![
        check("d2_theta_half", || {
            let t = theta_infinity(&fixtures::d2(), 0.5, 8)?;
            let want = 2f64.sqrt();
            Ok(((t.fekete_estimate - want).abs() < 1e-12, format!("{} vs {want}", t.fekete_estimate)))
        }),
        check("d2_bound_s_half", || {
            let b = bound_main(&fixtures::d2(), 0.5, 8)?;
            let want = 0.5f64.sqrt();
            Ok((b.ok && (b.lower_bound - want).abs() < 1e-12, format!("{} vs {want}", b.lower_bound)))
        }),
        check("l3_pressure", || {
            let p = pressure(&fixtures::l3(), 1.0, "weighted_matrix", 8)?;
            Ok(((p.exp_pressure - 1.0).abs() < 1e-10, format!("exp P = {}", p.exp_pressure)))
        }),
        check("d2_ulam_leading", || {
            let s = spectrum(&ulam_matrix(&fixtures::d2(), 64)?.entries)?;
            Ok(((s.leading.norm() - 1.0).abs() < 1e-10, format!("|lambda_1| = {}", s.leading.norm())))
        }),
        check("d2_kernel_residual", || {
            let map = fixtures::d2();
            let k = build_kernel(
                &map,
                &KernelConstruction::LinearContrast {
                    k: Interval::unit(),
                    branches: (0, 1),
                    scale: rat(1, 2),
                },
            )?;
            let psi = k.psi.as_exact().expect("linear map").clone();
            let r = eigen_residual(&map, &psi, &SeriesSpec::parse("0.4", 1, 6)?, "auto")?;
            Ok((
                k.residual == 0.0 && r.exact_shift_ok && r.bound_ok(),
                format!("residual {} <= {}", r.residual_l1, r.tail_bound),
            ))
        }),
        check("w2_ulam_leading", || {
            let s = spectrum(&ulam_matrix(&fixtures::w2(), 64)?.entries)?;
            Ok(((s.leading.norm() - 1.0).abs() < 1e-8, format!("|lambda_1| = {}", s.leading.norm())))
        }),
    ]
}

/// Pretty JSON report and whether every check passed.
pub fn run() -> (String, bool) {
    let checks = checks();
    let ok = checks.iter().all(|c| c.ok);
    let mut s = serde_json::to_string_pretty(&json!({"checks": checks, "ok": ok})).expect("serializable");
    s.push('\n');
    (s, ok)
}
