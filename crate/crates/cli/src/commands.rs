use std::path::PathBuf;

use clap::Args;
use esspec::eigen_lab::{
    backward_limit, build_kernel, cantor_ifs, distinct_values,
    orthogonality_gram, residual_engine_registry, truncation_value_count, w_series, CantorSample, EigenReport,
    KernelConstruction, KernelObservable, KernelPsi, SeriesSpec, cantor_samples_csv,
};
use esspec::function_norms::{norm_registry, ProbeFamily};
use esspec::interval_maps::{theta_table, MapVariant, PiecewiseMap};
use esspec::numeric::{complex_to_f64, format_float, format_rational, parse_rational, rat, Interval, Rational, C64};
use esspec::observables::{real, step_from_json, step_to_csv, ExactStep, FloatStep, SampledObservable};
use esspec::spectral_bounds::{bound_bb_new, bound_main, classify_norm, default_method, pressure, ProbeConfig};
use esspec::transfer_operator::{spectrum, ulam_matrix};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{load_map, read_text, render, write_text, Body, CliError, CliResult};

/// What a command produced: the main body plus side files.
pub struct Outcome {
    pub body: Body,
    pub side_files: Vec<(PathBuf, Body)>,
}

impl Outcome {
    fn json(v: Value) -> Self {
        Outcome {
            body: Body::Json(v),
            side_files: vec![],
        }
    }
}

/// Resolved config echoed into the output: the parameters plus the map
/// definition in place of its source.
fn echo<T: Serialize>(args: &T, map_def: Option<&esspec::interval_maps::MapDefinition>) -> Value {
    let mut v = serde_json::to_value(args).expect("args serialize");
    if let (Some(def), Value::Object(m)) = (map_def, &mut v) {
        m.insert("map_definition".into(), serde_json::to_value(def).expect("definition serializes"));
    }
    v
}

fn parse_pair(text: &str, what: &str) -> CliResult<(Rational, Rational)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("{what} must be given as \"lo,hi\", got {text:?}")))?;
    Ok((parse_rational(a.trim())?, parse_rational(b.trim())?))
}

fn parse_branches(text: &str) -> CliResult<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| CliError::Config(format!("branches must be given as \"i,j\", got {text:?}")))?;
    let p = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("bad branch index {s:?}")))
    };
    Ok((p(a)?, p(b)?))
}

// ---------------------------------------------------------------- theta

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ThetaArgs {
    /// Map file or bundled name (d2, l3, w2, markov3).
    #[arg(long)]
    pub map: Option<String>,
    /// Exponents beta, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn theta(a: ThetaArgs) -> CliResult<(Value, Outcome)> {
    let a = ThetaArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        beta: Some(a.beta.unwrap_or_else(|| vec![0.5, 1.0])),
        kmax: Some(a.kmax.unwrap_or(8)),
        out: a.out,
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let reports = theta_table(&map, a.beta.as_ref().unwrap(), a.kmax.unwrap())?;
    let mut csv = String::from("beta,k,theta,fekete\n");
    for r in &reports {
        for ((k, t), f) in r.per_k.iter().zip(&r.fekete_running) {
            csv.push_str(&format!("{},{k},{},{}\n", format_float(r.beta), format_float(*t), format_float(*f)));
        }
    }
    Ok((echo(&a, Some(&def)), Outcome { body: Body::Csv(csv), side_files: vec![] }))
}

// ---------------------------------------------------------------- pressure

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PressureArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    /// weighted_matrix, theta_limit, or auto.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn pressure_cmd(a: PressureArgs) -> CliResult<(Value, Outcome)> {
    let (map, def) = load_map(a.map.as_deref().unwrap_or("d2"))?;
    let method = match a.method.as_deref() {
        None | Some("auto") => default_method(&map).to_string(),
        Some(m) => m.to_string(),
    };
    let a = PressureArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        beta: Some(a.beta.unwrap_or_else(|| vec![1.0, 2.0])),
        method: Some(method.clone()),
        kmax: Some(a.kmax.unwrap_or(10)),
        out: a.out,
    };
    let reports = a
        .beta
        .as_ref()
        .unwrap()
        .iter()
        .map(|&b| {
            pressure(&map, b, &method, a.kmax.unwrap())
                .map(|r| json!({"beta": r.beta, "exp_pressure": r.exp_pressure, "pressure": r.pressure(), "method": r.method, "k_max": r.k_max}))
        })
        .collect::<esspec::Result<Vec<_>>>()?;
    Ok((echo(&a, Some(&def)), Outcome::json(json!({ "reports": reports }))))
}

// ---------------------------------------------------------------- bounds

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub map: Option<String>,
    /// Besov-type exponent for the `1/Theta^infinity(1-s)` bound.
    #[arg(long)]
    pub s: Option<f64>,
    /// Smoothness `r` for the pressure-gated `1/k` bound.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Norm properties asserted by the caller, recorded verbatim.
    #[arg(long = "assert")]
    pub assertions: Option<Vec<String>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn bounds(a: BoundsArgs) -> CliResult<(Value, Outcome)> {
    let a = BoundsArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        kmax: Some(a.kmax.unwrap_or(10)),
        assertions: Some(a.assertions.unwrap_or_default()),
        ..a
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let k_max = a.kmax.unwrap();
    let mut reports = vec![];
    if let Some(s) = a.s {
        reports.push(bound_main(&map, s, k_max)?);
    }
    reports.push(bound_bb_new(&map, None, k_max)?);
    if let Some(r) = a.r {
        reports.push(bound_bb_new(&map, Some(r), k_max)?);
    }
    let reports: Vec<_> = reports
        .into_iter()
        .map(|mut r| {
            for t in a.assertions.as_ref().unwrap() {
                r = r.with_assertion(t);
            }
            r
        })
        .collect();
    let best = reports.iter().filter(|r| r.ok).map(|r| r.lower_bound).fold(None, |acc: Option<f64>, b| {
        Some(acc.map_or(b, |a| a.max(b)))
    });
    let result = json!({"lower_bound": best, "reports": reports});
    Ok((echo(&a, Some(&def)), Outcome::json(result)))
}

// ---------------------------------------------------------------- classify

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub map: Option<String>,
    /// Registered norm names, e.g. bv, sup, l2, besov:0.5, pvar:2.
    #[arg(long, value_delimiter = ',')]
    pub norm: Option<Vec<String>>,
    /// indicators or fixed_shape.
    #[arg(long, value_parser = parse_family)]
    pub family: Option<ProbeFamily>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_family(s: &str) -> Result<ProbeFamily, String> {
    match s {
        "indicators" => Ok(ProbeFamily::Indicators),
        "fixed_shape" => Ok(ProbeFamily::FixedShape),
        other => Err(format!("unknown probe family {other:?}; use indicators or fixed_shape")),
    }
}

pub fn classify(a: ClassifyArgs) -> CliResult<(Value, Outcome)> {
    let defaults = ProbeConfig::default();
    let a = ClassifyArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        norm: Some(a.norm.unwrap_or_else(|| vec!["bv".into()])),
        family: Some(a.family.unwrap_or(defaults.family)),
        tol: Some(a.tol.unwrap_or(defaults.tolerance)),
        kmax: Some(a.kmax.unwrap_or(defaults.k_max)),
        out: a.out,
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let config = ProbeConfig {
        family: a.family.unwrap(),
        tolerance: a.tol.unwrap(),
        k_max: a.kmax.unwrap(),
        ..defaults
    };
    let registry = norm_registry();
    let mut results = vec![];
    for name in a.norm.as_ref().unwrap() {
        let norm = registry.resolve(name)?;
        // a rejected norm is an answer, not a failure of the run
        results.push(match classify_norm(&map, norm.as_ref(), &config) {
            Ok(c) => json!({"norm": name, "classification": c}),
            Err(e @ esspec::Error::Classification(_)) => {
                json!({"norm": name, "rejected": {"kind": e.kind(), "message": e.to_string()}})
            }
            Err(e) => return Err(e.into()),
        });
    }
    Ok((echo(&a, Some(&def)), Outcome::json(json!({ "results": results }))))
}

// ---------------------------------------------------------------- spectrum

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Also write the Ulam matrix as CSV, with a JSON sidecar next to it.
    #[arg(long)]
    pub matrix_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn spectrum_cmd(a: SpectrumArgs) -> CliResult<(Value, Outcome)> {
    let a = SpectrumArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        resolution: Some(a.resolution.unwrap_or(256)),
        ..a
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let m = ulam_matrix(&map, a.resolution.unwrap())?;
    let spec = spectrum(&m.entries)?;
    let mut side_files = vec![];
    if let Some(p) = &a.matrix_out {
        let hash = crate::config::header("spectrum", &echo(&a, Some(&def)))["config_sha256"]
            .as_str()
            .unwrap()
            .to_string();
        side_files.push((p.clone(), Body::Csv(m.to_csv())));
        side_files.push((p.with_extension("json"), Body::Json(m.sidecar(&hash))));
    }
    Ok((
        echo(&a, Some(&def)),
        Outcome {
            body: Body::Csv(spec.to_csv()),
            side_files,
        },
    ))
}

// ---------------------------------------------------------------- kernels

/// Choice of the observable `psi`, shared by `eigenfun`, `cantor`, `wseries`.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct PsiArgs {
    /// Step function JSON `{"breakpoints": [...], "values": [[re, im], ...]}`;
    /// when absent a kernel observable is constructed.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Interval K as "lo,hi".
    #[arg(long = "kernel-k")]
    pub kernel_k: Option<String>,
    /// Two distinct branch indices, "i,j".
    #[arg(long)]
    pub branches: Option<String>,
    /// Contrast weights are scale times the branch slopes.
    #[arg(long)]
    pub scale: Option<String>,
    /// Quantization bits for smooth maps.
    #[arg(long)]
    pub bits: Option<u32>,
}

impl PsiArgs {
    fn resolved(self) -> Self {
        PsiArgs {
            kernel_k: Some(self.kernel_k.unwrap_or_else(|| "0,1".into())),
            branches: Some(self.branches.unwrap_or_else(|| "0,1".into())),
            scale: Some(self.scale.unwrap_or_else(|| "1".into())),
            bits: Some(self.bits.unwrap_or(16)),
            psi: self.psi,
        }
    }

    fn construction(&self, map: &PiecewiseMap) -> CliResult<KernelConstruction> {
        let (lo, hi) = parse_pair(self.kernel_k.as_deref().unwrap(), "kernel-k")?;
        let k = Interval::new(lo, hi)?;
        let branches = parse_branches(self.branches.as_deref().unwrap())?;
        Ok(match map.variant {
            MapVariant::LinearMarkov { .. } => KernelConstruction::LinearContrast {
                k,
                branches,
                scale: parse_rational(self.scale.as_deref().unwrap())?,
            },
            MapVariant::SmoothFullBranch { .. } => KernelConstruction::WeightCancellation {
                k,
                g: SampledObservable::constant(C64::new(1.0, 0.0)),
                branches,
                bits: self.bits.unwrap(),
            },
        })
    }

    /// `psi` from the file, or a kernel observable.
    fn load(&self, map: &PiecewiseMap) -> CliResult<(KernelPsi, Option<KernelObservable>)> {
        if let Some(p) = &self.psi {
            let v: Value = serde_json::from_str(&read_text(p)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            return Ok(if map.is_linear() {
                (KernelPsi::Exact(step_from_json::<Rational>(&v)?), None)
            } else {
                (KernelPsi::Float(step_from_json::<f64>(&v)?), None)
            });
        }
        let kern = build_kernel(map, &self.construction(map)?)?;
        Ok((kern.psi.clone(), Some(kern)))
    }
}

fn kernel_json(k: &Option<KernelObservable>) -> Value {
    match k {
        None => Value::Null,
        Some(k) => json!({
            "construction": k.construction,
            "residual": k.residual,
            "residual_method": k.residual_method,
            "tolerance": k.tolerance,
            "pointwise_residual": k.pointwise_residual,
            "pieces": match &k.psi { KernelPsi::Exact(f) => f.piece_count(), KernelPsi::Float(f) => f.piece_count() },
        }),
    }
}

// ---------------------------------------------------------------- eigenfun

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct EigenfunArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub psi: PsiArgs,
    /// Eigenvalues z, e.g. 0.3,0.4i,-0.45,1/3+1/5i (read exactly).
    #[arg(long, value_delimiter = ',')]
    pub z: Option<Vec<String>>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Truncation order.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    /// Residual engine: auto, step, symbolic.
    #[arg(long)]
    pub engine: Option<String>,
    /// Largest l in the Gram matrix of psi o T^l.
    #[arg(long)]
    pub gram_lmax: Option<usize>,
    /// Also write the truncated h_z as a step-function CSV (first z only).
    #[arg(long)]
    pub values_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn eigenfun(a: EigenfunArgs) -> CliResult<(Value, Outcome)> {
    let a = EigenfunArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        psi: a.psi.resolved(),
        z: Some(a.z.unwrap_or_else(|| vec!["0.3".into(), "0.4i".into(), "-0.45".into()])),
        n: Some(a.n.unwrap_or(1)),
        big_n: Some(a.big_n.unwrap_or(8)),
        engine: Some(a.engine.unwrap_or_else(|| "auto".into())),
        gram_lmax: Some(a.gram_lmax.unwrap_or(4)),
        ..a
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let engine = residual_engine_registry().resolve(a.engine.as_deref().unwrap())?;
    let specs = a
        .z
        .as_ref()
        .unwrap()
        .iter()
        .map(|z| SeriesSpec::parse(z, a.n.unwrap(), a.big_n.unwrap()))
        .collect::<esspec::Result<Vec<_>>>()?;
    let (psi, kernel) = a.psi.load(&map)?;
    let gram = orthogonality_gram(&map, &psi, a.gram_lmax.unwrap())?;
    let mut reports = vec![];
    let mut notes = vec![];
    match psi.as_exact() {
        Some(f) => {
            for spec in &specs {
                let res = engine.eigen_residual(&map, f, spec)?;
                let coh = if spec.z == esspec::numeric::ComplexRational::new(rat(0, 1), rat(0, 1)) {
                    None
                } else {
                    Some(engine.cohomology_residual(&map, f, spec)?)
                };
                reports.push(EigenReport::new(&res, coh.as_ref(), Some(gram.offdiag_max)));
            }
        }
        None => notes.push("eigen residuals need exact arithmetic on a piecewise-linear map; only the kernel and Gram checks ran"),
    }
    let mut side_files = vec![];
    if let (Some(p), Some(spec)) = (&a.values_out, specs.first()) {
        let csv = match &psi {
            KernelPsi::Exact(f) => step_to_csv(&esspec::eigen_lab::h_series(&map, f, spec)?.sum.to_f64()),
            KernelPsi::Float(f) => step_to_csv(&esspec::eigen_lab::h_series::<f64>(&map, f, spec)?.sum),
        };
        side_files.push((p.clone(), Body::Csv(csv)));
    }
    let result = json!({
        "kernel": kernel_json(&kernel),
        "gram": gram,
        "reports": reports,
        "notes": notes,
    });
    Ok((echo(&a, Some(&def)), Outcome { body: Body::Json(result), side_files }))
}

// ---------------------------------------------------------------- cantor

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct CantorArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub psi: PsiArgs,
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Depth K of the backward composition.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Number of sample points x = (2j+1)/(2M).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Write the samples as CSV `x,re,im,depth`.
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cantor(a: CantorArgs) -> CliResult<(Value, Outcome)> {
    let a = CantorArgs {
        map: Some(a.map.unwrap_or_else(|| "d2".into())),
        psi: a.psi.resolved(),
        z: Some(a.z.unwrap_or_else(|| "0.5".into())),
        n: Some(a.n.unwrap_or(3)),
        depth: Some(a.depth.unwrap_or(10)),
        samples: Some(a.samples.unwrap_or(64)),
        ..a
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    if !map.is_linear() {
        return Err(esspec::Error::Unsupported("the IFS path needs a piecewise-linear Markov map".into()).into());
    }
    let (psi, _) = a.psi.load(&map)?;
    let psi: ExactStep = psi.as_exact().expect("linear maps give exact observables").clone();
    let z = esspec::numeric::parse_complex_rational(a.z.as_deref().unwrap())?;
    let ifs = cantor_ifs(&distinct_values(&psi), &z, a.n.unwrap())?;
    let depth = a.depth.unwrap();
    let m = a.samples.unwrap();
    let mut samples = Vec::with_capacity(m);
    let mut inside = true;
    for j in 0..m {
        let x = rat(2 * j as i64 + 1, 2 * m as i64);
        let v = backward_limit(&map, &ifs, &psi, &x, depth)?;
        inside &= ifs.in_ball(&v);
        samples.push(CantorSample {
            x: format_rational(&x),
            value: complex_to_f64(&v),
            depth,
        });
    }
    let count = truncation_value_count(&ifs, depth).ok();
    let result = json!({
        "certificate": ifs.certificate(),
        "truncation_value_count": count,
        "word_count": (ifs.values.len() as f64).powi(depth as i32 + 1),
        "samples_in_ball": inside,
        "samples": samples,
    });
    let side_files = match &a.csv_out {
        Some(p) => vec![(p.clone(), Body::Csv(cantor_samples_csv(&samples)))],
        None => vec![],
    };
    Ok((echo(&a, Some(&def)), Outcome { body: Body::Json(result), side_files }))
}

// ---------------------------------------------------------------- wseries

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct WseriesArgs {
    #[arg(long)]
    pub map: Option<String>,
    /// Step function JSON; defaults to 1 on [0,1/2) and -1 on [1/2,1).
    #[arg(long)]
    pub psi: Option<PathBuf>,
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long)]
    pub lmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn wseries(a: WseriesArgs) -> CliResult<(Value, Outcome)> {
    let a = WseriesArgs {
        map: Some(a.map.unwrap_or_else(|| "w2".into())),
        z: Some(a.z.unwrap_or_else(|| "0.9".into())),
        n: Some(a.n.unwrap_or(4)),
        resolution: Some(a.resolution.unwrap_or(512)),
        lmax: Some(a.lmax.unwrap_or(8)),
        ..a
    };
    let (map, def) = load_map(a.map.as_deref().unwrap())?;
    let psi: FloatStep = match &a.psi {
        Some(p) => {
            let v: Value = serde_json::from_str(&read_text(p)?)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            step_from_json::<f64>(&v)?
        }
        None => ExactStep::new(vec![rat(0, 1), rat(1, 2), rat(1, 1)], vec![real(rat(1, 1)), real(rat(-1, 1))])?
            .to_f64(),
    };
    let z = complex_to_f64(&esspec::numeric::parse_complex_rational(a.z.as_deref().unwrap())?);
    let w = w_series(&map, &psi, z, a.n.unwrap(), a.resolution.unwrap(), a.lmax.unwrap(), true)?;
    let result = json!({
        "z": w.z,
        "n": w.n,
        "resolution": w.resolution,
        "l_max": w.l_max,
        "term_norms": w.term_norms,
        "partial_sum_norms": w.partial_sum_norms,
        "ratio": w.ratio,
        "predicted_ratio": w.predicted_ratio,
        "lambda2": w.lambda2,
        "converged": w.converged,
        "tail_estimate": if w.tail_estimate.is_finite() { json!(w.tail_estimate) } else { Value::Null },
        "identity_residual": w.identity_residual,
        "roundoff_floor": w.roundoff_floor,
        "identity_ok": w.identity_ok,
    });
    Ok((echo(&a, Some(&def)), Outcome::json(result)))
}

/// Writes the main body to `out` (or returns it for stdout) and the side files.
pub fn emit(command: &str, config: &Value, outcome: &Outcome, out: Option<&PathBuf>) -> CliResult<Option<String>> {
    for (path, body) in &outcome.side_files {
        write_text(path, &render(command, config, body))?;
    }
    let text = render(command, config, &outcome.body);
    match out {
        Some(p) => {
            write_text(p, &text)?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_parsing() {
        assert_eq!(parse_pair("0, 1/2", "k").unwrap(), (rat(0, 1), rat(1, 2)));
        assert!(parse_pair("0", "k").is_err());
        assert_eq!(parse_branches("1,2").unwrap(), (1, 2));
        assert!(parse_branches("a,2").is_err());
    }
}
