mod commands;
mod config;
mod selftest;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::*;
use config::{merge_config, CliError, CliResult};

#[derive(Parser, Debug)]
#[command(name = "esspec", version, about = "Essential spectral radius bounds for interval maps")]
struct Cli {
    /// JSON object of parameters; explicit flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Theta^infinity(beta) per k and its running Fekete estimate (CSV).
    Theta(ThetaArgs),
    /// Exponentiated topological pressure.
    Pressure(PressureArgs),
    /// Lower bounds on the essential spectral radius.
    Bounds(BoundsArgs),
    /// Classify norms against the probe families.
    Classify(ClassifyArgs),
    /// Eigenvalues of the Ulam discretization (CSV).
    Spectrum(SpectrumArgs),
    /// Kernel observable, eigenfunction series and their residuals.
    Eigenfun(EigenfunArgs),
    /// Affine IFS certificate and backward-composition samples.
    Cantor(CantorArgs),
    /// Correction series on the Ulam surrogate.
    Wseries(WseriesArgs),
    /// Bundled consistency checks.
    Selftest,
}

fn run_with<T, F>(name: &str, flags: T, cfg: Option<&PathBuf>, f: F) -> CliResult<Option<String>>
where
    T: Serialize + DeserializeOwned + OutPath,
    F: FnOnce(T) -> CliResult<(serde_json::Value, Outcome)>,
{
    let args = merge_config(&flags, cfg.map(|p| p.as_path()))?;
    let out = args.out_path();
    let (config, outcome) = f(args)?;
    emit(name, &config, &outcome, out.as_ref())
}

/// Commands that accept `--out`.
trait OutPath {
    fn out_path(&self) -> Option<PathBuf>;
}

macro_rules! out_path {
    ($($t:ty),*) => {$(
        impl OutPath for $t {
            fn out_path(&self) -> Option<PathBuf> {
                self.out.clone()
            }
        }
    )*};
}
out_path!(ThetaArgs, PressureArgs, BoundsArgs, ClassifyArgs, SpectrumArgs, EigenfunArgs, CantorArgs, WseriesArgs);

fn dispatch(cli: Cli) -> CliResult<(Option<String>, i32)> {
    let cfg = cli.config.as_ref();
    let text = match cli.command {
        Command::Theta(a) => run_with("theta", a, cfg, theta)?,
        Command::Pressure(a) => run_with("pressure", a, cfg, pressure_cmd)?,
        Command::Bounds(a) => run_with("bounds", a, cfg, bounds)?,
        Command::Classify(a) => run_with("classify", a, cfg, classify)?,
        Command::Spectrum(a) => run_with("spectrum", a, cfg, spectrum_cmd)?,
        Command::Eigenfun(a) => run_with("eigenfun", a, cfg, eigenfun)?,
        Command::Cantor(a) => run_with("cantor", a, cfg, cantor)?,
        Command::Wseries(a) => run_with("wseries", a, cfg, wseries)?,
        Command::Selftest => {
            let (text, ok) = selftest::run();
            return Ok((Some(text), if ok { 0 } else { 4 }));
        }
    };
    Ok((text, 0))
}

fn fail(e: &CliError) -> ExitCode {
    let mut s = serde_json::to_string_pretty(&e.to_json()).expect("serializable");
    s.push('\n');
    let _ = std::io::stderr().write_all(s.as_bytes());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Config(e.to_string().trim().to_string()));
        }
    };
    match dispatch(cli) {
        Ok((text, code)) => {
            if let Some(t) = text {
                let _ = std::io::stdout().write_all(t.as_bytes());
            }
            ExitCode::from(code as u8)
        }
        Err(e) => fail(&e),
    }
}
