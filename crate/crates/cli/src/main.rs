//! `measnoise`: closed-form, second-order and exact runs of a measured qubit
//! under Ohmic phase noise, written as CSV.
//!
//! Exit status: 0 on success, 1 for invalid input, 2 when an engine fails
//! or a tolerance is exceeded.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{ConfigError, RawConfig};

const EXIT_INVALID: u8 = 1;
const EXIT_ENGINE: u8 = 2;

/// Numeric values are taken as text and validated together with the
/// config file, so errors name the key either way.
#[derive(Debug, Parser)]
#[command(name = "measnoise", version, about)]
struct Cli {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// analytic | born-markov | full | kernel | compare
    #[arg(long)]
    mode: Option<String>,
    /// Qubit splitting, H_S = omega0 σ_z [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    omega0: Option<String>,
    /// Measurement strength, L = lambda σ_z [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Dimensionless Ohmic coupling [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    /// Ohmic cutoff frequency [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    cutoff: Option<String>,
    /// Final time [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    t_max: Option<String>,
    /// Time step [default: 0.01]
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<String>,
    /// Write every n-th step [default: 1]
    #[arg(long)]
    stride: Option<String>,
    /// Initial excited population [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    rho11: Option<String>,
    /// Initial coherence, real part [default: 0.5]
    #[arg(long, allow_hyphen_values = true)]
    rho12_re: Option<String>,
    /// Initial coherence, imaginary part [default: 0]
    #[arg(long, allow_hyphen_values = true)]
    rho12_im: Option<String>,
    /// Bath modes [default: 4]
    #[arg(long)]
    n_modes: Option<String>,
    /// Highest bath frequency [default: 6 × cutoff]
    #[arg(long, allow_hyphen_values = true)]
    omega_max: Option<String>,
    /// Fock levels per mode in full runs [default: 3]
    #[arg(long)]
    fock_dim: Option<String>,
    /// CSV destination [default: stdout]
    #[arg(long)]
    output: Option<String>,
    /// First engine in compare mode [default: analytic]
    #[arg(long)]
    compare_a: Option<String>,
    /// Second engine in compare mode [default: born-markov]
    #[arg(long)]
    compare_b: Option<String>,
    /// Largest max_dev accepted in compare mode
    #[arg(long, allow_hyphen_values = true)]
    tolerance: Option<String>,
}

impl Cli {
    fn into_raw(self) -> Result<RawConfig, ConfigError> {
        let mut raw = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
                    path: path.clone(),
                    reason: e.to_string(),
                })?;
                RawConfig::from_text(&text)?
            }
            None => RawConfig::default(),
        };
        let flags = [
            ("mode", self.mode),
            ("omega0", self.omega0),
            ("lambda", self.lambda),
            ("eta", self.eta),
            ("cutoff", self.cutoff),
            ("t_max", self.t_max),
            ("dt", self.dt),
            ("stride", self.stride),
            ("rho11", self.rho11),
            ("rho12_re", self.rho12_re),
            ("rho12_im", self.rho12_im),
            ("n_modes", self.n_modes),
            ("omega_max", self.omega_max),
            ("fock_dim", self.fock_dim),
            ("output", self.output),
            ("compare_a", self.compare_a),
            ("compare_b", self.compare_b),
            ("tolerance", self.tolerance),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set_flag(key, v);
            }
        }
        Ok(raw)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let cfg = match cli.into_raw().and_then(RawConfig::into_config) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, ConfigError::MissingMode) {
                eprintln!("usage: measnoise --mode <MODE> [OPTIONS]  (see --help)");
            }
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let out = match run::run(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_engine_failure() { EXIT_ENGINE } else { EXIT_INVALID });
        }
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &out.csv).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{}", out.csv);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_INVALID);
    }
    match out.failure {
        Some(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ENGINE)
        }
        None => ExitCode::SUCCESS,
    }
}
