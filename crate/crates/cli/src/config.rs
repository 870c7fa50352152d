//! Run configuration: `key = value` files layered under command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use measnoise::{DephasingParams, DensityMatrix, C64};
use thiserror::Error;

pub const KEYS: [&str; 18] = [
    "mode",
    "omega0",
    "lambda",
    "eta",
    "cutoff",
    "t_max",
    "dt",
    "stride",
    "rho11",
    "rho12_re",
    "rho12_im",
    "n_modes",
    "omega_max",
    "fock_dim",
    "output",
    "compare_a",
    "compare_b",
    "tolerance",
];

/// Where a raw value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Flag,
    Line(usize),
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Flag => write!(f, "command line"),
            Origin::Line(n) => write!(f, "line {n}"),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("`{key}` ({origin}): cannot parse `{value}` as {expected}")]
    Unparseable {
        key: &'static str,
        origin: Origin,
        value: String,
        expected: &'static str,
    },
    #[error("`{key}` ({origin}): {reason}")]
    Invalid {
        key: &'static str,
        origin: Origin,
        reason: String,
    },
    #[error("missing --mode (one of analytic, born-markov, full, kernel, compare)")]
    MissingMode,
    #[error("cannot read config file {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Analytic,
    BornMarkov,
    Full,
    Kernel,
    Compare,
}

impl Mode {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "analytic" => Some(Mode::Analytic),
            "born-markov" => Some(Mode::BornMarkov),
            "full" => Some(Mode::Full),
            "kernel" => Some(Mode::Kernel),
            "compare" => Some(Mode::Compare),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::BornMarkov => "born-markov",
            Mode::Full => "full",
            Mode::Kernel => "kernel",
            Mode::Compare => "compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSettings {
    pub n_modes: usize,
    pub omega_max: f64,
    pub fock_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub params: DephasingParams,
    pub bath: BathSettings,
    pub t_max: f64,
    pub dt: f64,
    pub stride: usize,
    pub rho11: f64,
    pub rho12: C64,
    pub output: Option<PathBuf>,
    /// Engines run by `compare`; both are trajectory modes.
    pub compare: (Mode, Mode),
    /// Largest `max_dev` accepted by `compare`.
    pub tolerance: Option<f64>,
}

impl RunConfig {
    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::qubit(self.rho11, self.rho12).expect("validated at parse time")
    }
}

/// Raw values keyed by name, later sources overriding earlier ones.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl RawConfig {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: line_no,
                text: content.to_string(),
            })?;
            let key = key.trim();
            let known = KEYS.iter().find(|k| **k == key).ok_or_else(|| ConfigError::UnknownKey {
                key: key.to_string(),
                line: line_no,
            })?;
            raw.values.insert(known, (value.trim().to_string(), Origin::Line(line_no)));
        }
        Ok(raw)
    }

    /// Sets `key` from a flag. `key` must be one of [`KEYS`].
    pub fn set_flag(&mut self, key: &'static str, value: String) {
        debug_assert!(KEYS.contains(&key));
        self.values.insert(key, (value, Origin::Flag));
    }

    fn get(&self, key: &'static str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    fn number(&self, key: &'static str, default: f64) -> Result<(f64, Origin), ConfigError> {
        match self.get(key) {
            None => Ok((default, Origin::Flag)),
            Some((v, origin)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok((x, origin.clone())),
                _ => Err(ConfigError::Unparseable {
                    key,
                    origin: origin.clone(),
                    value: v.clone(),
                    expected: "a finite number",
                }),
            },
        }
    }

    fn count(&self, key: &'static str, default: usize) -> Result<(usize, Origin), ConfigError> {
        match self.get(key) {
            None => Ok((default, Origin::Flag)),
            Some((v, origin)) => v.parse::<usize>().map(|x| (x, origin.clone())).map_err(|_| {
                ConfigError::Unparseable {
                    key,
                    origin: origin.clone(),
                    value: v.clone(),
                    expected: "a non-negative integer",
                }
            }),
        }
    }

    fn mode(&self, key: &'static str) -> Result<Option<Mode>, ConfigError> {
        self.get(key)
            .map(|(v, origin)| {
                Mode::parse(v).ok_or_else(|| ConfigError::Unparseable {
                    key,
                    origin: origin.clone(),
                    value: v.clone(),
                    expected: "a mode",
                })
            })
            .transpose()
    }

    pub fn into_config(self) -> Result<RunConfig, ConfigError> {
        let mode = self.mode("mode")?.ok_or(ConfigError::MissingMode)?;
        let invalid = |key, origin: Origin, reason: String| ConfigError::Invalid { key, origin, reason };

        let (omega0, _) = self.number("omega0", 1.0)?;
        let (lam, _) = self.number("lambda", 0.0)?;
        let (eta, eta_origin) = self.number("eta", 0.0)?;
        if eta < 0.0 {
            return Err(invalid("eta", eta_origin, format!("must be >= 0, got {eta}")));
        }
        let (cutoff, cutoff_origin) = self.number("cutoff", 1.0)?;
        if cutoff <= 0.0 {
            return Err(invalid("cutoff", cutoff_origin, format!("must be > 0, got {cutoff}")));
        }
        let params = DephasingParams::new(omega0, lam, eta, cutoff).expect("finite, eta >= 0, cutoff > 0");

        let (t_max, t_origin) = self.number("t_max", 1.0)?;
        if t_max < 0.0 {
            return Err(invalid("t_max", t_origin, format!("must be >= 0, got {t_max}")));
        }
        let (dt, dt_origin) = self.number("dt", 0.01)?;
        if dt <= 0.0 {
            return Err(invalid("dt", dt_origin, format!("must be > 0, got {dt}")));
        }
        let (stride, stride_origin) = self.count("stride", 1)?;
        if stride == 0 {
            return Err(invalid("stride", stride_origin, "must be >= 1".into()));
        }

        let (rho11, rho11_origin) = self.number("rho11", 0.5)?;
        if !(0.0..=1.0).contains(&rho11) {
            return Err(invalid("rho11", rho11_origin, format!("must lie in [0, 1], got {rho11}")));
        }
        let (re, re_origin) = self.number("rho12_re", 0.5)?;
        let (im, _) = self.number("rho12_im", 0.0)?;
        let rho12 = C64::new(re, im);
        let bound = rho11 * (1.0 - rho11);
        if rho12.norm_sqr() > bound + 1e-12 {
            return Err(invalid(
                "rho12_re",
                re_origin,
                format!(
                    "|rho12|^2 = {} exceeds rho11(1 - rho11) = {bound}; the state would not be positive",
                    rho12.norm_sqr()
                ),
            ));
        }

        let (n_modes, n_origin) = self.count("n_modes", 4)?;
        if n_modes == 0 {
            return Err(invalid("n_modes", n_origin, "must be >= 1".into()));
        }
        let (omega_max, w_origin) = self.number("omega_max", 6.0 * cutoff)?;
        if omega_max <= 0.0 {
            return Err(invalid("omega_max", w_origin, format!("must be > 0, got {omega_max}")));
        }
        let (fock_dim, fock_origin) = self.count("fock_dim", 3)?;
        if fock_dim < 2 {
            return Err(invalid("fock_dim", fock_origin, format!("must be >= 2, got {fock_dim}")));
        }

        let compare_a = self.mode("compare_a")?.unwrap_or(Mode::Analytic);
        let compare_b = self.mode("compare_b")?.unwrap_or(Mode::BornMarkov);
        for (key, m) in [("compare_a", compare_a), ("compare_b", compare_b)] {
            if matches!(m, Mode::Kernel | Mode::Compare) {
                let origin = self.get(key).map_or(Origin::Flag, |(_, o)| o.clone());
                return Err(invalid(key, origin, format!("`{}` does not produce a trajectory", m.name())));
            }
        }
        let tolerance = match self.get("tolerance") {
            None => None,
            Some((_, origin)) => {
                let (tol, _) = self.number("tolerance", 0.0)?;
                if tol < 0.0 {
                    return Err(invalid("tolerance", origin.clone(), format!("must be >= 0, got {tol}")));
                }
                Some(tol)
            }
        };

        Ok(RunConfig {
            mode,
            params,
            bath: BathSettings {
                n_modes,
                omega_max,
                fock_dim,
            },
            t_max,
            dt,
            stride,
            rho11,
            rho12,
            output: self.get("output").map(|(v, _)| PathBuf::from(v)),
            compare: (compare_a, compare_b),
            tolerance,
        })
    }
}
