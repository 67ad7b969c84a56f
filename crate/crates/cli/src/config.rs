//! Run configuration: defaults, optional JSON file, environment and flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use flopcheck_core::continuation::{Convention, PathSpec};
use flopcheck_core::scalars::{Precision, Rat};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const DIGITS_ENV: &str = "FLOPCHECK_DIGITS";
pub const MIN_DIGITS: u32 = 40;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {0}: {1}")]
    Io(PathBuf, std::io::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub transport: f64,
    pub null_loop: f64,
    pub monodromy_zero: f64,
    pub stability: f64,
    pub recheck: f64,
    pub intertwining: f64,
    pub det: f64,
    pub drift: f64,
    pub commutativity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            transport: 1e-30,
            null_loop: 1e-25,
            monodromy_zero: 1e-20,
            stability: 1e-12,
            recheck: 1e-12,
            intertwining: 1e-10,
            det: 1e-10,
            drift: 1e-40,
            commutativity: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub rank: usize,
    pub digits: u32,
    /// Minimum q-truncation of the I-series.
    pub order: usize,
    /// Evaluation points z0, each on the real branch of log z.
    pub z: Vec<Rat>,
    /// "default" or a path object {"waypoints": [[re, im], …], "sheet": k}.
    pub path: Value,
    /// Fixes the 𝕌 convention instead of scanning.
    pub convention: Option<String>,
    pub tolerances: Tolerances,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            rank: 1,
            digits: 60,
            order: 24,
            z: vec![Rat::from_int(1), Rat::from_int(2)],
            path: Value::String("default".into()),
            convention: None,
            tolerances: Tolerances::default(),
            out: None,
        }
    }
}

/// Command-line overrides; `None` leaves the lower layer in place.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub config_file: Option<PathBuf>,
    pub rank: Option<usize>,
    pub digits: Option<u32>,
    pub order: Option<usize>,
    pub z: Vec<String>,
    pub path: Option<String>,
    pub convention: Option<String>,
    pub tol_transport: Option<f64>,
    pub tol_stability: Option<f64>,
    pub tol_intertwining: Option<f64>,
    pub tol_commutativity: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Config {
    /// Defaults, then the config file, then FLOPCHECK_DIGITS, then flags.
    pub fn resolve(o: &Overrides, env_digits: Option<String>) -> Result<Config, ConfigError> {
        let mut c = match &o.config_file {
            Some(p) => Config::from_file(p)?,
            None => Config::default(),
        };
        if let Some(d) = env_digits {
            c.digits = d
                .trim()
                .parse()
                .map_err(|_| ConfigError::Invalid(format!("{DIGITS_ENV}={d} is not an integer")))?;
        }
        if let Some(r) = o.rank {
            c.rank = r;
        }
        if let Some(d) = o.digits {
            c.digits = d;
        }
        if let Some(d) = o.order {
            c.order = d;
        }
        if !o.z.is_empty() {
            c.z = o
                .z
                .iter()
                .map(|s| Rat::from_str(s).map_err(|_| ConfigError::Invalid(format!("bad z value `{s}`"))))
                .collect::<Result<_, _>>()?;
        }
        if let Some(p) = &o.path {
            c.path = if p == "default" {
                Value::String(p.clone())
            } else {
                serde_json::from_str(p).map_err(|e| ConfigError::Invalid(format!("--path: {e}")))?
            };
        }
        if let Some(conv) = &o.convention {
            c.convention = Some(conv.clone());
        }
        let t = &mut c.tolerances;
        for (slot, v) in [
            (&mut t.transport, o.tol_transport),
            (&mut t.stability, o.tol_stability),
            (&mut t.intertwining, o.tol_intertwining),
            (&mut t.commutativity, o.tol_commutativity),
        ] {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if o.out.is_some() {
            c.out = o.out.clone();
        }
        Ok(c)
    }

    pub fn from_file(p: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io(p.to_path_buf(), e))?;
        serde_json::from_str(&text).map_err(|e| ConfigError::Invalid(format!("{}: {e}", p.display())))
    }

    /// Checks shared by all commands; `max_rank` is 3 for sanity runs.
    pub fn validate(&self, max_rank: usize) -> Result<(), ConfigError> {
        if self.rank < 1 || self.rank > max_rank {
            return Err(ConfigError::Invalid(format!(
                "rank {} unsupported (allowed 1..={max_rank})",
                self.rank
            )));
        }
        if self.digits < MIN_DIGITS {
            return Err(ConfigError::Invalid(format!(
                "digits {} below minimum {MIN_DIGITS}",
                self.digits
            )));
        }
        if self.order < 1 {
            return Err(ConfigError::Invalid("order must be at least 1".into()));
        }
        if self.z.is_empty() || self.z.iter().any(|z| *z <= Rat::zero()) {
            return Err(ConfigError::Invalid("z values must be positive".into()));
        }
        self.path_spec()?;
        self.convention()?;
        Ok(())
    }

    pub fn precision(&self) -> Precision {
        Precision::new(self.digits)
    }

    pub fn path_spec(&self) -> Result<PathSpec, ConfigError> {
        match &self.path {
            Value::String(s) if s == "default" => Ok(PathSpec::default_route()),
            v => PathSpec::from_json(v).map_err(|e| ConfigError::Invalid(e.to_string())),
        }
    }

    pub fn convention(&self) -> Result<Option<Convention>, ConfigError> {
        self.convention
            .as_deref()
            .map(|s| s.parse().map_err(|e: flopcheck_core::Error| ConfigError::Invalid(e.to_string())))
            .transpose()
    }

    /// SHA-256 of the canonical JSON of everything except output paths.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}
