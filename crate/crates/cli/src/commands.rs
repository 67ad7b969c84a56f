//! Command-line surface and the sanity, verify and dump commands.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use flopcheck_core::charclass::RootBundle;
use flopcheck_core::cohomology::RingModel;
use flopcheck_core::fm::FmTransform;
use flopcheck_core::quantum::ISeries;
use flopcheck_core::scalars::Constants;
use serde_json::{json, Value};

use crate::config::{Config, ConfigError, Overrides};
use crate::numeric;
use crate::report::{Check, Report};
use crate::suites;

#[derive(Debug, Parser)]
#[command(name = "flopcheck", version, about = "Numeric and exact checks for simple flops of projective local models")]
pub struct Cli {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Rank r of the flopped ℙ^r
    #[arg(long, global = true)]
    pub rank: Option<usize>,
    /// Working precision in decimal digits (also FLOPCHECK_DIGITS)
    #[arg(long, global = true)]
    pub digits: Option<u32>,
    /// Minimum q-truncation order of the I-series
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Evaluation points z0, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub z: Vec<String>,
    /// `default` or a JSON path {"waypoints": [[re, im], ...], "sheet": k}
    #[arg(long, global = true)]
    pub path: Option<String>,
    /// Use this convention for U instead of scanning
    #[arg(long, global = true)]
    pub convention: Option<String>,
    #[arg(long = "tol-transport", global = true)]
    pub tol_transport: Option<f64>,
    #[arg(long = "tol-stability", global = true)]
    pub tol_stability: Option<f64>,
    #[arg(long = "tol-intertwining", global = true)]
    pub tol_intertwining: Option<f64>,
    #[arg(long = "tol-commutativity", global = true)]
    pub tol_commutativity: Option<f64>,
    /// Output directory for reports and dumps
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact suites for cohomology, characteristic classes, FM and the QDE
    Sanity {
        #[arg(long, hide = true)]
        corrupt_relation: bool,
    },
    /// Transport, U extraction and the commutativity check
    Verify,
    /// Write JSON artifacts
    Dump {
        what: DumpWhat,
        /// Ring for `gamma`, e.g. Proj(2) or LocalP(1)
        #[arg(long)]
        space: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpWhat {
    Gamma,
    FmMatrix,
    Ifunction,
    UMatrix,
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            config_file: self.config.clone(),
            rank: self.rank,
            digits: self.digits,
            order: self.order,
            z: self.z.clone(),
            path: self.path.clone(),
            convention: self.convention.clone(),
            tol_transport: self.tol_transport,
            tol_stability: self.tol_stability,
            tol_intertwining: self.tol_intertwining,
            tol_commutativity: self.tol_commutativity,
            out: self.out.clone(),
        }
    }
}

/// What a run produced: an exit code, a report when one was built, and a
/// message for stderr.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<Report>,
    pub message: Option<String>,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Outcome {
        Outcome {
            code: 2,
            report: None,
            message: Some(msg.into()),
        }
    }
}

/// Parses arguments and runs one command.
pub fn run_from<I, T>(args: I, env_digits: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                code,
                report: None,
                message: Some(e.to_string()),
            };
        }
    };
    let cfg = match Config::resolve(&cli.overrides(), env_digits) {
        Ok(c) => c,
        Err(e) => return Outcome::usage(e.to_string()),
    };
    let max_rank = if matches!(cli.command, Command::Sanity { .. }) { 3 } else { 2 };
    if let Err(e) = cfg.validate(max_rank) {
        return Outcome::usage(e.to_string());
    }
    let report = match &cli.command {
        Command::Sanity { corrupt_relation } => sanity(&cfg, *corrupt_relation),
        Command::Verify => verify(&cfg),
        Command::Dump { what, space } => match dump(&cfg, *what, space.as_deref()) {
            Ok(r) => r,
            Err(DumpError::Usage(m)) => return Outcome::usage(m),
            Err(DumpError::Io(m)) => {
                return Outcome {
                    code: 1,
                    report: None,
                    message: Some(m),
                }
            }
        },
    };
    if let Some(dir) = &cfg.out {
        let path = dir.join(format!("{}_report.json", report.command.replace(' ', "_")));
        if let Err(e) = write_json(&path, &report.to_json()) {
            return Outcome {
                code: 1,
                report: Some(report),
                message: Some(e),
            };
        }
    }
    Outcome {
        code: if report.passed() { 0 } else { 1 },
        report: Some(report),
        message: None,
    }
}

pub fn sanity(cfg: &Config, corrupt: bool) -> Report {
    let r = cfg.rank;
    let mut rep = Report::new("sanity", cfg);
    rep.extend(suites::grr_suite(r.max(1)));
    rep.extend(suites::intersection_suite(r, corrupt));
    rep.extend(suites::fm_suite(r));
    if r <= 2 {
        rep.extend(suites::gamma_suite());
        rep.extend(suites::qde_suite(r, cfg.order));
    } else {
        rep.push(Check::skip("quantum", format!("quantum suites not run for r = {r}")));
    }
    rep
}

pub fn verify(cfg: &Config) -> Report {
    let r = cfg.rank;
    let mut rep = Report::new("verify", cfg);
    rep.extend(numeric::transport_suite(cfg, r, &cfg.z[0]));
    let (checks, extra) = numeric::verify(cfg, r);
    rep.extend(checks);
    rep.extra = extra;
    rep
}

#[derive(Debug)]
pub enum DumpError {
    Usage(String),
    Io(String),
}

impl From<ConfigError> for DumpError {
    fn from(e: ConfigError) -> Self {
        DumpError::Usage(e.to_string())
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), String> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let mut text = serde_json::to_string_pretty(v).expect("json serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect::<String>()
        .trim_matches('_')
        .to_string()
}

pub fn dump(cfg: &Config, what: DumpWhat, space: Option<&str>) -> Result<Report, DumpError> {
    let r = cfg.rank;
    let mut rep = Report::new(&format!("dump {}", what.to_possible_value().unwrap().get_name()), cfg);
    let usage = |e: flopcheck_core::Error| DumpError::Usage(e.to_string());
    let (file, body) = match what {
        DumpWhat::Gamma => {
            let name = space.map(str::to_string).unwrap_or_else(|| format!("LocalP({r})"));
            let ring = RingModel::by_name(&name).map_err(usage)?;
            let g = RootBundle::tangent(&ring).map_err(usage)?.gamma_class();
            let body = json!({
                "schema": flopcheck_core::SCHEMA,
                "space": ring.name(),
                "gamma": g.to_json(),
                "text": g.to_string(),
            });
            (format!("gamma_{}.json", file_stem(&name)), body)
        }
        DumpWhat::FmMatrix => {
            let fm = FmTransform::new(r).map_err(usage)?;
            let mut body = fm.to_json();
            body["det"] = json!(fm.matrix().det().to_pq_string());
            body["lattice_matrix"] = json!(fm.lattice_matrix().map_err(usage)?.to_strings());
            rep.push(Check::exact("fm.unimodular", fm.matrix().det().abs() == flopcheck_core::scalars::Rat::one(), None));
            (format!("fm_matrix_r{r}.json"), body)
        }
        DumpWhat::Ifunction => {
            let s = ISeries::extremal(&RingModel::local_p(r), cfg.order).map_err(usage)?;
            (format!("ifunction_r{r}.json"), s.to_json())
        }
        DumpWhat::UMatrix => {
            let consts = Constants::new(cfg.precision());
            let fm = FmTransform::new(r).map_err(usage)?;
            let mut entries = Vec::new();
            for z in &cfg.z {
                match numeric::select(cfg, r, z, &fm, &consts) {
                    Ok(sel) => {
                        rep.push(Check::below(
                            format!("main.commutativity[r={r},z={}]", z),
                            sel.residual,
                            cfg.tolerances.commutativity,
                        ));
                        let mut u = sel.u.to_json();
                        u["convention"] = json!(sel.convention.name());
                        entries.push(u);
                    }
                    Err(e) => rep.push(Check::failed_with(format!("u.extract[z={}]", z), e)),
                }
            }
            let body = json!({"schema": flopcheck_core::SCHEMA, "r": r, "entries": entries});
            (format!("u_matrix_r{r}.json"), body)
        }
    };
    let path = cfg.out_dir().join(&file);
    write_json(&path, &body).map_err(DumpError::Io)?;
    rep.extra.insert("written".into(), json!(path.display().to_string()));
    Ok(rep)
}
