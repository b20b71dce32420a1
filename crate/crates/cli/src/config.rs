//! Run configuration: flags, an optional key-value file, and defaults.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;
use cluster_sim_core::RetryPolicy;

use crate::CliError;

pub const DEFAULT_TRIALS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 42;
/// Largest register the dense three-level simulator accepts.
pub const MAX_SITES: usize = 12;
pub const SEED_ENV: &str = "CLUSTER_SIM_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Test hook: run the verification suite against a deliberately broken
/// gate set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// The `X` pulse is replaced by the identity.
    DropSwap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseGrid {
    pub p_erase: Vec<f64>,
    pub p_dephase: Vec<f64>,
    pub p_cnot: Vec<f64>,
}

impl Default for NoiseGrid {
    fn default() -> Self {
        Self {
            p_erase: vec![0.0],
            p_dephase: vec![0.0],
            p_cnot: vec![1.0],
        }
    }
}

impl NoiseGrid {
    pub fn len(&self) -> usize {
        self.p_erase.len() * self.p_dephase.len() * self.p_cnot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub n_sites: usize,
    pub grid: NoiseGrid,
    pub policies: Vec<RetryPolicy>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub svg: Option<PathBuf>,
    pub fault: Option<Fault>,
}

#[derive(Debug, Parser)]
#[command(
    name = "cluster-sim",
    version,
    about = "Verify the atomic-ensemble cluster-state chain and sweep it under noise"
)]
struct Flags {
    /// verify | sweep (default: verify)
    #[arg(long)]
    mode: Option<String>,
    /// Number of ensembles in the chain (>= 2)
    #[arg(long)]
    n: Option<String>,
    /// Comma-separated erasure probabilities
    #[arg(long = "p-erase", allow_hyphen_values = true)]
    p_erase: Option<String>,
    /// Comma-separated dephasing probabilities
    #[arg(long = "p-dephase", allow_hyphen_values = true)]
    p_dephase: Option<String>,
    /// Comma-separated heralded CNOT success probabilities
    #[arg(long = "p-cnot", allow_hyphen_values = true)]
    p_cnot: Option<String>,
    /// retry-gate | restart-all, or a comma-separated list of both
    #[arg(long)]
    policy: Option<String>,
    /// Trajectories per grid point (default: 10000)
    #[arg(long, allow_hyphen_values = true)]
    trials: Option<String>,
    /// Base seed (default: $CLUSTER_SIM_SEED, then 42)
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json (default: csv)
    #[arg(long)]
    format: Option<String>,
    /// Write a fidelity plot of the sweep to this SVG file
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Flat `key = value` file using the flag names as keys
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "inject-fault", hide = true)]
    inject_fault: bool,
}

const FILE_KEYS: [&str; 11] = [
    "mode", "n", "p-erase", "p-dephase", "p-cnot", "policy", "trials", "seed", "out", "format",
    "svg",
];

fn config_err(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

/// Reads a flat `key = value` file. `#` starts a comment; keys may use `-`
/// or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err("config", format!("cannot read {}: {e}", path.display())))?;
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(config_err(
                "config",
                format!("line {}: expected key = value", lineno + 1),
            ));
        };
        let key = k.trim().replace('_', "-");
        let key = key.trim_start_matches('-').to_string();
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(config_err(
                "config",
                format!("line {}: unknown key {key:?}", lineno + 1),
            ));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

fn parse_probabilities(field: &str, raw: &str, allow_zero: bool) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::new();
    for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let v: f64 = part
            .parse()
            .map_err(|_| config_err(field, format!("{part:?} is not a number")))?;
        let ok = if allow_zero {
            (0.0..=1.0).contains(&v)
        } else {
            v > 0.0 && v <= 1.0
        };
        if !ok {
            let range = if allow_zero { "[0, 1]" } else { "(0, 1]" };
            return Err(config_err(field, format!("{v} outside {range}")));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(config_err(field, "grid list is empty"));
    }
    Ok(out)
}

fn parse_u64(field: &str, raw: &str) -> Result<u64, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| config_err(field, format!("{raw:?} is not a non-negative integer")))
}

/// Parses command-line arguments (program name first). `env_seed` is the
/// value of `CLUSTER_SIM_SEED`, used only when neither flag nor file sets
/// a seed.
pub fn parse_config<I, T>(args: I, env_seed: Option<&str>) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let flags = match Flags::try_parse_from(args) {
        Ok(f) => f,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Err(CliError::Help(e.to_string()))
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg.lines().next().unwrap_or("invalid arguments");
                    Err(config_err(
                        "arguments",
                        first.trim_start_matches("error: ").to_string(),
                    ))
                }
            };
        }
    };

    let file = match &flags.config {
        Some(p) => read_config_file(p)?,
        None => BTreeMap::new(),
    };
    let pick = |flag: &Option<String>, key: &str| -> Option<String> {
        flag.clone().or_else(|| file.get(key).cloned())
    };

    let mode = match pick(&flags.mode, "mode").as_deref().map(str::trim) {
        None => Mode::Verify,
        Some(m) => match m.to_ascii_lowercase().as_str() {
            "verify" => Mode::Verify,
            "sweep" => Mode::Sweep,
            other => return Err(config_err("mode", format!("unknown mode {other:?}"))),
        },
    };

    let n_raw = pick(&flags.n, "n").ok_or_else(|| config_err("n_sites", "--n is required"))?;
    let n_sites: usize = n_raw
        .trim()
        .parse()
        .map_err(|_| config_err("n_sites", format!("{n_raw:?} is not a site count")))?;
    if n_sites < 2 {
        return Err(config_err(
            "n_sites",
            format!("the chain needs at least 2 sites, got {n_sites}"),
        ));
    }
    if n_sites > MAX_SITES {
        return Err(config_err(
            "n_sites",
            format!("at most {MAX_SITES} sites are supported, got {n_sites}"),
        ));
    }

    let mut grid = NoiseGrid::default();
    if let Some(v) = pick(&flags.p_erase, "p-erase") {
        grid.p_erase = parse_probabilities("p_erase", &v, true)?;
    }
    if let Some(v) = pick(&flags.p_dephase, "p-dephase") {
        grid.p_dephase = parse_probabilities("p_dephase", &v, true)?;
    }
    if let Some(v) = pick(&flags.p_cnot, "p-cnot") {
        grid.p_cnot = parse_probabilities("p_cnot", &v, false)?;
    }

    let policies = match pick(&flags.policy, "policy") {
        None => vec![RetryPolicy::RetryGate],
        Some(raw) => {
            let mut out = Vec::new();
            for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let p: RetryPolicy = part.parse().map_err(|e| config_err("policy", e))?;
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            if out.is_empty() {
                return Err(config_err("policy", "policy list is empty"));
            }
            out
        }
    };

    let trials = match pick(&flags.trials, "trials") {
        None => DEFAULT_TRIALS,
        Some(v) => parse_u64("trials", &v)?,
    };
    if trials == 0 {
        return Err(config_err("trials", "must be at least 1"));
    }

    let seed = match pick(&flags.seed, "seed") {
        Some(v) => parse_u64("seed", &v)?,
        None => match env_seed {
            Some(v) => parse_u64(SEED_ENV, v)?,
            None => DEFAULT_SEED,
        },
    };

    let format = match pick(&flags.format, "format").as_deref().map(str::trim) {
        None => Format::Csv,
        Some(f) => match f.to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return Err(config_err("format", format!("unknown format {other:?}"))),
        },
    };

    let out = flags.out.or_else(|| file.get("out").map(PathBuf::from));
    let svg = flags.svg.or_else(|| file.get("svg").map(PathBuf::from));

    Ok(RunConfig {
        mode,
        n_sites,
        grid,
        policies,
        trials,
        seed,
        out,
        format,
        svg,
        fault: flags.inject_fault.then_some(Fault::DropSwap),
    })
}
