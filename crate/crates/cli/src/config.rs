use std::fs;
use std::path::{Path, PathBuf};

use bidisk_core::subhardy::Form;
use bidisk_core::{BiPoly, KernelExpr};
use clap::{Parser, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    KernelCheck,
    CompNorm,
    MultNorm,
    MateCheck,
    Decompose,
    Examples,
}

/// Command line. Flags override values from `--config`.
#[derive(Debug, Default, Parser)]
#[command(name = "bidisk", version, about = "Kernel positivity and operator-norm experiments on the bidisk")]
pub struct Cli {
    /// Command to run (may instead be given by the config file).
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// BiPoly: inline JSON or a path to a JSON file.
    #[arg(long)]
    pub phi: Option<String>,
    #[arg(long)]
    pub psi: Option<String>,
    /// KernelExpr: inline JSON or a path.
    #[arg(long)]
    pub kernel: Option<String>,
    /// Pythagorean mate for mate-check.
    #[arg(long)]
    pub a: Option<String>,
    /// Polynomial to decompose.
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long, value_parser = ["ex1", "ex2", "ex3"])]
    pub form: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub set_size: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Comma-separated truncation levels, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    /// Report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Exit with status 2 when a kernel is found not positive.
    #[arg(long)]
    pub fail_on_negative: bool,
}

/// On-disk configuration. Polynomial and kernel fields are inline JSON or a
/// path relative to the config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    command: Option<Command>,
    phi: Option<Value>,
    psi: Option<Value>,
    kernel: Option<Value>,
    a: Option<Value>,
    f: Option<Value>,
    form: Option<Form>,
    seed: Option<u64>,
    trials: Option<usize>,
    set_size: Option<usize>,
    tol: Option<f64>,
    n_list: Option<Vec<u32>>,
    out: Option<PathBuf>,
    #[serde(default)]
    fail_on_negative: bool,
}

/// Fully resolved run settings.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub phi: Option<BiPoly>,
    pub psi: Option<BiPoly>,
    pub kernel: Option<KernelExpr>,
    pub a: Option<BiPoly>,
    pub f: Option<BiPoly>,
    pub form: Option<Form>,
    pub seed: u64,
    pub trials: usize,
    pub set_size: usize,
    pub tol: f64,
    pub n_list: Vec<u32>,
    pub out: Option<PathBuf>,
    pub fail_on_negative: bool,
}

impl RunConfig {
    pub const DEFAULT_TRIALS: usize = 200;
    pub const DEFAULT_SET_SIZE: usize = 10;

    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            phi: None,
            psi: None,
            kernel: None,
            a: None,
            f: None,
            form: None,
            seed: 0,
            trials: Self::DEFAULT_TRIALS,
            set_size: Self::DEFAULT_SET_SIZE,
            tol: bidisk_core::kernel::DEFAULT_TOL,
            n_list: (1..=10).collect(),
            out: None,
            fail_on_negative: false,
        }
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let (file, base) = match &cli.config {
            Some(p) => {
                let text = read(p)?;
                let file: ConfigFile = serde_json::from_str(&text).map_err(|e| CliError::Json(p.display().to_string(), e))?;
                (file, p.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ConfigFile::default(), PathBuf::new()),
        };
        let command = cli
            .command
            .or(file.command)
            .ok_or_else(|| CliError::Config("no command given on the command line or in the config".into()))?;
        let mut cfg = RunConfig::new(command);

        cfg.phi = pick(&cli.phi, &file.phi, &base, "phi")?;
        cfg.psi = pick(&cli.psi, &file.psi, &base, "psi")?;
        cfg.kernel = pick(&cli.kernel, &file.kernel, &base, "kernel")?;
        cfg.a = pick(&cli.a, &file.a, &base, "a")?;
        cfg.f = pick(&cli.f, &file.f, &base, "f")?;
        cfg.form = match &cli.form {
            Some(s) => Some(s.parse().map_err(|e: bidisk_core::Error| CliError::Config(e.to_string()))?),
            None => file.form,
        };
        cfg.seed = cli.seed.or(file.seed).unwrap_or(cfg.seed);
        cfg.trials = cli.trials.or(file.trials).unwrap_or(cfg.trials);
        cfg.set_size = cli.set_size.or(file.set_size).unwrap_or(cfg.set_size);
        cfg.tol = cli.tol.or(file.tol).unwrap_or(cfg.tol);
        if let Some(n) = cli.n_list.clone().or(file.n_list) {
            cfg.n_list = n;
        }
        cfg.out = cli.out.clone().or_else(|| file.out.map(|o| base.join(o)));
        cfg.fail_on_negative = cli.fail_on_negative || file.fail_on_negative;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        if self.set_size == 0 {
            return Err(CliError::Config("set_size must be positive".into()));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(CliError::Config(format!("tol {} must be a nonnegative number", self.tol)));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) || self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("n_list must be a nonempty increasing list of positive integers".into()));
        }
        Ok(())
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))
}

/// Parses a command-line value: inline JSON when it looks like JSON,
/// otherwise a file path.
pub fn parse_arg<T: DeserializeOwned>(raw: &str, name: &str) -> Result<T, CliError> {
    let t = raw.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        serde_json::from_str(t).map_err(|e| CliError::Json(format!("--{name}"), e))
    } else {
        let path = Path::new(raw);
        serde_json::from_str(&read(path)?).map_err(|e| CliError::Json(path.display().to_string(), e))
    }
}

fn pick<T: DeserializeOwned>(
    flag: &Option<String>,
    file: &Option<Value>,
    base: &Path,
    name: &str,
) -> Result<Option<T>, CliError> {
    if let Some(raw) = flag {
        return parse_arg(raw, name).map(Some);
    }
    match file {
        None => Ok(None),
        Some(Value::String(rel)) => {
            let path = base.join(rel);
            serde_json::from_str(&read(&path)?)
                .map(Some)
                .map_err(|e| CliError::Json(path.display().to_string(), e))
        }
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| CliError::Json(format!("config field {name}"), e)),
    }
}
