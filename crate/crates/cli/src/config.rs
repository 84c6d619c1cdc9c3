use std::fmt;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Solve,
    Minimize,
    Maximize,
    VerifySuite,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Solve => "solve",
            Mode::Minimize => "minimize",
            Mode::Maximize => "maximize",
            Mode::VerifySuite => "verify-suite",
        })
    }
}

/// Command-line flags; every flag overrides the same key of `--config`.
#[derive(Debug, Parser)]
#[command(name = "fracopt", version, about = "Fractional eigenvalue optimization experiments")]
pub struct Cli {
    /// JSON config file with the same keys as the flags (underscored)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Domain spec: interval:a,b,n | rect:wx,wy,nx,ny | disk:r,n
    #[arg(long, action = ArgAction::Append, allow_hyphen_values = true)]
    pub domain: Vec<String>,
    /// Fractional order in (0,1)
    #[arg(long = "s", allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Weight class: w:v1@f1,v2@f2,...
    #[arg(long, allow_hyphen_values = true)]
    pub weights: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Eigensolver residual tolerance and optimizer stopping tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// [default: 10000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Number of optimizer starts in minimize mode [default: 1]
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Seed for randomized starts and checks [default: 42]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory [default: .]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the stiffness matrix to A.bin
    #[arg(long)]
    pub dump_matrix: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    domain: Option<String>,
    s: Option<f64>,
    weights: Option<String>,
    mode: Option<Mode>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    restarts: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    dump_matrix: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain: String,
    pub s: f64,
    pub weights: Option<String>,
    pub mode: Mode,
    pub tol: f64,
    pub max_iter: usize,
    pub restarts: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub dump_matrix: bool,
}

/// Weight spec used by `solve` when none is given: `ρ ≡ 1`.
pub const UNIT_WEIGHTS: &str = "w:1@1";

impl ExperimentConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let mut flag_domains = cli.domain.clone();
        flag_domains.dedup();
        let domain = match flag_domains.len() {
            0 => file.domain,
            1 => flag_domains.pop(),
            _ => {
                return Err(CliError::Usage(format!(
                    "conflicting domain specs: {}",
                    cli.domain.join(" vs ")
                )))
            }
        }
        .ok_or_else(|| CliError::Usage("missing --domain".into()))?;
        let s = cli
            .s
            .or(file.s)
            .ok_or_else(|| CliError::Usage("missing --s".into()))?;
        if !(s > 0.0 && s < 1.0) {
            return Err(CliError::Usage(format!("--s must lie in (0,1), got {s}")));
        }
        let mode = cli.mode.or(file.mode).unwrap_or(Mode::Solve);
        let weights = cli.weights.or(file.weights);
        if weights.is_none() && mode != Mode::Solve {
            return Err(CliError::Usage(format!("mode {mode} needs --weights")));
        }
        let tol = cli.tol.or(file.tol).unwrap_or(1e-10);
        if !(tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
        }
        Ok(Self {
            domain,
            s,
            weights,
            mode,
            tol,
            max_iter: cli.max_iter.or(file.max_iter).unwrap_or(10_000),
            restarts: cli.restarts.or(file.restarts).unwrap_or(1).max(1),
            seed: cli.seed.or(file.seed).unwrap_or(42),
            out: cli.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            dump_matrix: cli.dump_matrix || file.dump_matrix.unwrap_or(false),
        })
    }

    pub fn weight_spec(&self) -> &str {
        self.weights.as_deref().unwrap_or(UNIT_WEIGHTS)
    }

    /// Canonical `key = value` listing echoed at the top of the report.
    pub fn canonical(&self) -> String {
        format!(
            "domain = {}\ns = {}\nweights = {}\nmode = {}\ntol = {:e}\nmax_iter = {}\nrestarts = {}\nseed = {}\ndump_matrix = {}\n",
            self.domain,
            self.s,
            self.weight_spec(),
            self.mode,
            self.tol,
            self.max_iter,
            self.restarts,
            self.seed,
            self.dump_matrix
        )
    }
}

fn read_file(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}
