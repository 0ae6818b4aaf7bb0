//! `fano`: lineshape sweeps, effective-parameter curves, transparency scans,
//! validation reports and profile fitting for the driven dissipative Fano
//! model.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fano_core::fit::ProfileKind;
use fano_core::Execution;

use config::{OracleMode, OracleSetting, RunConfig};
use output::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] fano_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Io(_) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Normalize {
    None,
    Peak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Population,
    Photocurrent,
}

#[derive(Parser, Debug)]
#[command(name = "fano", version, about = "Steady-state lineshapes of the driven dissipative Fano model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config entry, e.g. `Omega=0.3` or `sweep.count=51`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Divide the population columns by their maximum.
    #[arg(long, value_enum, default_value = "none")]
    normalize: Normalize,
    /// Oracle controls: `auto`, `none`, `tol=X` or `N,W`.
    #[arg(long)]
    oracle: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Continuum population against laser frequency.
    Profile(Common),
    /// Effective parameters against field strength.
    Sweep(Common),
    /// Continuum population against field strength at fixed detunings.
    Eit(Common),
    /// Run the cross-validation criteria and emit a JSON report.
    Validate {
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run only these criteria (comma separated, 1-10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Fit the generalized profile to `omega_L,value` samples.
    Fit {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "population")]
        kind: Kind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn thread_pool() -> Result<(), CliError> {
    let Ok(v) = std::env::var("FANO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("FANO_THREADS must be a positive integer (got `{v}`)")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Model overrides are applied before sweep overrides, so a default sweep
/// window can depend on the final model.
fn load(common: &Common, default_sweep: impl Fn(&fano_core::ModelParams) -> config::Sweep) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let (sweep_sets, other): (Vec<&String>, Vec<&String>) = common.set.iter().partition(|s| s.trim_start().starts_with("sweep."));
    for s in other.into_iter().chain(sweep_sets) {
        let d = default_sweep(&cfg.model);
        cfg.apply(s, d)?;
    }
    Ok(cfg)
}

fn oracle_mode(common: &Common, cfg: &RunConfig, fallback: OracleMode) -> Result<OracleMode, CliError> {
    match (&common.oracle, cfg.oracle) {
        (Some(flag), _) => OracleSetting::parse_flag(flag)?.mode(),
        (None, Some(setting)) => setting.mode(),
        (None, None) => Ok(fallback),
    }
}

fn emit_table(mut t: Table, common: &Common, population_columns: &[&str]) -> Result<u8, CliError> {
    if common.normalize == Normalize::Peak {
        t.normalize_peak(population_columns);
    }
    let bytes = match common.format {
        Format::Csv => t.to_csv()?,
        Format::Json => t.to_json()?,
    };
    output::emit(common.out.as_deref(), &bytes)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    thread_pool()?;
    let exec = Execution::default();
    match cli.command {
        Command::Profile(c) => {
            let cfg = load(&c, commands::default_profile_sweep)?;
            let mode = oracle_mode(&c, &cfg, commands::oracle_default())?;
            let t = commands::profile(&cfg, mode, exec)?;
            emit_table(t, &c, &["n_c_closed", "n_c_effective", "n_c_oracle"])
        }
        Command::Sweep(c) => {
            let cfg = load(&c, |_| commands::DEFAULT_FIELD_SWEEP)?;
            let mode = oracle_mode(&c, &cfg, OracleMode::Off)?;
            emit_table(commands::sweep(&cfg, mode, exec)?, &c, &[])
        }
        Command::Eit(c) => {
            let cfg = load(&c, |_| commands::DEFAULT_EIT_SWEEP)?;
            let mode = oracle_mode(&c, &cfg, OracleMode::Off)?;
            emit_table(commands::eit(&cfg, mode, exec)?, &c, &["n_c"])
        }
        Command::Validate { out, only } => {
            if let Some(bad) = only.iter().find(|&&id| !(1..=10).contains(&id)) {
                return Err(CliError::Config(format!("no criterion {bad} (1-10)")));
            }
            let report = commands::validate(&only, exec);
            for c in &report.criteria {
                eprintln!("{}", c.summary());
            }
            output::emit(out.as_deref(), &output::json_bytes(&report)?)?;
            Ok(if report.all_passed { 0 } else { 1 })
        }
        Command::Fit { input, out, kind } => {
            let kind = match kind {
                Kind::Population => ProfileKind::Population,
                Kind::Photocurrent => ProfileKind::Photocurrent,
            };
            let r = commands::fit_file(&input, kind)?;
            output::emit(out.as_deref(), &output::json_bytes(&r)?)?;
            Ok(0)
        }
    }
}
