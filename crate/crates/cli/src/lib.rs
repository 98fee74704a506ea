//! Batch front end for `spincat-core`: config parsing, the five commands and
//! the CSV/JSON file formats.

pub mod commands;
pub mod config;
pub mod error;
pub mod table;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use crate::config::RunConfig;
pub use crate::error::CliError;
use crate::config::{CommandKind, StateKind};
use crate::table::Format;

/// Atomic Schrödinger-cat toolkit: Wigner functions, squeezing, damping.
///
/// Angles are given in degrees. A `--config` file (`key = value` lines or a
/// JSON object) supplies defaults; flags override it. Exit codes: 0 success,
/// 2 configuration error, 3 I/O error, 4 numerical failure.
#[derive(Debug, Parser)]
#[command(name = "spincat", version)]
pub struct Cli {
    /// Configuration file; may also name the command.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Significant digits of real numbers (1..=17, default 17).
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wigner function of a cat or coherent state on a (θ, φ) grid.
    Wigner(WignerArgs),
    /// Squeezing S(β) of the nonpolar cat and its maximum.
    Squeeze(SqueezeArgs),
    /// Damped polar cat in a thermal bath.
    Evolve(EvolveArgs),
    /// Characteristic times t_dec, t_diss, t_ncl and r = t_diss/t_dec.
    Times(TimesArgs),
    /// `times` over all (N, n̄) pairs in parallel (SPINCAT_THREADS caps workers).
    Sweep(TimesArgs),
}

#[derive(Debug, Args)]
pub struct WignerArgs {
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    #[arg(long)]
    pub atoms: Option<usize>,
    /// Polar angle of the state, measured from the south pole (degrees).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Azimuth of a coherent state (degrees).
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n_theta: Option<usize>,
    #[arg(long)]
    pub n_phi: Option<usize>,
    /// Grid size as a multiple of (N+1) x (2N+1); default 2.
    #[arg(long)]
    pub oversample: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SqueezeArgs {
    /// Comma-separated N values (default 2,5,20,100).
    #[arg(long, value_delimiter = ',')]
    pub atoms: Option<Vec<usize>>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub atoms: Option<usize>,
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Absolute horizon in units of 1/γ.
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Horizon in units of t_diss (default 5).
    #[arg(long)]
    pub horizon_factor: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also write the non-classicality ν(t).
    #[arg(long)]
    pub nu: bool,
    /// Append t_dec and t_diss extracted from this trace.
    #[arg(long)]
    pub report_times: bool,
}

#[derive(Debug, Args)]
pub struct TimesArgs {
    #[arg(long, value_delimiter = ',')]
    pub atoms: Option<Vec<usize>>,
    /// Log-spaced N list: MIN,MAX,COUNT.
    #[arg(long, value_delimiter = ',', conflicts_with = "atoms")]
    pub atoms_log: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub nbar: Option<Vec<f64>>,
    /// Skip the t_ncl search.
    #[arg(long)]
    pub no_ncl: bool,
}

fn some_if(flag: bool) -> Option<bool> {
    flag.then_some(true)
}

impl Cli {
    /// The flags as a config layer.
    pub fn flags(&self) -> RunConfig {
        let mut c = RunConfig {
            output: self.output.clone(),
            format: self.format,
            precision: self.precision,
            ..Default::default()
        };
        match &self.command {
            None => {}
            Some(Command::Wigner(a)) => {
                c.command = Some(CommandKind::Wigner);
                c.state = a.state;
                c.atoms = a.atoms.map(|n| vec![n]);
                c.beta_deg = a.beta;
                c.alpha_deg = a.alpha;
                c.n_theta = a.n_theta;
                c.n_phi = a.n_phi;
                c.oversample = a.oversample;
            }
            Some(Command::Squeeze(a)) => {
                c.command = Some(CommandKind::Squeeze);
                c.atoms = a.atoms.clone();
                c.beta_min_deg = a.beta_min;
                c.beta_max_deg = a.beta_max;
                c.beta_step_deg = a.beta_step;
            }
            Some(Command::Evolve(a)) => {
                c.command = Some(CommandKind::Evolve);
                c.atoms = a.atoms.map(|n| vec![n]);
                c.nbar = a.nbar.map(|v| vec![v]);
                c.horizon = a.horizon;
                c.horizon_factor = a.horizon_factor;
                c.samples = a.samples;
                c.nu = some_if(a.nu);
                c.report_times = some_if(a.report_times);
            }
            Some(Command::Times(a)) | Some(Command::Sweep(a)) => {
                c.command =
                    Some(if matches!(self.command, Some(Command::Sweep(_))) { CommandKind::Sweep } else { CommandKind::Times });
                c.atoms = a.atoms.clone();
                c.atoms_log = a.atoms_log.clone();
                c.nbar = a.nbar.clone();
                c.ncl = a.no_ncl.then_some(false);
            }
        }
        c
    }
}

/// Resolves the configuration, runs the command and writes the output.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let cfg = file.overlay(cli.flags());
    let digits = cfg.precision()?;
    let doc = commands::run(&cfg)?;
    let text = doc.render(cfg.format.unwrap_or(Format::Csv), digits);
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.clone(), source }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source }),
    }
}
