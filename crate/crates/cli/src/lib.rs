//! Command-line front end for `relaycap`: rate evaluation, parameter sweeps,
//! allocation search, bit-energy curves and self-validation, all writing
//! plain CSV or `key=value` lines.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod presets;
pub mod table;

use commands::RunOptions;
use config::Config;
use presets::PresetCommand;

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "RELAYCAP_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "relaycap",
    version,
    about = "Achievable rates of pilot-trained fading relay channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rate of one scheme at one operating point.
    Rate(Common),
    /// Rates over a one- or two-dimensional grid of one parameter.
    Sweep(Common),
    /// Search over training fractions, alpha or theta.
    Optimize(Common),
    /// Bit energy against SNR, or its minimum.
    BitEnergy(Common),
    /// Estimator statistics and reduction checks.
    Validate(Common),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named parameter set, applied below the config file.
    #[arg(long)]
    pub preset: Option<String>,
    /// Override one key; repeatable and applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Write CSV output to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Random seed, decimal or 0x-prefixed hex.
    #[arg(long, value_parser = config::parse_seed)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo samples.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Round alpha so that alpha * (m - 2) is an integer.
    #[arg(long)]
    pub snap_alpha: bool,
}

impl Command {
    fn parts(&self) -> (&'static str, &Common) {
        match self {
            Command::Rate(c) => ("rate", c),
            Command::Sweep(c) => ("sweep", c),
            Command::Optimize(c) => ("optimize", c),
            Command::BitEnergy(c) => ("bit-energy", c),
            Command::Validate(c) => ("validate", c),
        }
    }
}

/// Layers preset, file, flags and `--set` overrides, lowest first.
pub fn build_config(name: &str, common: &Common) -> Result<Config> {
    let mut cfg = Config::new();
    if let Some(p) = &common.preset {
        let preset = presets::find(p)?;
        let expected = match preset.command {
            PresetCommand::Sweep => "sweep",
            PresetCommand::BitEnergy => "bit-energy",
        };
        if expected != name {
            bail!("preset {p} is for the {expected} command, not {name}");
        }
        cfg.merge(&preset.config()?);
    }
    if let Some(path) = &common.config {
        cfg.merge(&Config::from_file(path)?);
    }
    if let Some(seed) = common.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(n) = common.samples {
        cfg.set("samples", &n.to_string())?;
    }
    if common.snap_alpha {
        cfg.set("snap_alpha", "true")?;
    }
    for pair in &common.set {
        cfg.set_pair(pair)?;
    }
    Ok(cfg)
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let (name, common) = cli.command.parts();
    let cfg = build_config(name, common)?;
    let opts = RunOptions {
        out: common.out.clone(),
        snap_alpha: cfg.bool_or("snap_alpha", false)?,
    };
    match &cli.command {
        Command::Rate(_) => commands::cmd_rate(&cfg, &opts, out)?,
        Command::Sweep(_) => commands::cmd_sweep(&cfg, &opts, out)?,
        Command::Optimize(_) => commands::cmd_optimize(&cfg, &opts, out)?,
        Command::BitEnergy(_) => commands::cmd_bit_energy(&cfg, &opts, out)?,
        Command::Validate(_) => {
            if !commands::cmd_validate(&cfg, &opts, out)? {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

/// Sizes the global worker pool from [`THREADS_ENV`], if set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = match v.trim().parse() {
            Ok(n) if n > 0 => n,
            _ => bail!("{THREADS_ENV}: expected a positive integer, got {v:?}"),
        };
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}
