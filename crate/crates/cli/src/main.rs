use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};

use apme::params::ExponentSet;
use apme::solver::Grid;

use apme_cli::commands::{self, Output, Verdict};
use apme_cli::config::{parse_config, ExperimentConfig, CHECK_NAMES};

/// Numerical laboratory for the anisotropic porous medium equation.
///
/// Exit status: 0 when every selected check passes, 1 when a check fails,
/// 2 for usage, configuration and I/O errors.
#[derive(Debug, Parser)]
#[command(name = "apme", version)]
struct Cli {
    /// Experiment configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed (overrides `[output] seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Derived constants and admissibility verdict of an exponent set.
    Params {
        /// Exponents, comma separated (default: from the config).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m: Option<Vec<f64>>,
    },
    /// Barrier parameters and a sampled residual certificate.
    Barrier {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        m: Option<Vec<f64>>,
        /// Plateau height.
        #[arg(long)]
        c0: Option<f64>,
        /// Plateau parameter.
        #[arg(long)]
        a: Option<f64>,
        /// Time horizon.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Maps a snapshot between the original and rescaled frames.
    Transform {
        /// Snapshot file (`.apme` binary or 1-D `.csv`).
        input: PathBuf,
        /// Target grid nodes per axis (default: the input grid).
        #[arg(long, value_delimiter = ',', requires = "half_widths")]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', requires = "sizes")]
        half_widths: Option<Vec<f64>>,
    },
    /// Runs the configured experiment and writes snapshots and the series CSV.
    Solve,
    /// Runs one check, or `all` for the checks selected in the config.
    Verify {
        check: String,
    },
    /// Mass sweep feeding the mass-exponent probe.
    Sweep,
}

fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow!("this command needs --config"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut cfg = parse_config(&text)?;
    if let Some(o) = &cli.out {
        cfg.out_dir = o.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    if let Some(o) = &cli.out {
        return Ok(o.clone());
    }
    match &cli.config {
        Some(_) => Ok(load(cli)?.out_dir),
        None => Ok(PathBuf::from("out")),
    }
}

fn exponents_from(cli: &Cli, m: &Option<Vec<f64>>) -> Result<ExponentSet> {
    match m {
        Some(m) => Ok(ExponentSet::new(m)?),
        None => commands::exponents(&load(cli)?),
    }
}

fn execute(cli: &Cli) -> Result<Verdict> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the worker pool")?;
    }
    match &cli.command {
        Command::Params { m } => {
            let e = exponents_from(cli, m)?;
            let mut out = Output::new(&out_dir(cli)?);
            let v = commands::params(&e, &mut out)?;
            out.flush()?;
            Ok(v)
        }
        Command::Barrier {
            m,
            c0,
            a,
            horizon,
            samples,
        } => {
            let e = exponents_from(cli, m)?;
            let cfg = cli.config.as_ref().map(|_| load(cli)).transpose()?;
            let b = cfg.as_ref().and_then(|c| c.barrier.clone());
            let pick = |flag: &Option<f64>, from: Option<f64>, name: &str| {
                flag.or(from)
                    .ok_or_else(|| anyhow!("missing barrier parameter {name} (flag or [barrier] section)"))
            };
            let c0 = pick(c0, b.as_ref().map(|b| b.c0), "c0")?;
            let a = pick(a, b.as_ref().map(|b| b.a), "a")?;
            let horizon = pick(horizon, b.as_ref().map(|b| b.horizon), "horizon")?;
            let samples = samples
                .or(cfg.as_ref().map(|c| c.checks.certificate_samples))
                .unwrap_or(10_000);
            let seed = cli.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            let mut out = Output::new(&out_dir(cli)?);
            let v = commands::barrier(&e, c0, a, horizon, samples, seed, &mut out)?;
            out.flush()?;
            Ok(v)
        }
        Command::Transform {
            input,
            sizes,
            half_widths,
        } => {
            let target = match (sizes, half_widths) {
                (Some(s), Some(h)) => Some(Grid::new(s, h)?),
                _ => None,
            };
            let mut out = Output::new(&out_dir(cli)?);
            let v = commands::transform(input, target, &mut out)?;
            out.flush()?;
            Ok(v)
        }
        Command::Solve => {
            let cfg = load(cli)?;
            let mut out = Output::new(&cfg.out_dir);
            let v = commands::solve(&cfg, &mut out)?;
            out.flush()?;
            Ok(v)
        }
        Command::Verify { check } => {
            let cfg = load(cli)?;
            let names: Vec<String> = if check == "all" {
                if cfg.checks.select.is_empty() {
                    CHECK_NAMES.iter().map(|s| s.to_string()).collect()
                } else {
                    cfg.checks.select.clone()
                }
            } else {
                vec![check.clone()]
            };
            let mut out = Output::new(&cfg.out_dir);
            let v = commands::verify(&names, &cfg, &mut out)?;
            out.flush()?;
            Ok(v)
        }
        Command::Sweep => {
            let cfg = load(cli)?;
            let mut out = Output::new(&cfg.out_dir);
            let v = commands::sweep(&cfg, &mut out)?;
            out.flush()?;
            Ok(v)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
