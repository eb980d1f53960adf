use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Parser;

use eaet_cli::config::{render, EngineKind};
use eaet_cli::runner::run;

/// Ensemble-averaged Ehrenfest dynamics for a two-level system in a
/// harmonic bath, with classical (RK4) and variational-circuit propagators.
#[derive(Debug, Parser)]
#[command(name = "eaet", version)]
struct Cli {
    /// TOML configuration file (flags below override its keys)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Parameter preset: regime1 (Ω=1, ξ=1.2, ω_c=2.5, β=0.2) or
    /// regime2 (Ω=1, ξ=0.3, ω_c=5, β=5)
    #[arg(long)]
    preset: Option<String>,

    /// Engine to run; repeatable (rk4, pvqd, pvqd-shots)
    #[arg(long = "engine")]
    engines: Vec<EngineKind>,

    /// Number of Monte Carlo trajectories
    #[arg(long)]
    trajectories: Option<usize>,

    /// Master seed; trajectory k draws from stream (seed, k)
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (0 = all cores); falls back to $EAET_WORKERS
    #[arg(long)]
    workers: Option<usize>,

    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,

    /// Reference population curve (t,value rows) to compare against
    #[arg(long)]
    reference: Option<PathBuf>,
}

fn main() {
    if let Err(err) = try_main() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn try_main() -> Result<()> {
    let cli = Cli::parse();

    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?,
        None => String::new(),
    };
    let mut file: eaet_cli::ConfigFile = toml::from_str(&text).context("config parse error")?;

    // command-line flags take precedence over the file
    if cli.preset.is_some() {
        file.preset = cli.preset.clone();
    }
    if !cli.engines.is_empty() {
        file.engines = Some(cli.engines.clone());
    }
    if let Some(n) = cli.trajectories {
        file.numerics.get_or_insert_with(Default::default).trajectories = Some(n);
    }
    if cli.seed.is_some() {
        file.seed = cli.seed;
    }
    if cli.out.is_some() {
        file.out_dir = cli.out.clone();
    }
    if cli.reference.is_some() {
        file.reference = cli.reference.clone();
    }
    let workers_env = std::env::var("EAET_WORKERS").ok().and_then(|v| v.parse::<usize>().ok());
    if let Some(w) = cli.workers.or(workers_env) {
        file.workers = Some(w);
    }

    let (cfg, defaulted) = eaet_cli::config::resolve(file)?;

    println!("resolved configuration:");
    for line in render(&cfg).lines() {
        println!("  {line}");
    }
    if !defaulted.is_empty() {
        println!("defaulted knobs (not specified anywhere):");
        for key in &defaulted {
            println!("  {key}");
        }
    }

    let outcome = run(&cfg, |msg| println!("{msg}"))?;
    println!("wrote {}", outcome.manifest_path.display());
    for table in &outcome.tables {
        println!("wrote {}", table.display());
    }
    Ok(())
}
