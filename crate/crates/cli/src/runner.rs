//! Run orchestration: execute the requested engines, write tables, compare
//! curves, and record the manifest.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};

use eaet::ensemble::{compare_series, run_ensemble, with_worker_pool, PopulationSeries};

use crate::config::{EngineKind, RunConfig};
use crate::ingest::ingest_reference;
use crate::output::{
    config_sha256, render_deviation_report, write_manifest, write_table, DeviationRecord,
    EngineRecord, Manifest,
};

#[derive(Debug)]
pub struct RunOutcome {
    pub series: Vec<(EngineKind, PopulationSeries)>,
    pub tables: Vec<PathBuf>,
    pub manifest_path: PathBuf,
    pub deviations: Vec<DeviationRecord>,
}

/// Executes the run described by `cfg`: one ensemble per engine (shared
/// master seed, so engine curves are paired trajectory by trajectory),
/// population table per engine, deviation report for every engine pair and
/// against the reference file when given, and a manifest.
pub fn run(cfg: &RunConfig, log: impl Fn(&str)) -> Result<RunOutcome> {
    let total_start = Instant::now();
    std::fs::create_dir_all(&cfg.out_dir)
        .with_context(|| format!("cannot create output directory {}", cfg.out_dir.display()))?;

    let mut series = Vec::new();
    let mut records = Vec::new();
    let mut tables = Vec::new();
    for &engine in &cfg.engines {
        let ensemble_cfg = cfg.ensemble_config(engine);
        log(&format!(
            "running {} ({} trajectories, dt = {}, t_max = {})",
            engine, ensemble_cfg.n_trajectories, ensemble_cfg.numerics.dt, ensemble_cfg.numerics.t_max
        ));
        let start = Instant::now();
        let result = with_worker_pool(cfg.workers, || run_ensemble(&ensemble_cfg))
            .with_context(|| format!("engine {engine} failed"))?;
        let wall = start.elapsed().as_secs_f64();
        log(&format!(
            "  done in {:.2}s ({} contributing, {} flagged)",
            wall, result.n_contributing, result.n_flagged
        ));

        let table = cfg.out_dir.join(format!("{}.{}", engine.stem(), cfg.format.extension()));
        write_table(&table, &result, cfg.format)?;
        records.push(EngineRecord {
            engine: engine.stem().to_string(),
            table: table.clone(),
            n_contributing: result.n_contributing,
            n_flagged: result.n_flagged,
            wall_time_s: wall,
        });
        tables.push(table);
        series.push((engine, result));
    }

    // engine-vs-engine deviations on the shared grid
    let mut deviations = Vec::new();
    for i in 0..series.len() {
        for j in (i + 1)..series.len() {
            let (ea, sa) = &series[i];
            let (eb, sb) = &series[j];
            let report = compare_series(sa, sb).map_err(anyhow::Error::from)?;
            deviations.push(DeviationRecord {
                a: ea.stem().to_string(),
                b: eb.stem().to_string(),
                max_abs: report.max_abs,
                rms: report.rms,
                window: (sa.times[0], *sa.times.last().unwrap()),
            });
        }
    }

    // reference comparison on the overlapping window
    if let Some(ref_path) = &cfg.reference {
        let grid = &series
            .first()
            .context("reference comparison needs at least one engine")?
            .1
            .times;
        let (reference, start) = ingest_reference(ref_path, grid)?;
        let len = reference.times.len();
        for (engine, s) in &series {
            let window = s.restrict(start, len);
            let report = compare_series(&window, &reference).map_err(anyhow::Error::from)?;
            deviations.push(DeviationRecord {
                a: engine.stem().to_string(),
                b: "reference".to_string(),
                max_abs: report.max_abs,
                rms: report.rms,
                window: (reference.times[0], *reference.times.last().unwrap()),
            });
        }
    }

    if !deviations.is_empty() {
        let path = cfg.out_dir.join("deviations.csv");
        std::fs::write(&path, render_deviation_report(&deviations))
            .with_context(|| format!("cannot write {}", path.display()))?;
        for d in &deviations {
            log(&format!("deviation {} vs {}: max {:.3e}, rms {:.3e}", d.a, d.b, d.max_abs, d.rms));
        }
    }

    let manifest = Manifest {
        config: cfg.clone(),
        config_sha256: config_sha256(cfg),
        package: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        engines: records,
        deviations: deviations.clone(),
        total_wall_time_s: total_start.elapsed().as_secs_f64(),
    };
    let manifest_path = cfg.out_dir.join("manifest.json");
    write_manifest(&manifest_path, &manifest)?;

    Ok(RunOutcome { series, tables, manifest_path, deviations })
}
