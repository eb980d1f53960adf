//! Population tables and the run manifest.
//!
//! Tables are delimited text with a header row and 17-significant-digit
//! floats, one file per engine, newline-terminated. The manifest records
//! everything that affects the numbers (resolved config + hash + versions)
//! plus wall time per engine.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use eaet::ensemble::PopulationSeries;

use crate::config::{render, RunConfig, TableFormat};

/// One table row is `t, p_reactant_mean, p_reactant_stderr, sigma_z_mean,
/// sigma_z_stderr, n_contributing`.
pub fn render_table(series: &PopulationSeries, format: TableFormat) -> String {
    let d = format.delimiter();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "t{d}p_reactant_mean{d}p_reactant_stderr{d}sigma_z_mean{d}sigma_z_stderr{d}n_contributing"
    );
    for i in 0..series.times.len() {
        let _ = writeln!(
            out,
            "{:.16e}{d}{:.16e}{d}{:.16e}{d}{:.16e}{d}{:.16e}{d}{}",
            series.times[i],
            series.p_reactant_mean[i],
            series.p_reactant_stderr[i],
            series.sigma_z_mean[i],
            series.sigma_z_stderr[i],
            series.n_contributing,
        );
    }
    out
}

pub fn write_table(path: &Path, series: &PopulationSeries, format: TableFormat) -> Result<()> {
    std::fs::write(path, render_table(series, format))
        .with_context(|| format!("cannot write table {}", path.display()))
}

pub fn config_sha256(cfg: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(render(cfg).as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

#[derive(Debug, Clone, Serialize)]
pub struct EngineRecord {
    pub engine: String,
    pub table: PathBuf,
    pub n_contributing: usize,
    pub n_flagged: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationRecord {
    pub a: String,
    pub b: String,
    pub max_abs: f64,
    pub rms: f64,
    /// First and last time of the compared window.
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub config_sha256: String,
    pub package: String,
    pub version: String,
    pub seed: u64,
    pub engines: Vec<EngineRecord>,
    pub deviations: Vec<DeviationRecord>,
    pub total_wall_time_s: f64,
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest).context("manifest serialization")?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write manifest {}", path.display()))
}

pub fn render_deviation_report(deviations: &[DeviationRecord]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pair{0}max_abs{0}rms{0}t_first{0}t_last", ',');
    for d in deviations {
        let _ = writeln!(
            out,
            "{} vs {},{:.16e},{:.16e},{:.16e},{:.16e}",
            d.a, d.b, d.max_abs, d.rms, d.window.0, d.window.1
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    #[test]
    fn table_has_full_precision_and_trailing_newline() {
        let series = PopulationSeries {
            times: vec![0.0, 0.05],
            p_reactant_mean: vec![1.0, 1.0 / 3.0],
            p_reactant_stderr: vec![0.0, 0.25],
            sigma_z_mean: vec![1.0, -1.0 / 3.0],
            sigma_z_stderr: vec![0.0, 0.5],
            n_contributing: 7,
            n_flagged: 0,
        };
        let text = render_table(&series, TableFormat::Csv);
        assert!(text.ends_with('\n'));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "t,p_reactant_mean,p_reactant_stderr,sigma_z_mean,sigma_z_stderr,n_contributing"
        );
        assert!(lines[2].starts_with("5.0000000000000003e-2,3.3333333333333331e-1,"));
        assert!(lines[2].ends_with(",7"));
    }

    #[test]
    fn config_hash_tracks_content() {
        let (a, _) = parse_config("").unwrap();
        let (b, _) = parse_config("seed = 2").unwrap();
        assert_ne!(config_sha256(&a), config_sha256(&b));
        let (a2, _) = parse_config("").unwrap();
        assert_eq!(config_sha256(&a), config_sha256(&a2));
    }
}
