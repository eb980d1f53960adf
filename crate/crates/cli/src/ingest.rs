//! Reading external reference population curves.
//!
//! Reference files hold `(t, value)` rows (comma or whitespace separated,
//! `#` comments allowed). They are read-only benchmark data, resampled onto
//! the run grid by linear interpolation; grid points outside the file's
//! time range are dropped, so comparisons run on the overlapping window.

use std::path::Path;

use anyhow::{bail, Context, Result};

use eaet::ensemble::PopulationSeries;

fn parse_rows(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        if fields.len() != 2 {
            bail!("line {}: expected two columns (t, value), got {}", lineno + 1, fields.len());
        }
        let t: f64 = fields[0].parse().with_context(|| format!("line {}: bad time", lineno + 1))?;
        let v: f64 = fields[1].parse().with_context(|| format!("line {}: bad value", lineno + 1))?;
        rows.push((t, v));
    }
    if rows.is_empty() {
        bail!("reference file contains no data rows");
    }
    for w in rows.windows(2) {
        if w[1].0 <= w[0].0 {
            bail!("reference times must be strictly increasing ({} then {})", w[0].0, w[1].0);
        }
    }
    Ok(rows)
}

fn interpolate(rows: &[(f64, f64)], t: f64) -> f64 {
    let i = rows.partition_point(|(rt, _)| *rt <= t);
    if i == 0 {
        return rows[0].1;
    }
    if i == rows.len() {
        return rows[rows.len() - 1].1;
    }
    let (t0, v0) = rows[i - 1];
    let (t1, v1) = rows[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// Resamples the file onto the grid points lying inside the file's time
/// range. Returns the reference as a `PopulationSeries` (stderr 0, no
/// contributing trajectories) plus the index of the first covered grid point.
pub fn ingest_reference(path: &Path, grid: &[f64]) -> Result<(PopulationSeries, usize)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read reference file {}", path.display()))?;
    let rows = parse_rows(&text).with_context(|| format!("bad reference file {}", path.display()))?;

    let t_lo = rows[0].0;
    let t_hi = rows[rows.len() - 1].0;
    // grid times carry k*dt roundoff; don't drop an endpoint over 1e-9
    let slack = 1e-9 * (1.0 + t_hi.abs());
    let start = grid.partition_point(|t| *t < t_lo - slack);
    let end = grid.partition_point(|t| *t <= t_hi + slack);
    if start >= end {
        bail!(
            "reference range [{t_lo}, {t_hi}] does not overlap the run grid [{}, {}]",
            grid.first().copied().unwrap_or(f64::NAN),
            grid.last().copied().unwrap_or(f64::NAN)
        );
    }

    let times: Vec<f64> = grid[start..end].to_vec();
    let p: Vec<f64> = times.iter().map(|t| interpolate(&rows, *t)).collect();
    let sz: Vec<f64> = p.iter().map(|v| 2.0 * v - 1.0).collect();
    let n = times.len();
    Ok((
        PopulationSeries {
            times,
            p_reactant_mean: p,
            p_reactant_stderr: vec![0.0; n],
            sigma_z_mean: sz,
            sigma_z_stderr: vec![0.0; n],
            n_contributing: 0,
            n_flagged: 0,
        },
        start,
    ))
}
