//! Run configuration: TOML parsing, presets, defaults, validation.
//!
//! A config document is a flat set of `key = value` entries grouped into
//! `[physics]`, `[numerics]` and `[optimizer]` sections plus a handful of
//! top-level keys. Every key is optional; unspecified keys fall back to the
//! preset (default `regime1`) and are reported in the run log so every knob
//! that shaped the numbers is auditable. Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use eaet::ensemble::{Engine, EnsembleConfig, NumericsParams, PhysicsParams};
use eaet::pvqd::{AdamConfig, OptimizerConfig};

/// Engine selector as it appears in configs and on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EngineKind {
    Rk4,
    Pvqd,
    PvqdShots,
}

impl EngineKind {
    pub fn stem(&self) -> &'static str {
        match self {
            EngineKind::Rk4 => "rk4",
            EngineKind::Pvqd => "pvqd",
            EngineKind::PvqdShots => "pvqd-shots",
        }
    }

    pub fn to_engine(self) -> Engine {
        match self {
            EngineKind::Rk4 => Engine::Rk4,
            EngineKind::Pvqd => Engine::PvqdExact,
            EngineKind::PvqdShots => Engine::PvqdShots,
        }
    }
}

impl FromStr for EngineKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rk4" => Ok(EngineKind::Rk4),
            "pvqd" => Ok(EngineKind::Pvqd),
            "pvqd-shots" => Ok(EngineKind::PvqdShots),
            other => bail!("unknown engine {other:?} (expected rk4, pvqd or pvqd-shots)"),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stem())
    }
}

/// Output table flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Tsv,
}

impl TableFormat {
    pub fn delimiter(&self) -> char {
        match self {
            TableFormat::Csv => ',',
            TableFormat::Tsv => '\t',
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            TableFormat::Csv => "csv",
            TableFormat::Tsv => "tsv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsSection {
    pub omega: f64,
    pub xi: f64,
    pub omega_c: f64,
    pub beta: f64,
    pub n_modes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub dt: f64,
    pub t_max: f64,
    pub substeps: usize,
    pub trajectories: usize,
    pub shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSection {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub tol_loss: f64,
    pub max_iters: u32,
    pub shot_iters: u32,
}

/// A fully resolved run configuration. Serializing and re-parsing one is the
/// identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub preset: String,
    pub out_dir: PathBuf,
    pub format: TableFormat,
    pub engines: Vec<EngineKind>,
    pub seed: u64,
    pub workers: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<PathBuf>,
    pub physics: PhysicsSection,
    pub numerics: NumericsSection,
    pub optimizer: OptimizerSection,
}

/// Partial document: everything optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<TableFormat>,
    pub engines: Option<Vec<EngineKind>>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub reference: Option<PathBuf>,
    pub physics: Option<PhysicsFileSection>,
    pub numerics: Option<NumericsFileSection>,
    pub optimizer: Option<OptimizerFileSection>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsFileSection {
    pub omega: Option<f64>,
    pub xi: Option<f64>,
    pub omega_c: Option<f64>,
    pub beta: Option<f64>,
    pub n_modes: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsFileSection {
    pub dt: Option<f64>,
    pub t_max: Option<f64>,
    pub substeps: Option<usize>,
    pub trajectories: Option<usize>,
    pub shots: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerFileSection {
    pub learning_rate: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub epsilon: Option<f64>,
    pub tol_loss: Option<f64>,
    pub max_iters: Option<u32>,
    pub shot_iters: Option<u32>,
}

/// The two parameter regimes shipped as presets.
fn preset_physics(name: &str) -> Result<PhysicsSection> {
    match name {
        "regime1" => Ok(PhysicsSection { omega: 1.0, xi: 1.2, omega_c: 2.5, beta: 0.2, n_modes: 60 }),
        "regime2" => Ok(PhysicsSection { omega: 1.0, xi: 0.3, omega_c: 5.0, beta: 5.0, n_modes: 60 }),
        other => bail!("unknown preset {other:?} (expected regime1 or regime2)"),
    }
}

fn default_numerics() -> NumericsSection {
    NumericsSection { dt: 0.05, t_max: 15.0, substeps: 16, trajectories: 10_000, shots: 50_000 }
}

fn default_optimizer() -> OptimizerSection {
    OptimizerSection {
        learning_rate: 0.05,
        beta1: 0.9,
        beta2: 0.999,
        epsilon: 1e-8,
        tol_loss: 1e-9,
        max_iters: 3000,
        shot_iters: 150,
    }
}

macro_rules! pick {
    ($defaults:expr, $section:expr, $field:ident, $key:expr, $defaulted:expr) => {
        match $section.as_ref().and_then(|s| s.$field.clone()) {
            Some(v) => v,
            None => {
                $defaulted.push(format!("{} = {:?}", $key, $defaults.$field));
                $defaults.$field.clone()
            }
        }
    };
}

/// Resolves a partial document against the preset defaults. Returns the
/// resolved config and the list of keys that fell back to defaults.
pub fn resolve(file: ConfigFile) -> Result<(RunConfig, Vec<String>)> {
    let mut defaulted = Vec::new();
    let preset = file.preset.clone().unwrap_or_else(|| {
        defaulted.push("preset = \"regime1\"".into());
        "regime1".into()
    });
    let physics_defaults = preset_physics(&preset)?;
    let numerics_defaults = default_numerics();
    let optimizer_defaults = default_optimizer();

    let physics = PhysicsSection {
        omega: pick!(physics_defaults, file.physics, omega, "physics.omega", defaulted),
        xi: pick!(physics_defaults, file.physics, xi, "physics.xi", defaulted),
        omega_c: pick!(physics_defaults, file.physics, omega_c, "physics.omega_c", defaulted),
        beta: pick!(physics_defaults, file.physics, beta, "physics.beta", defaulted),
        n_modes: pick!(physics_defaults, file.physics, n_modes, "physics.n_modes", defaulted),
    };
    let numerics = NumericsSection {
        dt: pick!(numerics_defaults, file.numerics, dt, "numerics.dt", defaulted),
        t_max: pick!(numerics_defaults, file.numerics, t_max, "numerics.t_max", defaulted),
        substeps: pick!(numerics_defaults, file.numerics, substeps, "numerics.substeps", defaulted),
        trajectories: pick!(numerics_defaults, file.numerics, trajectories, "numerics.trajectories", defaulted),
        shots: pick!(numerics_defaults, file.numerics, shots, "numerics.shots", defaulted),
    };
    let optimizer = OptimizerSection {
        learning_rate: pick!(optimizer_defaults, file.optimizer, learning_rate, "optimizer.learning_rate", defaulted),
        beta1: pick!(optimizer_defaults, file.optimizer, beta1, "optimizer.beta1", defaulted),
        beta2: pick!(optimizer_defaults, file.optimizer, beta2, "optimizer.beta2", defaulted),
        epsilon: pick!(optimizer_defaults, file.optimizer, epsilon, "optimizer.epsilon", defaulted),
        tol_loss: pick!(optimizer_defaults, file.optimizer, tol_loss, "optimizer.tol_loss", defaulted),
        max_iters: pick!(optimizer_defaults, file.optimizer, max_iters, "optimizer.max_iters", defaulted),
        shot_iters: pick!(optimizer_defaults, file.optimizer, shot_iters, "optimizer.shot_iters", defaulted),
    };

    let cfg = RunConfig {
        preset,
        out_dir: file.out_dir.unwrap_or_else(|| {
            defaulted.push("out_dir = \"out\"".into());
            PathBuf::from("out")
        }),
        format: file.format.unwrap_or(TableFormat::Csv),
        engines: file.engines.unwrap_or_else(|| {
            defaulted.push("engines = [\"rk4\"]".into());
            vec![EngineKind::Rk4]
        }),
        seed: file.seed.unwrap_or_else(|| {
            defaulted.push("seed = 1".into());
            1
        }),
        workers: file.workers.unwrap_or(0),
        reference: file.reference,
        physics,
        numerics,
        optimizer,
    };
    cfg.validate()?;
    Ok((cfg, defaulted))
}

/// Parses a config document, applying presets and defaults.
pub fn parse_config(text: &str) -> Result<(RunConfig, Vec<String>)> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| anyhow!("config parse error: {e}"))?;
    resolve(file)
}

/// Renders a resolved config back to TOML. `parse_config(render(cfg))`
/// returns `cfg` unchanged.
pub fn render(cfg: &RunConfig) -> String {
    toml::to_string_pretty(cfg).expect("config serializes")
}

impl RunConfig {
    /// Range checks with key paths in the diagnostics.
    pub fn validate(&self) -> Result<()> {
        preset_physics(&self.preset)?;
        let p = &self.physics;
        ensure_range("physics.omega", p.omega.is_finite() && p.omega > 0.0, p.omega)?;
        ensure_range("physics.xi", p.xi.is_finite() && p.xi >= 0.0, p.xi)?;
        ensure_range("physics.omega_c", p.omega_c.is_finite() && p.omega_c > 0.0, p.omega_c)?;
        ensure_range("physics.beta", p.beta.is_finite() && p.beta > 0.0, p.beta)?;
        if p.n_modes == 0 {
            bail!("physics.n_modes: expected >= 1, got 0");
        }
        let n = &self.numerics;
        ensure_range("numerics.dt", n.dt.is_finite() && n.dt > 0.0, n.dt)?;
        ensure_range("numerics.t_max", n.t_max.is_finite() && n.t_max > 0.0, n.t_max)?;
        if n.substeps == 0 {
            bail!("numerics.substeps: expected >= 1, got 0");
        }
        if n.trajectories == 0 {
            bail!("numerics.trajectories: expected >= 1, got 0");
        }
        if n.shots == 0 {
            bail!("numerics.shots: expected >= 1, got 0");
        }
        if self.engines.is_empty() {
            bail!("engines: expected at least one engine");
        }
        let o = &self.optimizer;
        ensure_range("optimizer.learning_rate", o.learning_rate > 0.0, o.learning_rate)?;
        ensure_range("optimizer.beta1", (0.0..1.0).contains(&o.beta1), o.beta1)?;
        ensure_range("optimizer.beta2", (0.0..1.0).contains(&o.beta2), o.beta2)?;
        ensure_range("optimizer.epsilon", o.epsilon > 0.0, o.epsilon)?;
        ensure_range("optimizer.tol_loss", o.tol_loss > 0.0, o.tol_loss)?;
        // t_max must be a whole number of dt steps
        self.ensemble_config(EngineKind::Rk4)
            .validate()
            .map_err(|e| anyhow!("{e}"))
            .context("invalid configuration")?;
        Ok(())
    }

    /// The core ensemble configuration for one engine.
    pub fn ensemble_config(&self, engine: EngineKind) -> EnsembleConfig {
        EnsembleConfig {
            n_trajectories: self.numerics.trajectories,
            master_seed: self.seed,
            engine: engine.to_engine(),
            physics: PhysicsParams {
                omega_sys: self.physics.omega,
                xi: self.physics.xi,
                omega_c: self.physics.omega_c,
                beta: self.physics.beta,
                n_modes: self.physics.n_modes,
            },
            numerics: NumericsParams {
                dt: self.numerics.dt,
                t_max: self.numerics.t_max,
                substeps: self.numerics.substeps,
                shots: self.numerics.shots,
                optimizer: OptimizerConfig {
                    adam: AdamConfig {
                        learning_rate: self.optimizer.learning_rate,
                        beta1: self.optimizer.beta1,
                        beta2: self.optimizer.beta2,
                        epsilon: self.optimizer.epsilon,
                    },
                    tol_loss: self.optimizer.tol_loss,
                    max_iters: self.optimizer.max_iters,
                    shot_iters: self.optimizer.shot_iters,
                },
            },
        }
    }
}

fn ensure_range(key: &str, ok: bool, got: f64) -> Result<()> {
    if ok {
        Ok(())
    } else {
        bail!("{key}: value {got} out of range")
    }
}
