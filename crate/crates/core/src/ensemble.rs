//! Monte Carlo ensemble over bath initial conditions.
//!
//! Trajectory k owns the RNG stream (master_seed, k), so its result never
//! depends on the ensemble size, scheduling, or worker count. Reduction runs
//! over fixed-size index chunks merged in index order, which keeps the
//! floating-point accumulation bit-identical for any number of threads.

use rayon::prelude::*;

use crate::bath::{discretize, DiscretizedBath, SpectralDensityParams};
use crate::ehrenfest::{evolve_rk4_trajectory, TrajectorySeries};
use crate::error::{Error, Result};
use crate::pvqd::{evolve_trajectory, OptimizerConfig};
use crate::vqc::ShotConfig;
use crate::wigner::{sample, trajectory_rng, BathPhasePoint, ThermalState};

/// Which propagator evolves each trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Rk4,
    PvqdExact,
    PvqdShots,
}

/// Physical parameters of the spin-boson setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub omega_sys: f64,
    pub xi: f64,
    pub omega_c: f64,
    pub beta: f64,
    pub n_modes: usize,
}

/// Integration and optimizer knobs. `substeps` is the number of internal
/// integration substeps per recorded `dt` (the qubit–bath coupling grid).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericsParams {
    pub dt: f64,
    pub t_max: f64,
    pub substeps: usize,
    pub shots: u64,
    pub optimizer: OptimizerConfig,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub engine: Engine,
    pub physics: PhysicsParams,
    pub numerics: NumericsParams,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::Domain("n_trajectories must be >= 1".into()));
        }
        let p = &self.physics;
        if !(p.omega_sys.is_finite() && p.omega_sys > 0.0) {
            return Err(Error::Domain("omega_sys must be > 0".into()));
        }
        SpectralDensityParams::new(p.xi, p.omega_c)?;
        ThermalState::new(p.beta)?;
        if p.n_modes == 0 {
            return Err(Error::Domain("n_modes must be >= 1".into()));
        }
        let n = &self.numerics;
        if !(n.dt.is_finite() && n.dt > 0.0) {
            return Err(Error::Domain("dt must be > 0".into()));
        }
        if !(n.t_max.is_finite() && n.t_max > 0.0) {
            return Err(Error::Domain("t_max must be > 0".into()));
        }
        let steps = n.t_max / n.dt;
        if (steps - steps.round()).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::Domain(format!(
                "dt = {} must divide t_max = {} into whole steps",
                n.dt, n.t_max
            )));
        }
        if n.substeps == 0 {
            return Err(Error::Domain("substeps must be >= 1".into()));
        }
        if n.shots == 0 {
            return Err(Error::Domain("shots must be >= 1".into()));
        }
        n.optimizer.validate()
    }

    pub fn n_steps(&self) -> usize {
        (self.numerics.t_max / self.numerics.dt).round() as usize
    }

    pub fn bath(&self) -> Result<DiscretizedBath> {
        let params = SpectralDensityParams::new(self.physics.xi, self.physics.omega_c)?;
        discretize(&params, self.physics.n_modes)
    }

    pub fn thermal(&self) -> Result<ThermalState> {
        ThermalState::new(self.physics.beta)
    }
}

/// Time grid plus per-time ensemble mean and standard error of the reactant
/// population and ⟨σ_z⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSeries {
    pub times: Vec<f64>,
    pub p_reactant_mean: Vec<f64>,
    pub p_reactant_stderr: Vec<f64>,
    pub sigma_z_mean: Vec<f64>,
    pub sigma_z_stderr: Vec<f64>,
    pub n_contributing: usize,
    pub n_flagged: usize,
}

impl PopulationSeries {
    /// The sub-series on grid indices [start, start + len).
    pub fn restrict(&self, start: usize, len: usize) -> PopulationSeries {
        let end = start + len;
        PopulationSeries {
            times: self.times[start..end].to_vec(),
            p_reactant_mean: self.p_reactant_mean[start..end].to_vec(),
            p_reactant_stderr: self.p_reactant_stderr[start..end].to_vec(),
            sigma_z_mean: self.sigma_z_mean[start..end].to_vec(),
            sigma_z_stderr: self.sigma_z_stderr[start..end].to_vec(),
            n_contributing: self.n_contributing,
            n_flagged: self.n_flagged,
        }
    }
}

/// Pointwise deviation between two population curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviationReport {
    pub max_abs: f64,
    pub rms: f64,
}

/// Max and RMS pointwise deviation of `p_reactant_mean` on a shared grid.
pub fn compare_series(a: &PopulationSeries, b: &PopulationSeries) -> Result<DeviationReport> {
    if a.times.len() != b.times.len() {
        return Err(Error::GridMismatch(format!(
            "lengths {} vs {}",
            a.times.len(),
            b.times.len()
        )));
    }
    for (i, (ta, tb)) in a.times.iter().zip(&b.times).enumerate() {
        if ta != tb {
            return Err(Error::GridMismatch(format!("times differ at index {i}: {ta} vs {tb}")));
        }
    }
    let mut max_abs = 0.0f64;
    let mut sum_sq = 0.0f64;
    for (pa, pb) in a.p_reactant_mean.iter().zip(&b.p_reactant_mean) {
        let d = (pa - pb).abs();
        max_abs = max_abs.max(d);
        sum_sq += d * d;
    }
    Ok(DeviationReport { max_abs, rms: (sum_sq / a.times.len() as f64).sqrt() })
}

/// Runs a scope on a dedicated pool of `workers` threads (0 = ambient pool).
/// Results are identical for every choice; this only sets the parallelism.
pub fn with_worker_pool<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("worker pool")
            .install(f)
    }
}

/// Evolves trajectory `k` of the configured ensemble (public so callers can
/// audit single trajectories; `run_ensemble` averages exactly these).
pub fn evolve_one(cfg: &EnsembleConfig, bath: &DiscretizedBath, k: u64) -> Result<TrajectorySeries> {
    let thermal = cfg.thermal()?;
    let mut rng = trajectory_rng(cfg.master_seed, k);
    let initial = sample(bath, &thermal, &mut rng);
    evolve_with_engine(cfg, bath, &initial, &mut rng)
}

fn evolve_with_engine(
    cfg: &EnsembleConfig,
    bath: &DiscretizedBath,
    initial: &BathPhasePoint,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<TrajectorySeries> {
    let n_steps = cfg.n_steps();
    let dt = cfg.numerics.dt;
    let substeps = cfg.numerics.substeps;
    let omega = cfg.physics.omega_sys;
    match cfg.engine {
        Engine::Rk4 => evolve_rk4_trajectory(bath, initial, omega, dt, n_steps, substeps),
        Engine::PvqdExact => evolve_trajectory(
            bath,
            initial,
            omega,
            dt,
            n_steps,
            substeps,
            ShotConfig::Exact,
            &cfg.numerics.optimizer,
            rng,
        ),
        Engine::PvqdShots => evolve_trajectory(
            bath,
            initial,
            omega,
            dt,
            n_steps,
            substeps,
            ShotConfig::Shots(cfg.numerics.shots),
            &cfg.numerics.optimizer,
            rng,
        ),
    }
}

/// Per-time running moments (Welford), mergeable across chunks.
#[derive(Debug, Clone)]
struct MomentAccum {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl MomentAccum {
    fn new(len: usize) -> Self {
        Self { n: 0, mean: vec![0.0; len], m2: vec![0.0; len] }
    }

    fn push(&mut self, values: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for (i, v) in values.iter().enumerate() {
            let delta = v - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += delta * (v - self.mean[i]);
        }
    }

    fn merge(&mut self, other: &MomentAccum) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            self.n = other.n;
            self.mean.copy_from_slice(&other.mean);
            self.m2.copy_from_slice(&other.m2);
            return;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / n;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / n;
        }
        self.n += other.n;
    }

    fn stderr(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.m2
            .iter()
            .map(|m2| if self.n >= 2 { (m2.max(0.0) / (n * (n - 1.0))).sqrt() } else { 0.0 })
            .collect()
    }
}

struct ChunkResult {
    p: MomentAccum,
    sz: MomentAccum,
    flagged: usize,
    failed: usize,
}

const CHUNK: usize = 16;

/// Runs the configured ensemble with Wigner-sampled initial conditions.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<PopulationSeries> {
    let thermal = cfg.thermal()?;
    run_ensemble_with(cfg, |_, bath, rng| sample(bath, &thermal, rng))
}

/// Like [`run_ensemble`] but with a caller-supplied initial-condition source
/// `(trajectory index, bath, trajectory stream) -> phase point`.
pub fn run_ensemble_with<F>(cfg: &EnsembleConfig, initial_conditions: F) -> Result<PopulationSeries>
where
    F: Fn(u64, &DiscretizedBath, &mut rand_chacha::ChaCha8Rng) -> BathPhasePoint + Sync,
{
    cfg.validate()?;
    let bath = cfg.bath()?;
    let n_steps = cfg.n_steps();
    let n_points = n_steps + 1;
    let n = cfg.n_trajectories;
    let n_chunks = n.div_ceil(CHUNK);

    let chunks: Vec<ChunkResult> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let lo = chunk * CHUNK;
            let hi = ((chunk + 1) * CHUNK).min(n);
            let mut acc = ChunkResult {
                p: MomentAccum::new(n_points),
                sz: MomentAccum::new(n_points),
                flagged: 0,
                failed: 0,
            };
            for k in lo..hi {
                let mut rng = trajectory_rng(cfg.master_seed, k as u64);
                let initial = initial_conditions(k as u64, &bath, &mut rng);
                let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                    evolve_with_engine(cfg, &bath, &initial, &mut rng)
                }));
                match outcome {
                    Ok(Ok(series)) if series.all_finite() && series.times.len() == n_points => {
                        acc.p.push(&series.p_reactant);
                        acc.sz.push(&series.sigma_z);
                        if series.flagged_steps > 0 {
                            acc.flagged += 1;
                        }
                    }
                    _ => acc.failed += 1,
                }
            }
            acc
        })
        .collect();

    let mut p = MomentAccum::new(n_points);
    let mut sz = MomentAccum::new(n_points);
    let mut flagged = 0;
    let mut failed = 0;
    for chunk in &chunks {
        p.merge(&chunk.p);
        sz.merge(&chunk.sz);
        flagged += chunk.flagged;
        failed += chunk.failed;
    }

    if failed * 100 > n {
        return Err(Error::TooManyFailures { failed, total: n });
    }

    let dt = cfg.numerics.dt;
    Ok(PopulationSeries {
        times: (0..n_points).map(|k| k as f64 * dt).collect(),
        p_reactant_stderr: p.stderr(),
        sigma_z_stderr: sz.stderr(),
        p_reactant_mean: p.mean,
        sigma_z_mean: sz.mean,
        n_contributing: n - failed,
        n_flagged: flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_cfg(engine: Engine, n_trajectories: usize) -> EnsembleConfig {
        EnsembleConfig {
            n_trajectories,
            master_seed: 99,
            engine,
            physics: PhysicsParams {
                omega_sys: 1.0,
                xi: 1.2,
                omega_c: 2.5,
                beta: 0.2,
                n_modes: 16,
            },
            numerics: NumericsParams {
                dt: 0.05,
                t_max: 2.0,
                substeps: 4,
                shots: 1000,
                optimizer: OptimizerConfig::default(),
            },
        }
    }

    #[test]
    fn config_validation_catches_bad_knobs() {
        let mut cfg = base_cfg(Engine::Rk4, 1);
        cfg.numerics.t_max = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = base_cfg(Engine::Rk4, 1);
        cfg.numerics.dt = 0.07; // does not divide t_max = 2.0
        assert!(cfg.validate().is_err());
        let mut cfg = base_cfg(Engine::Rk4, 0);
        cfg.n_trajectories = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = base_cfg(Engine::Rk4, 1);
        cfg.physics.beta = -0.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn single_trajectory_ensemble_equals_the_trajectory() {
        let cfg = base_cfg(Engine::Rk4, 1);
        let series = run_ensemble(&cfg).unwrap();
        let bath = cfg.bath().unwrap();
        let single = evolve_one(&cfg, &bath, 0).unwrap();
        assert_eq!(series.p_reactant_mean, single.p_reactant);
        assert_eq!(series.sigma_z_mean, single.sigma_z);
        assert!(series.p_reactant_stderr.iter().all(|s| *s == 0.0));
        assert_eq!(series.n_contributing, 1);
    }

    #[test]
    fn ensemble_mean_is_average_of_owned_streams() {
        // trajectory k depends only on (master_seed, k), never on the
        // ensemble size, so means are averages of the standalone trajectories
        let cfg = base_cfg(Engine::Rk4, 4);
        let series = run_ensemble(&cfg).unwrap();
        let bath = cfg.bath().unwrap();
        let singles: Vec<_> = (0..4).map(|k| evolve_one(&cfg, &bath, k).unwrap()).collect();
        for i in 0..series.times.len() {
            let mean = singles.iter().map(|s| s.p_reactant[i]).sum::<f64>() / 4.0;
            assert!((series.p_reactant_mean[i] - mean).abs() < 1e-12);
        }
        let mut pair_cfg = cfg;
        pair_cfg.n_trajectories = 2;
        let pair = run_ensemble(&pair_cfg).unwrap();
        for i in 0..pair.times.len() {
            let mean = (singles[0].p_reactant[i] + singles[1].p_reactant[i]) / 2.0;
            assert!((pair.p_reactant_mean[i] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_initial_condition_collapses_stderr() {
        let cfg = base_cfg(Engine::Rk4, 40);
        let bath = cfg.bath().unwrap();
        let thermal = cfg.thermal().unwrap();
        let frozen = sample(&bath, &thermal, &mut trajectory_rng(1234, 0));
        let series = run_ensemble_with(&cfg, |_, _, _| frozen.clone()).unwrap();
        assert!(series.p_reactant_stderr.iter().all(|s| *s == 0.0));
        assert!(series.sigma_z_stderr.iter().all(|s| *s == 0.0));
        let single_cfg = base_cfg(Engine::Rk4, 1);
        let bath1 = single_cfg.bath().unwrap();
        let mut rng = trajectory_rng(single_cfg.master_seed, 0);
        let single = evolve_with_engine(&single_cfg, &bath1, &frozen, &mut rng).unwrap();
        assert_eq!(series.p_reactant_mean, single.p_reactant);
    }

    #[test]
    fn t_zero_row_is_exact() {
        let series = run_ensemble(&base_cfg(Engine::Rk4, 32)).unwrap();
        assert_eq!(series.p_reactant_mean[0], 1.0);
        assert_eq!(series.sigma_z_mean[0], 1.0);
        assert_eq!(series.p_reactant_stderr[0], 0.0);
        assert_eq!(series.times[0], 0.0);
    }

    #[test]
    fn results_are_bit_identical_across_worker_counts() {
        let cfg = base_cfg(Engine::PvqdShots, 24);
        let one = with_worker_pool(1, || run_ensemble(&cfg)).unwrap();
        let four = with_worker_pool(4, || run_ensemble(&cfg)).unwrap();
        let three = with_worker_pool(3, || run_ensemble(&cfg)).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, three);
    }

    #[test]
    fn stderr_halves_when_quadrupling_trajectories() {
        let small = run_ensemble(&base_cfg(Engine::Rk4, 100)).unwrap();
        let large = run_ensemble(&base_cfg(Engine::Rk4, 400)).unwrap();
        // compare late-time stderr, where fluctuations have built up
        let i = small.times.len() - 1;
        let ratio = small.p_reactant_stderr[i] / large.p_reactant_stderr[i];
        assert!((1.6..2.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn compare_series_on_matching_and_mismatched_grids() {
        let a = run_ensemble(&base_cfg(Engine::Rk4, 3)).unwrap();
        let report = compare_series(&a, &a).unwrap();
        assert_eq!(report.max_abs, 0.0);
        assert_eq!(report.rms, 0.0);

        let mut cfg = base_cfg(Engine::Rk4, 3);
        cfg.numerics.t_max = 1.0;
        let b = run_ensemble(&cfg).unwrap();
        assert!(matches!(compare_series(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn failed_trajectories_are_excluded_or_abort() {
        let cfg = base_cfg(Engine::Rk4, 300);
        // one poisoned initial condition of 300 (< 1%): excluded
        let thermal = cfg.thermal().unwrap();
        let series = run_ensemble_with(&cfg, |k, bath, rng| {
            let mut p = sample(bath, &thermal, rng);
            if k == 7 {
                p.x0[0] = f64::NAN;
            }
            p
        })
        .unwrap();
        assert_eq!(series.n_contributing, 299);
        assert!(series.p_reactant_mean.iter().all(|v| v.is_finite()));

        // every trajectory poisoned: abort
        let err = run_ensemble_with(&cfg, |_, bath, _| {
            let mut p = BathPhasePoint::zeros(bath.len());
            p.p0[0] = f64::INFINITY;
            p
        })
        .unwrap_err();
        assert!(matches!(err, Error::TooManyFailures { .. }));
    }
}
