//! Projected variational time stepping.
//!
//! Each step minimizes `L(dθ, dt) = (1 − |⟨0|C†(θ) U C(θ+dθ)|0⟩|²)/dt²`
//! over the parameter increment dθ with ADAM, where `U` is the short-time
//! propagator of the current Ehrenfest Hamiltonian. Gradients use the ±π/2
//! parameter-shift rule, which is exact for the R_z/R_x rotations of the
//! ansatz. The global-phase angle θ₁ does not enter the loss and is kept
//! frozen at its initial value.

use rand::Rng;

use crate::bath::DiscretizedBath;
use crate::ehrenfest::{mean_path, step_unitary_from_field, MeanPath, TrajectorySeries, TrajectoryState};
use crate::error::{Error, Result};
use crate::qubit::{Mat2, QubitState};
use crate::vqc::{apply_to_zero, fidelity, fidelity_shots, CircuitParams, ShotConfig};
use crate::wigner::BathPhasePoint;

/// Step size and overlap-evaluation mode of the loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub dt: f64,
    pub shots: ShotConfig,
}

/// ADAM hyperparameters. The defaults are sized to the O(1) loss scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self { learning_rate: 0.05, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

impl AdamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Domain("learning_rate must be > 0".into()));
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..1.0).contains(&b) {
                return Err(Error::Domain(format!("{name} must be in [0, 1), got {b}")));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::Domain("epsilon must be > 0".into()));
        }
        Ok(())
    }
}

/// First/second moment estimates plus the step counter for bias correction.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub cfg: AdamConfig,
    pub m: [f64; 4],
    pub v: [f64; 4],
    pub step: u64,
}

impl AdamState {
    pub fn new(cfg: AdamConfig) -> Self {
        Self { cfg, m: [0.0; 4], v: [0.0; 4], step: 0 }
    }
}

/// One bias-corrected ADAM update of `d_params` along `-grad`.
pub fn adam_step(adam: &mut AdamState, grad: &[f64; 4], d_params: &mut [f64; 4]) {
    adam.step += 1;
    let t = adam.step as i32;
    let c = adam.cfg;
    let bc1 = 1.0 - c.beta1.powi(t);
    let bc2 = 1.0 - c.beta2.powi(t);
    for i in 0..4 {
        adam.m[i] = c.beta1 * adam.m[i] + (1.0 - c.beta1) * grad[i];
        adam.v[i] = c.beta2 * adam.v[i] + (1.0 - c.beta2) * grad[i] * grad[i];
        let m_hat = adam.m[i] / bc1;
        let v_hat = adam.v[i] / bc2;
        d_params[i] -= c.learning_rate * m_hat / (v_hat.sqrt() + c.epsilon);
    }
}

/// Optimization settings for one projection step. Exact mode stops at
/// `tol_loss` (or `max_iters`); shot mode runs a fixed `shot_iters` budget
/// because shot noise floors the loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub adam: AdamConfig,
    pub tol_loss: f64,
    pub max_iters: u32,
    pub shot_iters: u32,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        // max_iters sized for the rare steps that traverse a coordinate pole
        // of the ansatz (θ₃ near 0 or π), where the azimuth gradient is
        // suppressed and ADAM needs ~1e3 iterations; typical steps use ~2e2.
        Self { adam: AdamConfig::default(), tol_loss: 1e-9, max_iters: 3000, shot_iters: 150 }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        self.adam.validate()?;
        if !(self.tol_loss.is_finite() && self.tol_loss > 0.0) {
            return Err(Error::Domain("tol_loss must be > 0".into()));
        }
        if self.max_iters == 0 || self.shot_iters == 0 {
            return Err(Error::Domain("iteration budgets must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one projection step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeReport {
    pub d_theta: [f64; 4],
    pub loss: f64,
    pub iterations: u32,
    pub converged: bool,
}

/// `L(dθ, dt) = (1 − |⟨0|C†(θ) e^{iH dt} C(θ+dθ)|0⟩|²)/dt²` where `step_u`
/// is the short-time propagator `e^{−iH dt/ħ}`.
///
/// The overlap sandwiches the *inverse* of the step, so the loss is minimized
/// when `C(θ+dθ)|0⟩` equals the forward-propagated state `step_u · C(θ)|0⟩`.
pub fn loss<R: Rng>(
    params: &CircuitParams,
    d_params: &[f64; 4],
    step_u: &Mat2,
    cfg: &LossConfig,
    rng: &mut R,
) -> Result<f64> {
    if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {}", cfg.dt)));
    }
    let back = step_u.dagger();
    let shifted = params.shifted(d_params);
    let f = match cfg.shots {
        ShotConfig::Exact => fidelity(params, &back, &shifted)?,
        ShotConfig::Shots(_) => fidelity_shots(params, &back, &shifted, cfg.shots, rng)?,
    };
    Ok((1.0 - f) / (cfg.dt * cfg.dt))
}

/// Parameter-shift gradient `½[L(dθ + π/2 e_i) − L(dθ − π/2 e_i)]` for the
/// rotation angles i ∈ {2, 3, 4}; the global-phase component stays 0.
pub fn gradient<R: Rng>(
    params: &CircuitParams,
    d_params: &[f64; 4],
    step_u: &Mat2,
    cfg: &LossConfig,
    rng: &mut R,
) -> Result<[f64; 4]> {
    let mut g = [0.0; 4];
    for i in 1..4 {
        let mut plus = *d_params;
        plus[i] += std::f64::consts::FRAC_PI_2;
        let mut minus = *d_params;
        minus[i] -= std::f64::consts::FRAC_PI_2;
        g[i] = 0.5 * (loss(params, &plus, step_u, cfg, rng)? - loss(params, &minus, step_u, cfg, rng)?);
    }
    Ok(g)
}

/// Advances the circuit parameters across one `dt`: warm-starts at dθ = 0,
/// runs ADAM on the projection loss, and returns θ + dθ with a report.
pub fn project_step<R: Rng>(
    params: &CircuitParams,
    step_u: &Mat2,
    cfg: &LossConfig,
    opt: &OptimizerConfig,
    rng: &mut R,
) -> Result<(CircuitParams, OptimizeReport)> {
    let mut d = [0.0; 4];
    let mut adam = AdamState::new(opt.adam);
    let mut iterations = 0u32;

    let (final_loss, converged) = match cfg.shots {
        ShotConfig::Exact => {
            let mut current = loss(params, &d, step_u, cfg, rng)?;
            while current >= opt.tol_loss && iterations < opt.max_iters {
                let g = gradient(params, &d, step_u, cfg, rng)?;
                adam_step(&mut adam, &g, &mut d);
                iterations += 1;
                current = loss(params, &d, step_u, cfg, rng)?;
            }
            (current, current < opt.tol_loss)
        }
        ShotConfig::Shots(_) => {
            for _ in 0..opt.shot_iters {
                let g = gradient(params, &d, step_u, cfg, rng)?;
                adam_step(&mut adam, &g, &mut d);
                iterations += 1;
            }
            (loss(params, &d, step_u, cfg, rng)?, true)
        }
    };

    Ok((
        params.shifted(&d),
        OptimizeReport { d_theta: d, loss: final_loss, iterations, converged },
    ))
}

/// Propagates one trajectory with the variational stepper.
///
/// Each recording step of `dt` works in two phases. First the step
/// propagator is accumulated as an ordered product of `substeps`
/// sub-exponentials `exp(−iH(ε̄)h)`, `h = dt/substeps`, with the
/// Simpson-averaged field over each substep; the mean path driving the bath
/// is read from the unitary-evolved state (seeded by the current circuit
/// state), and the bath advances with the substep-midpoint 𝒴 — the same
/// per-substep rule the RK4 engine uses. Then ADAM projects the accumulated
/// unitary onto the circuit parameters, once per `dt`.
#[allow(clippy::too_many_arguments)]
pub fn evolve_trajectory<R: Rng>(
    bath: &DiscretizedBath,
    initial: &BathPhasePoint,
    omega_sys: f64,
    dt: f64,
    n_steps: usize,
    substeps: usize,
    shots: ShotConfig,
    opt: &OptimizerConfig,
    rng: &mut R,
) -> Result<TrajectorySeries> {
    opt.validate()?;
    if substeps == 0 {
        return Err(Error::Domain("substeps must be >= 1".into()));
    }
    let mut theta = CircuitParams::zero();
    let mut traj = TrajectoryState::new(bath, initial, QubitState::reactant(), omega_sys)?;
    let loss_cfg = LossConfig { dt, shots };
    let hbar = bath.hbar();
    let h = dt / substeps as f64;

    let mut series = TrajectorySeries::with_capacity(n_steps + 1);
    series.record(0.0, &traj.qubit);

    for k in 0..n_steps {
        let mut step_u = Mat2::identity();
        let mut psi = traj.qubit;
        for _ in 0..substeps {
            let y = mean_path(&psi);
            let (e0, e_mid, e_end) = traj.step_fields(y, h)?;
            let eps_avg = (e0 + 4.0 * e_mid + e_end) / 6.0;
            let sub_u = step_unitary_from_field(omega_sys, eps_avg, h, hbar);
            step_u = sub_u.mul(&step_u);
            let mut next = QubitState::from_amps(sub_u.apply(psi.amps()))?;
            next.normalize();
            let y_mid = MeanPath(0.5 * (y.0 + mean_path(&next).0));
            traj.advance_bath(y_mid, h)?;
            psi = next;
        }

        let (next_theta, report) = project_step(&theta, &step_u, &loss_cfg, opt, rng)?;
        if !report.converged {
            series.flagged_steps += 1;
        }
        theta = next_theta;
        traj.qubit = apply_to_zero(&theta);
        series.record((k + 1) as f64 * dt, &traj.qubit);
    }
    Ok(series)
}
