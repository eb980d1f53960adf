//! Thermal Wigner sampling of the bath's initial phase-space points.
//!
//! Each mode's marginal is a zero-mean Gaussian with
//! `σ_x² = ħ / (2 m ω tanh(ħωβ/2))` and `σ_p² = ħ m ω / (2 tanh(ħωβ/2))`,
//! which keeps the zero-point widths at low temperature (a Boltzmann draw
//! would not). Modes are uncorrelated, so sampling is a product of
//! independent normal draws.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bath::DiscretizedBath;
use crate::error::{Error, Result};

/// Inverse temperature. `beta = +∞` encodes the zero-temperature state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalState {
    beta: f64,
}

impl ThermalState {
    pub fn new(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::Domain(format!("beta must be > 0, got {beta}")));
        }
        Ok(Self { beta })
    }

    pub fn zero_temperature() -> Self {
        Self { beta: f64::INFINITY }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// One Monte Carlo draw of all mode positions and momenta.
#[derive(Debug, Clone, PartialEq)]
pub struct BathPhasePoint {
    pub x0: Vec<f64>,
    pub p0: Vec<f64>,
}

impl BathPhasePoint {
    pub fn zeros(n: usize) -> Self {
        Self { x0: vec![0.0; n], p0: vec![0.0; n] }
    }
}

/// Position and momentum variances of mode `j`'s thermal Wigner Gaussian.
pub fn mode_variances(bath: &DiscretizedBath, thermal: &ThermalState, j: usize) -> (f64, f64) {
    let mode = &bath.modes()[j];
    let hbar = bath.hbar();
    // tanh(ħωβ/2) → 1 as β → ∞, so the zero-temperature flag needs no branch.
    let t = (0.5 * hbar * mode.omega * thermal.beta()).tanh();
    let sigma_x_sq = hbar / (2.0 * mode.mass * mode.omega * t);
    let sigma_p_sq = hbar * mode.mass * mode.omega / (2.0 * t);
    (sigma_x_sq, sigma_p_sq)
}

/// Draws one phase-space point; deterministic for a given RNG state.
pub fn sample<R: Rng>(bath: &DiscretizedBath, thermal: &ThermalState, rng: &mut R) -> BathPhasePoint {
    let n = bath.len();
    let mut point = BathPhasePoint { x0: Vec::with_capacity(n), p0: Vec::with_capacity(n) };
    for j in 0..n {
        let (sx2, sp2) = mode_variances(bath, thermal, j);
        let gx: f64 = rng.sample(StandardNormal);
        let gp: f64 = rng.sample(StandardNormal);
        point.x0.push(sx2.sqrt() * gx);
        point.p0.push(sp2.sqrt() * gp);
    }
    point
}

/// The RNG stream owned by trajectory `trajectory_index` of a run seeded with
/// `master_seed`. Streams are independent of execution order, so ensembles
/// stay reproducible regardless of how trajectories are scheduled.
pub fn trajectory_rng(master_seed: u64, trajectory_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trajectory_index);
    rng
}
