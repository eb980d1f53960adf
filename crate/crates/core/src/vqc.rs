//! Single-qubit statevector backend: rotation gates, the ZXZ ansatz
//! `C(θ) = e^{iθ₁} R_z(θ₂) R_x(θ₃) R_z(θ₄)`, overlap fidelities, and
//! shot-sampled measurement.
//!
//! Rotation gates follow the convention `R_P(θ) = exp(−i θ P / 2)`; the ±π/2
//! parameter-shift rule in [`crate::pvqd`] relies on it.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};
use crate::qubit::{Mat2, QubitState};

/// The four ZXZ ansatz angles. `theta[0]` is the global phase θ₁; angles are
/// interpreted mod 4π (rotation-gate periodicity).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    pub theta: [f64; 4],
}

impl CircuitParams {
    pub fn new(theta: [f64; 4]) -> Result<Self> {
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Domain("circuit angles must be finite".into()));
        }
        Ok(Self { theta })
    }

    pub fn zero() -> Self {
        Self { theta: [0.0; 4] }
    }

    pub fn shifted(&self, d: &[f64; 4]) -> Self {
        let mut theta = self.theta;
        for (t, dt) in theta.iter_mut().zip(d) {
            *t += dt;
        }
        Self { theta }
    }
}

/// Number of circuit measurements per fidelity estimate, or the exact
/// statevector overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShotConfig {
    Exact,
    Shots(u64),
}

/// `R_z(θ) = exp(−iθσ_z/2)`.
pub fn rz(theta: f64) -> Mat2 {
    let half = 0.5 * theta;
    let mut m = Mat2::zero();
    m.m[0][0] = Complex64::from_polar(1.0, -half);
    m.m[1][1] = Complex64::from_polar(1.0, half);
    m
}

/// `R_x(θ) = exp(−iθσ_x/2)`.
pub fn rx(theta: f64) -> Mat2 {
    let half = 0.5 * theta;
    let (s, c) = half.sin_cos();
    Mat2::new([
        [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
        [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
    ])
}

/// `C(θ) = e^{iθ₁} R_z(θ₂) R_x(θ₃) R_z(θ₄)`.
pub fn ansatz_unitary(params: &CircuitParams) -> Mat2 {
    let [t1, t2, t3, t4] = params.theta;
    rz(t2)
        .mul(&rx(t3))
        .mul(&rz(t4))
        .scale(Complex64::from_polar(1.0, t1))
}

/// `C(θ)|0⟩`, normalized.
pub fn apply_to_zero(params: &CircuitParams) -> QubitState {
    let u = ansatz_unitary(params);
    let mut s = QubitState { amp0: u.m[0][0], amp1: u.m[1][0] };
    s.normalize();
    s
}

/// `|⟨0| C†(θ_old) · U · C(θ_new) |0⟩|²`, exact.
pub fn fidelity(params_old: &CircuitParams, step_u: &Mat2, params_new: &CircuitParams) -> Result<f64> {
    step_u.require_unitary(1e-8)?;
    let bra = apply_to_zero(params_old);
    let ket = step_u.apply(apply_to_zero(params_new).amps());
    let amp = bra.amp0.conj() * ket[0] + bra.amp1.conj() * ket[1];
    Ok(amp.norm_sqr().clamp(0.0, 1.0))
}

/// The compute–uncompute shot estimator: prepare `C†(θ_old) U C(θ_new)|0⟩`,
/// measure `n` times, return the |0⟩ frequency `k/n`.
pub fn fidelity_shots<R: Rng>(
    params_old: &CircuitParams,
    step_u: &Mat2,
    params_new: &CircuitParams,
    shots: ShotConfig,
    rng: &mut R,
) -> Result<f64> {
    let n = match shots {
        ShotConfig::Shots(n) if n >= 1 => n,
        ShotConfig::Shots(_) => return Err(Error::Domain("n_shots must be >= 1".into())),
        ShotConfig::Exact => {
            return Err(Error::Domain("fidelity_shots needs a finite shot count".into()))
        }
    };
    let p = fidelity(params_old, step_u, params_new)?;
    let k = Binomial::new(n, p)
        .expect("fidelity is a probability")
        .sample(rng);
    Ok(k as f64 / n as f64)
}

/// Direct ZXZ decomposition of a single-qubit unitary: angles θ with
/// `C(θ) = u`. Inverts the ansatz exactly (up to roundoff) for any unitary.
pub fn decompose(u: &Mat2) -> Result<CircuitParams> {
    u.require_unitary(1e-8)?;
    // det C = e^{2iθ₁}; peel the phase off to land in SU(2).
    let t1 = 0.5 * u.det().arg();
    let v = u.scale(Complex64::from_polar(1.0, -t1));
    let cos_half = v.m[0][0].norm();
    let sin_half = v.m[0][1].norm();
    let t3 = 2.0 * sin_half.atan2(cos_half);
    // v00 = cos(θ₃/2) e^{−i(θ₂+θ₄)/2}, v01 = −i sin(θ₃/2) e^{−i(θ₂−θ₄)/2}
    let (sum, diff) = if sin_half <= 1e-12 {
        (-2.0 * v.m[0][0].arg(), 0.0)
    } else if cos_half <= 1e-12 {
        (0.0, -2.0 * v.m[0][1].arg() - std::f64::consts::PI)
    } else {
        (
            -2.0 * v.m[0][0].arg(),
            -2.0 * v.m[0][1].arg() - std::f64::consts::PI,
        )
    };
    CircuitParams::new([t1, 0.5 * (sum + diff), t3, 0.5 * (sum - diff)])
}
