//! Single-trajectory Ehrenfest dynamics.
//!
//! The qubit obeys `iħ ∂_t|ψ⟩ = H(t)|ψ⟩` with
//! `H(t) = ħΩ σ_x − ε(t) σ_z`, `ε(t) = Σ_j c_j x_j(t)`, while each bath mode
//! is a classical forced oscillator `ẍ_j = −ω_j² x_j + (c_j/m_j) 𝒴(t)`
//! driven by the mean path `𝒴 = ⟨σ_z⟩`. Propagating the modes with the
//! instantaneous mean-field force is equivalent, in the continuous-time
//! limit, to the memory-integral form
//! `x_j(t) = x_{0,j} cos ω_j t + (p_{0,j}/m_j ω_j) sin ω_j t
//!          + (c_j/m_j ω_j) ∫_0^t 𝒴(t′) sin ω_j(t−t′) dt′`;
//! [`MemoryIntegralBath`] keeps that form around for cross-validation.

use num_complex::Complex64;

use crate::bath::DiscretizedBath;
use crate::error::{Error, Result};
use crate::qubit::{Mat2, QubitState};
use crate::wigner::BathPhasePoint;

/// The dimensionless mean position 𝒴 = p₀·(+1) + p₁·(−1) ∈ [−1, +1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPath(pub f64);

impl MeanPath {
    pub fn value(&self) -> f64 {
        self.0
    }
}

/// 𝒴 for the current qubit state: ⟨σ_z⟩ = |amp0|² − |amp1|².
pub fn mean_path(state: &QubitState) -> MeanPath {
    MeanPath(state.sigma_z().clamp(-1.0, 1.0))
}

/// Populations and ⟨σ_z⟩ of one trajectory on the step grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectorySeries {
    pub times: Vec<f64>,
    pub p_reactant: Vec<f64>,
    pub sigma_z: Vec<f64>,
    /// Steps whose circuit optimization did not converge (always 0 for RK4).
    pub flagged_steps: usize,
}

impl TrajectorySeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            p_reactant: Vec::with_capacity(n),
            sigma_z: Vec::with_capacity(n),
            flagged_steps: 0,
        }
    }

    pub fn record(&mut self, t: f64, state: &QubitState) {
        self.times.push(t);
        self.p_reactant.push(state.p_reactant());
        self.sigma_z.push(state.sigma_z());
    }

    pub fn all_finite(&self) -> bool {
        self.p_reactant.iter().chain(self.sigma_z.iter()).all(|v| v.is_finite())
    }
}

/// One Ehrenfest trajectory: qubit amplitudes plus the classical phase-space
/// coordinates of every bath mode.
#[derive(Debug, Clone)]
pub struct TrajectoryState<'a> {
    bath: &'a DiscretizedBath,
    pub qubit: QubitState,
    time: f64,
    positions: Vec<f64>,
    momenta: Vec<f64>,
    omega_sys: f64,
}

impl<'a> TrajectoryState<'a> {
    pub fn new(
        bath: &'a DiscretizedBath,
        initial: &BathPhasePoint,
        qubit: QubitState,
        omega_sys: f64,
    ) -> Result<Self> {
        if initial.x0.len() != bath.len() || initial.p0.len() != bath.len() {
            return Err(Error::Domain(format!(
                "phase point has {}/{} coordinates for a {}-mode bath",
                initial.x0.len(),
                initial.p0.len(),
                bath.len()
            )));
        }
        if !omega_sys.is_finite() {
            return Err(Error::Domain("omega_sys must be finite".into()));
        }
        Ok(Self {
            bath,
            qubit,
            time: 0.0,
            positions: initial.x0.clone(),
            momenta: initial.p0.clone(),
            omega_sys,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn omega_sys(&self) -> f64 {
        self.omega_sys
    }

    pub fn bath(&self) -> &DiscretizedBath {
        self.bath
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// ε(t) = Σ_j c_j x_j at the current time.
    pub fn driving_field(&self) -> f64 {
        field_of(self.bath, &self.positions)
    }

    /// Advances every mode exactly under a constant mean path `y` for `dt`:
    /// rotation about the displaced equilibrium `x_eq = c y / (m ω²)`.
    pub fn advance_bath(&mut self, y: MeanPath, dt: f64) -> Result<()> {
        check_dt(dt)?;
        advance_modes(self.bath, &mut self.positions, &mut self.momenta, y.0, dt);
        self.time += dt;
        Ok(())
    }

    /// ε at the start, midpoint and end of a step of `dt`, with the mean
    /// path held at `y` (scratch advance; the committed state is untouched).
    pub fn step_fields(&self, y: MeanPath, dt: f64) -> Result<(f64, f64, f64)> {
        check_dt(dt)?;
        let e0 = self.driving_field();
        let mut xs = self.positions.clone();
        let mut ps = self.momenta.clone();
        advance_modes(self.bath, &mut xs, &mut ps, y.0, 0.5 * dt);
        let e_mid = field_of(self.bath, &xs);
        advance_modes(self.bath, &mut xs, &mut ps, y.0, 0.5 * dt);
        let e_end = field_of(self.bath, &xs);
        Ok((e0, e_mid, e_end))
    }

    /// `H(t) = ħΩ σ_x − ε(t) σ_z` as a 2×2 Hermitian matrix.
    pub fn hamiltonian_matrix(&self) -> Mat2 {
        let a = self.bath.hbar() * self.omega_sys;
        let b = -self.driving_field();
        let mut h = Mat2::zero();
        h.m[0][0] = Complex64::new(b, 0.0);
        h.m[0][1] = Complex64::new(a, 0.0);
        h.m[1][0] = Complex64::new(a, 0.0);
        h.m[1][1] = Complex64::new(-b, 0.0);
        h
    }

    /// `exp(−i H dt / ħ)` for the instantaneous Hamiltonian.
    pub fn step_unitary(&self, dt: f64) -> Result<Mat2> {
        check_dt(dt)?;
        Ok(step_unitary_from_field(self.omega_sys, self.driving_field(), dt, self.bath.hbar()))
    }

    /// One RK4 step of the qubit with ε re-evaluated at the substage times,
    /// then the committed bath advance using 𝒴 at the step midpoint.
    pub fn rk4_step(&mut self, dt: f64) -> Result<()> {
        check_dt(dt)?;
        let y0 = mean_path(&self.qubit);
        let (e0, e_mid, e_end) = self.step_fields(y0, dt)?;
        let hbar = self.bath.hbar();
        let psi = self.qubit.amps();

        let k1 = schrodinger_rhs(psi, self.omega_sys, e0, hbar);
        let k2 = schrodinger_rhs(axpy(psi, 0.5 * dt, k1), self.omega_sys, e_mid, hbar);
        let k3 = schrodinger_rhs(axpy(psi, 0.5 * dt, k2), self.omega_sys, e_mid, hbar);
        let k4 = schrodinger_rhs(axpy(psi, dt, k3), self.omega_sys, e_end, hbar);

        let sixth = dt / 6.0;
        let next = [
            psi[0] + sixth * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            psi[1] + sixth * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        let mut qubit = QubitState { amp0: next[0], amp1: next[1] };
        qubit.normalize();

        let y_mid = MeanPath(0.5 * (y0.0 + mean_path(&qubit).0));
        self.advance_bath(y_mid, dt)?;
        self.qubit = qubit;
        Ok(())
    }
}

/// `exp(−i H dt / ħ)` for `H = ħΩ σ_x − ε σ_z`, in closed form.
pub fn step_unitary_from_field(omega_sys: f64, epsilon: f64, dt: f64, hbar: f64) -> Mat2 {
    let a = hbar * omega_sys;
    let b = -epsilon;
    let r = (a * a + b * b).sqrt();
    if r == 0.0 {
        return Mat2::identity();
    }
    let theta = r * dt / hbar;
    let (s, c) = theta.sin_cos();
    let sa = s * a / r;
    let sb = s * b / r;
    // cos θ · I − i sin θ (a σ_x + b σ_z)/r
    Mat2::new([
        [Complex64::new(c, -sb), Complex64::new(0.0, -sa)],
        [Complex64::new(0.0, -sa), Complex64::new(c, sb)],
    ])
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    Ok(())
}

fn field_of(bath: &DiscretizedBath, xs: &[f64]) -> f64 {
    bath.modes().iter().zip(xs).map(|(m, x)| m.coupling * x).sum()
}

fn advance_modes(bath: &DiscretizedBath, xs: &mut [f64], ps: &mut [f64], y: f64, dt: f64) {
    for ((mode, x), p) in bath.modes().iter().zip(xs.iter_mut()).zip(ps.iter_mut()) {
        let x_eq = mode.coupling * y / (mode.mass * mode.omega * mode.omega);
        let (s, c) = (mode.omega * dt).sin_cos();
        let dx = *x - x_eq;
        let mw = mode.mass * mode.omega;
        let x_new = x_eq + dx * c + (*p / mw) * s;
        let p_new = *p * c - mw * dx * s;
        *x = x_new;
        *p = p_new;
    }
}

/// −(i/ħ) H ψ for H = ħΩ σ_x − ε σ_z.
fn schrodinger_rhs(psi: [Complex64; 2], omega_sys: f64, epsilon: f64, hbar: f64) -> [Complex64; 2] {
    let h0 = hbar * omega_sys * psi[1] - epsilon * psi[0];
    let h1 = hbar * omega_sys * psi[0] + epsilon * psi[1];
    let scale = Complex64::new(0.0, -1.0 / hbar);
    [scale * h0, scale * h1]
}

fn axpy(psi: [Complex64; 2], a: f64, k: [Complex64; 2]) -> [Complex64; 2] {
    [psi[0] + a * k[0], psi[1] + a * k[1]]
}

/// Runs `n_steps` output steps from the reactant state, recording every `dt`.
///
/// Each output step is integrated as `substeps` RK4 steps of `dt/substeps`:
/// the qubit–bath coupling needs a finer grid than the recording grid when
/// the driving field is strong, and sub-stepping keeps the split map
/// converged without changing the output contract.
pub fn evolve_rk4_trajectory(
    bath: &DiscretizedBath,
    initial: &BathPhasePoint,
    omega_sys: f64,
    dt: f64,
    n_steps: usize,
    substeps: usize,
) -> Result<TrajectorySeries> {
    if substeps == 0 {
        return Err(Error::Domain("substeps must be >= 1".into()));
    }
    let h = dt / substeps as f64;
    let mut state = TrajectoryState::new(bath, initial, QubitState::reactant(), omega_sys)?;
    let mut series = TrajectorySeries::with_capacity(n_steps + 1);
    series.record(0.0, &state.qubit);
    for k in 0..n_steps {
        for _ in 0..substeps {
            state.rk4_step(h)?;
        }
        series.record((k + 1) as f64 * dt, &state.qubit);
    }
    Ok(series)
}

/// The explicit memory-integral form of the driven bath, kept for
/// cross-validation against the forced-oscillator update. The back-reaction
/// accumulators advance as `A_j += 𝒴 ∫ cos ω_j t′ dt′`,
/// `B_j += 𝒴 ∫ sin ω_j t′ dt′` with 𝒴 piecewise constant, and the memory
/// integral is `A_j sin ω_j t − B_j cos ω_j t`.
#[derive(Debug, Clone)]
pub struct MemoryIntegralBath<'a> {
    bath: &'a DiscretizedBath,
    x0: Vec<f64>,
    p0: Vec<f64>,
    acc_cos: Vec<f64>,
    acc_sin: Vec<f64>,
    time: f64,
}

impl<'a> MemoryIntegralBath<'a> {
    pub fn new(bath: &'a DiscretizedBath, initial: &BathPhasePoint) -> Result<Self> {
        if initial.x0.len() != bath.len() || initial.p0.len() != bath.len() {
            return Err(Error::Domain("phase point does not match bath size".into()));
        }
        Ok(Self {
            bath,
            x0: initial.x0.clone(),
            p0: initial.p0.clone(),
            acc_cos: vec![0.0; bath.len()],
            acc_sin: vec![0.0; bath.len()],
            time: 0.0,
        })
    }

    pub fn advance(&mut self, y: MeanPath, dt: f64) -> Result<()> {
        check_dt(dt)?;
        let t0 = self.time;
        let t1 = self.time + dt;
        for (j, mode) in self.bath.modes().iter().enumerate() {
            let w = mode.omega;
            self.acc_cos[j] += y.0 * ((w * t1).sin() - (w * t0).sin()) / w;
            self.acc_sin[j] += y.0 * ((w * t0).cos() - (w * t1).cos()) / w;
        }
        self.time = t1;
        Ok(())
    }

    pub fn driving_field(&self) -> f64 {
        let t = self.time;
        self.bath
            .modes()
            .iter()
            .enumerate()
            .map(|(j, mode)| {
                let w = mode.omega;
                let (s, c) = (w * t).sin_cos();
                let free = self.x0[j] * c + self.p0[j] / (mode.mass * w) * s;
                let memory = (mode.coupling / (mode.mass * w))
                    * (self.acc_cos[j] * s - self.acc_sin[j] * c);
                mode.coupling * (free + memory)
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bath::{discretize, BathMode, DiscretizedBath, SpectralDensityParams};
    use crate::wigner::{sample, trajectory_rng, ThermalState};
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_mode(omega: f64, coupling: f64) -> DiscretizedBath {
        DiscretizedBath::from_modes(vec![BathMode { omega, coupling, mass: 1.0 }], 1.0).unwrap()
    }

    #[test]
    fn mean_path_examples() {
        assert_eq!(mean_path(&QubitState::reactant()).0, 1.0);
        let product = QubitState::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_eq!(mean_path(&product).0, -1.0);
        let even = QubitState::new(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert!(mean_path(&even).0.abs() < 1e-15);
    }

    #[test]
    fn driving_field_examples() {
        let bath = one_mode(1.0, 2.0);
        let state = TrajectoryState::new(
            &bath,
            &BathPhasePoint { x0: vec![0.3], p0: vec![0.0] },
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        assert_relative_eq!(state.driving_field(), 0.6, max_relative = 1e-15);

        let zero = TrajectoryState::new(
            &bath,
            &BathPhasePoint::zeros(1),
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        assert_eq!(zero.driving_field(), 0.0);
    }

    #[test]
    fn free_quarter_period_rotation() {
        let bath = one_mode(1.0, 0.0);
        let mut state = TrajectoryState::new(
            &bath,
            &BathPhasePoint { x0: vec![1.0], p0: vec![0.0] },
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        state.advance_bath(MeanPath(0.0), std::f64::consts::FRAC_PI_2).unwrap();
        assert!((state.positions()[0]).abs() < 1e-15);
        assert_relative_eq!(state.momenta()[0], -1.0, max_relative = 1e-15);
    }

    #[test]
    fn forced_half_period_reaches_twice_equilibrium() {
        let bath = one_mode(1.0, 1.0);
        let mut state = TrajectoryState::new(
            &bath,
            &BathPhasePoint::zeros(1),
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        state.advance_bath(MeanPath(1.0), std::f64::consts::PI).unwrap();
        assert_relative_eq!(state.positions()[0], 2.0, max_relative = 1e-14);
        assert!(state.momenta()[0].abs() < 1e-14);
    }

    #[test]
    fn tiny_step_is_continuous() {
        let bath = one_mode(1.3, 0.7);
        let mut state = TrajectoryState::new(
            &bath,
            &BathPhasePoint { x0: vec![0.4], p0: vec![-0.2] },
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        let (x, p) = (state.positions()[0], state.momenta()[0]);
        state.advance_bath(MeanPath(0.5), 1e-9).unwrap();
        assert!((state.positions()[0] - x).abs() < 1e-8);
        assert!((state.momenta()[0] - p).abs() < 1e-8);
        assert!(state.advance_bath(MeanPath(0.0), 0.0).is_err());
        assert!(state.advance_bath(MeanPath(0.0), -0.1).is_err());
    }

    #[test]
    fn constant_mean_path_back_reaction_closed_form() {
        // Single mode ω = c = m = 1 starting at rest: ε(t) = 1 − cos t.
        let bath = one_mode(1.0, 1.0);
        let mut state = TrajectoryState::new(
            &bath,
            &BathPhasePoint::zeros(1),
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        let t = 2.0;
        state.advance_bath(MeanPath(1.0), t).unwrap();
        assert_relative_eq!(state.driving_field(), 1.0 - t.cos(), max_relative = 1e-13);

        // Composing many small advances with the same 𝒴 is exactly the same map.
        let mut stepped = TrajectoryState::new(
            &bath,
            &BathPhasePoint::zeros(1),
            QubitState::reactant(),
            1.0,
        )
        .unwrap();
        for _ in 0..40 {
            stepped.advance_bath(MeanPath(1.0), t / 40.0).unwrap();
        }
        assert_relative_eq!(stepped.driving_field(), state.driving_field(), epsilon = 1e-12);
    }

    #[test]
    fn hamiltonian_matrix_examples() {
        let bath = one_mode(1.0, 1.0);
        let mk = |x: f64, omega_sys: f64| {
            TrajectoryState::new(
                &bath,
                &BathPhasePoint { x0: vec![x], p0: vec![0.0] },
                QubitState::reactant(),
                omega_sys,
            )
            .unwrap()
        };
        // Ω=1, ε=0 → σ_x
        assert!(mk(0.0, 1.0).hamiltonian_matrix().max_abs_diff(&Mat2::pauli_x()) < 1e-15);
        // Ω=0, ε=2 → −2σ_z
        let h = mk(2.0, 0.0).hamiltonian_matrix();
        assert!(h.max_abs_diff(&Mat2::pauli_z().scale(c(-2.0, 0.0))) < 1e-15);
        // Ω=1, ε=1 → [[−1, 1], [1, 1]]
        let h = mk(1.0, 1.0).hamiltonian_matrix();
        let expected = Mat2::new([[c(-1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(1.0, 0.0)]]);
        assert!(h.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn step_unitary_examples() {
        // r = 0 → identity
        let u = step_unitary_from_field(0.0, 0.0, 1.0, 1.0);
        assert!(u.max_abs_diff(&Mat2::identity()) == 0.0);

        // Ω=1, ε=0, dt=π/2 → −iσ_x
        let u = step_unitary_from_field(1.0, 0.0, std::f64::consts::FRAC_PI_2, 1.0);
        let expected = Mat2::pauli_x().scale(c(0.0, -1.0));
        assert!(u.max_abs_diff(&expected) < 1e-15);

        // unitarity across a parameter sweep
        for i in 0..50 {
            let a = -2.0 + 0.08 * i as f64;
            let b = 1.7 - 0.07 * i as f64;
            let dt = 0.01 + 0.01 * i as f64;
            let u = step_unitary_from_field(a, b, dt, 1.0);
            assert!(u.unitarity_deviation() < 1e-14);
        }
    }

    #[test]
    fn rk4_matches_rabi_oscillation() {
        // ξ = 0 ⇒ ε ≡ 0 and ⟨σ_z⟩(t) = cos(2Ωt).
        let params = SpectralDensityParams::new(0.0, 2.5).unwrap();
        let bath = discretize(&params, 4).unwrap();
        let thermal = ThermalState::new(0.2).unwrap();
        let initial = sample(&bath, &thermal, &mut trajectory_rng(1, 0));
        let dt = 1e-3;
        let steps = 15_000;
        let series = evolve_rk4_trajectory(&bath, &initial, 1.0, dt, steps, 1).unwrap();
        let mut max_err = 0.0f64;
        for (t, sz) in series.times.iter().zip(&series.sigma_z) {
            max_err = max_err.max((sz - (2.0 * t).cos()).abs());
        }
        assert!(max_err <= 1e-8, "max error {max_err}");
    }

    #[test]
    fn rk4_is_fourth_order() {
        // Richardson check on the uncoupled qubit: halving dt cuts the error ~16×.
        let bath = one_mode(1.0, 0.0);
        let run = |dt: f64, t_final: f64| {
            let steps = (t_final / dt).round() as usize;
            let mut state = TrajectoryState::new(
                &bath,
                &BathPhasePoint::zeros(1),
                QubitState::reactant(),
                2.0,
            )
            .unwrap();
            for _ in 0..steps {
                state.rk4_step(dt).unwrap();
            }
            state.qubit.sigma_z()
        };
        let t_final = 2.0;
        let reference = run(0.02 / 16.0, t_final);
        let e1 = (run(0.02, t_final) - reference).abs();
        let e2 = (run(0.01, t_final) - reference).abs();
        let ratio = e1 / e2;
        assert!((12.0..24.0).contains(&ratio), "ratio {ratio}, errors {e1} {e2}");
    }

    #[test]
    fn recording_cadence_does_not_alter_the_dynamics() {
        // Same integration grid h, different output grids: shared times match
        // bit for bit.
        let params = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let bath = discretize(&params, 16).unwrap();
        let thermal = ThermalState::new(0.2).unwrap();
        let initial = sample(&bath, &thermal, &mut trajectory_rng(21, 4));
        let coarse = evolve_rk4_trajectory(&bath, &initial, 1.0, 0.05, 40, 8).unwrap();
        let fine = evolve_rk4_trajectory(&bath, &initial, 1.0, 0.025, 80, 4).unwrap();
        for k in 0..=40 {
            assert_eq!(coarse.p_reactant[k], fine.p_reactant[2 * k]);
            assert_eq!(coarse.sigma_z[k], fine.sigma_z[2 * k]);
        }
    }

    #[test]
    fn rk4_preserves_norm() {
        let params = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let bath = discretize(&params, 8).unwrap();
        let thermal = ThermalState::new(0.2).unwrap();
        let initial = sample(&bath, &thermal, &mut trajectory_rng(3, 1));
        let mut state =
            TrajectoryState::new(&bath, &initial, QubitState::reactant(), 1.0).unwrap();
        for _ in 0..10_000 {
            state.rk4_step(0.01).unwrap();
        }
        assert!((state.qubit.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn zero_coupling_conserves_mode_energy() {
        let params = SpectralDensityParams::new(0.0, 2.5).unwrap();
        let bath = discretize(&params, 6).unwrap();
        let thermal = ThermalState::new(0.5).unwrap();
        let initial = sample(&bath, &thermal, &mut trajectory_rng(5, 2));
        let mut state =
            TrajectoryState::new(&bath, &initial, QubitState::reactant(), 1.0).unwrap();
        let energy = |s: &TrajectoryState| -> Vec<f64> {
            s.bath()
                .modes()
                .iter()
                .zip(s.positions().iter().zip(s.momenta()))
                .map(|(m, (x, p))| 0.5 * p * p / m.mass + 0.5 * m.mass * m.omega * m.omega * x * x)
                .collect()
        };
        let e0 = energy(&state);
        for _ in 0..1_000 {
            state.rk4_step(0.05).unwrap();
        }
        for (a, b) in e0.iter().zip(energy(&state)) {
            assert_relative_eq!(*a, b, max_relative = 1e-10);
        }
    }

    #[test]
    fn mirror_symmetry_negates_observables() {
        // |0⟩ → |1⟩ together with (x₀, p₀) → (−x₀, −p₀) flips 𝒴 and ⟨σ_z⟩.
        let params = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let bath = discretize(&params, 12).unwrap();
        let thermal = ThermalState::new(0.2).unwrap();
        let initial = sample(&bath, &thermal, &mut trajectory_rng(8, 0));
        let mirrored = BathPhasePoint {
            x0: initial.x0.iter().map(|x| -x).collect(),
            p0: initial.p0.iter().map(|p| -p).collect(),
        };
        let product = QubitState::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let mut a = TrajectoryState::new(&bath, &initial, QubitState::reactant(), 1.0).unwrap();
        let mut b = TrajectoryState::new(&bath, &mirrored, product, 1.0).unwrap();
        for _ in 0..200 {
            a.rk4_step(0.05).unwrap();
            b.rk4_step(0.05).unwrap();
            assert_eq!(a.qubit.sigma_z(), -b.qubit.sigma_z());
        }
    }

    #[test]
    fn forced_oscillator_matches_memory_integral() {
        // Two formulations of the same driven bath must agree on ε(t) when
        // fed the same piecewise-constant 𝒴 sequence.
        let bath = DiscretizedBath::from_modes(
            vec![
                BathMode { omega: 0.9, coupling: 0.8, mass: 1.0 },
                BathMode { omega: 2.3, coupling: -0.5, mass: 1.0 },
            ],
            1.0,
        )
        .unwrap();
        let initial = BathPhasePoint { x0: vec![0.7, -0.3], p0: vec![-0.1, 0.4] };
        let mut forced =
            TrajectoryState::new(&bath, &initial, QubitState::reactant(), 1.0).unwrap();
        let mut memory = MemoryIntegralBath::new(&bath, &initial).unwrap();
        let dt = 0.05;
        for k in 0..100 {
            let y = MeanPath((0.3 * k as f64).cos());
            forced.advance_bath(y, dt).unwrap();
            memory.advance(y, dt).unwrap();
            let diff = (forced.driving_field() - memory.driving_field()).abs();
            assert!(diff <= 1e-8, "step {k}: {diff}");
        }
    }
}
