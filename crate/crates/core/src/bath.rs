//! Ohmic spectral density and its finite-mode discretization.
//!
//! The bath is characterized by `J(ω) = (π/2) ħ ξ ω e^{−ω/ω_c}` and realized
//! as N harmonic modes sampled from the mode density ρ(ω) ∝ J(ω)/ω with
//! midpoint weights, which makes the reorganization sum rule
//! `Σ_j c_j²/(2 m_j ω_j²) = ħ ξ ω_c / 2` hold by construction.

use crate::error::{Error, Result};

/// Parameters of the Ohmic spectral density.
///
/// `xi` is the dimensionless Kondo coupling parameter and `omega_c` the
/// cutoff frequency. Natural units are used: `hbar` stays at 1.0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensityParams {
    pub xi: f64,
    pub omega_c: f64,
    pub hbar: f64,
}

impl SpectralDensityParams {
    pub fn new(xi: f64, omega_c: f64) -> Result<Self> {
        if !(xi.is_finite() && xi >= 0.0) {
            return Err(Error::Domain(format!("xi must be >= 0, got {xi}")));
        }
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::Domain(format!("omega_c must be > 0, got {omega_c}")));
        }
        Ok(Self { xi, omega_c, hbar: 1.0 })
    }
}

/// One harmonic bath mode: frequency, system-bath coupling, mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathMode {
    pub omega: f64,
    pub coupling: f64,
    pub mass: f64,
}

/// A finite set of harmonic modes realizing a spectral density.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedBath {
    modes: Vec<BathMode>,
    hbar: f64,
}

impl DiscretizedBath {
    /// Builds a bath from explicit modes. Frequencies must be positive and
    /// strictly increasing, masses positive.
    pub fn from_modes(modes: Vec<BathMode>, hbar: f64) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Domain("a bath needs at least one mode".into()));
        }
        let mut prev = 0.0;
        for (j, mode) in modes.iter().enumerate() {
            if !(mode.omega.is_finite() && mode.omega > prev) {
                return Err(Error::Domain(format!(
                    "mode {j}: frequencies must be positive and strictly increasing"
                )));
            }
            if !(mode.mass.is_finite() && mode.mass > 0.0) {
                return Err(Error::Domain(format!("mode {j}: mass must be > 0")));
            }
            if !mode.coupling.is_finite() {
                return Err(Error::Domain(format!("mode {j}: coupling must be finite")));
            }
            prev = mode.omega;
        }
        Ok(Self { modes, hbar })
    }

    pub fn modes(&self) -> &[BathMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Evaluates `J(ω) = (π/2) ħ ξ ω e^{−ω/ω_c}` at a non-negative frequency.
pub fn ohmic_spectral_density(params: &SpectralDensityParams, omega: f64) -> Result<f64> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::Domain(format!("omega must be >= 0, got {omega}")));
    }
    Ok(0.5 * std::f64::consts::PI * params.hbar * params.xi * omega * (-omega / params.omega_c).exp())
}

/// Discretizes the Ohmic density into `n_modes` unit-mass oscillators.
///
/// Frequencies are the midpoint quantiles of ρ(ω) ∝ e^{−ω/ω_c},
/// `ω_j = −ω_c ln(1 − (j − 1/2)/N)`, and couplings
/// `c_j = ω_j √(ξ ω_c m_j ħ / N)`, so every mode contributes the same share
/// `ħξω_c/(2N)` to the reorganization energy.
pub fn discretize(params: &SpectralDensityParams, n_modes: usize) -> Result<DiscretizedBath> {
    if n_modes == 0 {
        return Err(Error::Domain("n_modes must be >= 1".into()));
    }
    let n = n_modes as f64;
    let per_mode = (params.xi * params.omega_c * params.hbar / n).sqrt();
    let modes = (1..=n_modes)
        .map(|j| {
            let u = (j as f64 - 0.5) / n;
            let omega = -params.omega_c * (1.0 - u).ln();
            BathMode { omega, coupling: omega * per_mode, mass: 1.0 }
        })
        .collect();
    DiscretizedBath::from_modes(modes, params.hbar)
}

/// `Σ_j c_j²/(2 m_j ω_j²)`, the reorganization energy carried by the bath.
pub fn reorganization_sum(bath: &DiscretizedBath) -> f64 {
    bath.modes()
        .iter()
        .map(|m| m.coupling * m.coupling / (2.0 * m.mass * m.omega * m.omega))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn spectral_density_vanishes_at_zero_frequency() {
        let p = SpectralDensityParams::new(1.2, 2.5).unwrap();
        assert_eq!(ohmic_spectral_density(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn spectral_density_at_cutoff() {
        let p = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let j = ohmic_spectral_density(&p, 2.5).unwrap();
        let expected = 0.5 * std::f64::consts::PI * 1.2 * 2.5 * (-1.0f64).exp();
        assert_relative_eq!(j, expected, max_relative = 1e-15);
        assert_relative_eq!(j, 1.733591, max_relative = 1e-5);
    }

    #[test]
    fn spectral_density_zero_coupling() {
        let p = SpectralDensityParams::new(0.0, 5.0).unwrap();
        assert_eq!(ohmic_spectral_density(&p, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn spectral_density_rejects_negative_frequency() {
        let p = SpectralDensityParams::new(1.0, 1.0).unwrap();
        assert!(matches!(ohmic_spectral_density(&p, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn params_validation() {
        assert!(SpectralDensityParams::new(-0.1, 1.0).is_err());
        assert!(SpectralDensityParams::new(1.0, 0.0).is_err());
        assert!(SpectralDensityParams::new(1.0, f64::NAN).is_err());
    }

    #[test]
    fn single_mode_discretization_closed_form() {
        let p = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let bath = discretize(&p, 1).unwrap();
        assert_eq!(bath.len(), 1);
        let m = bath.modes()[0];
        assert_relative_eq!(m.omega, 2.5 * 2.0f64.ln(), max_relative = 1e-15);
        assert_relative_eq!(m.coupling, m.omega * (1.2f64 * 2.5).sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.coupling, 3.00141, max_relative = 1e-5);
        assert_eq!(m.mass, 1.0);
    }

    #[test]
    fn sum_rule_regime_one() {
        let p = SpectralDensityParams::new(1.2, 2.5).unwrap();
        let bath = discretize(&p, 60).unwrap();
        assert_relative_eq!(reorganization_sum(&bath), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn sum_rule_regime_two() {
        let p = SpectralDensityParams::new(0.3, 5.0).unwrap();
        let bath = discretize(&p, 60).unwrap();
        assert_relative_eq!(reorganization_sum(&bath), 0.75, max_relative = 1e-12);
    }

    #[test]
    fn discretize_rejects_zero_modes() {
        let p = SpectralDensityParams::new(1.2, 2.5).unwrap();
        assert!(matches!(discretize(&p, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn reorganization_sum_single_modes() {
        let zero = DiscretizedBath::from_modes(
            vec![BathMode { omega: 1.0, coupling: 0.0, mass: 1.0 }],
            1.0,
        )
        .unwrap();
        assert_eq!(reorganization_sum(&zero), 0.0);

        let one = DiscretizedBath::from_modes(
            vec![BathMode { omega: 2.0, coupling: 2.0, mass: 1.0 }],
            1.0,
        )
        .unwrap();
        assert_relative_eq!(reorganization_sum(&one), 0.5, max_relative = 1e-15);
    }

    #[test]
    fn from_modes_validation() {
        assert!(DiscretizedBath::from_modes(vec![], 1.0).is_err());
        // non-increasing frequencies
        assert!(DiscretizedBath::from_modes(
            vec![
                BathMode { omega: 2.0, coupling: 0.0, mass: 1.0 },
                BathMode { omega: 2.0, coupling: 0.0, mass: 1.0 },
            ],
            1.0,
        )
        .is_err());
        assert!(DiscretizedBath::from_modes(
            vec![BathMode { omega: 1.0, coupling: 0.0, mass: 0.0 }],
            1.0,
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn sum_rule_holds_generally(
            xi in 1e-3f64..5.0,
            omega_c in 0.1f64..10.0,
            n in 1usize..300,
        ) {
            let p = SpectralDensityParams::new(xi, omega_c).unwrap();
            let bath = discretize(&p, n).unwrap();
            let expected = p.hbar * xi * omega_c / 2.0;
            let got = reorganization_sum(&bath);
            prop_assert!((got - expected).abs() <= 1e-10 * expected.abs());
        }

        #[test]
        fn frequencies_strictly_increase(
            omega_c in 0.1f64..10.0,
            n in 2usize..200,
        ) {
            let p = SpectralDensityParams::new(1.0, omega_c).unwrap();
            let bath = discretize(&p, n).unwrap();
            for w in bath.modes().windows(2) {
                prop_assert!(w[0].omega < w[1].omega);
            }
        }

        #[test]
        fn coupling_scales_as_sqrt_xi(
            xi in 1e-3f64..4.0,
            k in 0.1f64..9.0,
            n in 1usize..100,
        ) {
            let base = discretize(&SpectralDensityParams::new(xi, 2.5).unwrap(), n).unwrap();
            let scaled = discretize(&SpectralDensityParams::new(k * xi, 2.5).unwrap(), n).unwrap();
            for (a, b) in base.modes().iter().zip(scaled.modes()) {
                prop_assert_eq!(a.omega, b.omega);
                prop_assert!((b.coupling - a.coupling * k.sqrt()).abs() <= 1e-12 * b.coupling.abs().max(1e-300));
            }
        }
    }
}
