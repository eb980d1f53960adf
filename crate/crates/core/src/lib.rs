//! Ensemble-averaged Ehrenfest dynamics for a two-level system coupled to a
//! harmonic bath.
//!
//! Each trajectory starts from a phase-space point drawn from the thermal
//! Wigner distribution of the discretized bath, and the qubit is propagated
//! under the mean-field Hamiltonian `H(t) = ħΩ σ_x − (Σ_j c_j x_j(t)) σ_z`
//! either with a classical RK4 integrator or by projecting the short-time
//! step unitary onto a ZXZ single-qubit circuit (optimized with ADAM, exact
//! or shot-sampled overlaps). Populations are averaged over the ensemble.
//!
//! Natural units ħ = 1 and unit oscillator masses are used throughout.

pub mod bath;
pub mod ehrenfest;
pub mod ensemble;
pub mod error;
pub mod pvqd;
pub mod qubit;
pub mod vqc;
pub mod wigner;

pub use bath::{discretize, ohmic_spectral_density, DiscretizedBath, SpectralDensityParams};
pub use ensemble::{run_ensemble, EnsembleConfig, Engine, PopulationSeries};
pub use error::{Error, Result};
pub use qubit::{Mat2, QubitState};
