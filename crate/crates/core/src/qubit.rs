//! Two-level state vectors and 2×2 complex operators.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dense 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub m: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn zero() -> Self {
        Self::new([[Complex64::new(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.m[0][0] = Complex64::new(1.0, 0.0);
        m.m[1][1] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn pauli_x() -> Self {
        let mut m = Self::zero();
        m.m[0][1] = Complex64::new(1.0, 0.0);
        m.m[1][0] = Complex64::new(1.0, 0.0);
        m
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::zero();
        m.m[0][1] = Complex64::new(0.0, -1.0);
        m.m[1][0] = Complex64::new(0.0, 1.0);
        m
    }

    pub fn pauli_z() -> Self {
        let mut m = Self::zero();
        m.m[0][0] = Complex64::new(1.0, 0.0);
        m.m[1][1] = Complex64::new(-1.0, 0.0);
        m
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let mut out = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat2 {
        Mat2::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    pub fn scale(&self, c: Complex64) -> Mat2 {
        let mut out = *self;
        for row in out.m.iter_mut() {
            for e in row.iter_mut() {
                *e *= c;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] += rhs.m[i][j];
            }
        }
        out
    }

    pub fn apply(&self, amps: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.m[0][0] * amps[0] + self.m[0][1] * amps[1],
            self.m[1][0] * amps[0] + self.m[1][1] * amps[1],
        ]
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Max-abs entry of U†U − I; zero for an exactly unitary matrix.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.dagger().mul(self);
        let i = Mat2::identity();
        let mut dev: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                dev = dev.max((p.m[r][c] - i.m[r][c]).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                d = d.max((self.m[r][c] - other.m[r][c]).norm());
            }
        }
        d
    }

    pub fn require_unitary(&self, tol: f64) -> Result<()> {
        let deviation = self.unitarity_deviation();
        if deviation > tol {
            return Err(Error::NonUnitary { deviation });
        }
        Ok(())
    }
}

/// Normalized amplitudes on the σ_z eigenbasis: |0⟩ (s = +1, the reactant
/// state) and |1⟩ (s = −1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub amp0: Complex64,
    pub amp1: Complex64,
}

impl QubitState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn new(amp0: Complex64, amp1: Complex64) -> Result<Self> {
        if !(amp0.re.is_finite() && amp0.im.is_finite() && amp1.re.is_finite() && amp1.im.is_finite())
        {
            return Err(Error::Domain("qubit amplitudes must be finite".into()));
        }
        let mut s = Self { amp0, amp1 };
        let n = s.norm_sqr();
        if n <= 0.0 {
            return Err(Error::Domain("qubit amplitudes must not both be zero".into()));
        }
        s.normalize();
        Ok(s)
    }

    /// |0⟩, the reactant state.
    pub fn reactant() -> Self {
        Self {
            amp0: Complex64::new(1.0, 0.0),
            amp1: Complex64::new(0.0, 0.0),
        }
    }

    pub fn from_amps(amps: [Complex64; 2]) -> Result<Self> {
        Self::new(amps[0], amps[1])
    }

    pub fn amps(&self) -> [Complex64; 2] {
        [self.amp0, self.amp1]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        self.amp0 /= n;
        self.amp1 /= n;
    }

    /// Reactant population |amp0|², clamped to [0, 1].
    pub fn p_reactant(&self) -> f64 {
        self.amp0.norm_sqr().clamp(0.0, 1.0)
    }

    /// ⟨σ_z⟩ = |amp0|² − |amp1|².
    pub fn sigma_z(&self) -> f64 {
        self.amp0.norm_sqr() - self.amp1.norm_sqr()
    }

    /// ⟨self|other⟩.
    pub fn overlap(&self, other: &QubitState) -> Complex64 {
        self.amp0.conj() * other.amp0 + self.amp1.conj() * other.amp1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pauli_algebra() {
        let x = Mat2::pauli_x();
        let z = Mat2::pauli_z();
        assert_eq!(x.mul(&x), Mat2::identity());
        assert_eq!(z.mul(&z), Mat2::identity());
        // {σ_x, σ_z} = 0
        let anti = x.mul(&z).add(&z.mul(&x));
        assert!(anti.max_abs_diff(&Mat2::zero()) == 0.0);
    }

    #[test]
    fn unitarity_deviation_detects_scaling() {
        let u = Mat2::pauli_x().scale(Complex64::new(1.1, 0.0));
        assert!(u.unitarity_deviation() > 0.2);
        assert!(Mat2::identity().unitarity_deviation() == 0.0);
        assert!(u.require_unitary(1e-8).is_err());
    }

    #[test]
    fn state_normalization_and_observables() {
        let s = QubitState::new(Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)).unwrap();
        assert_relative_eq!(s.norm_sqr(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.p_reactant(), 9.0 / 25.0, max_relative = 1e-14);
        assert_relative_eq!(s.sigma_z(), (9.0 - 16.0) / 25.0, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_amplitudes_rejected() {
        assert!(QubitState::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)).is_err());
        assert!(QubitState::new(Complex64::new(f64::NAN, 0.0), Complex64::new(1.0, 0.0)).is_err());
    }
}
