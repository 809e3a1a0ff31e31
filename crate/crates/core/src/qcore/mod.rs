//! Small dense complex linear algebra and quantum state types.
//!
//! Matrices are row-major `Complex64` buffers. The Hilbert spaces in play are
//! the single-photon polarization space (d = 2) and the photon-pair space
//! (d = 4), so everything here favors clarity over asymptotics.

mod eigen;
mod matrix;
mod state;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use matrix::ComplexMatrix;
pub use state::StateDescriptor;

use crate::error::{Error, Result};

/// Numeric policy shared by all validity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Algebraic identities: Hermiticity, completeness, idempotence, normalization.
    pub algebraic: f64,
    /// Eigenvalue positivity and boundedness.
    pub positivity: f64,
    /// Probability dust: negative values above `-probability` are clamped.
    pub probability: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        positivity: 1e-10,
        probability: 1e-10,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A polarization direction in radians, canonicalized to `[0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PolarizationAngle(f64);

impl PolarizationAngle {
    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::Domain(format!("polarization angle must be finite, got {theta}")));
        }
        let mut t = theta.rem_euclid(PI);
        // rem_euclid can round up to exactly π for tiny negative inputs
        if t >= PI {
            t = 0.0;
        }
        Ok(Self(t))
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn expectation(state: &StateDescriptor, op: &ComplexMatrix) -> Result<Complex64> {
    state.expectation(op)
}

/// Rank-1 projector `E₊^θ` onto the direction `(cos θ, sin θ)`.
pub fn projector_from_angle(theta: PolarizationAngle) -> ComplexMatrix {
    let (s, c) = theta.radians().sin_cos();
    ComplexMatrix::from_real(2, 2, &[c * c, c * s, c * s, s * s]).expect("2x2 shape")
}

/// Orthogonal complement `E₋^θ = I − E₊^θ`.
pub fn complement_projector(theta: PolarizationAngle) -> ComplexMatrix {
    let (s, c) = theta.radians().sin_cos();
    ComplexMatrix::from_real(2, 2, &[s * s, -c * s, -c * s, c * c]).expect("2x2 shape")
}

/// Pauli matrices `(σx, σy, σz)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [
        ComplexMatrix::new(2, 2, vec![z, one, one, z]).unwrap(),
        ComplexMatrix::new(2, 2, vec![z, -i, i, z]).unwrap(),
        ComplexMatrix::new(2, 2, vec![one, z, z, -one]).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn angle_canonicalization() {
        assert_eq!(PolarizationAngle::new(0.0).unwrap().radians(), 0.0);
        let a = PolarizationAngle::new(PI + 0.25).unwrap().radians();
        assert!((a - 0.25).abs() < 1e-15);
        let b = PolarizationAngle::new(-0.25).unwrap().radians();
        assert!((b - (PI - 0.25)).abs() < 1e-15);
        let c = PolarizationAngle::new(-1e-300).unwrap().radians();
        assert!((0.0..PI).contains(&c));
        assert!(PolarizationAngle::new(f64::NAN).is_err());
        assert!(PolarizationAngle::new(f64::INFINITY).is_err());
    }

    #[test]
    fn projector_examples() {
        let e0 = projector_from_angle(PolarizationAngle::new(0.0).unwrap());
        assert_eq!(e0, ComplexMatrix::diag_real(&[1.0, 0.0]));
        let e45 = projector_from_angle(PolarizationAngle::new(FRAC_PI_4).unwrap());
        let want = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap();
        assert!(e45.max_abs_diff(&want).unwrap() < 1e-15);
        let overlap = e0.matmul(&e45).unwrap().trace().unwrap();
        // cos²(π/4)
        assert!((overlap.re - FRAC_PI_4.cos().powi(2)).abs() < 1e-15);
        assert!((overlap.re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projectors_are_idempotent_and_complementary() {
        for k in 0..32 {
            let t = PolarizationAngle::new(k as f64 * PI / 16.0 - 0.3).unwrap();
            let p = projector_from_angle(t);
            let q = complement_projector(t);
            assert!(p.matmul(&p).unwrap().max_abs_diff(&p).unwrap() < 1e-12);
            assert!(p.add(&q).unwrap().max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-15);
            assert!(p.matmul(&q).unwrap().max_abs() < 1e-15);
        }
    }

    #[test]
    fn pauli_commutator() {
        let [sx, sy, sz] = pauli();
        let comm = sx.commutator(&sy).unwrap();
        let want = sz.scale_complex(Complex64::new(0.0, 2.0));
        assert_eq!(comm, want);
    }
}
