use num_complex::Complex64;

use super::{ComplexMatrix, Tolerances};
use crate::error::{Error, Result};

/// A normalized pure state vector or a density operator.
#[derive(Debug, Clone, PartialEq)]
pub enum StateDescriptor {
    Pure(Vec<Complex64>),
    Mixed(ComplexMatrix),
}

impl StateDescriptor {
    /// Pure state from amplitudes; the norm must already be 1.
    pub fn pure(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::pure_with(amplitudes, &Tolerances::default())
    }

    pub fn pure_with(amplitudes: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidState("empty amplitude vector".into()));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > tol.algebraic {
            return Err(Error::InvalidState(format!("squared norm {norm_sq} differs from 1")));
        }
        Ok(StateDescriptor::Pure(amplitudes))
    }

    /// Pure state from unnormalized amplitudes.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize vector of norm {norm}")));
        }
        Self::pure(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::normalized(amplitudes.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn density(rho: ComplexMatrix) -> Result<Self> {
        Self::density_with(rho, &Tolerances::default())
    }

    pub fn density_with(rho: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !rho.is_square() {
            return Err(Error::shape(
                "square density operator",
                format!("{}x{}", rho.rows(), rho.cols()),
            ));
        }
        let dev = rho.hermiticity_deviation();
        if dev > tol.algebraic {
            return Err(Error::InvalidState(format!("density operator not Hermitian ({dev:e})")));
        }
        let tr = rho.trace()?;
        if (tr - Complex64::new(1.0, 0.0)).norm() > tol.algebraic {
            return Err(Error::InvalidState(format!(
                "density operator trace {tr} differs from 1"
            )));
        }
        let min_ev = rho.hermitian_eigenvalues()?[0];
        if min_ev < -tol.positivity {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:e}")));
        }
        Ok(StateDescriptor::Mixed(rho))
    }

    /// Horizontal polarization `|0⟩`.
    pub fn horizontal() -> Self {
        StateDescriptor::Pure(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)])
    }

    /// Vertical polarization `|1⟩`.
    pub fn vertical() -> Self {
        StateDescriptor::Pure(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    /// Linear polarization at angle `theta` (radians) from horizontal.
    pub fn linear(theta: f64) -> Self {
        StateDescriptor::Pure(vec![Complex64::new(theta.cos(), 0.0), Complex64::new(theta.sin(), 0.0)])
    }

    /// Diagonal polarization `(|0⟩ + |1⟩)/√2`.
    pub fn diagonal() -> Self {
        Self::linear(std::f64::consts::FRAC_PI_4)
    }

    /// Polarization singlet `(|01⟩ − |10⟩)/√2`, photon 1 as the first tensor factor.
    pub fn singlet() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        StateDescriptor::Pure(vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(0.0, 0.0),
        ])
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        StateDescriptor::Mixed(ComplexMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    /// Tensor product state, `self` as the first factor.
    pub fn product(&self, other: &Self) -> Self {
        match (self, other) {
            (StateDescriptor::Pure(a), StateDescriptor::Pure(b)) => {
                StateDescriptor::Pure(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            _ => StateDescriptor::Mixed(self.density_matrix().kron(&other.density_matrix())),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            StateDescriptor::Pure(v) => v.len(),
            StateDescriptor::Mixed(rho) => rho.rows(),
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match self {
            StateDescriptor::Pure(v) => ComplexMatrix::outer(v, v),
            StateDescriptor::Mixed(rho) => rho.clone(),
        }
    }

    /// `⟨ψ|op|ψ⟩` for pure states, `Tr(ρ·op)` for density operators.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<Complex64> {
        let d = self.dim();
        if op.rows() != d || op.cols() != d {
            return Err(Error::shape(
                format!("{d}x{d} operator"),
                format!("{}x{}", op.rows(), op.cols()),
            ));
        }
        let value = match self {
            StateDescriptor::Pure(psi) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, pi) in psi.iter().enumerate() {
                    let row: Complex64 = psi.iter().enumerate().map(|(j, pj)| op.get(i, j) * pj).sum();
                    acc += pi.conj() * row;
                }
                acc
            }
            StateDescriptor::Mixed(rho) => (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| rho.get(i, j) * op.get(j, i))
                .sum(),
        };
        Ok(value)
    }
}
