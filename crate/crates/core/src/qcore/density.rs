use num_complex::Complex64 as C64;

use super::{hermitian_eig_unchecked, ComplexMatrix};
use crate::{tol, Error, Result};

/// Density operator: square, unit trace, Hermitian and positive semidefinite
/// within the tolerances in [`crate::tol`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` against the density-matrix invariants.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol::TRACE {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let defect = matrix.hermiticity_defect();
        if defect > tol::HERMITIAN {
            return Err(Error::InvalidState(format!(
                "not Hermitian (max |rho - rho^dagger| = {defect:e})"
            )));
        }
        let min = hermitian_eig_unchecked(&matrix.hermitian_part()).values[0];
        if min < -tol::PSD {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (smallest eigenvalue {min:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix known to be a valid state (e.g. a partial trace of one).
    pub(crate) fn from_matrix_unchecked(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        Self { matrix }
    }

    /// `|psi><psi|` for a normalized state vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if psi.is_empty() || (norm - 1.0).abs() > tol::TRACE {
            return Err(Error::InvalidState(format!(
                "state vector has squared norm {norm}, expected 1"
            )));
        }
        Self::new(ComplexMatrix::outer(psi, psi))
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(p: &[f64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidState("empty population vector".into()));
        }
        Self::new(ComplexMatrix::from_real_diagonal(p))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diagonal(&vec![1.0 / dim as f64; dim]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Real parts of the diagonal.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig_unchecked(&self.matrix.hermitian_part()).values
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        m.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self::from_matrix_unchecked(super::kron(&self.matrix, &other.matrix))
    }

    /// Conjugation `u rho u^dagger` by a unitary.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        let out = u.matmul(&self.matrix)?.matmul(&u.dagger())?;
        Self::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_rejects_each_invariant() {
        let not_square = ComplexMatrix::zeros(2, 3);
        assert!(DensityMatrix::new(not_square).is_err());

        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(DensityMatrix::new(bad_trace).is_err());

        let mut non_herm = ComplexMatrix::from_real_diagonal(&[0.5, 0.5]);
        non_herm[(0, 1)] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::new(non_herm).is_err());

        let negative = ComplexMatrix::from_real_diagonal(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative).is_err());

        assert!(DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn tiny_negative_eigenvalue_is_tolerated() {
        let almost = ComplexMatrix::from_real_diagonal(&[1.0 + 5e-10, -5e-10]);
        assert!(DensityMatrix::new(almost).is_ok());
    }

    #[test]
    fn purity_of_pure_and_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityMatrix::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)]).unwrap();
        assert!((plus.purity() - 1.0).abs() < 1e-15);
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
    }
}
