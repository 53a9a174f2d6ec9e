//! Symmetric positive-definite matrix roots.

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite (eigenvalue {eigenvalue:.6e})")]
    NotPositiveDefinite { eigenvalue: f64 },
}

fn symmetric_eigen(m: &DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.nrows(), m.ncols()));
    }
    let scale = m.amax().max(f64::MIN_POSITIVE);
    let asym = (m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * scale {
        return Err(LinalgError::NotSymmetric(asym));
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.min();
    // relative floor keeps round-off from passing as positive definite
    if !(min > 1e-14 * scale) {
        return Err(LinalgError::NotPositiveDefinite { eigenvalue: min });
    }
    Ok(eig)
}

fn spectral_power(m: &DMatrix<f64>, power: f64) -> Result<DMatrix<f64>, LinalgError> {
    let eig = symmetric_eigen(m)?;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(power)));
    let v = &eig.eigenvectors;
    let s = v * d * v.transpose();
    // exact symmetry
    Ok((&s + s.transpose()) * 0.5)
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn principal_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    spectral_power(m, 0.5)
}

/// Inverse of the principal square root.
pub fn inverse_sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>, LinalgError> {
    spectral_power(m, -0.5)
}
