//! Complex Hermitian operators, their spectra and kernels, and qubit helpers.

mod bloch;
mod eigen;
mod hermitian;
mod matrix;

pub use bloch::{bloch_operator, bloch_to_state, pauli, state_to_bloch, BlochVector};
pub use eigen::{jacobi, EigenDecomposition, MAX_SWEEPS};
pub use hermitian::{HermitianOperator, HERMITIAN_TOL};
pub use matrix::{basis_vector, fidelity, inner, norm, normalized, ComplexMatrix, StateVector};

use crate::error::Result;
use crate::scalar::Real;

pub fn eig_hermitian<T: Real>(a: &HermitianOperator<T>) -> Result<EigenDecomposition<T>> {
    a.eig()
}

pub fn lambda_max<T: Real>(a: &HermitianOperator<T>) -> Result<(T, StateVector<T>)> {
    a.lambda_max()
}

pub fn spread<T: Real>(a: &HermitianOperator<T>) -> Result<T> {
    a.spread()
}

pub fn kernel_projector<T: Real>(a: &HermitianOperator<T>, tol: T) -> Result<HermitianOperator<T>> {
    a.kernel_projector(tol)
}

/// von Neumann entropy in bits.
pub fn von_neumann_entropy<T: Real>(rho: &HermitianOperator<T>) -> Result<T> {
    Ok(rho.eig()?.values.into_iter().map(Real::eta).sum())
}
