use std::ops::{Add, Sub};

use num_complex::Complex;

use super::eigen::{jacobi, EigenDecomposition};
use super::matrix::{basis_vector, ComplexMatrix, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Asymmetry accepted (and symmetrized away) on construction.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// A Hermitian operator on `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator<T> {
    matrix: ComplexMatrix<T>,
}

impl<T: Real> HermitianOperator<T> {
    /// Validates and symmetrizes `A ← (A + A†)/2`.
    pub fn new(matrix: ComplexMatrix<T>) -> Result<Self> {
        if !matrix.is_finite() {
            return Err(Error::NonFinite);
        }
        let adj = matrix.adjoint();
        let asymmetry = matrix.max_abs_diff(&adj);
        if asymmetry > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian {
                asymmetry: asymmetry.to_f64_lossy(),
            });
        }
        let half = T::lit(0.5);
        let sym = (&matrix + &adj).scale(half);
        Ok(Self { matrix: sym })
    }

    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix<T>) -> Self {
        Self { matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn diag(values: &[T]) -> Self {
        Self {
            matrix: ComplexMatrix::from_real_diag(values),
        }
    }

    /// `|v><v| / <v|v>`
    pub fn projector(v: &[Complex<T>]) -> Self {
        let n2: T = v.iter().map(|z| z.norm_sqr()).sum();
        Self {
            matrix: ComplexMatrix::outer(v).scale(T::one() / n2),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    #[inline]
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.matrix
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            matrix: self.matrix.scale(s),
        }
    }

    pub fn trace(&self) -> T {
        self.matrix.trace().re
    }

    /// `Tr(A B)`, real for Hermitian pairs.
    pub fn trace_product(&self, other: &Self) -> T {
        self.matrix.trace_product(&other.matrix).re
    }

    /// `<v|A|v>`
    pub fn expectation(&self, v: &[Complex<T>]) -> T {
        let av = self.matrix.apply(v);
        super::matrix::inner(v, &av).re
    }

    /// `P A P` for a Hermitian `P`.
    pub fn sandwich(&self, p: &Self) -> Self {
        let m = &(&p.matrix * &self.matrix) * &p.matrix;
        Self::hermitize(m)
    }

    /// `U A U†`
    pub fn conjugate_by(&self, u: &ComplexMatrix<T>) -> Self {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self::hermitize(m)
    }

    /// Entrywise conjugate (equivalently the transpose).
    pub fn conj(&self) -> Self {
        Self {
            matrix: self.matrix.conj(),
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn sum_of<'a>(dim: usize, ops: impl IntoIterator<Item = &'a Self>) -> Self
    where
        T: 'a,
    {
        ops.into_iter().fold(Self::zero(dim), |acc, op| &acc + op)
    }

    fn hermitize(m: ComplexMatrix<T>) -> Self {
        let adj = m.adjoint();
        Self {
            matrix: (&m + &adj).scale(T::lit(0.5)),
        }
    }

    pub fn eig(&self) -> Result<EigenDecomposition<T>> {
        jacobi(&self.matrix)
    }

    /// Largest eigenvalue and the first listed eigenvector for it.
    ///
    /// The zero matrix yields `(0, e_1)`.
    pub fn lambda_max(&self) -> Result<(T, StateVector<T>)> {
        let e = self.eig()?;
        Ok((e.values[0], e.vectors[0].clone()))
    }

    pub fn lambda_min(&self) -> Result<(T, StateVector<T>)> {
        let e = self.eig()?;
        let (v, x) = e.min();
        Ok((v, x.clone()))
    }

    /// `λ_max − λ_min`
    pub fn spread(&self) -> Result<T> {
        let e = self.eig()?;
        Ok(e.values[0] - e.min().0)
    }

    /// Default kernel tolerance `1e-9·max(1, ‖A‖_max)`.
    pub fn default_kernel_tol(&self) -> T {
        T::tol(1e-9) * T::one().max(self.matrix.max_abs())
    }

    /// Orthonormal basis of the eigenvectors with `|λ| ≤ tol`.
    pub fn kernel_basis(&self, tol: T) -> Result<Vec<StateVector<T>>> {
        let e = self.eig()?;
        Ok(e.values
            .iter()
            .zip(e.vectors)
            .filter(|(l, _)| l.abs() <= tol)
            .map(|(_, v)| v)
            .collect())
    }

    /// Orthogonal projector onto the numerical kernel.
    pub fn kernel_projector(&self, tol: T) -> Result<Self> {
        let basis = self.kernel_basis(tol)?;
        let mut p = ComplexMatrix::zeros(self.dim());
        for v in &basis {
            p = &p + &ComplexMatrix::outer(v);
        }
        Ok(Self { matrix: p })
    }

    /// Smallest eigenvalue minus tolerance check for `A ⪰ −tol·I`.
    pub fn is_psd(&self, tol: T) -> Result<bool> {
        Ok(self.lambda_min()?.0 >= -tol)
    }

    pub fn basis_state(dim: usize, k: usize) -> Self {
        Self::projector(&basis_vector::<T>(dim, k))
    }
}

impl<T: Real> Add for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn add(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator {
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<T: Real> Sub for &HermitianOperator<T> {
    type Output = HermitianOperator<T>;
    fn sub(self, rhs: Self) -> HermitianOperator<T> {
        HermitianOperator {
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}
