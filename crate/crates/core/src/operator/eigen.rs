//! Cyclic complex Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;
use num_traits::Zero;

use super::matrix::{ComplexMatrix, StateVector};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted descending with matching orthonormal eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition<T> {
    pub values: Vec<T>,
    pub vectors: Vec<StateVector<T>>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn max(&self) -> (T, &StateVector<T>) {
        (self.values[0], &self.vectors[0])
    }

    pub fn min(&self) -> (T, &StateVector<T>) {
        let last = self.values.len() - 1;
        (self.values[last], &self.vectors[last])
    }

    /// `Σ λ_k |v_k><v_k|`
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (lambda, v) in self.values.iter().zip(&self.vectors) {
            for i in 0..d {
                for j in 0..d {
                    out[(i, j)] = out[(i, j)] + v[i] * v[j].conj() * *lambda;
                }
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is assumed Hermitian; only the upper triangle drives the
/// rotations. Convergence is declared once the off-diagonal Frobenius norm
/// drops below `1e-13·‖A‖_F`.
pub fn jacobi<T: Real>(a: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let d = a.dim();
    let mut m = a.clone();
    let mut v = ComplexMatrix::<T>::identity(d);
    let threshold = T::tol(1e-13) * a.frobenius();

    let mut converged = false;
    let mut off = off_diagonal_norm(&m);
    for _ in 0..MAX_SWEEPS {
        if off <= threshold {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&m);
    }
    if !converged && off > threshold {
        return Err(Error::NotConverged {
            sweeps: MAX_SWEEPS,
            residual: off.to_f64_lossy(),
        });
    }

    let mut order: Vec<usize> = (0..d).collect();
    // stable: equal eigenvalues keep their column order
    order.sort_by(|&i, &j| m[(j, j)].re.partial_cmp(&m[(i, i)].re).unwrap());
    let values = order.iter().map(|&k| m[(k, k)].re).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..d).map(|i| v[(i, k)]).collect())
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm<T: Real>(m: &ComplexMatrix<T>) -> T {
    let d = m.dim();
    let mut acc = T::zero();
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc = acc + m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn rotate<T: Real>(m: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r <= T::min_positive_value() {
        return;
    }
    let d = m.dim();
    let phase = apq / r;
    let a = m[(p, p)].re;
    let b = m[(q, q)].re;
    let tau = (b - a) / (r + r);
    let sign = if tau >= T::zero() { T::one() } else { -T::one() };
    let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // U = diag(1, e^{-iφ}) · [[c, s], [-s, c]] on the (p, q) plane.
    let u_pp = Complex::new(c, T::zero());
    let u_pq = Complex::new(s, T::zero());
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    for k in 0..d {
        let (x, y) = (m[(k, p)], m[(k, q)]);
        m[(k, p)] = x * u_pp + y * u_qp;
        m[(k, q)] = x * u_pq + y * u_qq;
    }
    for k in 0..d {
        let (x, y) = (m[(p, k)], m[(q, k)]);
        m[(p, k)] = u_pp.conj() * x + u_qp.conj() * y;
        m[(q, k)] = u_pq.conj() * x + u_qq.conj() * y;
    }
    m[(p, q)] = Complex::zero();
    m[(q, p)] = Complex::zero();
    m[(p, p)].im = T::zero();
    m[(q, q)].im = T::zero();

    for k in 0..d {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * u_pp + y * u_qp;
        v[(k, q)] = x * u_pq + y * u_qq;
    }
}

/// Largest eigenvalue by power iteration on `A + shift·I`; test oracle only.
#[cfg(test)]
pub(crate) fn power_iteration(a: &ComplexMatrix<f64>, steps: usize) -> f64 {
    let d = a.dim();
    let shift = a.frobenius() + 1.0;
    let mut shifted = a.clone();
    for i in 0..d {
        shifted[(i, i)] += Complex::new(shift, 0.0);
    }
    let mut x: StateVector<f64> = (0..d)
        .map(|i| Complex::new(1.0 + 0.1 * i as f64, 0.3 - 0.07 * i as f64))
        .collect();
    for _ in 0..steps {
        let y = shifted.apply(&x);
        x = super::matrix::normalized(&y).unwrap();
    }
    let ax = a.apply(&x);
    super::matrix::inner(&x, &ax).re
}
