//! Qubit Bloch-vector parametrization `c·(I + v·σ)`.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::hermitian::HermitianOperator;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochVector<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn neg(&self) -> Self {
        self.scale(-T::one())
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    /// Angle between two nonzero vectors, in radians.
    pub fn angle_to(&self, o: &Self) -> T {
        let c = self.dot(o) / (self.norm() * o.norm());
        c.max(-T::one()).min(T::one()).acos()
    }
}

/// The Pauli matrices `(σx, σy, σz)`.
pub fn pauli<T: Real>() -> [ComplexMatrix<T>; 3] {
    let (o, l, i) = (T::zero(), T::one(), Complex::new(T::zero(), T::one()));
    let c = |re: T| Complex::new(re, o);
    [
        ComplexMatrix::from_fn(2, |a, b| if a != b { c(l) } else { Complex::zero() }),
        ComplexMatrix::from_fn(2, |a, b| match (a, b) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => Complex::zero(),
        }),
        ComplexMatrix::from_real_diag(&[l, -l]),
    ]
}

/// `scale·(I + v·σ)`
pub fn bloch_operator<T: Real>(scale: T, v: &BlochVector<T>) -> HermitianOperator<T> {
    let [sx, sy, sz] = pauli::<T>();
    let mut m = ComplexMatrix::identity(2);
    m = &m + &sx.scale(v.x);
    m = &m + &sy.scale(v.y);
    m = &m + &sz.scale(v.z);
    HermitianOperator::from_hermitian_unchecked(m.scale(scale))
}

/// `ρ = (I + v·σ)/2`; rejects `|v| > 1`.
pub fn bloch_to_state<T: Real>(v: &BlochVector<T>) -> Result<HermitianOperator<T>> {
    if v.norm() > T::one() + T::tol(1e-12) {
        return Err(Error::OutOfRange(format!(
            "Bloch vector norm {} exceeds 1",
            v.norm()
        )));
    }
    Ok(bloch_operator(T::lit(0.5), v))
}

/// Inverse of [`bloch_to_state`]; requires `d = 2`.
pub fn state_to_bloch<T: Real>(rho: &HermitianOperator<T>) -> Result<BlochVector<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let m = rho.matrix();
    let off = m[(0, 1)];
    let two = T::lit(2.0);
    Ok(BlochVector::new(
        two * off.re,
        -two * off.im,
        m[(0, 0)].re - m[(1, 1)].re,
    ))
}
