//! Seeded random instances: states, ensembles and POVMs for property tests
//! and Monte Carlo oracles.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::operator::{normalized, ComplexMatrix, HermitianOperator, StateVector};
use crate::povm::{Ensemble, Povm};
use crate::scalar::Real;

/// Haar-random unit vector in `C^d`.
pub fn pure_state<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> StateVector<T> {
    loop {
        let v: StateVector<T> = (0..dim)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        if let Some(u) = normalized(&v) {
            return u;
        }
    }
}

/// Random density operator of the given rank (mixture of random pure states).
pub fn density_operator<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    rank: usize,
) -> HermitianOperator<T> {
    let weights: Vec<f64> = (0..rank).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut rho = HermitianOperator::zero(dim);
    for w in weights {
        let v = pure_state::<T, _>(rng, dim);
        rho = &rho + &HermitianOperator::projector(&v).scale(T::lit(w / total));
    }
    rho
}

/// Random mixed-state ensemble with priors bounded away from zero.
pub fn ensemble<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, size: usize) -> Ensemble<T> {
    let states = (0..size)
        .map(|_| {
            let rank = rng.random_range(1..=dim);
            density_operator(rng, dim, rank)
        })
        .collect();
    Ensemble::new(states, priors(rng, size)).expect("random ensemble is valid")
}

/// Random probability vector with entries at least `0.02 / n`.
pub fn priors<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.02..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| T::lit(x / total)).collect()
}

/// Random POVM with `m` elements of random rank: `E_k = S^{-1/2} A_k S^{-1/2}`
/// where `A_k` are random positive operators and `S = Σ A_k`.
pub fn random_povm<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, m: usize) -> Povm<T> {
    loop {
        let parts: Vec<HermitianOperator<T>> = (0..m)
            .map(|_| {
                let rank = rng.random_range(1..=dim);
                density_operator(rng, dim, rank)
            })
            .collect();
        let total = HermitianOperator::sum_of(dim, &parts);
        let eig = total.eig().expect("eigensolver");
        if eig.min().0 < T::lit(1e-6) {
            continue;
        }
        let inv_sqrt = ComplexMatrix::from_fn(dim, |i, j| {
            eig.values
                .iter()
                .zip(&eig.vectors)
                .map(|(&l, v)| v[i] * v[j].conj() * (T::one() / l.sqrt()))
                .sum()
        });
        let elements: Vec<_> = parts
            .iter()
            .map(|a| {
                let m = &(&inv_sqrt * a.matrix()) * &inv_sqrt;
                HermitianOperator::new(symmetrize(m)).expect("hermitian")
            })
            .collect();
        if let Ok(p) = Povm::new(elements) {
            return p;
        }
    }
}

/// Random POVM whose elements are diagonal in the computational basis.
pub fn diagonal_povm<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, m: usize) -> Povm<T> {
    let mut columns = vec![vec![T::zero(); dim]; m];
    for i in 0..dim {
        let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for (k, x) in raw.into_iter().enumerate() {
            columns[k][i] = T::lit(x / total);
        }
    }
    Povm::new(columns.iter().map(|d| HermitianOperator::diag(d)).collect())
        .expect("diagonal POVM is valid")
}

fn symmetrize<T: Real>(m: ComplexMatrix<T>) -> ComplexMatrix<T> {
    let adj = m.adjoint();
    (&m + &adj).scale(T::lit(0.5))
}
