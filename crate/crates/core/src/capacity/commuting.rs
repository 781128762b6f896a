//! Exact capacity of POVMs whose elements commute pairwise.

use super::blahut::blahut_arimoto;
use super::{CapacityMethod, CapacityResult, Diagnostics};
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, StateVector};
use crate::povm::Povm;
use crate::scalar::Real;

pub const COMMUTATOR_TOL: f64 = 1e-9;

/// Eigenbasis shared by all elements, from a generic linear combination.
pub fn common_eigenbasis<T: Real>(povm: &Povm<T>) -> Result<Vec<StateVector<T>>> {
    let (i, j, norm) = povm.max_commutator();
    if norm > T::tol(COMMUTATOR_TOL) {
        return Err(Error::NotCommuting {
            i: i + 1,
            j: j + 1,
            norm: norm.to_f64_lossy(),
        });
    }
    let mut last = None;
    for attempt in 0..4 {
        let mut combo = HermitianOperator::zero(povm.dim());
        for (k, e) in povm.elements().iter().enumerate() {
            // weights with no rational relation between them
            let w = T::lit(((k + 1) as f64 * (0.754877666 + 0.1 * attempt as f64)).fract() + 0.5 + (k as f64).sqrt());
            combo = &combo + &e.scale(w);
        }
        let vectors = combo.eig()?.vectors;
        let worst = povm
            .elements()
            .iter()
            .map(|e| off_diagonal(e, &vectors))
            .fold(T::zero(), T::max);
        if worst <= T::tol(COMMUTATOR_TOL) {
            return Ok(vectors);
        }
        last = Some(worst);
    }
    Err(Error::NotCommuting {
        i: 1,
        j: 1,
        norm: last.map_or(f64::NAN, Real::to_f64_lossy),
    })
}

fn off_diagonal<T: Real>(e: &HermitianOperator<T>, basis: &[StateVector<T>]) -> T {
    let mut worst = T::zero();
    for (a, u) in basis.iter().enumerate() {
        let eu = e.matrix().apply(u);
        for (b, v) in basis.iter().enumerate() {
            if a != b {
                worst = worst.max(crate::operator::inner(v, &eu).norm());
            }
        }
    }
    worst
}

/// Simultaneous diagonalization, then Blahut–Arimoto on `p(j|i) = λ^i_j`.
pub fn capacity_commuting<T: Real>(povm: &Povm<T>, tol: T) -> Result<CapacityResult<T>> {
    let basis = common_eigenbasis(povm)?;
    let channel: Vec<Vec<T>> = basis
        .iter()
        .map(|v| {
            let row: Vec<T> = povm.elements().iter().map(|e| e.expectation(v).max(T::zero())).collect();
            let s: T = row.iter().copied().sum();
            row.into_iter().map(|x| x / s).collect()
        })
        .collect();
    let ba = blahut_arimoto(&channel, tol)?;
    let diagnostics = Diagnostics {
        iterations: ba.iterations,
        bracket: ba.bracket,
        monotone: ba.monotone,
        ..Diagnostics::default()
    };
    CapacityResult::from_pure(
        povm,
        ba.capacity,
        basis,
        ba.prior,
        CapacityMethod::CommutingBlahutArimoto,
        ba.converged,
        diagnostics,
    )
}
