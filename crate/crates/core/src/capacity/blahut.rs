//! Blahut–Arimoto iteration for the capacity of a classical channel.

use super::info::channel_information;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const BA_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct BlahutArimoto<T> {
    /// Mutual information achieved by `prior`, in bits.
    pub capacity: T,
    pub prior: Vec<T>,
    pub iterations: usize,
    /// `max_i D_i − I(prior)`, an upper bound on the remaining gap.
    pub bracket: T,
    /// Whether every iterate improved on the previous one.
    pub monotone: bool,
    pub converged: bool,
}

/// Capacity of the channel `w[i][j] = p(j|i)` to within `tol` bits.
pub fn blahut_arimoto<T: Real>(w: &[Vec<T>], tol: T) -> Result<BlahutArimoto<T>> {
    blahut_arimoto_capped(w, tol, BA_MAX_ITERATIONS)
}

pub fn blahut_arimoto_capped<T: Real>(w: &[Vec<T>], tol: T, max_iterations: usize) -> Result<BlahutArimoto<T>> {
    if w.is_empty() || w[0].is_empty() {
        return Err(Error::Empty("channel"));
    }
    let m = w[0].len();
    for (i, row) in w.iter().enumerate() {
        let sum: T = row.iter().copied().sum();
        if row.len() != m
            || row.iter().any(|x| !x.is_finite() || *x < -T::tol(1e-12))
            || (sum - T::one()).abs() > T::tol(1e-9)
        {
            return Err(Error::ChannelRow {
                row: i + 1,
                sum: sum.to_f64_lossy(),
            });
        }
    }
    let w: Vec<Vec<T>> = w.iter().map(|r| r.iter().map(|x| x.max(T::zero())).collect()).collect();
    warm_started(&w, None, tol, max_iterations)
}

pub(crate) fn warm_started<T: Real>(
    w: &[Vec<T>],
    start: Option<&[T]>,
    tol: T,
    max_iterations: usize,
) -> Result<BlahutArimoto<T>> {
    let n = w.len();
    let m = w[0].len();
    let mut r: Vec<T> = match start {
        Some(s) => s.to_vec(),
        None => vec![T::one() / T::from_usize(n).expect("size"); n],
    };
    let mut d = vec![T::zero(); n];
    let mut q = vec![T::zero(); m];
    let mut last = T::neg_infinity();
    let mut monotone = true;
    let mut iterations = 0;
    loop {
        q.iter_mut().for_each(|x| *x = T::zero());
        for (ri, row) in r.iter().zip(w) {
            for (qj, &wij) in q.iter_mut().zip(row) {
                *qj = *qj + *ri * wij;
            }
        }
        for (di, row) in d.iter_mut().zip(w) {
            *di = row
                .iter()
                .zip(&q)
                .filter(|(wij, _)| **wij > T::zero())
                .map(|(&wij, &qj)| wij * (wij / qj).log2())
                .sum();
        }
        let info: T = r.iter().zip(&d).map(|(&ri, &di)| ri * di).sum();
        if info < last - T::tol(1e-14) {
            monotone = false;
        }
        last = info;
        let upper = d.iter().copied().fold(T::neg_infinity(), T::max);
        let bracket = upper - info;
        if bracket < tol || iterations >= max_iterations {
            let capacity = channel_information(&r, w).max(T::zero());
            return Ok(BlahutArimoto {
                capacity,
                prior: r,
                iterations,
                bracket: bracket.max(T::zero()),
                monotone,
                converged: bracket < tol,
            });
        }
        let shift = upper;
        let mut z = T::zero();
        for (ri, &di) in r.iter_mut().zip(&d) {
            *ri = *ri * (di - shift).exp2();
            z = z + *ri;
        }
        r.iter_mut().for_each(|x| *x = *x / z);
        iterations += 1;
    }
}
