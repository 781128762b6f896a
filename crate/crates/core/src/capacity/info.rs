//! Mutual information, subentropy and the entropy diagnostics of a POVM.

use crate::error::{Error, Result};
use crate::operator::{von_neumann_entropy, HermitianOperator};
use crate::povm::{JointDistribution, Povm};
use crate::scalar::Real;

/// Eigenvalues closer than this are merged before evaluating the subentropy.
pub const SUBENTROPY_MERGE_TOL: f64 = 1e-7;

/// `I(P) = Σ_i η(P_i·) + Σ_j η(P_·j) − Σ_ij η(P_ij)` in bits.
pub fn mutual_information<T: Real>(p: &JointDistribution<T>) -> T {
    let rows: T = p.row_sums().into_iter().map(Real::eta).sum();
    let cols: T = p.col_sums().into_iter().map(Real::eta).sum();
    let joint: T = p.entries().iter().copied().map(Real::eta).sum();
    (rows + cols - joint).max(T::zero())
}

/// Mutual information of priors `r` through a channel `w[i][j] = p(j|i)`,
/// without validation.
pub(crate) fn channel_information<T: Real>(r: &[T], w: &[Vec<T>]) -> T {
    let m = w[0].len();
    let mut q = vec![T::zero(); m];
    let mut joint = T::zero();
    for (&ri, row) in r.iter().zip(w) {
        for (qj, &wij) in q.iter_mut().zip(row) {
            let pij = ri * wij;
            *qj = *qj + pij;
            joint = joint + pij.eta();
        }
    }
    let rows: T = r.iter().copied().map(Real::eta).sum();
    let cols: T = q.into_iter().map(Real::eta).sum();
    rows + cols - joint
}

/// Shannon entropy in bits.
pub(crate) fn shannon<T: Real>(p: impl IntoIterator<Item = T>) -> T {
    p.into_iter().map(Real::eta).sum()
}

/// `F^{(m)}(x)/m!` for `F(x) = x^d ln x`.
fn taylor_coefficient<T: Real>(d: usize, m: usize, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    // d^(m)/m! · x^{d-m} (ln x + H_d − H_{d-m})
    let mut binom = T::one();
    let mut harmonic = T::zero();
    for k in 0..m {
        binom = binom * T::from_usize(d - k).expect("small") / T::from_usize(k + 1).expect("small");
        harmonic = harmonic + T::one() / T::from_usize(d - k).expect("small");
    }
    binom * x.powi((d - m) as i32) * (x.ln() + harmonic)
}

/// Subentropy of a spectrum in bits:
/// `Q = −Σ_k [Π_{l≠k} λ_k/(λ_k − λ_l)] λ_k log λ_k`.
///
/// This is `−F[λ_1, …, λ_d]/ln 2`, a divided difference of `x^d ln x`;
/// coinciding eigenvalues are handled exactly through confluent (Hermite)
/// divided differences after merging clusters within
/// [`SUBENTROPY_MERGE_TOL`].
pub fn subentropy_of_spectrum<T: Real>(spectrum: &[T]) -> T {
    let d = spectrum.len();
    let mut x: Vec<T> = spectrum.iter().map(|&l| l.max(T::zero())).collect();
    x.sort_by(|a, b| a.partial_cmp(b).expect("finite spectrum"));
    let merge = T::tol(SUBENTROPY_MERGE_TOL);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && x[end] - x[end - 1] <= merge {
            end += 1;
        }
        let mean = x[start..end].iter().copied().sum::<T>() / T::from_usize(end - start).expect("small");
        for v in &mut x[start..end] {
            *v = mean;
        }
        start = end;
    }
    // Newton table, column by column
    let mut col: Vec<T> = x.iter().map(|&v| taylor_coefficient(d, 0, v)).collect();
    for k in 1..d {
        col = (0..d - k)
            .map(|i| {
                if x[i + k] == x[i] {
                    taylor_coefficient(d, k, x[i])
                } else {
                    (col[i + 1] - col[i]) / (x[i + k] - x[i])
                }
            })
            .collect();
    }
    let q = -col[0] / T::LN_2();
    q.max(T::zero())
}

pub fn subentropy<T: Real>(rho: &HermitianOperator<T>) -> Result<T> {
    let eig = rho.eig()?;
    if (rho.trace() - T::one()).abs() > T::tol(1e-9) || eig.min().0 < -T::tol(1e-9) {
        return Err(Error::InvalidState {
            index: 1,
            reason: "not a density operator".into(),
        });
    }
    Ok(subentropy_of_spectrum(&eig.values))
}

/// Rescaled elements `Ē_i = E_i / Tr E_i` with weights `m_i = Tr E_i / d`,
/// skipping zero elements.
fn rescaled<T: Real>(povm: &Povm<T>) -> Vec<(T, HermitianOperator<T>)> {
    let d = T::from_usize(povm.dim()).expect("dim");
    povm.elements()
        .iter()
        .filter(|e| e.trace() > T::tol(1e-15))
        .map(|e| (e.trace() / d, e.scale(T::one() / e.trace())))
        .collect()
}

/// `Q(Σ m_i Ē_i) − Σ m_i Q(Ē_i)`, a lower bound on the capacity.
pub fn lower_bound<T: Real>(povm: &Povm<T>) -> Result<T> {
    let d = povm.dim();
    let mixed = subentropy_of_spectrum(&vec![T::one() / T::from_usize(d).expect("dim"); d]);
    let mut sum = T::zero();
    for (m, e) in rescaled(povm) {
        sum = sum + m * subentropy(&e)?;
    }
    Ok((mixed - sum).max(T::zero()))
}

/// `S(Σ m_i Ē_i) − Σ m_i S(Ē_i)`: a diagnostic that is not a bound on the
/// capacity in either direction.
pub fn holevo_of_rescaled_povm<T: Real>(povm: &Povm<T>) -> Result<T> {
    if let Some(k) = povm.elements().iter().position(|e| e.trace() <= T::tol(1e-15)) {
        return Err(Error::OutOfRange(format!("POVM element {} has zero trace", k + 1)));
    }
    let d = povm.dim();
    let mut total = T::from_usize(d).expect("dim").log2();
    for (m, e) in rescaled(povm) {
        total = total - m * von_neumann_entropy(&e)?;
    }
    Ok(total)
}
