//! Capacity of group-covariant POVMs from the best seed state of an orbit.
//!
//! If `U_g E_h U_g† = E_{g·h}` for a finite group acting irreducibly, the
//! uniform ensemble over the orbit `{U_g ψ}` of a single pure seed is
//! optimal. Its average state is `I/d`, so the mutual information is
//! `H(Tr E_j / d) − H(<ψ|E_j|ψ>)`, maximized here over the seed.

use num_complex::Complex;
use rayon::prelude::*;

use super::info::shannon;
use super::search::{chart_grid, chart_len, chart_state, nelder_mead};
use super::{CapacityMethod, CapacityResult, Diagnostics};
use crate::error::{Error, Result};
use crate::operator::{fidelity, ComplexMatrix, HermitianOperator, StateVector};
use crate::povm::Povm;
use crate::scalar::Real;

pub const UNITARY_TOL: f64 = 1e-10;
pub const COVARIANCE_TOL: f64 = 1e-9;
/// Orbit states with fidelity above `1 − ORBIT_MERGE_TOL` are merged.
pub const ORBIT_MERGE_TOL: f64 = 1e-8;
/// Seed grids for `d > 2` have at most this many points.
pub const SEED_GRID_CAP: usize = 100_000;
const REFINED_SEEDS: usize = 8;

/// One group element: `ρ ↦ U ρ U†`, or `ρ ↦ U ρ̄ U†` when `conjugate`, and
/// the outcome permutation `h ↦ permutation[h]` it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    pub unitary: ComplexMatrix<T>,
    pub conjugate: bool,
    pub permutation: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupAction<T> {
    elements: Vec<GroupElement<T>>,
    identity: usize,
}

impl<T: Real> GroupAction<T> {
    /// Checks unitarity, that every permutation is a bijection, that the
    /// identity element acts trivially on outcomes, and closure of the
    /// permutation part under composition.
    pub fn new(elements: Vec<GroupElement<T>>, identity: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("group"));
        }
        if identity >= elements.len() {
            return Err(Error::NotCovariant(format!(
                "identity index {identity} out of range for {} elements",
                elements.len()
            )));
        }
        let dim = elements[0].unitary.dim();
        let m = elements[0].permutation.len();
        for (g, el) in elements.iter().enumerate() {
            if el.unitary.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: el.unitary.dim(),
                });
            }
            let uu = &el.unitary * &el.unitary.adjoint();
            let dev = uu.max_abs_diff(&ComplexMatrix::identity(dim));
            if dev > T::tol(UNITARY_TOL) {
                return Err(Error::NotCovariant(format!(
                    "element {} is not unitary (deviation {dev:.3e})",
                    g + 1
                )));
            }
            let mut seen = vec![false; m];
            if el.permutation.len() != m || el.permutation.iter().any(|&k| k >= m || std::mem::replace(&mut seen[k], true)) {
                return Err(Error::NotCovariant(format!(
                    "permutation of element {} is not a bijection of {m} outcomes",
                    g + 1
                )));
            }
        }
        if elements[identity].permutation.iter().enumerate().any(|(k, &v)| k != v) {
            return Err(Error::NotCovariant("identity element permutes outcomes".into()));
        }
        let perms: Vec<&Vec<usize>> = elements.iter().map(|e| &e.permutation).collect();
        for a in &perms {
            for b in &perms {
                let composed: Vec<usize> = b.iter().map(|&k| a[k]).collect();
                if !perms.iter().any(|p| **p == composed) {
                    return Err(Error::NotCovariant(
                        "outcome permutations are not closed under composition".into(),
                    ));
                }
            }
        }
        Ok(Self { elements, identity })
    }

    pub fn elements(&self) -> &[GroupElement<T>] {
        &self.elements
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].unitary.dim()
    }

    /// `R_g(X)`
    pub fn act(&self, g: usize, x: &HermitianOperator<T>) -> HermitianOperator<T> {
        let el = &self.elements[g];
        if el.conjugate {
            x.conj().conjugate_by(&el.unitary)
        } else {
            x.conjugate_by(&el.unitary)
        }
    }

    /// Vector representative of `R_g(|ψ><ψ|)`.
    pub fn act_state(&self, g: usize, psi: &[Complex<T>]) -> StateVector<T> {
        let el = &self.elements[g];
        if el.conjugate {
            let c: StateVector<T> = psi.iter().map(|z| z.conj()).collect();
            el.unitary.apply(&c)
        } else {
            el.unitary.apply(psi)
        }
    }

    /// Checks `R_g(E_h) = E_{g·h}` for every element and outcome.
    pub fn verify_covariance(&self, povm: &Povm<T>) -> Result<()> {
        if povm.dim() != self.dim() {
            return Err(Error::DimMismatch {
                expected: povm.dim(),
                found: self.dim(),
            });
        }
        if self.elements[0].permutation.len() != povm.len() {
            return Err(Error::NotCovariant(format!(
                "permutations act on {} outcomes, POVM has {}",
                self.elements[0].permutation.len(),
                povm.len()
            )));
        }
        for (g, el) in self.elements.iter().enumerate() {
            for (h, e) in povm.elements().iter().enumerate() {
                let target = povm.element(el.permutation[h]);
                let dev = self.act(g, e).max_abs_diff(target);
                if dev > T::tol(COVARIANCE_TOL) {
                    return Err(Error::NotCovariant(format!(
                        "element {} maps outcome {} to {} with deviation {:.3e}",
                        g + 1,
                        h + 1,
                        el.permutation[h] + 1,
                        dev.to_f64_lossy()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Dimension of the space of Hermitian operators fixed by every element.
    pub fn fixed_point_dimension(&self) -> Result<usize> {
        let d = self.dim();
        let n = d * d;
        let basis = hermitian_basis::<T>(d);
        // Gram matrix of the stacked maps X ↦ R_g(X) − X
        let mut gram = vec![T::zero(); n * n];
        for g in 0..self.order() {
            let cols: Vec<Vec<T>> = basis
                .iter()
                .map(|b| {
                    let image = &self.act(g, b) - b;
                    coordinates(&image)
                })
                .collect();
            for a in 0..n {
                for c in 0..n {
                    let dot: T = cols[a].iter().zip(&cols[c]).map(|(x, y)| *x * *y).sum();
                    gram[a * n + c] = gram[a * n + c] + dot;
                }
            }
        }
        let m = ComplexMatrix::from_fn(n, |a, c| Complex::new(gram[a * n + c], T::zero()));
        let eig = HermitianOperator::new(m)?.eig()?;
        let scale = T::one().max(eig.values[0]);
        Ok(eig.values.iter().filter(|l| l.abs() <= T::tol(1e-9) * scale).count())
    }

    /// Irreducible when only multiples of the identity are fixed.
    pub fn check_irreducible(&self) -> Result<()> {
        let fixed_dim = self.fixed_point_dimension()?;
        if fixed_dim != 1 {
            return Err(Error::NotIrreducible { fixed_dim });
        }
        Ok(())
    }
}

/// Real orthogonal basis of the Hermitian `d×d` matrices.
fn hermitian_basis<T: Real>(d: usize) -> Vec<HermitianOperator<T>> {
    let mut out = Vec::with_capacity(d * d);
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    for k in 0..d {
        out.push(HermitianOperator::from_hermitian_unchecked(ComplexMatrix::from_fn(d, |a, b| {
            if a == k && b == k {
                one
            } else {
                Complex::new(T::zero(), T::zero())
            }
        })));
    }
    for a0 in 0..d {
        for b0 in a0 + 1..d {
            for z in [one, i] {
                out.push(HermitianOperator::from_hermitian_unchecked(ComplexMatrix::from_fn(d, |a, b| {
                    if a == a0 && b == b0 {
                        z
                    } else if a == b0 && b == a0 {
                        z.conj()
                    } else {
                        Complex::new(T::zero(), T::zero())
                    }
                })));
            }
        }
    }
    out
}

fn coordinates<T: Real>(x: &HermitianOperator<T>) -> Vec<T> {
    let d = x.dim();
    let m = x.matrix();
    let mut out: Vec<T> = (0..d).map(|k| m[(k, k)].re).collect();
    for a in 0..d {
        for b in a + 1..d {
            out.push(m[(a, b)].re);
            out.push(m[(a, b)].im);
        }
    }
    out
}

/// `H(Tr E_j / d) − H(<ψ|E_j|ψ>)`: the mutual information of the uniform
/// orbit ensemble seeded by `ψ`.
pub fn covariant_objective<T: Real>(povm: &Povm<T>, psi: &[Complex<T>]) -> T {
    let d = T::from_usize(povm.dim()).expect("dim");
    let out = shannon(povm.elements().iter().map(|e| e.trace() / d));
    let cond = shannon(povm.elements().iter().map(|e| e.expectation(psi).max(T::zero())));
    out - cond
}

/// `(θ points, φ points)` of the seed grid.
pub fn seed_grid_shape(dim: usize) -> (usize, usize) {
    if dim == 2 {
        return (32, 64);
    }
    let axes = chart_len(dim) as f64;
    let k = (SEED_GRID_CAP as f64).powf(1.0 / axes).floor().max(2.0) as usize;
    (k, k)
}

/// Capacity of a covariant POVM: grid over seeds, local refinement of the
/// best grid points, and the deduplicated orbit of the best seed.
pub fn capacity_covariant<T: Real>(povm: &Povm<T>, group: &GroupAction<T>) -> Result<CapacityResult<T>> {
    group.verify_covariance(povm)?;
    group.check_irreducible()?;
    let dim = povm.dim();
    let (nt, np) = seed_grid_shape(dim);
    let grid: Vec<Vec<T>> = chart_grid(dim, nt, np);
    let values: Vec<T> = grid
        .par_iter()
        .map(|x| covariant_objective(povm, &chart_state(x, dim)))
        .collect();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("finite objective"));
    let starts: Vec<usize> = order.into_iter().take(REFINED_SEEDS).collect();

    let refined: Vec<(Vec<T>, T, usize)> = starts
        .par_iter()
        .map(|&s| {
            let r = nelder_mead(
                |x| -covariant_objective(povm, &chart_state(x, dim)),
                &grid[s],
                T::lit(0.05),
                T::tol(1e-12),
                20_000,
            );
            (r.x, -r.value, r.evaluations)
        })
        .collect();
    let evaluations = refined.iter().map(|r| r.2).sum();
    let best = refined
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one seed");
    let seed = chart_state(&best.0, dim);

    let (states, weights) = orbit(group, &seed);
    let diagnostics = Diagnostics {
        iterations: evaluations,
        grid_points: grid.len(),
        restarts: REFINED_SEEDS,
        ..Diagnostics::default()
    };
    let mut result = CapacityResult::from_pure(
        povm,
        best.1.max(T::zero()),
        states,
        weights,
        CapacityMethod::CovariantSeed,
        true,
        diagnostics,
    )?;
    result.seed_state = Some(seed);
    Ok(result)
}

/// Distinct states of `{R_g(ψ)}` with their summed uniform weights.
pub fn orbit<T: Real>(group: &GroupAction<T>, seed: &[Complex<T>]) -> (Vec<StateVector<T>>, Vec<T>) {
    let w = T::one() / T::from_usize(group.order()).expect("order");
    let mut states: Vec<StateVector<T>> = Vec::new();
    let mut weights: Vec<T> = Vec::new();
    for g in 0..group.order() {
        let v = group.act_state(g, seed);
        match states.iter().position(|s| fidelity(s, &v) >= T::one() - T::tol(ORBIT_MERGE_TOL)) {
            Some(k) => weights[k] = weights[k] + w,
            None => {
                states.push(v);
                weights.push(w);
            }
        }
    }
    (states, weights)
}
