//! Capacity of a measurement: the largest mutual information between a
//! classical input, encoded in quantum states, and the POVM outcome.
//!
//! Exact paths exist for two-outcome POVMs (closed form), commuting POVMs
//! (Blahut–Arimoto on the induced classical channel) and POVMs covariant
//! under an irreducible finite group (seed search over one orbit). Anything
//! else goes through a multi-start heuristic whose value is a lower bound.

pub mod binary;
pub mod blahut;
pub mod commuting;
pub mod covariant;
pub mod general;
pub mod info;
pub mod search;

pub use binary::{binary_capacity, binary_entropy};
pub use blahut::{blahut_arimoto, BlahutArimoto};
pub use commuting::capacity_commuting;
pub use covariant::{capacity_covariant, covariant_objective, GroupAction, GroupElement};
pub use general::{capacity_general, DEFAULT_RESTARTS};
pub use info::{holevo_of_rescaled_povm, lower_bound, mutual_information, subentropy, subentropy_of_spectrum};

use std::fmt;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, StateVector};
use crate::povm::{born_matrix, Ensemble, Povm};
use crate::scalar::Real;

/// Default Blahut–Arimoto tolerance in bits.
pub const BA_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CapacityMethod {
    BinaryClosedForm,
    CommutingBlahutArimoto,
    CovariantSeed,
    GeneralAlternating,
}

impl CapacityMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BinaryClosedForm => "binary-closed-form",
            Self::CommutingBlahutArimoto => "commuting-BA",
            Self::CovariantSeed => "covariant-seed",
            Self::GeneralAlternating => "general-alternating",
        }
    }
}

impl fmt::Display for CapacityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which solver [`capacity`] may use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MethodChoice {
    /// Binary or commuting when applicable, then covariant when a verified
    /// group is supplied, else general.
    #[default]
    Auto,
    Commuting,
    Covariant,
    General,
}

#[derive(Clone, Debug)]
pub struct CapacityOptions<T> {
    pub method: MethodChoice,
    pub group: Option<GroupAction<T>>,
    pub restarts: usize,
    pub seed: u64,
    pub tol: T,
}

impl<T: Real> Default for CapacityOptions<T> {
    fn default() -> Self {
        Self {
            method: MethodChoice::Auto,
            group: None,
            restarts: DEFAULT_RESTARTS,
            seed: 0,
            tol: T::tol(BA_TOL),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Diagnostics<T> {
    /// Blahut–Arimoto iterations, local-search evaluations or alternation
    /// rounds, depending on the method.
    pub iterations: usize,
    pub restarts: usize,
    pub grid_points: usize,
    /// Last improvement of the general path.
    pub improvement: T,
    /// Remaining Blahut–Arimoto gap.
    pub bracket: T,
    pub monotone: bool,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CapacityResult<T> {
    pub bits: T,
    pub ensemble: Ensemble<T>,
    pub state_vectors: Vec<StateVector<T>>,
    pub method: CapacityMethod,
    pub certified: bool,
    pub seed_state: Option<StateVector<T>>,
    pub diagnostics: Diagnostics<T>,
    /// Subentropy lower bound.
    pub lower_bound: T,
    /// Rescaled-POVM Holevo quantity; `None` when an element has zero trace.
    pub holevo: Option<T>,
}

impl<T: Real> CapacityResult<T> {
    pub(crate) fn from_pure(
        povm: &Povm<T>,
        bits: T,
        vectors: Vec<StateVector<T>>,
        weights: Vec<T>,
        method: CapacityMethod,
        certified: bool,
        diagnostics: Diagnostics<T>,
    ) -> Result<Self> {
        let (vectors, weights): (Vec<_>, Vec<_>) = vectors
            .into_iter()
            .zip(weights)
            .filter(|(_, w)| *w > T::zero())
            .unzip();
        let total: T = weights.iter().copied().sum();
        let weights: Vec<T> = weights.into_iter().map(|w| w / total).collect();
        let ensemble = Ensemble::pure(&vectors, weights)?;
        Ok(Self {
            bits,
            ensemble,
            state_vectors: vectors,
            method,
            certified,
            seed_state: None,
            diagnostics,
            lower_bound: lower_bound(povm)?,
            holevo: holevo_of_rescaled_povm(povm).ok(),
        })
    }

    /// Mutual information of the returned ensemble, recomputed.
    pub fn ensemble_information(&self, povm: &Povm<T>) -> Result<T> {
        Ok(mutual_information(&born_matrix(&self.ensemble, povm)?))
    }
}

/// Two-outcome POVMs: the extreme eigenvectors of `E_1` are the only useful
/// inputs, giving a binary channel with `α = λ_max(E_1)`, `β = λ_min(E_1)`.
pub fn capacity_binary<T: Real>(povm: &Povm<T>) -> Result<CapacityResult<T>> {
    if povm.len() != 2 {
        return Err(Error::DimMismatch {
            expected: 2,
            found: povm.len(),
        });
    }
    let eig = povm.element(0).eig()?;
    let (alpha, va) = eig.max();
    let (beta, vb) = eig.min();
    let clamp = |x: T| x.max(T::zero()).min(T::one());
    let (bits, p) = binary_capacity(clamp(alpha), clamp(beta))?;
    CapacityResult::from_pure(
        povm,
        bits,
        vec![va.clone(), vb.clone()],
        vec![p, T::one() - p],
        CapacityMethod::BinaryClosedForm,
        true,
        Diagnostics::default(),
    )
}

/// Dispatches to the most specific solver the options allow.
pub fn capacity<T: Real>(povm: &Povm<T>, options: &CapacityOptions<T>) -> Result<CapacityResult<T>> {
    let commuting = || {
        let (_, _, norm) = povm.max_commutator();
        norm <= T::tol(commuting::COMMUTATOR_TOL)
    };
    match options.method {
        MethodChoice::Commuting => capacity_commuting(povm, options.tol),
        MethodChoice::General => capacity_general(povm, options.restarts, options.seed),
        MethodChoice::Covariant => {
            let group = options
                .group
                .as_ref()
                .ok_or_else(|| Error::NotCovariant("no group action supplied".into()))?;
            capacity_covariant(povm, group)
        }
        MethodChoice::Auto => {
            if povm.len() == 2 {
                return capacity_binary(povm);
            }
            if commuting() {
                return capacity_commuting(povm, options.tol);
            }
            let mut warnings = Vec::new();
            if let Some(group) = &options.group {
                match capacity_covariant(povm, group) {
                    Ok(r) => return Ok(r),
                    Err(e @ (Error::NotCovariant(_) | Error::NotIrreducible { .. } | Error::DimMismatch { .. })) => {
                        warnings.push(format!("group action rejected ({e}); using the general solver"));
                    }
                    Err(e) => return Err(e),
                }
            }
            let mut r = capacity_general(povm, options.restarts, options.seed)?;
            r.diagnostics.warnings = warnings;
            Ok(r)
        }
    }
}

/// The pure density operators of a result's ensemble.
pub fn pure_states<T: Real>(r: &CapacityResult<T>) -> Vec<HermitianOperator<T>> {
    r.state_vectors.iter().map(|v| HermitianOperator::projector(v)).collect()
}
