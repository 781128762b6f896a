//! Optimal signal states for a fixed quantum detector.
//!
//! Given a POVM `{E_j}`, the crate computes the best achievable performance
//! and the encodings that reach it for three readout tasks:
//!
//! - Bayes-cost discrimination (minimum error as the 0/1-cost case), solved
//!   exactly by enumerating outcome groupings and taking maximal
//!   eigenvectors of the per-message gain operators ([`bayes`]);
//! - unambiguous discrimination, solved exactly by enumerating groupings into
//!   conclusive and inconclusive sets and projecting onto kernels
//!   ([`unambiguous`]);
//! - the capacity of the measurement, i.e. the maximal input/output mutual
//!   information ([`capacity`]), with exact paths for binary, commuting and
//!   group-covariant detectors and a multi-start heuristic otherwise.
//!
//! The noisy qubit SIC-POVM and its closed-form results live in [`sic`].
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The `*64`
//! aliases below fix the scalar to `f64`, which is what the tolerances in
//! this crate are tuned for.

pub mod bayes;
pub mod capacity;
mod enumerate;
pub mod error;
pub mod io;
pub mod operator;
pub mod povm;
pub mod random;
pub mod scalar;
pub mod sic;
pub mod unambiguous;

pub use error::{Error, Result};
pub use scalar::Real;

pub use bayes::{BayesSolution, CostMatrix, RegionMap};
pub use capacity::{CapacityMethod, CapacityOptions, CapacityResult, GroupAction};
pub use operator::{BlochVector, ComplexMatrix, EigenDecomposition, HermitianOperator};
pub use povm::{Ensemble, Grouping, JointDistribution, Povm};
pub use sic::NoisySicQubit;
pub use unambiguous::UnambiguousSolution;

pub type Operator64 = HermitianOperator<f64>;
pub type Operator32 = HermitianOperator<f32>;
pub type Matrix64 = ComplexMatrix<f64>;
pub type Povm64 = Povm<f64>;
pub type Povm32 = Povm<f32>;
pub type Ensemble64 = Ensemble<f64>;
pub type Joint64 = JointDistribution<f64>;
pub type Bloch64 = BlochVector<f64>;
pub type Cost64 = CostMatrix<f64>;
pub type BayesSolution64 = BayesSolution<f64>;
pub type RegionMap64 = RegionMap<f64>;
pub type UnambiguousSolution64 = UnambiguousSolution<f64>;
pub type CapacityResult64 = CapacityResult<f64>;
pub type GroupAction64 = GroupAction<f64>;
pub type NoisySic64 = NoisySicQubit<f64>;
