//! Reverse Bayes-cost discrimination: the best encoding for a fixed POVM.
//!
//! For a cost matrix normalized to gains `B_ij ∈ [0, 1]` the receiver never
//! needs a randomized decision rule, so the optimum is a maximum over the
//! finitely many deterministic groupings `α` of the outcomes into hypotheses:
//!
//! ```text
//! B(P) = max_α Σ_i π_i λ_max(Σ_j B_ij Ẽ_j^α)
//! ```
//!
//! and message `i` is encoded in a maximal eigenvector of its gain operator.

mod regions;

pub use regions::{map_regions, Junction, RegionCell, RegionClass, RegionMap, REGION_CELL_CAP};

use crate::enumerate::argmax_groupings;
use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, StateVector};
use crate::povm::{group_povm, normalize_priors, Grouping, Povm, ENUMERATION_CAP};
use crate::scalar::Real;

/// Gains closer than this to the best are treated as ties.
pub const TIE_TOL: f64 = 1e-12;

/// Cost matrix `C_ij` (message `i`, hypothesis `j`) and its normalized gains.
#[derive(Clone, Debug, PartialEq)]
pub struct CostMatrix<T> {
    cost: Vec<Vec<T>>,
    gain: Vec<Vec<T>>,
    constant: bool,
}

impl<T: Real> CostMatrix<T> {
    /// Accepts any finite, non-negative rectangular matrix. Gains are
    /// `1 − (C − min C)/(max C − min C)`; a constant matrix `c` gets the gain
    /// `1 − c` everywhere.
    pub fn new(cost: Vec<Vec<T>>) -> Result<Self> {
        let rows = cost.len();
        let cols = cost.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidCost("empty matrix".into()));
        }
        if cost.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidCost("rows have different lengths".into()));
        }
        let flat = cost.iter().flatten();
        if flat.clone().any(|c| !c.is_finite() || *c < T::zero()) {
            return Err(Error::InvalidCost(
                "entries must be finite and non-negative".into(),
            ));
        }
        let min = flat.clone().copied().fold(T::infinity(), T::min);
        let max = flat.copied().fold(T::neg_infinity(), T::max);
        let constant = max <= min;
        let gain = cost
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&c| {
                        if constant {
                            T::one() - c
                        } else {
                            T::one() - (c - min) / (max - min)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            cost,
            gain,
            constant,
        })
    }

    /// `C_ij = 1 − δ_ij`
    pub fn min_error(n: usize) -> Self {
        let cost = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::zero() } else { T::one() })
                    .collect()
            })
            .collect();
        Self::new(cost).expect("0/1 cost is valid")
    }

    pub fn messages(&self) -> usize {
        self.cost.len()
    }

    pub fn hypotheses(&self) -> usize {
        self.cost[0].len()
    }

    pub fn cost(&self, i: usize, j: usize) -> T {
        self.cost[i][j]
    }

    pub fn gain(&self, i: usize, j: usize) -> T {
        self.gain[i][j]
    }

    pub fn is_constant(&self) -> bool {
        self.constant
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.cost
    }

    /// `Σ_j B_ij Ẽ_j` for each message `i`.
    pub fn gain_operators(&self, effective: &[HermitianOperator<T>]) -> Vec<HermitianOperator<T>> {
        let dim = effective[0].dim();
        self.gain
            .iter()
            .map(|row| {
                row.iter()
                    .zip(effective)
                    .filter(|(b, _)| **b != T::zero())
                    .fold(HermitianOperator::zero(dim), |acc, (&b, e)| &acc + &e.scale(b))
            })
            .collect()
    }
}

/// Optimal grouping, encoding and gain for one Bayes problem.
#[derive(Clone, Debug)]
pub struct BayesSolution<T> {
    pub grouping: Grouping,
    /// Coarse-grained POVM, one element per hypothesis.
    pub effective_povm: Povm<T>,
    pub priors: Vec<T>,
    /// Unit vectors `ψ_i`; the signal state of message `i` is `|ψ_i><ψ_i|`.
    pub signal_vectors: Vec<StateVector<T>>,
    pub signal_states: Vec<HermitianOperator<T>>,
    /// `s_i = λ_max(Σ_j B_ij Ẽ_j)`
    pub score_vector: Vec<T>,
    pub per_message_operators: Vec<HermitianOperator<T>>,
    /// Normalized gain `π · s`; the success probability for the 0/1 cost.
    pub gain: T,
    /// `Σ C_ij P_ij` on the caller's cost scale.
    pub original_cost: T,
}

impl<T: Real> BayesSolution<T> {
    /// Joint distribution `P_ij = π_i Tr(ρ_i Ẽ_j)` of the solution.
    pub fn joint(&self) -> Vec<Vec<T>> {
        self.signal_states
            .iter()
            .zip(&self.priors)
            .map(|(rho, &pi)| {
                self.effective_povm
                    .elements()
                    .iter()
                    .map(|e| pi * rho.trace_product(e))
                    .collect()
            })
            .collect()
    }
}

fn effective_elements<T: Real>(povm: &Povm<T>, grouping: &Grouping) -> Vec<HermitianOperator<T>> {
    let mut out = vec![HermitianOperator::zero(povm.dim()); grouping.labels()];
    for (k, &l) in grouping.assignment().iter().enumerate() {
        out[l] = &out[l] + povm.element(k);
    }
    out
}

/// Exact reverse Bayes problem by exhaustive grouping enumeration.
///
/// Ties between groupings are broken in favour of the first one in
/// lexicographic order.
pub fn solve_bayes<T: Real>(povm: &Povm<T>, priors: &[T], cost: &CostMatrix<T>) -> Result<BayesSolution<T>> {
    solve_bayes_capped(povm, priors, cost, ENUMERATION_CAP)
}

pub fn solve_bayes_capped<T: Real>(
    povm: &Povm<T>,
    priors: &[T],
    cost: &CostMatrix<T>,
    cap: u64,
) -> Result<BayesSolution<T>> {
    let priors = normalize_priors(priors)?;
    if priors.len() != cost.messages() {
        return Err(Error::DimMismatch {
            expected: cost.messages(),
            found: priors.len(),
        });
    }
    let labels = cost.hypotheses();
    let grouping = if cost.is_constant() {
        Grouping::trivial(povm.len(), labels)
    } else {
        let best = argmax_groupings(povm.len(), labels, cap, T::tol(TIE_TOL), |g| {
            let ops = cost.gain_operators(&effective_elements(povm, g));
            let mut score = T::zero();
            for (op, &pi) in ops.iter().zip(&priors) {
                score = score + pi * op.lambda_max()?.0;
            }
            Ok(Some(score))
        })?;
        best.expect("at least one grouping").grouping
    };
    assemble(povm, priors, cost, grouping)
}

fn assemble<T: Real>(
    povm: &Povm<T>,
    priors: Vec<T>,
    cost: &CostMatrix<T>,
    grouping: Grouping,
) -> Result<BayesSolution<T>> {
    let effective_povm = group_povm(povm, &grouping)?;
    let per_message_operators = cost.gain_operators(effective_povm.elements());
    let mut score_vector = Vec::with_capacity(priors.len());
    let mut signal_vectors = Vec::with_capacity(priors.len());
    for op in &per_message_operators {
        let (l, v) = op.lambda_max()?;
        score_vector.push(l);
        signal_vectors.push(v);
    }
    let signal_states: Vec<_> = signal_vectors
        .iter()
        .map(|v| HermitianOperator::projector(v))
        .collect();
    let gain = priors.iter().zip(&score_vector).map(|(&p, &s)| p * s).sum();
    let mut original_cost = T::zero();
    for (i, (rho, &pi)) in signal_states.iter().zip(&priors).enumerate() {
        for (j, e) in effective_povm.elements().iter().enumerate() {
            original_cost = original_cost + cost.cost(i, j) * pi * rho.trace_product(e);
        }
    }
    Ok(BayesSolution {
        grouping,
        effective_povm,
        priors,
        signal_vectors,
        signal_states,
        score_vector,
        per_message_operators,
        gain,
        original_cost,
    })
}

/// Minimum-error discrimination: [`solve_bayes`] with `C_ij = 1 − δ_ij`.
/// The gain is the success probability.
pub fn min_error<T: Real>(povm: &Povm<T>, priors: &[T]) -> Result<BayesSolution<T>> {
    solve_bayes(povm, priors, &CostMatrix::min_error(priors.len()))
}

/// Binary minimum-error success probability
/// `max_α π₁ λ_max(Ẽ^α) + π₂ (1 − λ_min(Ẽ^α))` and the maximizing grouping
/// (label 0 collects `Ẽ^α`).
pub fn binary_success<T: Real>(povm: &Povm<T>, priors: [T; 2]) -> Result<(T, Grouping)> {
    let priors = normalize_priors(&priors)?;
    let best = argmax_groupings(povm.len(), 2, ENUMERATION_CAP, T::tol(TIE_TOL), |g| {
        let e = effective_elements(povm, g);
        let eig = e[0].eig()?;
        let p = priors[0] * eig.max().0 + priors[1] * (T::one() - eig.min().0);
        Ok(Some(p))
    })?
    .expect("at least one grouping");
    Ok((best.score, best.grouping))
}

/// Prior `π₁` at and above which the trivial POVM `{I, 0}` is at least as good
/// as measuring `{E, I − E}`. Returns 1 when `λ_max(E) = 1`.
pub fn trivial_threshold<T: Real>(e: &HermitianOperator<T>) -> Result<T> {
    let eig = e.eig()?;
    let (hi, lo) = (eig.max().0, eig.min().0);
    let tol = T::tol(1e-9);
    if lo < -tol || hi > T::one() + tol {
        return Err(Error::OutOfRange(format!(
            "operator spectrum [{lo}, {hi}] not within [0, 1]"
        )));
    }
    if hi >= T::one() - T::tol(1e-12) {
        return Ok(T::one());
    }
    let a = T::one() - lo;
    let b = T::one() - hi;
    Ok(a / (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sic::sic_qubit;
    use rand::{Rng, SeedableRng};

    const R3: f64 = 1.7320508075688772;

    #[test]
    fn sic_min_error_uniform() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let s2 = min_error(&povm, &[0.5, 0.5]).unwrap();
        assert!((s2.gain - (0.5 + 0.5 / R3)).abs() < 1e-12);
        assert_eq!(s2.grouping.assignment(), &[0, 0, 1, 1]);

        let s3 = min_error(&povm, &[1.0 / 3.0; 3]).unwrap();
        assert!((s3.gain - (0.5 + 1.0 / (6.0 * R3))).abs() < 1e-12);
        let mut sizes: Vec<usize> = s3.grouping.groups().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 1, 2]);

        let s6 = min_error(&povm, &[1.0 / 6.0; 6]).unwrap();
        assert!((s6.gain - 1.0 / 3.0).abs() < 1e-12);
        let nonempty = s6.grouping.groups().iter().filter(|g| !g.is_empty()).count();
        assert_eq!(nonempty, 4);
    }

    #[test]
    fn noisy_sic_min_error() {
        let povm = sic_qubit(0.5).unwrap().povm;
        let s = min_error(&povm, &[0.5, 0.5]).unwrap();
        assert!((s.gain - (0.5 + 0.5 / (2.0 * R3))).abs() < 1e-12);
        let s = min_error(&povm, &[0.25; 4]).unwrap();
        assert!((s.gain - 1.5 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn projective_basis_perfect() {
        let povm = Povm::new(vec![
            HermitianOperator::diag(&[1.0, 0.0]),
            HermitianOperator::diag(&[0.0, 1.0]),
        ])
        .unwrap();
        let s = min_error(&povm, &[0.7, 0.3]).unwrap();
        assert!(f64::abs(s.gain - 1.0) < 1e-14);
        assert!(f64::abs(s.original_cost) < 1e-14);
        assert!(f64::abs(s.signal_states[0].matrix()[(0, 0)].re - 1.0) < 1e-14);
        assert!(f64::abs(s.signal_states[1].matrix()[(1, 1)].re - 1.0) < 1e-14);
    }

    #[test]
    fn cost_scaling_is_reported_on_caller_scale() {
        let povm = sic_qubit(1.0).unwrap().povm;
        // 0/1 cost scaled by 5 and shifted by 2
        let cost = CostMatrix::new(vec![vec![2.0, 7.0], vec![7.0, 2.0]]).unwrap();
        let s = solve_bayes(&povm, &[0.5, 0.5], &cost).unwrap();
        let ps = 0.5 + 0.5 / R3;
        assert!((s.gain - ps).abs() < 1e-12);
        assert!((s.original_cost - (2.0 + 5.0 * (1.0 - ps))).abs() < 1e-12);
    }

    #[test]
    fn constant_cost_short_circuits() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let cost = CostMatrix::new(vec![vec![0.25; 3]; 2]).unwrap();
        let s = solve_bayes(&povm, &[0.5, 0.5], &cost).unwrap();
        assert!(f64::abs(s.gain - 0.75) < 1e-15);
        assert!(f64::abs(s.original_cost - 0.25) < 1e-15);
    }

    #[test]
    fn rectangular_cost_uses_hypothesis_labels() {
        let povm = sic_qubit(1.0).unwrap().povm;
        // three hypotheses for two messages; the third is "abstain" at half cost
        let cost = CostMatrix::new(vec![vec![0.0, 1.0, 0.5], vec![1.0, 0.0, 0.5]]).unwrap();
        let s = solve_bayes(&povm, &[0.5, 0.5], &cost).unwrap();
        assert_eq!(s.grouping.labels(), 3);
        assert_eq!(s.effective_povm.len(), 3);
        assert!(s.gain >= 0.5 + 0.5 / R3 - 1e-12);
    }

    #[test]
    fn invalid_costs() {
        assert!(CostMatrix::new(vec![vec![0.0, -1.0]]).is_err());
        assert!(CostMatrix::new(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        assert!(CostMatrix::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn binary_success_closed_form() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let (p, _) = binary_success(&povm, [0.5, 0.5]).unwrap();
        assert!((p - (1.0 + 1.0 / R3) / 2.0).abs() < 1e-12);

        let pi1 = 1.0 - 1e-15;
        let (p, g) = binary_success(&povm, [pi1, 1.0 - pi1]).unwrap();
        assert!((p - pi1).abs() < 1e-14);
        assert_eq!(g.assignment(), &[0, 0, 0, 0]);
    }

    #[test]
    fn binary_success_matches_general_solver() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let povm = crate::random::random_povm::<f64, _>(&mut rng, 2, 3);
            let pi1 = rng.random_range(0.05..0.95);
            let (p, _) = binary_success(&povm, [pi1, 1.0 - pi1]).unwrap();
            let s = min_error(&povm, &[pi1, 1.0 - pi1]).unwrap();
            assert!((p - s.gain).abs() < 1e-10);
        }
    }

    #[test]
    fn equal_prior_binary_is_spread_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(78);
        for _ in 0..10 {
            let povm = crate::random::random_povm::<f64, _>(&mut rng, 3, 3);
            let (p, _) = binary_success(&povm, [0.5, 0.5]).unwrap();
            let best_spread = crate::povm::enumerate_groupings(3, 2)
                .unwrap()
                .map(|g| effective_elements(&povm, &g)[0].spread().unwrap())
                .fold(0.0, f64::max);
            assert!((p - 0.5 * (1.0 + best_spread)).abs() < 1e-10);
        }
    }

    #[test]
    fn trivial_threshold_examples() {
        let t = trivial_threshold(&HermitianOperator::diag(&[0.9, 0.3])).unwrap();
        assert!(f64::abs(t - 0.875) < 1e-14);
        assert_eq!(trivial_threshold(&HermitianOperator::diag(&[1.0, 0.0])).unwrap(), 1.0);
        let half = trivial_threshold(&HermitianOperator::<f64>::identity(2).scale(0.5)).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
        assert!(trivial_threshold(&HermitianOperator::diag(&[1.2, 0.0])).is_err());
    }

    #[test]
    fn trivial_threshold_matches_prior_grid() {
        let e = HermitianOperator::diag(&[0.9, 0.3]);
        let (hi, lo) = (0.9, 0.3);
        for k in 1..1000 {
            let pi1 = k as f64 / 1000.0;
            let measure = pi1 * hi + (1.0 - pi1) * (1.0 - lo);
            let trivial = pi1;
            let t = trivial_threshold(&e).unwrap();
            if pi1 > t + 1e-12 {
                assert!(trivial >= measure - 1e-12);
            } else if pi1 < t - 1e-12 {
                assert!(trivial < measure);
            }
        }
    }

    #[test]
    fn flat_prior_subadditivity() {
        let povm = sic_qubit(0.8).unwrap().povm;
        for j in 0..4 {
            for k in 0..4 {
                if j == k {
                    continue;
                }
                let joint = (povm.element(j) + povm.element(k)).lambda_max().unwrap().0;
                let sep = povm.element(j).lambda_max().unwrap().0 + povm.element(k).lambda_max().unwrap().0;
                assert!(joint <= sep + 1e-12);
            }
        }
    }

    #[test]
    fn signal_states_are_pure_eigenstates() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let d = rng.random_range(2..=3);
            let povm = crate::random::random_povm::<f64, _>(&mut rng, d, 3);
            let priors = crate::random::priors::<f64, _>(&mut rng, 3);
            let s = min_error(&povm, &priors).unwrap();
            for (i, rho) in s.signal_states.iter().enumerate() {
                let eig = rho.eig().unwrap();
                assert!((eig.values[0] - 1.0).abs() < 1e-9);
                assert!(eig.values[1].abs() < 1e-9);
                let v = &s.signal_vectors[i];
                let av = s.per_message_operators[i].matrix().apply(v);
                let res: f64 = av
                    .iter()
                    .zip(v)
                    .map(|(a, x)| (a - x * s.score_vector[i]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(res < 1e-9);
            }
            let recomputed: f64 = s.joint().iter().enumerate().map(|(i, row)| row[i]).sum();
            assert!((recomputed - s.gain).abs() < 1e-10);
        }
    }

    #[test]
    fn gain_is_max_of_linear_functions_along_a_prior_slice() {
        let povm = sic_qubit(0.7).unwrap().povm;
        let cost = CostMatrix::min_error(3);
        let scores: Vec<Vec<f64>> = crate::povm::enumerate_groupings(4, 3)
            .unwrap()
            .map(|g| {
                cost.gain_operators(&effective_elements(&povm, &g))
                    .iter()
                    .map(|o| o.lambda_max().unwrap().0)
                    .collect()
            })
            .collect();
        for k in 1..40 {
            let t = k as f64 / 40.0;
            let pi = [0.6 * t + 0.1, 0.3, 0.6 - 0.6 * t];
            let s = min_error(&povm, &pi).unwrap();
            let lin = scores
                .iter()
                .map(|sv| sv.iter().zip(&pi).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::MIN, f64::max);
            assert!((s.gain - lin).abs() < 1e-12);
        }
    }
}
