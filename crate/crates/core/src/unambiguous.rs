//! Reverse unambiguous discrimination: the best zero-error encoding for a
//! fixed POVM.
//!
//! The outcomes are grouped into `N` conclusive elements `Ẽ_1..Ẽ_N` and one
//! inconclusive element `Ẽ_?`. Message `i` must never trigger another
//! conclusive answer, so its state lives in
//! `K_i = ker(Σ_{j≠i} Ẽ_j)`, and the best such state is the top eigenvector
//! of `Ẽ_i` compressed onto `K_i`.

use num_complex::Complex;
use num_traits::Zero;

use crate::enumerate::argmax_groupings;
use crate::error::{Error, Result};
use crate::operator::{ComplexMatrix, HermitianOperator, StateVector};
use crate::povm::{enumerate_groupings_capped, normalize_priors, Grouping, Povm, ENUMERATION_CAP};
use crate::scalar::Real;

const TIE_TOL: f64 = 1e-12;

/// Success probabilities at or below this count as "nothing identified".
pub const TRIVIAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct UnambiguousSolution<T> {
    /// Label `i < N` is the conclusive element of message `i` (caller order);
    /// label `N` is the inconclusive element.
    pub grouping: Grouping,
    /// Conclusive elements `Ẽ_i` followed by `Ẽ_?`.
    pub effective: Vec<HermitianOperator<T>>,
    /// Projectors onto `K_i`, in message order.
    pub kernels: Vec<HermitianOperator<T>>,
    pub signal_vectors: Vec<StateVector<T>>,
    pub signal_states: Vec<HermitianOperator<T>>,
    /// Scores sorted in descending order.
    pub score_vector: Vec<T>,
    /// Score of each message, in caller order.
    pub message_scores: Vec<T>,
    /// `pairing[i]` is the label of the grouping as enumerated that message
    /// `i` was matched to.
    pub pairing: Vec<usize>,
    pub p_success: T,
}

impl<T: Real> UnambiguousSolution<T> {
    /// Messages whose conclusive element can never fire on their state.
    pub fn never_identified(&self) -> Vec<usize> {
        self.message_scores
            .iter()
            .enumerate()
            .filter(|(_, s)| **s <= T::tol(TRIVIAL_TOL))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Kernel data of one grouping: per conclusive label the kernel basis and
/// the compressed top eigenpair.
struct Evaluated<T> {
    effective: Vec<HermitianOperator<T>>,
    bases: Vec<Vec<StateVector<T>>>,
    scores: Vec<T>,
    vectors: Vec<StateVector<T>>,
}

fn evaluate<T: Real>(povm: &Povm<T>, grouping: &Grouping, n: usize) -> Result<Option<Evaluated<T>>> {
    let dim = povm.dim();
    let mut effective = vec![HermitianOperator::zero(dim); n + 1];
    for (k, &l) in grouping.assignment().iter().enumerate() {
        effective[l] = &effective[l] + povm.element(k);
    }
    let conclusive = HermitianOperator::sum_of(dim, &effective[..n]);
    let mut bases = Vec::with_capacity(n);
    for e in &effective[..n] {
        let others = &conclusive - e;
        let basis = others.kernel_basis(others.default_kernel_tol())?;
        if basis.is_empty() {
            return Ok(None);
        }
        bases.push(basis);
    }
    let mut scores = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for (e, basis) in effective.iter().zip(&bases) {
        let (s, v) = compressed_top(e, basis)?;
        scores.push(s);
        vectors.push(v);
    }
    Ok(Some(Evaluated {
        effective,
        bases,
        scores,
        vectors,
    }))
}

/// Top eigenpair of `Q† E Q`, lifted back by `Q`.
fn compressed_top<T: Real>(e: &HermitianOperator<T>, basis: &[StateVector<T>]) -> Result<(T, StateVector<T>)> {
    let k = basis.len();
    let eq: Vec<StateVector<T>> = basis.iter().map(|q| e.matrix().apply(q)).collect();
    let small = ComplexMatrix::from_fn(k, |a, b| crate::operator::inner(&basis[a], &eq[b]));
    let small = HermitianOperator::new(small).unwrap_or_else(|_| HermitianOperator::zero(k));
    let (s, u) = small.lambda_max()?;
    let dim = e.dim();
    let mut v = vec![Complex::zero(); dim];
    for (q, c) in basis.iter().zip(&u) {
        for (x, y) in v.iter_mut().zip(q) {
            *x = *x + y * c;
        }
    }
    Ok((s.max(T::zero()), v))
}

fn sorted_desc<T: Real>(v: &[T]) -> Vec<T> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    s
}

/// Stable descending order of `v`, as indices.
fn rank_desc<T: Real>(v: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).expect("finite"));
    idx
}

/// Exact reverse unambiguous discrimination over all `(N+1)^M` groupings.
///
/// Scores are sorted in descending order and paired with the priors sorted
/// the same way, so callers need not order their messages by probability.
pub fn solve_unambiguous<T: Real>(povm: &Povm<T>, priors: &[T]) -> Result<UnambiguousSolution<T>> {
    solve_unambiguous_capped(povm, priors, ENUMERATION_CAP)
}

pub fn solve_unambiguous_capped<T: Real>(
    povm: &Povm<T>,
    priors: &[T],
    cap: u64,
) -> Result<UnambiguousSolution<T>> {
    let priors = normalize_priors(priors)?;
    let n = priors.len();
    let sorted_priors = sorted_desc(&priors);
    let best = argmax_groupings(povm.len(), n + 1, cap, T::tol(TIE_TOL), |g| {
        Ok(evaluate(povm, g, n)?.map(|ev| {
            sorted_desc(&ev.scores)
                .iter()
                .zip(&sorted_priors)
                .map(|(&s, &pi)| s * pi)
                .sum::<T>()
        }))
    })?;
    let best = match best {
        Some(b) if b.score > T::tol(TRIVIAL_TOL) => b,
        _ => return Err(Error::Infeasible),
    };
    let ev = evaluate(povm, &best.grouping, n)?.expect("winner is feasible");

    // message of prior rank r takes the element of score rank r
    let by_prior = rank_desc(&priors);
    let by_score = rank_desc(&ev.scores);
    let mut pairing = vec![0; n];
    for (m, l) in by_prior.into_iter().zip(by_score) {
        pairing[m] = l;
    }
    let mut perm = vec![0; n + 1];
    for (m, &l) in pairing.iter().enumerate() {
        perm[l] = m;
    }
    perm[n] = n;
    let grouping = best.grouping.relabel(&perm);

    let pick = |l: usize| pairing[l];
    let effective: Vec<_> = (0..n)
        .map(|m| ev.effective[pick(m)].clone())
        .chain(std::iter::once(ev.effective[n].clone()))
        .collect();
    let kernels = (0..n)
        .map(|m| {
            let mut p = HermitianOperator::zero(povm.dim());
            for q in &ev.bases[pick(m)] {
                p = &p + &HermitianOperator::projector(q);
            }
            p
        })
        .collect();
    let signal_vectors: Vec<_> = (0..n).map(|m| ev.vectors[pick(m)].clone()).collect();
    let signal_states = signal_vectors.iter().map(|v| HermitianOperator::projector(v)).collect();
    let message_scores: Vec<T> = (0..n).map(|m| ev.scores[pick(m)]).collect();
    let p_success = priors.iter().zip(&message_scores).map(|(&p, &s)| p * s).sum();

    Ok(UnambiguousSolution {
        grouping,
        effective,
        kernels,
        signal_vectors,
        signal_states,
        score_vector: sorted_desc(&ev.scores),
        message_scores,
        pairing,
        p_success,
    })
}

/// A grouping with nontrivial kernels for every message.
#[derive(Clone, Debug)]
pub struct FeasibleGrouping<T> {
    pub grouping: Grouping,
    pub kernel_ranks: Vec<usize>,
    pub scores: Vec<T>,
}

/// Groupings into `n` conclusive elements plus `?` in which every message can
/// be identified: all kernels are nontrivial and every compressed score is
/// positive.
pub fn feasible_groupings<T: Real>(povm: &Povm<T>, n: usize) -> Result<Vec<FeasibleGrouping<T>>> {
    let mut out = Vec::new();
    for g in enumerate_groupings_capped(povm.len(), n + 1, ENUMERATION_CAP)? {
        if let Some(ev) = evaluate(povm, &g, n)? {
            if ev.scores.iter().all(|&s| s > T::tol(TRIVIAL_TOL)) {
                out.push(FeasibleGrouping {
                    kernel_ranks: ev.bases.iter().map(Vec::len).collect(),
                    scores: ev.scores,
                    grouping: g,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{state_to_bloch, BlochVector};
    use crate::sic::sic_qubit;
    use rand::{Rng, SeedableRng};

    fn basis_povm() -> Povm<f64> {
        Povm::new(vec![
            HermitianOperator::diag(&[1.0, 0.0]),
            HermitianOperator::diag(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    #[test]
    fn sic_equal_priors() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let s = solve_unambiguous(&povm, &[0.5, 0.5]).unwrap();
        assert!(f64::abs(s.p_success - 1.0 / 3.0) < 1e-12);
        // two singletons and an inconclusive pair
        let groups = s.grouping.groups();
        assert_eq!(groups[0].len(), 1);
        assert_eq!(groups[1].len(), 1);
        assert_eq!(groups[2].len(), 2);
        // each state is antiparallel to the other message's SIC direction
        let dirs = crate::sic::sic_directions::<f64>();
        for i in 0..2 {
            let other = groups[1 - i][0];
            let b = state_to_bloch(&s.signal_states[i]).unwrap();
            let want: BlochVector<f64> = dirs[other].neg();
            assert!((b.x - want.x).abs() < 1e-9 && (b.y - want.y).abs() < 1e-9 && (b.z - want.z).abs() < 1e-9);
        }
    }

    #[test]
    fn sic_skewed_priors_uses_d_grouping() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let s = solve_unambiguous(&povm, &[0.8, 0.2]).unwrap();
        assert!(f64::abs(s.p_success - 0.4) < 1e-12);
        assert_eq!(s.grouping.groups()[0].len(), 1);
        assert!(s.grouping.groups()[1].is_empty());
        assert_eq!(s.never_identified(), vec![1]);
    }

    #[test]
    fn sic_crossover() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let s = solve_unambiguous(&povm, &[2.0 / 3.0, 1.0 / 3.0]).unwrap();
        assert!(f64::abs(s.p_success - 1.0 / 3.0) < 1e-12);
        for pi1 in [0.55, 0.6, 0.7, 0.9] {
            let s = solve_unambiguous(&povm, &[pi1, 1.0 - pi1]).unwrap();
            assert!((s.p_success - (1.0f64 / 3.0).max(pi1 / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ascending_priors_are_paired() {
        let povm = sic_qubit(1.0).unwrap().povm;
        let s = solve_unambiguous(&povm, &[0.2, 0.8]).unwrap();
        assert!(f64::abs(s.p_success - 0.4) < 1e-12);
        assert!(s.grouping.groups()[0].is_empty());
        assert_eq!(s.grouping.groups()[1].len(), 1);
        assert!(s.score_vector[0] >= s.score_vector[1]);
    }

    #[test]
    fn noisy_sic_is_infeasible() {
        for eps in [0.99, 0.9, 0.5] {
            let povm = sic_qubit(eps).unwrap().povm;
            assert_eq!(solve_unambiguous(&povm, &[0.5, 0.5]).unwrap_err(), Error::Infeasible);
        }
    }

    #[test]
    fn projective_basis() {
        let s = solve_unambiguous(&basis_povm(), &[0.6, 0.4]).unwrap();
        assert!((s.p_success - 1.0).abs() < 1e-12);
        let f = feasible_groupings(&basis_povm(), 2).unwrap();
        assert!(f.iter().any(|g| g.grouping.assignment() == [0, 1]));
    }

    #[test]
    fn sic_three_messages_has_no_feasible_grouping() {
        let povm = sic_qubit(1.0).unwrap().povm;
        assert!(feasible_groupings(&povm, 3).unwrap().is_empty());
    }

    #[test]
    fn single_outcome_single_message() {
        let povm = Povm::new(vec![HermitianOperator::<f64>::identity(2)]).unwrap();
        let f = feasible_groupings(&povm, 1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].kernel_ranks, vec![2]);
        let s = solve_unambiguous(&povm, &[1.0]).unwrap();
        assert!((s.p_success - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let povm = sic_qubit(1.0).unwrap().povm;
        assert!(matches!(
            solve_unambiguous_capped(&povm, &[0.5, 0.5], 10),
            Err(Error::CapExceeded { .. })
        ));
    }

    /// Random low-rank POVMs so that kernels are nontrivial.
    fn low_rank_povm(rng: &mut rand_chacha::ChaCha8Rng, d: usize, m: usize) -> Povm<f64> {
        let vectors: Vec<StateVector<f64>> = (0..m).map(|_| crate::random::pure_state(rng, d)).collect();
        let weights: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
        let s = HermitianOperator::sum_of(
            d,
            &vectors
                .iter()
                .zip(&weights)
                .map(|(v, &w)| HermitianOperator::projector(v).scale(w))
                .collect::<Vec<_>>(),
        );
        let eig = s.eig().unwrap();
        let inv_sqrt = ComplexMatrix::from_fn(d, |a, b| {
            eig.values
                .iter()
                .zip(&eig.vectors)
                .map(|(l, v)| v[a] * v[b].conj() * (1.0 / l.sqrt()))
                .sum()
        });
        let elements = vectors
            .iter()
            .zip(&weights)
            .map(|(v, &w)| HermitianOperator::projector(&inv_sqrt.apply(v)).scale(w * crate::operator::norm(&inv_sqrt.apply(v)).powi(2)))
            .collect();
        Povm::new(elements).unwrap()
    }

    #[test]
    fn zero_error_and_completeness_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut solved = 0;
        for _ in 0..200 {
            let d = rng.random_range(2..=4);
            let m = rng.random_range(d..=5.min(d + 2));
            let n = rng.random_range(2..=3);
            let povm = low_rank_povm(&mut rng, d, m);
            let priors = crate::random::priors::<f64, _>(&mut rng, n);
            let s = match solve_unambiguous(&povm, &priors) {
                Ok(s) => s,
                Err(Error::Infeasible) => continue,
                Err(e) => panic!("{e}"),
            };
            solved += 1;
            for (i, rho) in s.signal_states.iter().enumerate() {
                for (j, e) in s.effective[..n].iter().enumerate() {
                    if i != j {
                        assert!(rho.trace_product(e) <= 1e-9);
                    }
                }
            }
            let total = HermitianOperator::sum_of(d, &s.effective);
            assert!(total.max_abs_diff(&HermitianOperator::identity(d)) < 1e-9);
            assert!(s.score_vector.windows(2).all(|w| w[0] >= w[1]));
            let p: f64 = s.signal_states.iter().enumerate().map(|(i, r)| priors[i] * r.trace_product(&s.effective[i])).sum();
            assert!((p - s.p_success).abs() < 1e-9);
        }
        assert!(solved > 50);
    }

    #[test]
    fn random_kernel_encodings_do_not_beat_solver() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for _ in 0..30 {
            let povm = low_rank_povm(&mut rng, 3, 4);
            let priors = crate::random::priors::<f64, _>(&mut rng, 2);
            let best = match solve_unambiguous(&povm, &priors) {
                Ok(s) => s.p_success,
                Err(Error::Infeasible) => 0.0,
                Err(e) => panic!("{e}"),
            };
            for g in enumerate_groupings_capped(4, 3, ENUMERATION_CAP).unwrap() {
                let Some(ev) = evaluate(&povm, &g, 2).unwrap() else { continue };
                for _ in 0..20 {
                    let mut p = 0.0;
                    for i in 0..2 {
                        let x = crate::random::pure_state::<f64, _>(&mut rng, 3);
                        let mut y = vec![Complex::zero(); 3];
                        for q in &ev.bases[i] {
                            let c = crate::operator::inner(q, &x);
                            for (a, b) in y.iter_mut().zip(q) {
                                *a += b * c;
                            }
                        }
                        if crate::operator::norm(&y) < 1e-12 {
                            continue;
                        }
                        p += priors[i] * ev.effective[i].expectation(&crate::operator::normalized(&y).unwrap());
                    }
                    assert!(p <= best + 1e-9);
                }
            }
        }
    }
}
