//! Multi-start alternating maximization for arbitrary POVMs.
//!
//! `d²` pure input states are optimized by alternating between the optimal
//! priors of the induced classical channel (Blahut–Arimoto) and a local
//! search over each state with the priors held fixed. The result is a lower
//! bound on the capacity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::blahut::warm_started;
use super::info::channel_information;
use super::search::{chart_len, chart_state, nelder_mead};
use super::{CapacityMethod, CapacityResult, Diagnostics};
use crate::error::Result;
use crate::operator::StateVector;
use crate::povm::Povm;
use crate::scalar::Real;

pub const DEFAULT_RESTARTS: usize = 32;
/// Rounds stop once the mutual information improves by less than this.
pub const ROUND_TOL: f64 = 1e-10;
const MAX_ROUNDS: usize = 300;
const PRUNE_TOL: f64 = 1e-10;

struct Run<T> {
    params: Vec<Vec<T>>,
    prior: Vec<T>,
    value: T,
    rounds: usize,
    improvement: T,
}

fn channel_row<T: Real>(povm: &Povm<T>, psi: &StateVector<T>) -> Vec<T> {
    let row: Vec<T> = povm.elements().iter().map(|e| e.expectation(psi).max(T::zero())).collect();
    let s: T = row.iter().copied().sum();
    row.into_iter().map(|x| x / s).collect()
}

fn single_run<T: Real>(povm: &Povm<T>, rng: &mut ChaCha8Rng) -> Result<Run<T>> {
    let d = povm.dim();
    let n = d * d;
    let k = chart_len(d);
    let two_pi = std::f64::consts::TAU;
    let mut params: Vec<Vec<T>> = (0..n)
        .map(|_| (0..k).map(|_| T::lit(rng.random_range(0.0..two_pi))).collect())
        .collect();
    let mut w: Vec<Vec<T>> = params.iter().map(|p| channel_row(povm, &chart_state(p, d))).collect();
    let mut prior: Vec<T> = vec![T::one() / T::from_usize(n).expect("size"); n];
    let mut value = T::neg_infinity();
    let mut improvement = T::infinity();
    let mut rounds = 0;
    while rounds < MAX_ROUNDS {
        rounds += 1;
        let ba = warm_started(&w, Some(&prior), T::tol(1e-13), 20_000)?;
        prior = ba.prior;
        for i in 0..n {
            if prior[i] <= T::tol(PRUNE_TOL) {
                continue;
            }
            let mut trial = w.clone();
            let r = nelder_mead(
                |x| {
                    trial[i] = channel_row(povm, &chart_state(x, d));
                    -channel_information(&prior, &trial)
                },
                &params[i],
                T::lit(0.2),
                T::tol(1e-14),
                2_000,
            );
            let current = channel_information(&prior, &w);
            if -r.value > current {
                params[i] = r.x;
                w[i] = channel_row(povm, &chart_state(&params[i], d));
            }
        }
        let now = channel_information(&prior, &w);
        improvement = now - value;
        value = now;
        if improvement < T::tol(ROUND_TOL) {
            break;
        }
    }
    let ba = warm_started(&w, Some(&prior), T::tol(1e-13), 200_000)?;
    let value = value.max(ba.capacity);
    Ok(Run {
        params,
        prior: ba.prior,
        value,
        rounds,
        improvement,
    })
}

/// Best of `restarts` seeded runs; restart `r` draws from the ChaCha8 stream
/// `r` of `seed`, so results do not depend on scheduling.
pub fn capacity_general<T: Real>(povm: &Povm<T>, restarts: usize, seed: u64) -> Result<CapacityResult<T>> {
    let restarts = restarts.max(1);
    let runs: Vec<Run<T>> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            single_run(povm, &mut rng)
        })
        .collect::<Result<_>>()?;
    let total_rounds = runs.iter().map(|r| r.rounds).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");

    let d = povm.dim();
    let mut states = Vec::new();
    let mut weights = Vec::new();
    for (p, &w) in best.params.iter().zip(&best.prior) {
        if w > T::tol(PRUNE_TOL) {
            states.push(chart_state(p, d));
            weights.push(w);
        }
    }
    let diagnostics = Diagnostics {
        iterations: total_rounds,
        restarts,
        improvement: best.improvement.max(T::zero()),
        ..Diagnostics::default()
    };
    CapacityResult::from_pure(
        povm,
        best.value.max(T::zero()),
        states,
        weights,
        CapacityMethod::GeneralAlternating,
        false,
        diagnostics,
    )
}
