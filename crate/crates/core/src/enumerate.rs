//! Exhaustive, parallel argmax over grouping enumerations.
//!
//! Every chunk of the lexicographic enumeration keeps the prefix maxima it
//! sees (entries whose score strictly exceeds everything before them in the
//! chunk). The global winner is the first prefix maximum, in enumeration
//! order, whose score is within `tie_tol` of the overall best. This is the
//! same grouping a serial scan with the rule "first score within `tie_tol` of
//! the maximum" returns, independent of how the work was split.

use rayon::prelude::*;

use crate::error::Result;
use crate::povm::{enumerate_groupings_capped, grouping_at, Grouping};
use crate::scalar::Real;

const CHUNK: u64 = 2048;

pub(crate) struct Best<T> {
    #[cfg_attr(not(test), allow(dead_code))]
    pub index: u64,
    pub grouping: Grouping,
    pub score: T,
}

/// Returns `None` when `eval` rejects every grouping.
pub(crate) fn argmax_groupings<T, F>(
    outcomes: usize,
    labels: usize,
    cap: u64,
    tie_tol: T,
    eval: F,
) -> Result<Option<Best<T>>>
where
    T: Real,
    F: Fn(&Grouping) -> Result<Option<T>> + Sync,
{
    let total = enumerate_groupings_capped(outcomes, labels, cap)?.total();
    let chunks = total.div_ceil(CHUNK);
    let stairs: Vec<Vec<Best<T>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut stair: Vec<Best<T>> = Vec::new();
            for index in (c * CHUNK)..((c + 1) * CHUNK).min(total) {
                let grouping = grouping_at(outcomes, labels, index);
                if let Some(score) = eval(&grouping)? {
                    if stair.last().is_none_or(|b| score > b.score) {
                        stair.push(Best {
                            index,
                            grouping,
                            score,
                        });
                    }
                }
            }
            Ok(stair)
        })
        .collect::<Result<_>>()?;

    let Some(max) = stairs
        .iter()
        .filter_map(|s| s.last().map(|b| b.score))
        .reduce(T::max)
    else {
        return Ok(None);
    };
    Ok(stairs
        .into_iter()
        .flatten()
        .find(|b| b.score >= max - tie_tol))
}
