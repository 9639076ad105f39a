use std::collections::BTreeSet;

use super::report::PairScore;
use super::{mean_sorted, Category};
use crate::distance::DistanceTable;
use crate::error::MetricError;
use crate::scalar::Scalar;

/// Credit in half-units: 2 when `x` is closer to its own category, 1 on a tie, 0 otherwise.
#[inline]
fn half_credit<T: Scalar>(same: T, other: T) -> u64 {
    if same < other {
        2
    } else if same == other {
        1
    } else {
        0
    }
}

/// Sums half-credits over triplets (a, b, x) with a, x in `own`, x != a, b in `other`.
fn one_side<T: Scalar>(own: &[usize], other: &[usize], d: &DistanceTable<T>) -> u64 {
    let mut total = 0;
    for (xi, &x) in own.iter().enumerate() {
        for (ai, &a) in own.iter().enumerate() {
            if ai == xi {
                continue;
            }
            let dax = d.get(a, x);
            for &b in other {
                total += half_credit(dax, d.get(b, x));
            }
        }
    }
    total
}

/// ABX discriminability of two word types.
///
/// Every triplet takes x from one category, a from the same category (a != x)
/// and b from the other; it scores 1 if d(a, x) < d(b, x), 0.5 on an exact tie
/// and 0 otherwise. The score is the mean over both directions.
pub fn abx_pair<T: Scalar>(a: &Category, b: &Category, d: &DistanceTable<T>) -> Result<PairScore, MetricError> {
    if a.tokens.is_empty() || b.tokens.is_empty() {
        return Err(MetricError::EmptyCategory);
    }
    let in_a: BTreeSet<usize> = a.tokens.iter().copied().collect();
    if let Some(&shared) = b.tokens.iter().find(|t| in_a.contains(t)) {
        return Err(MetricError::Overlap(shared));
    }
    let (na, nb) = (a.tokens.len(), b.tokens.len());
    let n_triplets = na * (na - 1) * nb + nb * (nb - 1) * na;
    if n_triplets == 0 {
        return Err(MetricError::NoTriplets);
    }
    let half = one_side(&a.tokens, &b.tokens, d) + one_side(&b.tokens, &a.tokens, d);
    Ok(PairScore {
        type_a: a.type_key.clone(),
        type_b: b.type_key.clone(),
        score: half as f64 / (2 * n_triplets) as f64,
        count: n_triplets,
    })
}

/// Unweighted mean of pair scores.
pub fn abx_aggregate(pairs: &[PairScore]) -> Result<f64, MetricError> {
    pair_mean(pairs)
}

/// Unweighted, order-independent mean of pair scores.
pub fn pair_mean(pairs: &[PairScore]) -> Result<f64, MetricError> {
    mean_sorted(pairs.iter().map(|p| p.score)).ok_or_else(|| MetricError::EmptyResult("no scored pairs".into()))
}

/// Scored and skipped type pairs of a lexicon.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AbxOutcome {
    pub scored: Vec<PairScore>,
    /// Pairs of singleton categories, which admit no triplet.
    pub skipped: Vec<(String, String)>,
}

/// Scores every unordered pair of categories, in input order.
pub fn abx_lexicon<T: Scalar>(cats: &[Category], d: &DistanceTable<T>) -> Result<AbxOutcome, MetricError> {
    let mut out = AbxOutcome::default();
    for (i, a) in cats.iter().enumerate() {
        for b in &cats[i + 1..] {
            match abx_pair(a, b, d) {
                Ok(score) => out.scored.push(score),
                Err(MetricError::NoTriplets) => out.skipped.push((a.type_key.clone(), b.type_key.clone())),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}
