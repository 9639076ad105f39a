use super::report::PairScore;
use super::{mean_sorted, Category};
use crate::distance::DistanceTable;
use crate::error::MetricError;
use crate::scalar::Scalar;

/// Tokens of `cat` with minimal mean distance to the other tokens (the full tie set).
pub fn medoids<T: Scalar>(cat: &Category, d: &DistanceTable<T>) -> Vec<usize> {
    if cat.tokens.len() <= 1 {
        return cat.tokens.clone();
    }
    // every token has the same number of partners, so comparing sums is enough
    let sums: Vec<f64> = cat
        .tokens
        .iter()
        .map(|&i| {
            cat.tokens
                .iter()
                .filter(|&&j| j != i)
                .map(|&j| d.get(i, j).as_f64())
                .sum()
        })
        .collect();
    let best = sums.iter().copied().fold(f64::INFINITY, f64::min);
    cat.tokens
        .iter()
        .zip(&sums)
        .filter(|(_, s)| **s == best)
        .map(|(t, _)| *t)
        .collect()
}

/// Mean distance between the medoids of two categories.
pub fn separation<T: Scalar>(a: &Category, b: &Category, d: &DistanceTable<T>) -> Result<PairScore, MetricError> {
    if a.tokens.is_empty() || b.tokens.is_empty() {
        return Err(MetricError::EmptyCategory);
    }
    let ma = medoids(a, d);
    let mb = medoids(b, d);
    let dists: Vec<f64> = ma
        .iter()
        .flat_map(|&i| mb.iter().map(move |&j| (i, j)))
        .map(|(i, j)| d.get(i, j).as_f64())
        .collect();
    let count = dists.len();
    Ok(PairScore {
        type_a: a.type_key.clone(),
        type_b: b.type_key.clone(),
        score: mean_sorted(dists).expect("non-empty medoid sets"),
        count,
    })
}

/// Mean distance over all unordered token pairs of one category.
pub fn variability<T: Scalar>(cat: &Category, d: &DistanceTable<T>) -> Result<f64, MetricError> {
    let n = cat.tokens.len();
    if n < 2 {
        return Err(MetricError::EmptyResult(format!(
            "type `{}` has {n} token(s); variability needs 2",
            cat.type_key
        )));
    }
    let dists = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Ok(mean_sorted(dists.map(|(i, j)| d.get(cat.tokens[i], cat.tokens[j]).as_f64())).expect("n >= 2"))
}

/// Separation for every unordered category pair, in input order.
pub fn separation_lexicon<T: Scalar>(cats: &[Category], d: &DistanceTable<T>) -> Result<Vec<PairScore>, MetricError> {
    let mut out = Vec::new();
    for (i, a) in cats.iter().enumerate() {
        for b in &cats[i + 1..] {
            out.push(separation(a, b, d)?);
        }
    }
    Ok(out)
}

/// Per-type score with its token count.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeScore {
    pub type_key: String,
    pub value: f64,
    pub tokens: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VariabilityOutcome {
    pub scored: Vec<TypeScore>,
    /// Types with a single token.
    pub skipped: Vec<String>,
}

impl VariabilityOutcome {
    /// Unweighted mean over scored types.
    pub fn mean(&self) -> Option<f64> {
        mean_sorted(self.scored.iter().map(|t| t.value))
    }
}

pub fn variability_lexicon<T: Scalar>(cats: &[Category], d: &DistanceTable<T>) -> VariabilityOutcome {
    let mut out = VariabilityOutcome::default();
    for c in cats {
        match variability(c, d) {
            Ok(value) => out.scored.push(TypeScore {
                type_key: c.type_key.clone(),
                value,
                tokens: c.tokens.len(),
            }),
            Err(_) => out.skipped.push(c.type_key.clone()),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(key: &str, tokens: &[usize]) -> Category {
        Category {
            type_key: key.into(),
            tokens: tokens.to_vec(),
        }
    }

    fn line(pos: &[f64]) -> DistanceTable<f64> {
        DistanceTable::from_fn((0..pos.len()).map(|i| format!("t{i}")).collect(), |i, j| {
            (pos[i] - pos[j]).abs()
        })
        .unwrap()
    }

    #[test]
    fn collinear_medoid_is_middle() {
        let d = line(&[0.0, 1.0, 3.0]);
        // brute force means: t0 -> 2.0, t1 -> 1.5, t2 -> 2.5
        assert_eq!(medoids(&cat("A", &[0, 1, 2]), &d), vec![1]);
    }

    #[test]
    fn full_tie_and_singleton() {
        let d = DistanceTable::<f64>::from_fn((0..4).map(|i| i.to_string()).collect(), |_, _| 0.3).unwrap();
        assert_eq!(medoids(&cat("A", &[0, 1, 2, 3]), &d), vec![0, 1, 2, 3]);
        assert_eq!(medoids(&cat("A", &[2]), &d), vec![2]);
    }

    #[test]
    fn separation_averages_tie_sets() {
        // A = {0, 1} is a two-way tie; B has the unique medoid 3
        let d = line(&[0.0, 1.0, 10.0, 11.0, 12.0]);
        let s = separation(&cat("A", &[0, 1]), &cat("B", &[2, 3, 4]), &d).unwrap();
        assert_eq!(s.count, 2);
        assert_eq!(s.score, (11.0 + 10.0) / 2.0);

        // B with a 3-way tie: equilateral distances
        let m = |i: usize, j: usize| -> f64 {
            match (i.min(j), i.max(j)) {
                (0, 1) => 1.0,
                (a, b) if a >= 2 && b >= 2 => 2.0,
                (a, b) => (a + b) as f64,
            }
        };
        let d = DistanceTable::<f64>::from_fn((0..5).map(|i| i.to_string()).collect(), m).unwrap();
        let s = separation(&cat("A", &[0, 1]), &cat("B", &[2, 3, 4]), &d).unwrap();
        assert_eq!(s.count, 6);
        let expected = [2.0, 3.0, 4.0, 3.0, 4.0, 5.0].iter().sum::<f64>() / 6.0;
        assert!((s.score - expected).abs() < 1e-15);
        let r = separation(&cat("B", &[2, 3, 4]), &cat("A", &[0, 1]), &d).unwrap();
        assert_eq!(r.score, s.score);
    }

    #[test]
    fn variability_values() {
        let d = line(&[0.0, 2.5]);
        assert_eq!(variability(&cat("A", &[0, 1]), &d).unwrap(), 2.5);
        let m = [[0.0, 1.0, 2.0], [1.0, 0.0, 3.0], [2.0, 3.0, 0.0]];
        let d = DistanceTable::<f64>::from_fn((0..3).map(|i| i.to_string()).collect(), |i, j| m[i][j]).unwrap();
        assert_eq!(variability(&cat("A", &[0, 1, 2]), &d).unwrap(), 2.0);
        assert_eq!(variability(&cat("A", &[2, 0, 1]), &d).unwrap(), 2.0);
        assert!(variability(&cat("A", &[0]), &d).is_err());
    }

    #[test]
    fn lexicon_variability_skips_singletons() {
        let d = line(&[0.0, 1.0, 5.0, 9.0]);
        let out = variability_lexicon(&[cat("A", &[0, 1]), cat("B", &[2]), cat("C", &[3])], &d);
        assert_eq!(out.scored.len(), 1);
        assert_eq!(out.skipped, vec!["B".to_string(), "C".to_string()]);
        assert_eq!(out.mean(), Some(1.0));
    }
}
