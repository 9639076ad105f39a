//! Category-structure scores over distance tables and phoneme strings.

mod abx;
mod acoustic;
mod ned;
mod report;

pub use abx::{abx_aggregate, abx_lexicon, abx_pair, pair_mean, AbxOutcome};
pub use acoustic::{
    medoids, separation, separation_lexicon, variability, variability_lexicon, TypeScore, VariabilityOutcome,
};
pub use ned::{edit_distance, mean_ned, ned, phonemes};
pub use report::{sampled_metric, write_reports_csv, Metric, MetricReport, PairScore, SampledScore, REPORT_COLUMNS};

use crate::corpus::Lexicon;
use crate::distance::DistanceTable;
use crate::error::MetricError;
use crate::scalar::Scalar;

/// A word type's tokens, as row indices of a [`DistanceTable`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    pub type_key: String,
    pub tokens: Vec<usize>,
}

/// Resolves every type of `lex` to table indices, in type-key order.
///
/// Fails if a token of the lexicon is missing from the table.
pub fn categories<T: Scalar>(lex: &Lexicon, table: &DistanceTable<T>) -> Result<Vec<Category>, MetricError> {
    lex.types
        .values()
        .map(|word| {
            let tokens = word
                .tokens
                .iter()
                .map(|t| {
                    table.index_of(&t.token_id).ok_or_else(|| {
                        MetricError::Undefined(format!("token `{}` absent from distance table", t.token_id))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Category {
                type_key: word.type_key.clone(),
                tokens,
            })
        })
        .collect()
}

/// Order-independent mean: values are summed in ascending order.
pub(crate) fn mean_sorted(values: impl IntoIterator<Item = f64>) -> Option<f64> {
    let mut v: Vec<f64> = values.into_iter().collect();
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    Some(v.iter().sum::<f64>() / v.len() as f64)
}
