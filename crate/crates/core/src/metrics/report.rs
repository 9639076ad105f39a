use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::mean_sorted;
use crate::corpus::{Register, SampledLexicon};
use crate::error::MetricError;

/// Score for one pair of word types.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub type_a: String,
    pub type_b: String,
    pub score: f64,
    /// Triplets (ABX) or medoid pairs (separation) behind the score.
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Abx,
    Separation,
    Variability,
    Ned,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Abx => "abx",
            Metric::Separation => "separation",
            Metric::Variability => "variability",
            Metric::Ned => "ned",
        })
    }
}

/// One speaker/register score. `n` counts the pairs or types averaged into `value`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub speaker_id: String,
    pub register: Register,
    pub metric: Metric,
    pub value: f64,
    pub n: usize,
    pub seed: Option<u64>,
    pub sample_index: Option<usize>,
}

pub const REPORT_COLUMNS: [&str; 7] = [
    "speaker_id",
    "register",
    "metric",
    "value",
    "n_pairs_or_types",
    "seed",
    "sample_index",
];

/// Writes reports as CSV. Floats use Rust's shortest round-trip formatting.
pub fn write_reports_csv<W: Write>(out: W, reports: &[MetricReport]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.speaker_id.clone(),
            r.register.to_string(),
            r.metric.to_string(),
            format!("{:?}", r.value),
            r.n.to_string(),
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.sample_index.map(|s| s.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Per-sample scores and their unweighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledScore {
    pub per_sample: Vec<f64>,
    pub mean: f64,
}

/// Scores each sampled lexicon with `score` and averages across samples.
pub fn sampled_metric<F>(samples: &[SampledLexicon], mut score: F) -> Result<SampledScore, MetricError>
where
    F: FnMut(&SampledLexicon) -> Result<f64, MetricError>,
{
    let per_sample = samples
        .iter()
        .map(|s| {
            score(s).map_err(|e| MetricError::Sample {
                index: s.sample_index,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mean = mean_sorted(per_sample.iter().copied()).ok_or_else(|| MetricError::EmptyResult("no samples".into()))?;
    Ok(SampledScore { per_sample, mean })
}
