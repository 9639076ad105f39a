use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::config::{Experiment, RunConfig};
use super::workspace::Workspace;
use crate::corpus::{common_types, remove_onomatopoeia, sample_lexicons, Lexicon, Register, SampledLexicon};
use crate::error::{MetricError, RunError};
use crate::metrics::{
    abx_aggregate, abx_lexicon, categories, mean_ned, pair_mean, sampled_metric, separation_lexicon,
    variability_lexicon, Category, Metric, MetricReport, PairScore,
};
use crate::stats::{MeanPair, PairedComparison, RegisterPair, SpeakerScores};

/// A pair score tagged with where it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairDetail {
    pub speaker_id: String,
    pub register: Register,
    pub metric: Metric,
    pub pair: PairScore,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedSpeaker {
    pub speaker_id: String,
    pub reason: String,
}

/// Outcome of the paired test for one metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Comparison {
    Tested(PairedComparison),
    /// The paired test is undefined (e.g. all speaker differences equal).
    Degenerate {
        metric: String,
        registers: RegisterPair,
        n: usize,
        means: MeanPair,
        seed: Option<u64>,
        reason: String,
        #[serde(skip)]
        per_speaker: Vec<SpeakerScores>,
    },
}

impl Comparison {
    pub fn metric(&self) -> &str {
        match self {
            Comparison::Tested(c) => &c.metric,
            Comparison::Degenerate { metric, .. } => metric,
        }
    }

    pub fn per_speaker(&self) -> &[SpeakerScores] {
        match self {
            Comparison::Tested(c) => &c.per_speaker,
            Comparison::Degenerate { per_speaker, .. } => per_speaker,
        }
    }

    pub fn tested(&self) -> Option<&PairedComparison> {
        match self {
            Comparison::Tested(c) => Some(c),
            Comparison::Degenerate { .. } => None,
        }
    }

    pub fn means(&self) -> (f64, f64) {
        match self {
            Comparison::Tested(c) => (c.means.x, c.means.y),
            Comparison::Degenerate { means, .. } => (means.x, means.y),
        }
    }
}

/// Everything an experiment run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub experiment: Experiment,
    pub register_x: Register,
    pub register_y: Register,
    /// Sampling seed; `None` for experiments that do not sample.
    pub seed: Option<u64>,
    pub onomatopoeia_removed: bool,
    /// One row per speaker, register and metric.
    pub speaker_reports: Vec<MetricReport>,
    /// One row per sampled lexicon (sampling experiments only).
    pub sample_reports: Vec<MetricReport>,
    pub pair_details: Vec<PairDetail>,
    pub samples: Vec<SampledLexicon>,
    pub comparisons: Vec<Comparison>,
    pub skipped_speakers: Vec<SkippedSpeaker>,
}

impl ExperimentOutput {
    fn new(cfg: &RunConfig, seed: Option<u64>) -> Self {
        ExperimentOutput {
            experiment: cfg.experiment,
            register_x: cfg.register_x.clone(),
            register_y: cfg.register_y.clone(),
            seed,
            onomatopoeia_removed: cfg.remove_onomatopoeia,
            speaker_reports: Vec::new(),
            sample_reports: Vec::new(),
            pair_details: Vec::new(),
            samples: Vec::new(),
            comparisons: Vec::new(),
            skipped_speakers: Vec::new(),
        }
    }

    pub fn comparison(&self, metric: &str) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.metric() == metric)
    }

    fn skip(&mut self, speaker_id: &str, reason: impl Into<String>) {
        self.skipped_speakers.push(SkippedSpeaker {
            speaker_id: speaker_id.to_string(),
            reason: reason.into(),
        });
    }
}

fn compare(
    metric: &str,
    cfg: &RunConfig,
    scores: Vec<SpeakerScores>,
    seed: Option<u64>,
) -> Result<Comparison, RunError> {
    if scores.len() < 2 {
        return Err(RunError::Insufficient(format!(
            "{metric}: {} usable speaker(s); the paired test needs 2",
            scores.len()
        )));
    }
    let x = cfg.register_x.to_string();
    let y = cfg.register_y.to_string();
    match PairedComparison::compute(metric, x.clone(), y.clone(), scores.clone(), seed) {
        Ok(c) => Ok(Comparison::Tested(c)),
        Err(e) => {
            let mut per_speaker = scores;
            per_speaker.sort_by(|a, b| a.speaker_id.cmp(&b.speaker_id));
            let n = per_speaker.len() as f64;
            let means = MeanPair {
                x: per_speaker.iter().map(|s| s.x).sum::<f64>() / n,
                y: per_speaker.iter().map(|s| s.y).sum::<f64>() / n,
            };
            Ok(Comparison::Degenerate {
                metric: metric.to_string(),
                registers: RegisterPair { x, y },
                n: per_speaker.len(),
                means,
                seed,
                reason: e.to_string(),
                per_speaker,
            })
        }
    }
}

fn prepared(lex: &Lexicon, cfg: &RunConfig) -> Lexicon {
    if cfg.remove_onomatopoeia {
        remove_onomatopoeia(lex)
    } else {
        lex.clone()
    }
}

fn report(
    lex: &Lexicon,
    metric: Metric,
    value: f64,
    n: usize,
    seed: Option<u64>,
    sample_index: Option<usize>,
) -> MetricReport {
    MetricReport {
        speaker_id: lex.speaker_id.clone(),
        register: lex.register.clone(),
        metric,
        value,
        n,
        seed,
        sample_index,
    }
}

struct AcousticScores {
    abx: (f64, usize),
    separation: (f64, usize),
    variability: (f64, usize),
}

/// Common-word acoustic comparison: ABX, separation and variability per speaker.
///
/// ABX is averaged over the type pairs scored in both registers.
pub fn run_common_words(ws: &mut Workspace, cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    let mut out = ExperimentOutput::new(cfg, None);
    let mut per_metric: BTreeMap<Metric, Vec<SpeakerScores>> = BTreeMap::new();

    for speaker in ws.speakers_with(&cfg.register_x, &cfg.register_y) {
        let lx = prepared(ws.lexicon(&speaker, &cfg.register_x).expect("listed"), cfg);
        let ly = prepared(ws.lexicon(&speaker, &cfg.register_y).expect("listed"), cfg);
        let common = common_types(&lx, &ly)?;
        if common.len() < 2 {
            out.skip(&speaker, format!("{} common type(s)", common.len()));
            continue;
        }
        let lx = lx.restrict(&common);
        let ly = ly.restrict(&common);
        let tx = ws.distance_table(&lx)?;
        let ty = ws.distance_table(&ly)?;
        let cx = categories(&lx, &tx)?;
        let cy = categories(&ly, &ty)?;

        let ax = abx_lexicon(&cx, &tx)?;
        let ay = abx_lexicon(&cy, &ty)?;
        let key = |p: &PairScore| (p.type_a.clone(), p.type_b.clone());
        let in_y: BTreeSet<_> = ay.scored.iter().map(key).collect();
        let in_x: BTreeSet<_> = ax.scored.iter().map(key).collect();
        let shared_x: Vec<PairScore> = ax.scored.into_iter().filter(|p| in_y.contains(&key(p))).collect();
        let shared_y: Vec<PairScore> = ay.scored.into_iter().filter(|p| in_x.contains(&key(p))).collect();
        if shared_x.is_empty() {
            out.skip(&speaker, "no type pair scorable in both registers");
            continue;
        }

        let mut scores = Vec::new();
        for (lex, table, cats, abx_pairs) in [(&lx, &tx, &cx, shared_x), (&ly, &ty, &cy, shared_y)] {
            let sep = separation_lexicon(cats, table)?;
            let var = variability_lexicon(cats, table);
            let Some(var_mean) = var.mean() else {
                break;
            };
            let s = AcousticScores {
                abx: (abx_aggregate(&abx_pairs)?, abx_pairs.len()),
                separation: (pair_mean(&sep)?, sep.len()),
                variability: (var_mean, var.scored.len()),
            };
            for (metric, pairs) in [(Metric::Abx, abx_pairs), (Metric::Separation, sep)] {
                out.pair_details.extend(pairs.into_iter().map(|pair| PairDetail {
                    speaker_id: speaker.clone(),
                    register: lex.register.clone(),
                    metric,
                    pair,
                }));
            }
            scores.push((lex, s));
        }
        if scores.len() < 2 {
            out.skip(&speaker, "no type with two tokens in one register");
            out.pair_details.retain(|d| d.speaker_id != speaker);
            continue;
        }
        for (lex, s) in &scores {
            out.speaker_reports
                .push(report(lex, Metric::Abx, s.abx.0, s.abx.1, None, None));
            out.speaker_reports.push(report(
                lex,
                Metric::Separation,
                s.separation.0,
                s.separation.1,
                None,
                None,
            ));
            out.speaker_reports.push(report(
                lex,
                Metric::Variability,
                s.variability.0,
                s.variability.1,
                None,
                None,
            ));
        }
        let (sx, sy) = (&scores[0].1, &scores[1].1);
        for (metric, x, y) in [
            (Metric::Abx, sx.abx.0, sy.abx.0),
            (Metric::Separation, sx.separation.0, sy.separation.0),
            (Metric::Variability, sx.variability.0, sy.variability.0),
        ] {
            per_metric.entry(metric).or_default().push(SpeakerScores {
                speaker_id: speaker.clone(),
                x,
                y,
            });
        }
    }

    for metric in [Metric::Abx, Metric::Separation, Metric::Variability] {
        let scores = per_metric.remove(&metric).unwrap_or_default();
        out.comparisons.push(compare(&metric.to_string(), cfg, scores, None)?);
    }
    Ok(out)
}

/// Register-matched lexicon samples for one speaker: both registers are
/// sampled down to the smaller type count.
pub fn matched_samples(
    lx: &Lexicon,
    ly: &Lexicon,
    n_samples: usize,
    seed: u64,
) -> Result<Option<[Vec<SampledLexicon>; 2]>, RunError> {
    let target = lx.type_count().min(ly.type_count());
    if target < 2 {
        return Ok(None);
    }
    Ok(Some([
        sample_lexicons(lx, target, n_samples, seed)?,
        sample_lexicons(ly, target, n_samples, seed)?,
    ]))
}

fn sampled_run<F>(
    ws: &mut Workspace,
    cfg: &RunConfig,
    metric: Metric,
    mut score: F,
) -> Result<ExperimentOutput, RunError>
where
    F: FnMut(&mut Workspace, &Lexicon, &[SampledLexicon]) -> Result<Vec<(f64, usize)>, RunError>,
{
    let mut out = ExperimentOutput::new(cfg, Some(cfg.seed));
    let mut pairs = Vec::new();
    for speaker in ws.speakers_with(&cfg.register_x, &cfg.register_y) {
        let lx = prepared(ws.lexicon(&speaker, &cfg.register_x).expect("listed"), cfg);
        let ly = prepared(ws.lexicon(&speaker, &cfg.register_y).expect("listed"), cfg);
        let Some([sx, sy]) = matched_samples(&lx, &ly, cfg.n_samples, cfg.seed)? else {
            out.skip(&speaker, "fewer than 2 types after matching");
            continue;
        };
        let mut means = Vec::new();
        let mut rows = Vec::new();
        let mut failed = None;
        for (lex, samples) in [(&lx, &sx), (&ly, &sy)] {
            let per_sample = match score(ws, lex, samples) {
                Ok(v) => v,
                Err(RunError::Metric(e)) => {
                    failed = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            };
            let summary = sampled_metric(samples, |s| Ok(per_sample[s.sample_index].0))?;
            for (s, (value, n)) in samples.iter().zip(&per_sample) {
                rows.push(report(lex, metric, *value, *n, Some(cfg.seed), Some(s.sample_index)));
            }
            means.push((lex, summary.mean, samples[0].type_keys.len()));
        }
        if let Some(reason) = failed {
            out.skip(&speaker, reason);
            continue;
        }
        out.sample_reports.extend(rows);
        for (lex, mean, n_types) in &means {
            out.speaker_reports
                .push(report(lex, metric, *mean, *n_types, Some(cfg.seed), None));
        }
        out.samples.extend(sx.into_iter().chain(sy));
        pairs.push(SpeakerScores {
            speaker_id: speaker.clone(),
            x: means[0].1,
            y: means[1].1,
        });
    }
    out.comparisons
        .push(compare(&metric.to_string(), cfg, pairs, Some(cfg.seed))?);
    Ok(out)
}

/// Phonological density: mean NED per sampled lexicon, averaged per speaker.
pub fn run_ned(ws: &mut Workspace, cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    sampled_run(ws, cfg, Metric::Ned, |_, _, samples| {
        samples
            .iter()
            .map(|s| {
                let keys: Vec<&String> = s.type_keys.iter().collect();
                let n = keys.len() * (keys.len() - 1) / 2;
                Ok((mean_ned(&keys)?, n))
            })
            .collect()
    })
}

/// Net discriminability: ABX over each sampled lexicon (the same samples as
/// the NED run for the same seed), averaged per speaker.
pub fn run_net_abx(ws: &mut Workspace, cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    sampled_run(ws, cfg, Metric::Abx, |ws, lex, samples| {
        let table = ws.distance_table(lex)?;
        let cats = categories(lex, &table)?;
        samples
            .iter()
            .map(|s| {
                let subset: Vec<Category> = cats
                    .iter()
                    .filter(|c| s.type_keys.contains(&c.type_key))
                    .cloned()
                    .collect();
                let outcome = abx_lexicon(&subset, &table)?;
                let value = abx_aggregate(&outcome.scored).map_err(|e| MetricError::Sample {
                    index: s.sample_index,
                    source: Box::new(e),
                })?;
                Ok((value, outcome.scored.len()))
            })
            .collect()
    })
}

/// Runs the configured experiment on an open workspace.
pub fn run_experiment(ws: &mut Workspace, cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    cfg.validate()?;
    let registers = ws.registers();
    for r in [&cfg.register_x, &cfg.register_y] {
        if !registers.contains(r) {
            return Err(RunError::Config(format!("register {r} not present in manifest")));
        }
    }
    match cfg.experiment {
        Experiment::Exp1CommonWords | Experiment::ControlPair => run_common_words(ws, cfg),
        Experiment::Exp2Ned => run_ned(ws, cfg),
        Experiment::Exp3Net => run_net_abx(ws, cfg),
    }
}
