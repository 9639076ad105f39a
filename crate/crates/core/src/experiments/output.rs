use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::RunConfig;
use super::runs::{Comparison, ExperimentOutput, SkippedSpeaker};
use crate::error::RunError;
use crate::metrics::write_reports_csv;

#[derive(Serialize)]
struct Summary<'a> {
    experiment: &'a str,
    registers: [&'a str; 2],
    onomatopoeia_removed: bool,
    seed: Option<u64>,
    comparisons: &'a [Comparison],
    skipped_speakers: &'a [SkippedSpeaker],
}

#[derive(Serialize)]
struct RunMetadata<'a> {
    tool: &'static str,
    tool_version: &'static str,
    manifest_hash: &'a str,
    /// Only set for experiments that sample, so other reports do not depend on it.
    seed: Option<u64>,
    config: &'a RunConfig,
}

/// File stem for an output: experiment name, suffixed when onomatopoeias were removed.
pub fn output_stem(out: &ExperimentOutput) -> String {
    if out.onomatopoeia_removed {
        format!("{}_no_onomatopoeia", out.experiment.name())
    } else {
        out.experiment.name().to_string()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, RunError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| RunError::Output {
            path: path.to_path_buf(),
            source,
        })
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> RunError + '_ {
    move |source| RunError::Output {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> RunError + '_ {
    move |e| RunError::Output {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), RunError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), RunError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| io_err(path)(std::io::Error::other(e)))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(io_err(path))
}

/// Writes CSV reports, the JSON summary and run metadata into `dir`.
/// Returns the paths written.
pub fn write_outputs(
    dir: &Path,
    out: &ExperimentOutput,
    cfg: &RunConfig,
    manifest_hash: &str,
) -> Result<Vec<PathBuf>, RunError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let stem = output_stem(out);
    let mut written = Vec::new();

    let path = dir.join(format!("{stem}_speakers.csv"));
    write_reports_csv(create(&path)?, &out.speaker_reports).map_err(csv_err(&path))?;
    written.push(path);

    if !out.sample_reports.is_empty() {
        let path = dir.join(format!("{stem}_samples.csv"));
        write_reports_csv(create(&path)?, &out.sample_reports).map_err(csv_err(&path))?;
        written.push(path);

        let path = dir.join(format!("{stem}_lexicon_samples.csv"));
        write_csv(
            &path,
            &["speaker_id", "register", "sample_index", "seed", "type_keys"],
            out.samples.iter().map(|s| {
                let keys: Vec<&str> = s.type_keys.iter().map(String::as_str).collect();
                vec![
                    s.speaker_id.clone(),
                    s.register.to_string(),
                    s.sample_index.to_string(),
                    s.seed.to_string(),
                    keys.join("|"),
                ]
            }),
        )?;
        written.push(path);
    }

    if !out.pair_details.is_empty() {
        let path = dir.join(format!("{stem}_pairs.csv"));
        write_csv(
            &path,
            &["speaker_id", "register", "metric", "type_a", "type_b", "score", "count"],
            out.pair_details.iter().map(|d| {
                vec![
                    d.speaker_id.clone(),
                    d.register.to_string(),
                    d.metric.to_string(),
                    d.pair.type_a.clone(),
                    d.pair.type_b.clone(),
                    format!("{:?}", d.pair.score),
                    d.pair.count.to_string(),
                ]
            }),
        )?;
        written.push(path);
    }

    let path = dir.join(format!("{stem}_comparison.csv"));
    write_csv(
        &path,
        &["metric", "speaker_id", "register_x", "score_x", "register_y", "score_y"],
        out.comparisons.iter().flat_map(|c| {
            c.per_speaker().iter().map(|s| {
                vec![
                    c.metric().to_string(),
                    s.speaker_id.clone(),
                    out.register_x.to_string(),
                    format!("{:?}", s.x),
                    out.register_y.to_string(),
                    format!("{:?}", s.y),
                ]
            })
        }),
    )?;
    written.push(path);

    let path = dir.join(format!("{stem}_summary.json"));
    write_json(
        &path,
        &Summary {
            experiment: out.experiment.name(),
            registers: [out.register_x.as_str(), out.register_y.as_str()],
            onomatopoeia_removed: out.onomatopoeia_removed,
            seed: out.seed,
            comparisons: &out.comparisons,
            skipped_speakers: &out.skipped_speakers,
        },
    )?;
    written.push(path);

    let path = dir.join(format!("{stem}_run.json"));
    write_json(
        &path,
        &RunMetadata {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            manifest_hash,
            seed: out.seed,
            config: cfg,
        },
    )?;
    written.push(path);
    Ok(written)
}
