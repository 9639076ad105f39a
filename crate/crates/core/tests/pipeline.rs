use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wordabx::corpus::{load_manifest, summarize_corpus};
use wordabx::error::RunError;
use wordabx::experiments::{run, Comparison, Experiment, ExperimentOutput, RunConfig};
use wordabx::synth::{write_fixture, FixtureConfig, YMode};

fn small(y_mode: YMode) -> FixtureConfig {
    FixtureConfig {
        n_speakers: 4,
        shared_types: 8,
        x_only_types: 3,
        y_only_types: 3,
        y_onomatopoeia_types: 2,
        y_mode,
        ..FixtureConfig::default()
    }
}

fn config(exp: Experiment, manifest: &Path) -> RunConfig {
    let mut cfg = RunConfig::new(exp, manifest);
    cfg.n_samples = 10;
    cfg.seed = 3;
    cfg
}

/// Audio paths are relative, so `dst` should sit next to `src`.
fn rewrite_manifest(src: &Path, dst: &Path, edit: impl FnOnce(&mut Vec<String>)) -> PathBuf {
    let text = std::fs::read_to_string(src).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let header = lines.remove(0);
    edit(&mut lines);
    let body = std::iter::once(header).chain(lines).collect::<Vec<_>>().join("\n");
    std::fs::write(dst, body + "\n").unwrap();
    dst.to_path_buf()
}

fn scores(c: &Comparison) -> Vec<(String, f64, f64)> {
    c.per_speaker()
        .iter()
        .map(|s| (s.speaker_id.clone(), s.x, s.y))
        .collect()
}

#[test]
fn identical_registers_give_zero_deltas() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = FixtureConfig {
        x_only_types: 0,
        y_only_types: 0,
        y_onomatopoeia_types: 0,
        ..small(YMode::Identical)
    };
    let manifest = write_fixture(tmp.path(), &fixture).unwrap();
    for exp in [Experiment::Exp1CommonWords, Experiment::Exp2Ned, Experiment::Exp3Net] {
        let out = run(&config(exp, &manifest)).unwrap();
        assert!(!out.comparisons.is_empty());
        for c in &out.comparisons {
            assert!(matches!(c, Comparison::Degenerate { .. }), "{exp} {}", c.metric());
            for s in c.per_speaker() {
                assert_eq!(s.x, s.y, "{exp} {} {}", c.metric(), s.speaker_id);
            }
        }
    }
}

#[test]
fn exp3_scores_the_exp2_samples() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_fixture(&tmp.path().join("corpus"), &small(YMode::AddJitter(0.1))).unwrap();
    let out_dir = tmp.path().join("out");
    let mut outputs = Vec::new();
    for exp in [Experiment::Exp2Ned, Experiment::Exp3Net] {
        let mut cfg = config(exp, &manifest);
        cfg.output_dir = Some(out_dir.clone());
        outputs.push(run(&cfg).unwrap());
    }
    assert_eq!(outputs[0].samples, outputs[1].samples);
    assert_eq!(outputs[0].samples.len(), 4 * 2 * 10);
    let read = |name: &str| std::fs::read(out_dir.join(name)).unwrap();
    assert_eq!(read("exp2_lexicon_samples.csv"), read("exp3_lexicon_samples.csv"));
}

#[test]
fn speaker_order_and_removal_leave_scores_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    let corpus = tmp.path().join("corpus");
    let manifest = write_fixture(&corpus, &small(YMode::AddJitter(0.1))).unwrap();
    let shuffled = rewrite_manifest(&manifest, &corpus.join("shuffled.csv"), |rows| {
        rows.shuffle(&mut ChaCha8Rng::seed_from_u64(5));
    });
    let reduced = rewrite_manifest(&manifest, &corpus.join("reduced.csv"), |rows| {
        rows.retain(|r| !r.starts_with("spk02"));
    });
    for exp in [Experiment::Exp1CommonWords, Experiment::Exp2Ned] {
        let base = run(&config(exp, &manifest)).unwrap();
        let shuffled = run(&config(exp, &shuffled)).unwrap();
        assert_eq!(base.comparisons, shuffled.comparisons, "{exp}");
        assert_eq!(base.speaker_reports, shuffled.speaker_reports, "{exp}");

        let reduced = run(&config(exp, &reduced)).unwrap();
        for (full, part) in base.comparisons.iter().zip(&reduced.comparisons) {
            let mut kept = scores(full);
            kept.retain(|s| s.0 != "spk02");
            assert_eq!(kept, scores(part), "{exp} {}", full.metric());
        }
    }
}

#[test]
fn cached_and_uncached_runs_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_fixture(&tmp.path().join("corpus"), &small(YMode::AddJitter(0.1))).unwrap();
    let go = |use_cache: bool| -> ExperimentOutput {
        let mut cfg = config(Experiment::Exp1CommonWords, &manifest);
        cfg.output_dir = Some(tmp.path().join("out"));
        cfg.use_cache = use_cache;
        run(&cfg).unwrap()
    };
    let cold = go(true);
    assert!(tmp.path().join("out/cache").read_dir().unwrap().next().is_some());
    let warm = go(true);
    let fresh = go(false);
    assert_eq!(cold, warm);
    assert_eq!(cold, fresh);
}

#[test]
fn summary_counts_match_fixture() {
    let tmp = tempfile::tempdir().unwrap();
    let fixture = small(YMode::AddJitter(0.1));
    let manifest = write_fixture(tmp.path(), &fixture).unwrap();
    let summary = summarize_corpus(&load_manifest(&manifest).unwrap());
    assert_eq!(summary.len(), 2);
    let rows = std::fs::read_to_string(&manifest).unwrap().lines().count() - 1;
    assert_eq!(summary.iter().map(|s| s.tokens).sum::<usize>(), rows);
    for s in &summary {
        assert_eq!(s.speakers, 4);
        assert!(s.duration_s > 0.0);
    }
    // X has shared + X-only types per speaker; Y adds its own plus onomatopoeia
    let x = &summary[0];
    let y = &summary[1];
    assert_eq!((x.register.as_str(), y.register.as_str()), ("ADS", "IDS"));
    assert!(x.types >= 8 + 3 && y.types >= 8 + 3 + 2);
}

#[test]
fn run_errors_carry_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_fixture(
        tmp.path(),
        &FixtureConfig {
            n_speakers: 1,
            ..small(YMode::Identical)
        },
    )
    .unwrap();

    let err = run(&config(Experiment::Exp1CommonWords, &manifest)).unwrap_err();
    assert!(matches!(err, RunError::Insufficient(_)), "{err}");
    assert_eq!(err.exit_code(), 4);

    let err = run(&config(Experiment::ControlPair, &manifest)).unwrap_err();
    assert_eq!(err.exit_code(), 2, "{err}");

    let err = run(&config(Experiment::Exp2Ned, &tmp.path().join("missing.csv"))).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");

    let mut cfg = config(Experiment::Exp1CommonWords, &manifest);
    cfg.frontend.f_max_hz = 9000.0;
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 3);
    cfg.frontend.f_min_hz = 9500.0;
    assert_eq!(run(&cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn exp3_jitter_outweighs_sparser_lexicon() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = write_fixture(tmp.path(), &FixtureConfig::with_register_vocabulary()).unwrap();
    for remove in [false, true] {
        let mut cfg = config(Experiment::Exp3Net, &manifest);
        cfg.remove_onomatopoeia = remove;
        let out = run(&cfg).unwrap();
        let (x, y) = out.comparison("abx").unwrap().means();
        assert!(y < x, "onomatopoeia removed: {remove}: ABX {x} -> {y}");
    }
}
