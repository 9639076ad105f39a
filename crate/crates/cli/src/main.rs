use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wordabx::corpus::{load_manifest, remove_onomatopoeia, summarize_corpus, Lexicon, Register};
use wordabx::error::{CorpusError, RunError};
use wordabx::experiments::{
    output_stem, parse_config_file, parse_registers, run, Comparison, Experiment, ExperimentOutput, RunConfig,
    Workspace,
};
use wordabx::metrics::{abx_lexicon, categories, mean_ned, phonemes};
use wordabx::synth::{write_fixture, FixtureConfig};

#[derive(Parser)]
#[command(
    name = "wordabx",
    version,
    about = "Word-level discriminability and lexicon metrics across speech registers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Duration, type and token totals per register.
    Summarize {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// ABX, separation and variability on words common to both registers.
    Exp1(RunArgs),
    /// Mean normalized edit distance over frequency-matched lexicon samples.
    Exp2(RunArgs),
    /// ABX over the exp2 lexicon samples.
    Exp3(RunArgs),
    /// Exp1 machinery on a control register pair (default ADS,RS).
    Control(RunArgs),
    /// Raw ABX scores for every type pair of each speaker/register lexicon.
    Abx(RawArgs),
    /// Mean NED of each speaker/register lexicon, or of the type keys listed in a file.
    Ned(NedArgs),
    /// Writes a synthetic fixture corpus.
    Synth(SynthArgs),
}

#[derive(Args, Default)]
struct RunArgs {
    /// Plain key=value file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Baseline and compared register, `X,Y`.
    #[arg(long)]
    registers: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    no_onomatopoeia: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_cache: bool,
    #[command(flatten)]
    frontend: FrontendArgs,
}

#[derive(Args, Default)]
struct FrontendArgs {
    #[arg(long)]
    window_ms: Option<f64>,
    #[arg(long)]
    hop_ms: Option<f64>,
    #[arg(long)]
    fmin: Option<f64>,
    #[arg(long)]
    fmax: Option<f64>,
    #[arg(long)]
    nfilters: Option<usize>,
}

impl FrontendArgs {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |key, value: Option<String>| {
            if let Some(v) = value {
                out.push((key, v));
            }
        };
        push("window-ms", self.window_ms.map(|v| v.to_string()));
        push("hop-ms", self.hop_ms.map(|v| v.to_string()));
        push("fmin", self.fmin.map(|v| v.to_string()));
        push("fmax", self.fmax.map(|v| v.to_string()));
        push("nfilters", self.nfilters.map(|v| v.to_string()));
        out
    }
}

#[derive(Args)]
struct RawArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Only score lexicons of these registers, `X,Y`.
    #[arg(long)]
    registers: Option<String>,
    #[arg(long)]
    no_onomatopoeia: bool,
    /// Cache directory for features and distance tables.
    #[arg(long)]
    cache: Option<PathBuf>,
    #[command(flatten)]
    frontend: FrontendArgs,
}

#[derive(Args)]
struct NedArgs {
    #[arg(long, required_unless_present = "types")]
    manifest: Option<PathBuf>,
    /// File with one space-separated phoneme string per line.
    #[arg(long, conflicts_with = "manifest")]
    types: Option<PathBuf>,
    #[arg(long)]
    registers: Option<String>,
    #[arg(long)]
    no_onomatopoeia: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Register Y adds within-type jitter.
    Jitter,
    /// Register Y has reduced jitter.
    Read,
    /// Jitter plus register-specific vocabulary and flagged reduplications in Y.
    Vocabulary,
    /// Identical audio in both registers.
    Identical,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "jitter")]
    preset: Preset,
    #[arg(long)]
    speakers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Output { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), RunError> {
    match cmd {
        Command::Summarize { manifest } => summarize(&manifest),
        Command::Exp1(a) => experiment(Experiment::Exp1CommonWords, a),
        Command::Exp2(a) => experiment(Experiment::Exp2Ned, a),
        Command::Exp3(a) => experiment(Experiment::Exp3Net, a),
        Command::Control(a) => experiment(Experiment::ControlPair, a),
        Command::Abx(a) => raw_abx(a),
        Command::Ned(a) => raw_ned(a),
        Command::Synth(a) => synth(a),
    }
}

fn build_config(experiment: Experiment, a: RunArgs) -> Result<RunConfig, RunError> {
    let mut cfg = RunConfig::new(experiment, PathBuf::new());
    if let Some(path) = &a.config {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        for (k, v) in parse_config_file(&text)? {
            cfg.apply(&k, &v)?;
        }
    }
    let mut flags: Vec<(&str, String)> = Vec::new();
    if let Some(m) = &a.manifest {
        flags.push(("manifest", m.display().to_string()));
    }
    if let Some(r) = a.registers {
        flags.push(("registers", r));
    }
    if let Some(s) = a.seed {
        flags.push(("seed", s.to_string()));
    }
    if let Some(n) = a.samples {
        flags.push(("samples", n.to_string()));
    }
    if a.no_onomatopoeia {
        flags.push(("no-onomatopoeia", "1".into()));
    }
    if let Some(o) = &a.out {
        flags.push(("out", o.display().to_string()));
    }
    if a.no_cache {
        flags.push(("no-cache", "1".into()));
    }
    flags.extend(a.frontend.pairs());
    for (k, v) in flags {
        cfg.apply(k, &v)?;
    }
    if cfg.manifest_path.as_os_str().is_empty() {
        return Err(RunError::Config(
            "no manifest given (--manifest or `manifest=` in --config)".into(),
        ));
    }
    Ok(cfg)
}

fn experiment(experiment: Experiment, a: RunArgs) -> Result<(), RunError> {
    let cfg = build_config(experiment, a)?;
    let out = run(&cfg)?;
    print_comparisons(&out).map_err(|e| stdout_error(e.into()))
}

fn print_comparisons(out: &ExperimentOutput) -> io::Result<()> {
    let mut w = io::stdout().lock();
    writeln!(w, "{} {} vs {}", output_stem(out), out.register_x, out.register_y)?;
    for c in &out.comparisons {
        let (mx, my) = c.means();
        match c {
            Comparison::Tested(t) => writeln!(
                w,
                "  {:<12} {:.4} vs {:.4}  t({}) = {:.3}, p = {:.3e}, d_z = {:.3}",
                c.metric(),
                mx,
                my,
                t.df,
                t.t,
                t.p,
                t.d_z
            )?,
            Comparison::Degenerate { reason, .. } => {
                writeln!(w, "  {:<12} {:.4} vs {:.4}  not tested: {reason}", c.metric(), mx, my)?
            }
        }
    }
    for s in &out.skipped_speakers {
        writeln!(w, "  skipped {}: {}", s.speaker_id, s.reason)?;
    }
    Ok(())
}

fn stdout_error(e: csv::Error) -> RunError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => io::Error::other(format!("{other:?}")),
    };
    RunError::Output {
        path: PathBuf::from("<stdout>"),
        source,
    }
}

fn summarize(manifest: &Path) -> Result<(), RunError> {
    let lexicons = load_manifest(manifest)?;
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for row in summarize_corpus(&lexicons) {
        w.serialize(row).map_err(stdout_error)?;
    }
    w.flush().map_err(|e| stdout_error(e.into()))
}

fn register_filter(registers: Option<&str>) -> Result<Option<[Register; 2]>, RunError> {
    registers.map(|r| parse_registers(r).map(|(x, y)| [x, y])).transpose()
}

fn selected(lexicons: &[Lexicon], filter: &Option<[Register; 2]>, no_ono: bool) -> Vec<Lexicon> {
    lexicons
        .iter()
        .filter(|l| filter.as_ref().is_none_or(|f| f.contains(&l.register)))
        .map(|l| if no_ono { remove_onomatopoeia(l) } else { l.clone() })
        .collect()
}

#[derive(Serialize)]
struct AbxRow<'a> {
    speaker_id: &'a str,
    register: &'a str,
    type_a: &'a str,
    type_b: &'a str,
    score: f64,
    triplets: usize,
}

fn raw_abx(a: RawArgs) -> Result<(), RunError> {
    let mut cfg = RunConfig::new(Experiment::Exp1CommonWords, &a.manifest);
    for (k, v) in a.frontend.pairs() {
        cfg.apply(k, &v)?;
    }
    cfg.frontend.validate().map_err(|e| RunError::Config(e.to_string()))?;
    let filter = register_filter(a.registers.as_deref())?;
    let mut ws = Workspace::open(&a.manifest, cfg.frontend, a.cache)?;
    let lexicons = selected(&ws.lexicons, &filter, a.no_onomatopoeia);
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for lex in &lexicons {
        let table = ws.distance_table(lex)?;
        let cats = categories(lex, &table)?;
        for s in abx_lexicon(&cats, &table)?.scored {
            w.serialize(AbxRow {
                speaker_id: &lex.speaker_id,
                register: lex.register.as_str(),
                type_a: &s.type_a,
                type_b: &s.type_b,
                score: s.score,
                triplets: s.count,
            })
            .map_err(stdout_error)?;
        }
    }
    w.flush().map_err(|e| stdout_error(e.into()))
}

#[derive(Serialize)]
struct NedRow<'a> {
    speaker_id: &'a str,
    register: &'a str,
    types: usize,
    mean_ned: f64,
}

fn raw_ned(a: NedArgs) -> Result<(), RunError> {
    if let Some(path) = &a.types {
        let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.clone(),
            source,
        })?;
        let keys: Vec<String> = text
            .lines()
            .map(|l| phonemes(l).join(" "))
            .filter(|k| !k.is_empty())
            .collect();
        println!("{:?}", mean_ned(&keys)?);
        return Ok(());
    }
    let manifest = a.manifest.as_deref().expect("clap requires --manifest without --types");
    let filter = register_filter(a.registers.as_deref())?;
    let lexicons = selected(&load_manifest(manifest)?, &filter, a.no_onomatopoeia);
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    for lex in &lexicons {
        let keys: Vec<String> = lex.type_keys().into_iter().collect();
        if keys.len() < 2 {
            continue;
        }
        w.serialize(NedRow {
            speaker_id: &lex.speaker_id,
            register: lex.register.as_str(),
            types: keys.len(),
            mean_ned: mean_ned(&keys)?,
        })
        .map_err(stdout_error)?;
    }
    w.flush().map_err(|e| stdout_error(e.into()))
}

fn synth(a: SynthArgs) -> Result<(), RunError> {
    let mut cfg = match a.preset {
        Preset::Jitter => FixtureConfig::added_jitter(),
        Preset::Read => FixtureConfig::read_like(),
        Preset::Vocabulary => FixtureConfig::with_register_vocabulary(),
        Preset::Identical => FixtureConfig {
            y_mode: wordabx::synth::YMode::Identical,
            ..FixtureConfig::default()
        },
    };
    if let Some(n) = a.speakers {
        cfg.n_speakers = n;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    let manifest = write_fixture(&a.out, &cfg).map_err(|source| RunError::Output {
        path: a.out.clone(),
        source,
    })?;
    println!("{}", manifest.display());
    Ok(())
}
