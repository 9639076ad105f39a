//! Synthetic two-register corpora with controlled acoustic and lexical structure.
//!
//! Every phoneme is rendered as a sum of three sinusoids ("formants") over a
//! faint noise floor. A token perturbs each phoneme's formant frequencies,
//! amplitudes and duration with log-normal jitter. Register Y tokens of shared
//! types reuse the jitter draws of the matching register X token, so the
//! Y register is the X register plus (or minus) a controlled perturbation.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::audio::write_wav_i16;

/// How register Y relates to register X.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum YMode {
    /// Same audio in both registers.
    Identical,
    /// X jitter plus an independent extra jitter of this log-scale size.
    AddJitter(f64),
    /// X jitter scaled by this factor (< 1 gives cleaner, "read-like" tokens).
    ScaleJitter(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixtureConfig {
    pub n_speakers: usize,
    pub register_x: String,
    pub register_y: String,
    pub shared_types: usize,
    pub x_only_types: usize,
    pub y_only_types: usize,
    /// Reduplicated types present only in register Y, flagged as onomatopoeia.
    pub y_onomatopoeia_types: usize,
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Log-scale jitter of formant frequencies in register X.
    pub jitter: f64,
    pub y_mode: YMode,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for FixtureConfig {
    fn default() -> Self {
        FixtureConfig {
            n_speakers: 10,
            register_x: "ADS".into(),
            register_y: "IDS".into(),
            shared_types: 20,
            x_only_types: 0,
            y_only_types: 0,
            y_onomatopoeia_types: 0,
            min_tokens: 2,
            max_tokens: 4,
            jitter: 0.18,
            y_mode: YMode::AddJitter(0.12),
            sample_rate: 16_000,
            seed: 1,
        }
    }
}

impl FixtureConfig {
    /// Y tokens are X tokens with extra within-type jitter (infant-directed-like).
    pub fn added_jitter() -> Self {
        Self::default()
    }

    /// Y tokens carry 30% of X's jitter (read-speech-like).
    pub fn read_like() -> Self {
        FixtureConfig {
            register_y: "RS".into(),
            y_mode: YMode::ScaleJitter(0.3),
            ..Self::default()
        }
    }

    /// Register-specific vocabulary on top of the shared types: 8 X-only and
    /// 8 Y-only plain words, plus 12 reduplicated onomatopoeic Y types
    /// (30% of the Y lexicon).
    pub fn with_register_vocabulary() -> Self {
        FixtureConfig {
            x_only_types: 8,
            y_only_types: 8,
            y_onomatopoeia_types: 12,
            ..Self::default()
        }
    }
}

struct Phone {
    symbol: &'static str,
    vowel: bool,
    formants: [f64; 3],
    amps: [f64; 3],
}

const PHONES: &[Phone] = &[
    Phone {
        symbol: "a",
        vowel: true,
        formants: [750.0, 1200.0, 2600.0],
        amps: [1.0, 0.7, 0.3],
    },
    Phone {
        symbol: "i",
        vowel: true,
        formants: [300.0, 2300.0, 3000.0],
        amps: [1.0, 0.5, 0.4],
    },
    Phone {
        symbol: "u",
        vowel: true,
        formants: [350.0, 1300.0, 2300.0],
        amps: [1.0, 0.4, 0.2],
    },
    Phone {
        symbol: "e",
        vowel: true,
        formants: [480.0, 1900.0, 2600.0],
        amps: [1.0, 0.6, 0.3],
    },
    Phone {
        symbol: "o",
        vowel: true,
        formants: [480.0, 850.0, 2500.0],
        amps: [1.0, 0.8, 0.2],
    },
    Phone {
        symbol: "k",
        vowel: false,
        formants: [1700.0, 2900.0, 4000.0],
        amps: [0.6, 1.0, 0.5],
    },
    Phone {
        symbol: "t",
        vowel: false,
        formants: [3300.0, 4300.0, 5300.0],
        amps: [0.5, 1.0, 0.7],
    },
    Phone {
        symbol: "p",
        vowel: false,
        formants: [700.0, 1500.0, 2700.0],
        amps: [1.0, 0.6, 0.6],
    },
    Phone {
        symbol: "s",
        vowel: false,
        formants: [4600.0, 5600.0, 6300.0],
        amps: [0.6, 1.0, 0.8],
    },
    Phone {
        symbol: "m",
        vowel: false,
        formants: [250.0, 1000.0, 2200.0],
        amps: [1.0, 0.2, 0.2],
    },
    Phone {
        symbol: "n",
        vowel: false,
        formants: [250.0, 1600.0, 2600.0],
        amps: [1.0, 0.3, 0.25],
    },
    Phone {
        symbol: "r",
        vowel: false,
        formants: [420.0, 1300.0, 1700.0],
        amps: [1.0, 0.6, 0.5],
    },
    Phone {
        symbol: "w",
        vowel: false,
        formants: [300.0, 650.0, 2200.0],
        amps: [1.0, 0.7, 0.1],
    },
    Phone {
        symbol: "g",
        vowel: false,
        formants: [350.0, 1800.0, 2300.0],
        amps: [1.0, 0.5, 0.5],
    },
    Phone {
        symbol: "h",
        vowel: false,
        formants: [900.0, 2000.0, 3200.0],
        amps: [0.6, 0.6, 1.0],
    },
    Phone {
        symbol: "N",
        vowel: false,
        formants: [260.0, 1250.0, 2400.0],
        amps: [1.0, 0.35, 0.15],
    },
];

const PHONE_S: f64 = 0.07;
const GAP_S: f64 = 0.05;
const NOISE: f64 = 0.003;
/// Probability that a new plain word is a one-phoneme neighbor of an earlier one.
const NEIGHBOR_RATE: f64 = 0.6;

fn phone(symbol: &str) -> &'static Phone {
    PHONES.iter().find(|p| p.symbol == symbol).expect("known phone")
}

fn vowels() -> Vec<&'static str> {
    PHONES.iter().filter(|p| p.vowel).map(|p| p.symbol).collect()
}

fn consonants() -> Vec<&'static str> {
    PHONES
        .iter()
        .filter(|p| !p.vowel && p.symbol != "N")
        .map(|p| p.symbol)
        .collect()
}

/// Random CV-structured word of 3 to 5 phonemes.
fn plain_word(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let (v, c) = (vowels(), consonants());
    let len = rng.random_range(3..=5);
    let start_vowel = rng.random_bool(0.3);
    (0..len)
        .map(|i| {
            let is_vowel = (i % 2 == 0) == start_vowel;
            *if is_vowel { &v } else { &c }.choose(rng).expect("non-empty")
        })
        .collect()
}

/// Copy of `word` with one phoneme replaced by another of the same class.
fn neighbor(word: &[&'static str], rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut w = word.to_vec();
    let k = rng.random_range(0..w.len());
    let pool = if phone(w[k]).vowel { vowels() } else { consonants() };
    let options: Vec<&str> = pool.into_iter().filter(|p| *p != w[k]).collect();
    w[k] = options.choose(rng).expect("alternatives");
    w
}

/// Reduplicated form: CVCV+CVCV or CVN+CVN.
fn reduplicated_word(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let (v, c) = (vowels(), consonants());
    let base: Vec<&str> = if rng.random_bool(0.5) {
        vec![
            *c.choose(rng).unwrap(),
            *v.choose(rng).unwrap(),
            *c.choose(rng).unwrap(),
            *v.choose(rng).unwrap(),
        ]
    } else {
        vec![*c.choose(rng).unwrap(), *v.choose(rng).unwrap(), "N"]
    };
    base.iter().chain(base.iter()).copied().collect()
}

/// Per-phoneme jitter draws of one token: 3 frequency, 3 amplitude, 1 duration.
type Draws = Vec<[f64; 7]>;

fn draws(rng: &mut ChaCha8Rng, n: usize) -> Draws {
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.sample::<f64, _>(StandardNormal)))
        .collect()
}

fn render(
    word: &[&str],
    offsets: &Draws,
    scale: f64,
    extra: Option<(&Draws, f64)>,
    tract: f64,
    sr: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut out = Vec::new();
    for (k, sym) in word.iter().enumerate() {
        let p = phone(sym);
        let z = |m: usize| offsets[k][m] * scale + extra.map_or(0.0, |(e, s)| e[k][m] * s);
        let dur = PHONE_S * (0.5 * z(6)).exp();
        let n = (dur * sr).round() as usize;
        let freqs: Vec<f64> = (0..3).map(|m| p.formants[m] * tract * z(m).exp()).collect();
        let amps: Vec<f64> = (0..3).map(|m| p.amps[m] * z(3 + m).exp()).collect();
        let phases: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        for i in 0..n {
            let t = i as f64 / sr;
            let v: f64 = (0..3)
                .map(|m| amps[m] * (std::f64::consts::TAU * freqs[m] * t + phases[m]).sin())
                .sum();
            out.push(0.15 * v);
        }
    }
    for s in &mut out {
        *s += NOISE * rng.sample::<f64, _>(StandardNormal);
    }
    out
}

struct Token {
    type_key: String,
    onomatopoeia: bool,
    audio: Vec<f64>,
}

/// Writes `manifest.csv` and one WAV per speaker and register into `dir`.
/// Returns the manifest path.
pub fn write_fixture(dir: &Path, cfg: &FixtureConfig) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let sr = f64::from(cfg.sample_rate);
    let mut manifest =
        String::from("token_id,speaker_id,register,type_key,audio_path,start_s,end_s,onomatopoeia,exclude\n");
    for s in 0..cfg.n_speakers {
        let speaker = format!("spk{s:02}");
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(s as u64);
        let tract = rng.random_range(0.92..1.08);

        let mut used = BTreeSet::new();
        let mut plain: Vec<Vec<&'static str>> = Vec::new();
        let mut fresh = |rng: &mut ChaCha8Rng, redup: bool| loop {
            let w = if redup {
                reduplicated_word(rng)
            } else if !plain.is_empty() && rng.random_bool(NEIGHBOR_RATE) {
                neighbor(plain.choose(rng).expect("non-empty"), rng)
            } else {
                plain_word(rng)
            };
            if used.insert(w.join(" ")) {
                if !redup {
                    plain.push(w.clone());
                }
                return w;
            }
        };
        let shared: Vec<_> = (0..cfg.shared_types).map(|_| fresh(&mut rng, false)).collect();
        let x_only: Vec<_> = (0..cfg.x_only_types).map(|_| fresh(&mut rng, false)).collect();
        let y_only: Vec<_> = (0..cfg.y_only_types).map(|_| fresh(&mut rng, false)).collect();
        let y_ono: Vec<_> = (0..cfg.y_onomatopoeia_types).map(|_| fresh(&mut rng, true)).collect();

        let mut xs: Vec<Token> = Vec::new();
        let mut ys: Vec<Token> = Vec::new();
        let count = |rng: &mut ChaCha8Rng| rng.random_range(cfg.min_tokens..=cfg.max_tokens);

        for word in &shared {
            let key = word.join(" ");
            for _ in 0..count(&mut rng) {
                let base = draws(&mut rng, word.len());
                let extra = draws(&mut rng, word.len());
                let x_audio = render(word, &base, cfg.jitter, None, tract, sr, &mut rng);
                let y_audio = match cfg.y_mode {
                    YMode::Identical => x_audio.clone(),
                    YMode::AddJitter(e) => render(word, &base, cfg.jitter, Some((&extra, e)), tract, sr, &mut rng),
                    YMode::ScaleJitter(f) => render(word, &base, cfg.jitter * f, None, tract, sr, &mut rng),
                };
                xs.push(Token {
                    type_key: key.clone(),
                    onomatopoeia: false,
                    audio: x_audio,
                });
                ys.push(Token {
                    type_key: key.clone(),
                    onomatopoeia: false,
                    audio: y_audio,
                });
            }
        }
        // register-only Y types get the same jitter level as shared Y tokens
        let (y_scale, y_extra) = match cfg.y_mode {
            YMode::Identical => (cfg.jitter, 0.0),
            YMode::AddJitter(extra) => (cfg.jitter, extra),
            YMode::ScaleJitter(f) => (cfg.jitter * f, 0.0),
        };
        for word in &x_only {
            for _ in 0..count(&mut rng) {
                let base = draws(&mut rng, word.len());
                let audio = render(word, &base, cfg.jitter, None, tract, sr, &mut rng);
                xs.push(Token {
                    type_key: word.join(" "),
                    onomatopoeia: false,
                    audio,
                });
            }
        }
        for (words, ono) in [(&y_only, false), (&y_ono, true)] {
            for word in words {
                for _ in 0..count(&mut rng) {
                    let base = draws(&mut rng, word.len());
                    let extra = draws(&mut rng, word.len());
                    let audio = render(word, &base, y_scale, Some((&extra, y_extra)), tract, sr, &mut rng);
                    ys.push(Token {
                        type_key: word.join(" "),
                        onomatopoeia: ono,
                        audio,
                    });
                }
            }
        }

        for (register, tokens) in [(&cfg.register_x, xs), (&cfg.register_y, ys)] {
            let file = format!("{speaker}_{register}.wav");
            let gap = vec![0.0; (GAP_S * sr) as usize];
            let mut signal = gap.clone();
            for (i, tok) in tokens.iter().enumerate() {
                let start = signal.len() as f64 / sr;
                signal.extend_from_slice(&tok.audio);
                let end = signal.len() as f64 / sr;
                signal.extend_from_slice(&gap);
                let _ = writeln!(
                    manifest,
                    "{speaker}_{register}_{i:04},{speaker},{register},{},{file},{start:.6},{end:.6},{},0",
                    tok.type_key,
                    u8::from(tok.onomatopoeia)
                );
            }
            write_wav_i16(&dir.join(&file), cfg.sample_rate, &signal)
                .map_err(|e| std::io::Error::other(e.to_string()))?;
        }
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest)?;
    Ok(path)
}
