use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::lexicon::{Lexicon, Register};
use crate::error::CorpusError;

/// A frequency-weighted subset of one lexicon's word types.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SampledLexicon {
    pub speaker_id: String,
    pub register: Register,
    pub sample_index: usize,
    pub seed: u64,
    pub type_keys: BTreeSet<String>,
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes
        .iter()
        .fold(FNV_OFFSET, |h, b| (h ^ u64::from(*b)).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha8 generator for one (seed, speaker, register, sample) stream.
///
/// The key mixes the run seed with FNV-1a hashes of the speaker and register
/// labels; the sample index selects the ChaCha stream.
pub fn sample_rng(seed: u64, speaker_id: &str, register: &Register, sample_index: usize) -> ChaCha8Rng {
    let key =
        splitmix64(seed ^ splitmix64(fnv1a(speaker_id.as_bytes()) ^ splitmix64(fnv1a(register.as_str().as_bytes()))));
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(sample_index as u64);
    rng
}

/// Draws `n_samples` subsets of `target_size` types without replacement.
///
/// Each draw picks among the remaining types with probability proportional to
/// their token counts; weights renormalize after every draw.
pub fn sample_lexicons(
    lex: &Lexicon,
    target_size: usize,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<SampledLexicon>, CorpusError> {
    let available = lex.type_count();
    if target_size == 0 || target_size > available {
        return Err(CorpusError::Usage(format!(
            "cannot sample {target_size} types from {available} (speaker {}, {})",
            lex.speaker_id, lex.register
        )));
    }
    if n_samples == 0 {
        return Err(CorpusError::Usage("n_samples must be at least 1".into()));
    }

    let pool: Vec<(&String, u64)> = lex.types.iter().map(|(k, t)| (k, t.token_count() as u64)).collect();

    Ok((0..n_samples)
        .map(|sample_index| {
            let type_keys = if target_size == available {
                pool.iter().map(|(k, _)| (*k).clone()).collect()
            } else {
                let mut rng = sample_rng(seed, &lex.speaker_id, &lex.register, sample_index);
                weighted_draw(&pool, target_size, &mut rng)
            };
            SampledLexicon {
                speaker_id: lex.speaker_id.clone(),
                register: lex.register.clone(),
                sample_index,
                seed,
                type_keys,
            }
        })
        .collect())
}

fn weighted_draw<R: Rng>(pool: &[(&String, u64)], k: usize, rng: &mut R) -> BTreeSet<String> {
    let mut remaining: Vec<(&String, u64)> = pool.to_vec();
    let mut total: u64 = remaining.iter().map(|(_, w)| w).sum();
    let mut chosen = BTreeSet::new();
    for _ in 0..k {
        let mut r = rng.random_range(0..total);
        let pos = remaining
            .iter()
            .position(|(_, w)| {
                if r < *w {
                    true
                } else {
                    r -= w;
                    false
                }
            })
            .expect("draw within total weight");
        let (key, w) = remaining.remove(pos);
        total -= w;
        chosen.insert(key.clone());
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::lexicon::tests::lexicon;

    #[test]
    fn sizes_and_counts() {
        let types: Vec<(String, usize, bool)> = (0..237).map(|i| (format!("w{i:03}"), 1 + i % 7, false)).collect();
        let refs: Vec<(&str, usize, bool)> = types.iter().map(|(k, n, o)| (k.as_str(), *n, *o)).collect();
        let lex = lexicon("s1", "IDS", &refs);
        let samples = sample_lexicons(&lex, 82, 100, 7).unwrap();
        assert_eq!(samples.len(), 100);
        for (i, s) in samples.iter().enumerate() {
            assert_eq!(s.sample_index, i);
            assert_eq!(s.type_keys.len(), 82);
            assert!(s.type_keys.iter().all(|k| lex.types.contains_key(k)));
        }
        assert_ne!(samples[0].type_keys, samples[1].type_keys);
    }

    #[test]
    fn saturated_sampling_returns_full_set() {
        let lex = lexicon("s1", "ADS", &[("a", 3, false), ("b", 1, false), ("c", 2, false)]);
        for s in sample_lexicons(&lex, 3, 5, 1).unwrap() {
            assert_eq!(s.type_keys, lex.type_keys());
        }
    }

    #[test]
    fn oversized_request_is_rejected() {
        let lex = lexicon("s1", "ADS", &[("a", 3, false)]);
        assert!(matches!(sample_lexicons(&lex, 2, 1, 0), Err(CorpusError::Usage(_))));
        assert!(matches!(sample_lexicons(&lex, 1, 0, 0), Err(CorpusError::Usage(_))));
    }

    #[test]
    fn first_draw_follows_token_weights() {
        let lex = lexicon("s1", "IDS", &[("A", 9, false), ("B", 1, false)]);
        let samples = sample_lexicons(&lex, 1, 10_000, 2024).unwrap();
        let hits = samples.iter().filter(|s| s.type_keys.contains("A")).count();
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 0.9).abs() <= 0.01, "A frequency {freq}");
    }

    #[test]
    fn marginals_within_three_sigma() {
        let lex = lexicon(
            "s9",
            "ADS",
            &[("a", 1, false), ("b", 2, false), ("c", 3, false), ("d", 4, false)],
        );
        let n = 20_000;
        let samples = sample_lexicons(&lex, 1, n, 99).unwrap();
        for (key, w) in [("a", 1.0), ("b", 2.0), ("c", 3.0), ("d", 4.0)] {
            let p = w / 10.0;
            let hits = samples.iter().filter(|s| s.type_keys.contains(key)).count() as f64;
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((hits / n as f64 - p).abs() < 3.0 * sigma, "{key}: {}", hits / n as f64);
        }
    }

    #[test]
    fn deterministic_per_seed_and_stream() {
        let lex = lexicon(
            "s1",
            "IDS",
            &[("a", 1, false), ("b", 5, false), ("c", 2, false), ("d", 1, false)],
        );
        let a = sample_lexicons(&lex, 2, 20, 42).unwrap();
        let b = sample_lexicons(&lex, 2, 20, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_lexicons(&lex, 2, 20, 43).unwrap();
        assert_ne!(
            a.iter().map(|s| &s.type_keys).collect::<Vec<_>>(),
            c.iter().map(|s| &s.type_keys).collect::<Vec<_>>()
        );
    }

    #[test]
    fn streams_differ_by_speaker_and_register() {
        let r = Register::new("IDS");
        let x: u64 = sample_rng(1, "s1", &r, 0).random();
        let y: u64 = sample_rng(1, "s2", &r, 0).random();
        let z: u64 = sample_rng(1, "s1", &Register::new("ADS"), 0).random();
        let w: u64 = sample_rng(1, "s1", &r, 1).random();
        assert!(x != y && x != z && x != w);
    }
}
