use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::CorpusError;

/// Speech register label (`ADS`, `IDS`, `RS`, ...). Any non-empty label is accepted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Register(String);

impl Register {
    pub fn new(label: impl Into<String>) -> Self {
        Register(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Register {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Register {
    fn from(s: &str) -> Self {
        Register::new(s)
    }
}

/// One acoustic realization of a word.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenRecord {
    pub token_id: String,
    pub speaker_id: String,
    pub register: Register,
    /// Phonemes joined by single spaces.
    pub type_key: String,
    pub audio_path: PathBuf,
    pub start_s: f64,
    pub end_s: f64,
    pub onomatopoeia: bool,
    pub exclude: bool,
}

impl TokenRecord {
    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }
}

/// A word category: every token sharing one phoneme sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WordType {
    pub type_key: String,
    pub tokens: Vec<TokenRecord>,
    pub onomatopoeia: bool,
}

impl WordType {
    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn phonemes(&self) -> Vec<&str> {
        self.type_key.split(' ').collect()
    }
}

/// All word types one speaker produced in one register.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    pub speaker_id: String,
    pub register: Register,
    pub types: BTreeMap<String, WordType>,
}

impl Lexicon {
    pub fn new(speaker_id: impl Into<String>, register: Register) -> Self {
        Lexicon {
            speaker_id: speaker_id.into(),
            register,
            types: BTreeMap::new(),
        }
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn token_count(&self) -> usize {
        self.types.values().map(WordType::token_count).sum()
    }

    pub fn type_keys(&self) -> BTreeSet<String> {
        self.types.keys().cloned().collect()
    }

    /// Tokens in type-key order, then manifest order within a type.
    pub fn tokens(&self) -> impl Iterator<Item = &TokenRecord> {
        self.types.values().flat_map(|t| t.tokens.iter())
    }

    /// Copy restricted to the given type keys. Unknown keys are ignored.
    pub fn restrict<'a, I>(&self, keys: I) -> Lexicon
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut out = Lexicon::new(self.speaker_id.clone(), self.register.clone());
        for k in keys {
            if let Some(t) = self.types.get(k) {
                out.types.insert(k.clone(), t.clone());
            }
        }
        out
    }
}

/// Type keys present in both lexicons of one speaker.
pub fn common_types(a: &Lexicon, b: &Lexicon) -> Result<BTreeSet<String>, CorpusError> {
    if a.speaker_id != b.speaker_id {
        return Err(CorpusError::Usage(format!(
            "common_types across speakers {} and {}",
            a.speaker_id, b.speaker_id
        )));
    }
    Ok(a.types.keys().filter(|k| b.types.contains_key(*k)).cloned().collect())
}

/// Drops every onomatopoeic word type.
pub fn remove_onomatopoeia(lex: &Lexicon) -> Lexicon {
    Lexicon {
        speaker_id: lex.speaker_id.clone(),
        register: lex.register.clone(),
        types: lex
            .types
            .iter()
            .filter(|(_, t)| !t.onomatopoeia)
            .map(|(k, t)| (k.clone(), t.clone()))
            .collect(),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn lexicon(speaker: &str, reg: &str, types: &[(&str, usize, bool)]) -> Lexicon {
        let mut lex = Lexicon::new(speaker, Register::new(reg));
        for (key, n, ono) in types {
            let tokens = (0..*n)
                .map(|i| TokenRecord {
                    token_id: format!("{speaker}-{reg}-{key}-{i}"),
                    speaker_id: speaker.to_string(),
                    register: Register::new(reg),
                    type_key: key.to_string(),
                    audio_path: PathBuf::from("x.wav"),
                    start_s: i as f64,
                    end_s: i as f64 + 0.5,
                    onomatopoeia: *ono,
                    exclude: false,
                })
                .collect();
            lex.types.insert(
                key.to_string(),
                WordType {
                    type_key: key.to_string(),
                    tokens,
                    onomatopoeia: *ono,
                },
            );
        }
        lex
    }

    #[test]
    fn intersection_of_type_sets() {
        let a = lexicon("s1", "ADS", &[("k a t", 1, false), ("d o g", 2, false)]);
        let b = lexicon("s1", "IDS", &[("d o g", 1, false), ("f i S", 3, false)]);
        let c = common_types(&a, &b).unwrap();
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec!["d o g".to_string()]);
        assert_eq!(common_types(&b, &a).unwrap(), common_types(&a, &b).unwrap());
        assert_eq!(common_types(&a, &a).unwrap(), a.type_keys());
    }

    #[test]
    fn disjoint_lexicons_share_nothing() {
        let a = lexicon("s1", "ADS", &[("a", 1, false)]);
        let b = lexicon("s1", "IDS", &[("b", 1, false)]);
        assert!(common_types(&a, &b).unwrap().is_empty());
    }

    #[test]
    fn cross_speaker_intersection_is_rejected() {
        let a = lexicon("s1", "ADS", &[("a", 1, false)]);
        let b = lexicon("s2", "ADS", &[("a", 1, false)]);
        assert!(matches!(common_types(&a, &b), Err(CorpusError::Usage(_))));
    }

    #[test]
    fn onomatopoeia_removal() {
        let lex = lexicon("s1", "IDS", &[("w a N w a N", 3, true), ("n e k o", 1, false)]);
        let out = remove_onomatopoeia(&lex);
        assert_eq!(out.type_keys().into_iter().collect::<Vec<_>>(), vec!["n e k o"]);
        assert_eq!(remove_onomatopoeia(&out), out);

        let plain = lexicon("s1", "ADS", &[("a", 1, false), ("b", 2, false)]);
        assert_eq!(remove_onomatopoeia(&plain), plain);
    }
}
