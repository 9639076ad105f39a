use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::Serialize;

use super::lexicon::{Lexicon, Register, TokenRecord, WordType};
use crate::error::CorpusError;

/// Required manifest header, in canonical order.
pub const MANIFEST_COLUMNS: [&str; 9] = [
    "token_id",
    "speaker_id",
    "register",
    "type_key",
    "audio_path",
    "start_s",
    "end_s",
    "onomatopoeia",
    "exclude",
];

/// Loads a manifest file. Relative audio paths resolve against the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Vec<Lexicon>, CorpusError> {
    let text = std::fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    parse_manifest(&text, base)
}

/// Parses manifest text into lexicons sorted by (speaker_id, register).
///
/// Excluded rows are validated and then dropped. Rows with identical phoneme
/// sequences for the same speaker and register collapse into one [`WordType`].
pub fn parse_manifest(text: &str, base_dir: &Path) -> Result<Vec<Lexicon>, CorpusError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| CorpusError::Header(e.to_string()))?
        .clone();
    let mut index = [0usize; 9];
    for (slot, name) in index.iter_mut().zip(MANIFEST_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CorpusError::Header(format!("missing column `{name}`")))?;
    }

    let mut seen_ids = HashSet::new();
    let mut lexicons: BTreeMap<(String, Register), Lexicon> = BTreeMap::new();

    for (i, record) in reader.records().enumerate() {
        // header is line 1
        let row = i + 2;
        let record = record.map_err(|e| CorpusError::Row {
            row,
            message: e.to_string(),
        })?;
        let field = |c: usize| record.get(index[c]).unwrap_or("");
        let err = |message: String| CorpusError::Row { row, message };

        let token_id = field(0).to_string();
        if token_id.is_empty() {
            return Err(err("empty token_id".into()));
        }
        if !seen_ids.insert(token_id.clone()) {
            return Err(err(format!("duplicate token_id `{token_id}`")));
        }
        let speaker_id = field(1).to_string();
        if speaker_id.is_empty() {
            return Err(err("empty speaker_id".into()));
        }
        let register = field(2);
        if register.is_empty() {
            return Err(err("empty register".into()));
        }
        let type_key = field(3).split_whitespace().collect::<Vec<_>>().join(" ");
        if type_key.is_empty() {
            return Err(err("empty type_key".into()));
        }
        let audio = field(4);
        if audio.is_empty() {
            return Err(err("empty audio_path".into()));
        }
        let start_s = parse_seconds(field(5)).map_err(|m| err(format!("start_s: {m}")))?;
        let end_s = parse_seconds(field(6)).map_err(|m| err(format!("end_s: {m}")))?;
        if start_s < 0.0 || end_s <= start_s {
            return Err(err(format!("malformed interval [{start_s}, {end_s}] for `{token_id}`")));
        }
        let onomatopoeia = parse_flag(field(7)).map_err(|m| err(format!("onomatopoeia: {m}")))?;
        let exclude = parse_flag(field(8)).map_err(|m| err(format!("exclude: {m}")))?;

        let token = TokenRecord {
            token_id,
            speaker_id: speaker_id.clone(),
            register: Register::new(register),
            type_key: type_key.clone(),
            audio_path: base_dir.join(audio),
            start_s,
            end_s,
            onomatopoeia,
            exclude,
        };
        if exclude {
            continue;
        }
        let lex = lexicons
            .entry((speaker_id.clone(), token.register.clone()))
            .or_insert_with(|| Lexicon::new(speaker_id, token.register.clone()));
        match lex.types.get_mut(&type_key) {
            Some(word) => {
                if word.onomatopoeia != onomatopoeia {
                    return Err(err(format!(
                        "onomatopoeia flag of `{type_key}` disagrees with earlier tokens"
                    )));
                }
                word.tokens.push(token);
            }
            None => {
                lex.types.insert(
                    type_key.clone(),
                    WordType {
                        type_key,
                        tokens: vec![token],
                        onomatopoeia,
                    },
                );
            }
        }
    }

    Ok(lexicons.into_values().collect())
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a decimal number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

fn parse_flag(s: &str) -> Result<bool, String> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(format!("expected 0 or 1, got `{other}`")),
    }
}

/// Corpus-level totals for one register.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegisterSummary {
    pub register: Register,
    pub duration_s: f64,
    /// Distinct type keys across all speakers.
    pub types: usize,
    pub tokens: usize,
    pub speakers: usize,
}

/// Duration, type and token totals per register. Registers without tokens do not appear.
pub fn summarize_corpus(lexicons: &[Lexicon]) -> Vec<RegisterSummary> {
    // duration, type keys, tokens, speakers
    type Totals<'a> = (f64, BTreeSet<&'a str>, usize, BTreeSet<&'a str>);
    let mut acc: BTreeMap<Register, Totals> = BTreeMap::new();
    for lex in lexicons {
        if lex.token_count() == 0 {
            continue;
        }
        let entry = acc.entry(lex.register.clone()).or_default();
        entry.3.insert(&lex.speaker_id);
        for word in lex.types.values() {
            entry.1.insert(&word.type_key);
            for tok in &word.tokens {
                entry.0 += tok.duration_s();
                entry.2 += 1;
            }
        }
    }
    acc.into_iter()
        .map(|(register, (duration_s, types, tokens, speakers))| RegisterSummary {
            register,
            duration_s,
            types: types.len(),
            tokens,
            speakers: speakers.len(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "token_id,speaker_id,register,type_key,audio_path,start_s,end_s,onomatopoeia,exclude\n";

    fn parse(body: &str) -> Result<Vec<Lexicon>, CorpusError> {
        parse_manifest(&format!("{HEADER}{body}"), Path::new("/data"))
    }

    #[test]
    fn partitions_by_speaker_and_register() {
        let lex = parse(
            "a,s2,IDS,k a,a.wav,0,1,0,0\n\
             b,s1,IDS,k a,a.wav,0,1,0,0\n\
             c,s1,ADS,k a,a.wav,0,1,0,0\n\
             d,s2,ADS,k a,a.wav,0,1,0,0\n",
        )
        .unwrap();
        let keys: Vec<_> = lex
            .iter()
            .map(|l| (l.speaker_id.as_str(), l.register.as_str()))
            .collect();
        assert_eq!(keys, vec![("s1", "ADS"), ("s1", "IDS"), ("s2", "ADS"), ("s2", "IDS")]);
    }

    #[test]
    fn homophones_collapse() {
        let lex = parse(
            "t1, s1, IDS, w a N w a N, a.wav, 0.0, 0.4, 1, 0\n\
             t2, s1, IDS, w a N w a N, a.wav, 1.0, 1.5, 1, 0\n",
        )
        .unwrap();
        assert_eq!(lex.len(), 1);
        let word = &lex[0].types["w a N w a N"];
        assert_eq!(word.token_count(), 2);
        assert!(word.onomatopoeia);
        assert_eq!(word.tokens[0].audio_path, Path::new("/data/a.wav"));
    }

    #[test]
    fn excluded_rows_are_dropped() {
        let lex = parse(
            "t1,s1,IDS,n e k o,a.wav,0,0.4,0,1\n\
             t2,s1,IDS,i n u,a.wav,1,1.5,0,0\n",
        )
        .unwrap();
        assert_eq!(lex[0].type_keys().len(), 1);
        assert!(!lex[0].types.contains_key("n e k o"));
    }

    #[test]
    fn row_errors_name_the_row() {
        let bad_interval = parse("t1,s1,IDS,a,a.wav,0.5,0.5,0,0\n").unwrap_err();
        assert!(
            matches!(bad_interval, CorpusError::Row { row: 2, .. }),
            "{bad_interval}"
        );

        let dup = parse("t1,s1,IDS,a,a.wav,0,1,0,0\nt1,s1,IDS,b,a.wav,0,1,0,0\n").unwrap_err();
        assert!(matches!(dup, CorpusError::Row { row: 3, .. }), "{dup}");

        let flag = parse("t1,s1,IDS,a,a.wav,0,1,0,0\nt2,s1,IDS,a,a.wav,1,2,1,0\n").unwrap_err();
        assert!(matches!(flag, CorpusError::Row { row: 3, .. }), "{flag}");

        let bool_err = parse("t1,s1,IDS,a,a.wav,0,1,yes,0\n").unwrap_err();
        assert!(matches!(bool_err, CorpusError::Row { row: 2, .. }));
    }

    #[test]
    fn missing_column_is_a_header_error() {
        let err = parse_manifest("token_id,speaker_id\nx,y\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, CorpusError::Header(ref m) if m.contains("register")));
    }

    #[test]
    fn type_key_whitespace_normalized() {
        let lex = parse("t1,s1,IDS,  k   a  ,a.wav,0,1,0,0\n").unwrap();
        assert!(lex[0].types.contains_key("k a"));
    }

    #[test]
    fn summary_counts() {
        let lex = parse(
            "t1,s1,ADS,k a,a.wav,0,0.5,0,0\n\
             t2,s1,ADS,k a,a.wav,1,1.25,0,0\n\
             t3,s1,ADS,i n u,a.wav,2,3,0,0\n\
             t4,s1,IDS,i n u,a.wav,2,3,0,1\n",
        )
        .unwrap();
        let summary = summarize_corpus(&lex);
        assert_eq!(summary.len(), 1);
        assert_eq!(summary[0].register.as_str(), "ADS");
        assert_eq!(summary[0].types, 2);
        assert_eq!(summary[0].tokens, 3);
        assert!((summary[0].duration_s - 1.75).abs() < 1e-12);
    }
}
