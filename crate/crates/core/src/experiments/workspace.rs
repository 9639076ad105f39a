use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::audio::Pcm;
use crate::cache::{self, content_hash};
use crate::corpus::{parse_manifest, Lexicon, Register, TokenRecord};
use crate::distance::{build_distance_table, DistanceTable};
use crate::error::{CorpusError, FeatureError, RunError};
use crate::features::{FeatureSequence, Frontend, FrontendConfig};

/// A token to featurize, with its audio, front end and cache file.
type FeatureJob = (TokenRecord, Arc<Pcm<f64>>, Arc<Frontend<f64>>, Option<PathBuf>);

/// Loaded manifest plus audio, feature and distance-table caches for one run.
pub struct Workspace {
    pub lexicons: Vec<Lexicon>,
    pub manifest_hash: String,
    frontend_cfg: FrontendConfig,
    cache_dir: Option<PathBuf>,
    audio: HashMap<PathBuf, (Arc<Pcm<f64>>, String)>,
    frontends: HashMap<u32, Arc<Frontend<f64>>>,
}

impl Workspace {
    /// Reads and parses the manifest. With `cache_dir`, features and tables persist there.
    pub fn open(manifest: &Path, frontend_cfg: FrontendConfig, cache_dir: Option<PathBuf>) -> Result<Self, RunError> {
        let bytes = std::fs::read(manifest).map_err(|source| CorpusError::Io {
            path: manifest.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| CorpusError::Header("manifest is not UTF-8".into()))?;
        let base = manifest.parent().unwrap_or_else(|| Path::new(""));
        Ok(Workspace {
            lexicons: parse_manifest(&text, base)?,
            manifest_hash: content_hash([&bytes]),
            frontend_cfg,
            cache_dir,
            audio: HashMap::new(),
            frontends: HashMap::new(),
        })
    }

    pub fn lexicon(&self, speaker_id: &str, register: &Register) -> Option<&Lexicon> {
        self.lexicons
            .iter()
            .find(|l| l.speaker_id == speaker_id && &l.register == register)
    }

    /// Speakers with tokens in both registers, sorted.
    pub fn speakers_with(&self, x: &Register, y: &Register) -> Vec<String> {
        let mut out: Vec<String> = self
            .lexicons
            .iter()
            .filter(|l| &l.register == x && self.lexicon(&l.speaker_id, y).is_some())
            .map(|l| l.speaker_id.clone())
            .collect();
        out.dedup();
        out
    }

    pub fn registers(&self) -> Vec<Register> {
        let mut regs: Vec<Register> = self.lexicons.iter().map(|l| l.register.clone()).collect();
        regs.sort();
        regs.dedup();
        regs
    }

    fn load_audio(&mut self, path: &Path) -> Result<(Arc<Pcm<f64>>, String), FeatureError> {
        if let Some(hit) = self.audio.get(path) {
            return Ok(hit.clone());
        }
        let bytes = std::fs::read(path).map_err(|e| FeatureError::Ingestion {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let pcm = Arc::new(Pcm::<f64>::read_wav(path)?);
        let entry = (pcm, content_hash([&bytes]));
        self.audio.insert(path.to_path_buf(), entry.clone());
        Ok(entry)
    }

    fn frontend(&mut self, sample_rate: u32, path: &Path) -> Result<Arc<Frontend<f64>>, FeatureError> {
        if f64::from(sample_rate) < 2.0 * self.frontend_cfg.f_max_hz {
            return Err(FeatureError::Ingestion {
                path: path.display().to_string(),
                message: format!(
                    "sample rate {sample_rate} Hz below 2 x f_max ({} Hz)",
                    self.frontend_cfg.f_max_hz
                ),
            });
        }
        if let Some(fe) = self.frontends.get(&sample_rate) {
            return Ok(fe.clone());
        }
        let fe = Arc::new(Frontend::new(&self.frontend_cfg, sample_rate)?);
        self.frontends.insert(sample_rate, fe.clone());
        Ok(fe)
    }

    fn feature_path(&self, key: &str) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|d| d.join("features").join(format!("{key}.bin")))
    }

    /// Feature sequences for every token of `lex`, in lexicon order.
    pub fn features(&mut self, lex: &Lexicon) -> Result<Vec<FeatureSequence<f64>>, RunError> {
        let fingerprint = self.frontend_cfg.fingerprint();
        let mut jobs: Vec<FeatureJob> = Vec::new();
        for tok in lex.tokens() {
            let (pcm, audio_hash) = self.load_audio(&tok.audio_path)?;
            let fe = self.frontend(pcm.sample_rate, &tok.audio_path)?;
            let key = content_hash([
                audio_hash.as_str(),
                &tok.start_s.to_string(),
                &tok.end_s.to_string(),
                &fingerprint,
            ]);
            jobs.push((tok.clone(), pcm, fe, self.feature_path(&key)));
        }
        jobs.par_iter()
            .map(|(tok, pcm, fe, cache_path)| {
                if let Some(path) = cache_path {
                    if let Some(seq) = cache::load_if_valid(path, |f| {
                        cache::read_features::<f64, _>(std::io::BufReader::new(f), &tok.token_id)
                    }) {
                        return Ok(seq);
                    }
                }
                let samples = pcm
                    .segment(tok.start_s, tok.end_s)
                    .map_err(|message| FeatureError::Ingestion {
                        path: format!("{} ({})", tok.audio_path.display(), tok.token_id),
                        message,
                    })?;
                let seq = fe.featurize(&tok.token_id, samples);
                if let Some(path) = cache_path {
                    cache::store(path, |w| cache::write_features(w, &seq)).map_err(|source| RunError::Output {
                        path: path.clone(),
                        source,
                    })?;
                }
                Ok(seq)
            })
            .collect()
    }

    /// Distance table over every token of `lex`, in lexicon order.
    pub fn distance_table(&mut self, lex: &Lexicon) -> Result<DistanceTable<f64>, RunError> {
        let ids: Vec<String> = lex.tokens().map(|t| t.token_id.clone()).collect();
        let cache_path = self.cache_dir.as_ref().map(|d| {
            let key = content_hash([
                self.manifest_hash.as_str(),
                &self.frontend_cfg.fingerprint(),
                &ids.join("\n"),
            ]);
            d.join("tables").join(format!("{key}.bin"))
        });
        if let Some(path) = &cache_path {
            if let Some(t) = cache::load_if_valid(path, |f| {
                cache::read_table::<f64, _>(std::io::BufReader::new(f), ids.clone())
            }) {
                return Ok(t);
            }
        }
        let feats = self.features(lex)?;
        let table = build_distance_table(&feats)?;
        if let Some(path) = &cache_path {
            cache::store(path, |w| cache::write_table(w, &table)).map_err(|source| RunError::Output {
                path: path.clone(),
                source,
            })?;
        }
        Ok(table)
    }
}
