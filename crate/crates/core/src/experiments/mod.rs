//! End-to-end experiment runners and report emission.

mod config;
mod output;
mod runs;
mod workspace;

pub use config::{parse_config_file, parse_registers, Experiment, RunConfig};
pub use output::{output_stem, write_outputs};
pub use runs::{
    matched_samples, run_common_words, run_experiment, run_ned, run_net_abx, Comparison, ExperimentOutput, PairDetail,
    SkippedSpeaker,
};
pub use workspace::Workspace;

use crate::error::RunError;

/// Loads the manifest, runs the experiment and, when `output_dir` is set,
/// writes its reports. Caches live under `output_dir/cache` unless disabled.
pub fn run(cfg: &RunConfig) -> Result<ExperimentOutput, RunError> {
    cfg.validate()?;
    let cache_dir = match (&cfg.output_dir, cfg.use_cache) {
        (Some(dir), true) => Some(dir.join("cache")),
        _ => None,
    };
    let mut ws = Workspace::open(&cfg.manifest_path, cfg.frontend.clone(), cache_dir)?;
    let out = run_experiment(&mut ws, cfg)?;
    if let Some(dir) = &cfg.output_dir {
        write_outputs(dir, &out, cfg, &ws.manifest_hash)?;
    }
    Ok(out)
}
