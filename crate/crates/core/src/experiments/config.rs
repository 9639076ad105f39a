use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::Register;
use crate::error::RunError;
use crate::features::FrontendConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Exp1CommonWords,
    Exp2Ned,
    Exp3Net,
    ControlPair,
}

impl Experiment {
    /// Short name used for output files.
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Exp1CommonWords => "exp1",
            Experiment::Exp2Ned => "exp2",
            Experiment::Exp3Net => "exp3",
            Experiment::ControlPair => "control",
        }
    }

    pub fn default_registers(self) -> (Register, Register) {
        match self {
            Experiment::ControlPair => (Register::new("ADS"), Register::new("RS")),
            _ => (Register::new("ADS"), Register::new("IDS")),
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Settings for one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub manifest_path: PathBuf,
    /// Baseline register.
    pub register_x: Register,
    /// Register compared against the baseline.
    pub register_y: Register,
    pub experiment: Experiment,
    pub n_samples: usize,
    /// Echoed at the top level of run metadata instead, and only when used.
    #[serde(skip)]
    pub seed: u64,
    pub remove_onomatopoeia: bool,
    pub output_dir: Option<PathBuf>,
    pub use_cache: bool,
    pub frontend: FrontendConfig,
}

impl RunConfig {
    pub fn new(experiment: Experiment, manifest_path: impl Into<PathBuf>) -> Self {
        let (register_x, register_y) = experiment.default_registers();
        RunConfig {
            manifest_path: manifest_path.into(),
            register_x,
            register_y,
            experiment,
            n_samples: 100,
            seed: 0,
            remove_onomatopoeia: false,
            output_dir: None,
            use_cache: true,
            frontend: FrontendConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.n_samples == 0 {
            return Err(RunError::Config("samples must be at least 1".into()));
        }
        if self.register_x == self.register_y {
            return Err(RunError::Config(format!(
                "registers must differ, got {} twice",
                self.register_x
            )));
        }
        self.frontend.validate().map_err(|e| RunError::Config(e.to_string()))
    }

    /// Applies one `key=value` setting. Keys are the long flag names without dashes.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), RunError> {
        fn num<V: FromStr>(key: &str, value: &str) -> Result<V, RunError> {
            value
                .parse()
                .map_err(|_| RunError::Config(format!("`{key}`: cannot parse `{value}`")))
        }
        fn flag(key: &str, value: &str) -> Result<bool, RunError> {
            match value {
                "" | "1" | "true" | "yes" => Ok(true),
                "0" | "false" | "no" => Ok(false),
                _ => Err(RunError::Config(format!("`{key}`: expected a boolean, got `{value}`"))),
            }
        }
        match key {
            "manifest" => self.manifest_path = PathBuf::from(value),
            "registers" => {
                let (x, y) = parse_registers(value)?;
                self.register_x = x;
                self.register_y = y;
            }
            "seed" => self.seed = num(key, value)?,
            "samples" => self.n_samples = num(key, value)?,
            "no-onomatopoeia" => self.remove_onomatopoeia = flag(key, value)?,
            "out" => self.output_dir = Some(PathBuf::from(value)),
            "no-cache" => self.use_cache = !flag(key, value)?,
            "window-ms" => self.frontend.window_s = num::<f64>(key, value)? / 1000.0,
            "hop-ms" => self.frontend.hop_s = num::<f64>(key, value)? / 1000.0,
            "fmin" => self.frontend.f_min_hz = num(key, value)?,
            "fmax" => self.frontend.f_max_hz = num(key, value)?,
            "nfilters" => self.frontend.n_filters = num(key, value)?,
            other => return Err(RunError::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }
}

/// `X,Y` → two registers.
pub fn parse_registers(value: &str) -> Result<(Register, Register), RunError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [x, y] if !x.is_empty() && !y.is_empty() => Ok((Register::new(*x), Register::new(*y))),
        _ => Err(RunError::Config(format!("registers must be `X,Y`, got `{value}`"))),
    }
}

/// Parses a plain `key=value` config file. Blank lines and `#` comments are ignored.
pub fn parse_config_file(text: &str) -> Result<Vec<(String, String)>, RunError> {
    text.lines()
        .enumerate()
        .filter_map(|(i, line)| {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                return None;
            }
            Some(match line.split_once('=') {
                Some((k, v)) => Ok((k.trim().trim_start_matches("--").to_string(), v.trim().to_string())),
                None => Err(RunError::Config(format!("config line {}: expected key=value", i + 1))),
            })
        })
        .collect()
}
