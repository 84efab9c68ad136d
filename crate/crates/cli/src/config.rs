//! Config files and the merge with command-line flags.
//!
//! A config file is TOML with the same keys as the long flags, e.g.
//!
//! ```toml
//! ell = 3
//! n = 64
//! t-bits = 4
//! betas = [0.3, 0.6]
//! ```
//!
//! Flags win over the file; the file wins over built-in defaults.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use su2lat::kickedtop::{KickScale, StepOrder};
use su2lat::lattice::{Grid3, ShellSpec};
use su2lat::phasest;
use su2lat::pipeline::{BackendKind, PipelineConfig, TranslateMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every key a config file may set.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub ell: Option<u32>,
    pub n: Option<usize>,
    pub r0: Option<f64>,
    pub width: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub mode: Option<TranslateMode>,
    pub backend: Option<BackendKind>,
    pub t_bits: Option<u32>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub format: Option<Format>,
    pub ells: Option<Vec<u32>>,
    pub ns: Option<Vec<usize>>,
    pub betas: Option<Vec<f64>>,
    pub modes: Option<Vec<TranslateMode>>,
    pub samples: Option<usize>,
    pub axis: Option<String>,
    pub qubits: Option<u32>,
    pub j: Option<u32>,
    pub c: Option<f64>,
    pub p: Option<f64>,
    pub steps: Option<usize>,
    pub kick_scale: Option<KickScale>,
    pub step_order: Option<StepOrder>,
}

/// A configuration problem tied to the offending key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub problems: Vec<(String, String)>,
}

impl ConfigError {
    pub fn single(field: &str, msg: impl Into<String>) -> Self {
        Self { problems: vec![(field.into(), msg.into())] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration")?;
        for (field, msg) in &self.problems {
            write!(f, "\n  {field}: {msg}")?;
        }
        Ok(())
    }
}

/// 1-based line of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

pub fn parse_config(text: &str, origin: &str) -> Result<FileConfig, ConfigError> {
    toml::from_str(text).map_err(|e| {
        let line = e.span().map(|s| line_of(text, s.start)).unwrap_or(1);
        ConfigError::single("config", format!("{origin}:{line}: {}", e.message().trim()))
    })
}

pub fn load_config(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::single("config", format!("{}: {e}", path.display())))?;
    parse_config(&text, &path.display().to_string())
}

/// Collects violations so that all of them are reported together.
#[derive(Debug, Default)]
pub struct Checker {
    problems: Vec<(String, String)>,
}

impl Checker {
    pub fn fail(&mut self, field: &str, msg: impl Into<String>) {
        self.problems.push((field.into(), msg.into()));
    }

    pub fn check(&mut self, ok: bool, field: &str, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(field, msg());
        }
    }

    pub fn finish(self) -> Result<(), ConfigError> {
        if self.problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems: self.problems })
        }
    }

    /// Grid size must be a power of two, at least 8.
    pub fn grid(&mut self, field: &str, n: usize) -> Option<Grid3> {
        match Grid3::new(n) {
            Ok(g) => Some(g),
            Err(e) => {
                self.fail(field, e.to_string());
                None
            }
        }
    }

    pub fn finite(&mut self, field: &str, v: f64) {
        self.check(v.is_finite(), field, || format!("{v} is not finite"));
    }

    /// Runs the pipeline's own checks and renames its fields to flag names.
    pub fn pipeline(&mut self, cfg: &PipelineConfig, prefix: &str) {
        for (field, msg) in cfg.violations() {
            let key = match field {
                "t" => "t-bits",
                "shell" => "r0/width",
                "ell" if prefix == "j" => "j",
                other => other,
            };
            self.fail(key, msg);
        }
    }
}

/// Shell from explicit `r0`/`width`, falling back to the grid default.
pub fn shell_for(n: usize, r0: Option<f64>, width: Option<f64>) -> ShellSpec {
    let def = ShellSpec { r0: 0.35 * n as f64, width: 3.0 };
    ShellSpec { r0: r0.unwrap_or(def.r0), width: width.unwrap_or(def.width) }
}

/// `t` defaults to the smallest register that resolves every `m`.
pub fn t_bits_for(ell: u32, t: Option<u32>) -> u32 {
    t.unwrap_or_else(|| phasest::min_bits(ell))
}
