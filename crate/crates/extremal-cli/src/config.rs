//! Config-file ingestion and flag parsing.
//!
//! A run is described by an optional structured config file (TOML or JSON)
//! plus command-line flags; flags override file values. Unknown keys in the
//! file are ignored, so a JSON report emitted by a previous run can be fed
//! back in as a config: its `class` block (and `s`/`width` keys for the
//! case-study commands) match the config schema exactly.

use std::fs;
use std::path::{Path, PathBuf};

use extremal::admissible::BaseFactor;
use extremal::quad::QuadratureSpec;
use extremal::rat::Rat;
use serde::{Deserialize, Serialize};

use crate::report::CliError;

/// Class data as it appears in config files and in every report that takes
/// a class: the base factors and the cone parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub factors: Vec<BaseFactor>,
    pub kappa: Rat,
}

/// Quadrature overrides; defaults mirror the library's.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default)]
pub struct QuadConfig {
    pub order: usize,
    pub panels: usize,
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        let d = QuadratureSpec::default();
        QuadConfig {
            order: d.order,
            panels: d.panels,
            rel_tol: d.rel_tol,
            max_doublings: d.max_doublings,
        }
    }
}

impl From<QuadConfig> for QuadratureSpec {
    fn from(c: QuadConfig) -> Self {
        QuadratureSpec {
            order: c.order,
            panels: c.panels,
            rel_tol: c.rel_tol,
            max_doublings: c.max_doublings,
        }
    }
}

/// Everything a config file may set. Each key has a flag counterpart where
/// that makes sense; all rationals are `"num/den"` or integer strings.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(default)]
pub struct FileConfig {
    pub command: Option<String>,
    pub format: Option<String>,
    pub class: Option<ClassSpec>,
    pub s: Option<Rat>,
    pub x: Option<Rat>,
    pub kappa: Option<Rat>,
    pub width: Option<Rat>,
    pub grid: Option<usize>,
    pub demo: Option<String>,
    pub steps: Option<u32>,
    pub center: Option<Rat>,
    pub amplitude: Option<Rat>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub quadrature: Option<QuadConfig>,
}

impl FileConfig {
    /// Loads a TOML or JSON config. The parser is chosen by extension and
    /// the other grammar is tried as a fallback, so report files work
    /// regardless of how they are named.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Input(format!("config {}: cannot read: {e}", path.display()))
        })?;
        let json_first = path.extension().is_some_and(|e| e == "json");
        type Parser = fn(&str) -> Result<FileConfig, String>;
        let (first, second): (Result<FileConfig, String>, Parser) = if json_first {
            (from_json(&text), from_toml)
        } else {
            (from_toml(&text), from_json)
        };
        match first {
            Ok(c) => Ok(c),
            Err(reason) => second(&text).map_err(|_| {
                CliError::Input(format!("config {}: {reason}", path.display()))
            }),
        }
    }
}

fn from_json(text: &str) -> Result<FileConfig, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

fn from_toml(text: &str) -> Result<FileConfig, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

/// Parses one `--factor` flag of the form `d=<int>,s=<rat>,x=<rat>`
/// (keys in any order).
pub fn parse_factor(index: usize, spec: &str) -> Result<BaseFactor, CliError> {
    let bad = |what: String| CliError::Input(format!("factor {index}: {what}"));
    let mut d = None;
    let mut s = None;
    let mut x = None;
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {part:?}")))?;
        let value = value.trim();
        match key.trim() {
            "d" => {
                d = Some(
                    value
                        .parse::<u32>()
                        .map_err(|e| bad(format!("d: {e}")))?,
                )
            }
            "s" => s = Some(value.parse::<Rat>().map_err(|e| bad(format!("s: {e}")))?),
            "x" => x = Some(value.parse::<Rat>().map_err(|e| bad(format!("x: {e}")))?),
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    Ok(BaseFactor {
        d: d.ok_or_else(|| bad("missing d".into()))?,
        s: s.ok_or_else(|| bad("missing s".into()))?,
        x: x.ok_or_else(|| bad("missing x".into()))?,
    })
}
