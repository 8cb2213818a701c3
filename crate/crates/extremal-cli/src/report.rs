//! Report structures and output rendering.
//!
//! Every command produces one report struct; the struct is the single source
//! for all three output formats. Exact quantities stay `Rat`/`RatPoly` and
//! serialize as `"num/den"` strings; floating-point quantities are wrapped
//! in [`Approx`] so JSON consumers can tell the two apart mechanically.

use std::path::{Path, PathBuf};

use extremal::admissible::{AngleThreshold, BaseFactor, ClassError};
use extremal::classify::{ClassifyError, Regime, SingularityLabel, SplitReport};
use extremal::energy::EnergyError;
use extremal::poly::PolyError;
use extremal::quad::{QuadError, QuadratureSpec};
use extremal::rat::{Rat, RatInterval};
use extremal::tf::{TfCase, TfError};
use extremal::RatPoly;
use serde::Serialize;

use crate::config::ClassSpec;

/// CLI failure, split by exit status: bad input exits 2, a violated
/// internal invariant exits 3.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ClassError> for CliError {
    fn from(e: ClassError) -> Self {
        use ClassError::*;
        match e {
            EmptyFactors
            | InvalidDimension { .. }
            | XOutOfRange { .. }
            | NonpositiveKappa { .. }
            | NonpositiveWidth { .. } => CliError::Input(e.to_string()),
            ProfileBoundary { .. } | Invariant(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        use ClassifyError::*;
        match e {
            Class(inner) => inner.into(),
            RegimeMismatch { .. } => CliError::Input(e.to_string()),
            Poly(_) | NonSimpleRoot { .. } | BadProfile { .. } => {
                CliError::Internal(e.to_string())
            }
        }
    }
}

impl From<TfError> for CliError {
    fn from(e: TfError) -> Self {
        use TfError::*;
        match e {
            Class(inner) => inner.into(),
            Classify(inner) => inner.into(),
            XOutOfRange { .. }
            | NonpositiveKappa { .. }
            | NonpositiveWidth { .. }
            | NonnegativeCurvature { .. } => CliError::Input(e.to_string()),
            Poly(_) | Invariant(_) => CliError::Internal(e.to_string()),
        }
    }
}

impl From<EnergyError> for CliError {
    fn from(e: EnergyError) -> Self {
        use EnergyError::*;
        match e {
            Class(inner) => inner.into(),
            Classify(inner) => inner.into(),
            DomainViolation { .. }
            | GridOutsideDomain { .. }
            | PotentialNotConvex
            | KappaMismatch { .. }
            | ProfileMismatch(_)
            | RegimeMismatch { .. }
            | SupportEscape { .. } => CliError::Input(e.to_string()),
            NotSingleRoot { .. } | Poly(_) => CliError::Internal(e.to_string()),
            Quad(inner) => inner.into(),
        }
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        CliError::Internal(format!("quadrature failed: {e}"))
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Internal(format!("polynomial arithmetic failed: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Input(format!("csv output failed: {e}"))
    }
}

/// Stdout format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Shared run context resolved from flags, config file, and environment.
pub struct Ctx {
    pub format: OutputFormat,
    pub out_dir: Option<PathBuf>,
    pub seed: Option<u64>,
    pub quad: QuadratureSpec,
}

/// What a command hands back: the stdout payload (no trailing newline) and
/// any plot-data tables to be written as CSV files into the output
/// directory.
pub struct Output {
    pub stdout: String,
    /// `(file name, rows including header)`.
    pub plots: Vec<(String, Vec<Vec<String>>)>,
}

/// Marker wrapper for quantities computed by floating-point quadrature or
/// sampling, as opposed to exact rationals.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Approx {
    pub approx: bool,
    pub value: f64,
}

impl From<f64> for Approx {
    fn from(value: f64) -> Self {
        Approx {
            approx: true,
            value,
        }
    }
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub class: ClassSpec,
    pub regime: Regime,
}

#[derive(Serialize)]
pub struct ExtremalPolyReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub class: ClassSpec,
    pub alpha: [Rat; 3],
    pub beta: [Rat; 2],
    pub a: Rat,
    pub b: Rat,
    /// Coefficients, constant term first.
    pub f_omega: RatPoly,
    pub f_zero: RatPoly,
    pub f_lin: RatPoly,
}

#[derive(Serialize)]
pub struct ThresholdReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub factors: Vec<BaseFactor>,
    pub width: Rat,
    pub threshold: AngleThreshold,
}

#[derive(Serialize)]
pub struct SplitCmdReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub class: ClassSpec,
    pub split: SplitReport,
}

#[derive(Serialize)]
pub struct DeltaReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub class: ClassSpec,
    pub regime: Regime,
    pub delta: Rat,
}

#[derive(Serialize)]
pub struct DemoRow {
    pub index: u32,
    pub value: Approx,
    /// Second series of the properness-breaking demo (`∫ k f_k`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integral: Option<Approx>,
}

#[derive(Serialize)]
pub struct EnergyDemoReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub demo: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<ClassSpec>,
    /// Set instead of `class` for demos running on the built-in
    /// double-root fixture.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Rat>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<Rat>,
    /// Exact-sign linear term `∫ F r` of the unbounded demo.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_term: Option<Approx>,
    pub rows: Vec<DemoRow>,
}

#[derive(Serialize)]
pub struct SweepRow {
    pub x: Rat,
    pub delta: Rat,
    pub case: TfCase,
    pub regime: Regime,
    /// Interior root enclosures of the profile, present above the boundary.
    pub roots: Vec<RatInterval>,
}

#[derive(Serialize)]
pub struct TfSweepReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub s: Rat,
    pub grid: usize,
    pub width: Rat,
    pub xs_enclosure: RatInterval,
    pub rows: Vec<SweepRow>,
}

#[derive(Serialize)]
pub struct TfXsReport {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub s: Rat,
    pub width: Rat,
    pub enclosure: RatInterval,
}

pub fn to_json<T: Serialize>(report: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Internal(format!("report serialization failed: {e}")))
}

/// Renders rows (first row = header) as RFC-4180 CSV.
pub fn csv_string(rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(format!("csv flush failed: {e}")))?;
    let mut text = String::from_utf8(bytes)
        .map_err(|e| CliError::Internal(format!("csv was not UTF-8: {e}")))?;
    // Commands print the payload through `println!`; drop the writer's own
    // trailing newline so stdout ends with exactly one.
    if text.ends_with('\n') {
        text.pop();
    }
    Ok(text)
}

/// Two-column key/value CSV for scalar reports.
pub fn kv_csv(pairs: &[(&str, String)]) -> Result<String, CliError> {
    let mut rows = vec![vec!["key".to_string(), "value".to_string()]];
    for (k, v) in pairs {
        rows.push(vec![k.to_string(), v.clone()]);
    }
    csv_string(&rows)
}

pub fn write_plot(dir: &Path, name: &str, rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        CliError::Input(format!(
            "cannot create output directory {}: {e}",
            dir.display()
        ))
    })?;
    let path = dir.join(name);
    let mut text = csv_string(rows)?;
    text.push('\n');
    std::fs::write(&path, text)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Text-format lines describing a class.
pub fn class_lines(spec: &ClassSpec) -> Vec<String> {
    let mut lines = vec![format!("kappa: {}", spec.kappa)];
    for (i, f) in spec.factors.iter().enumerate() {
        lines.push(format!("factor {i}: d={} s={} x={}", f.d, f.s, f.x));
    }
    lines
}

pub fn regime_text(r: Regime) -> &'static str {
    match r {
        Regime::ExistsExtremal => "ExistsExtremal",
        Regime::BoundedNotProper => "BoundedNotProper",
        Regime::Unbounded => "Unbounded",
    }
}

pub fn case_text(c: TfCase) -> &'static str {
    match c {
        TfCase::BelowCritical => "BelowCritical",
        TfCase::NearCritical => "NearCritical",
        TfCase::AboveCritical => "AboveCritical",
    }
}

pub fn label_text(l: &SingularityLabel) -> String {
    match l {
        SingularityLabel::SmoothEnd => "smooth-end".into(),
        SingularityLabel::ConicalEnd { kappa } => {
            format!("conical-end[{}, {}]", kappa.lo(), kappa.hi())
        }
        SingularityLabel::CuspEnd => "cusp-end".into(),
        SingularityLabel::GeneralizedCuspEnd {
            multiplicity,
            order,
        } => match order {
            Some(o) => format!("generalized-cusp(mult={multiplicity}, order={o})"),
            None => format!("generalized-cusp(mult={multiplicity})"),
        },
    }
}

pub fn interval_text(i: &RatInterval) -> String {
    format!("[{}, {}]", i.lo(), i.hi())
}
