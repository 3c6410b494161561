//! JSON report written by `sprayfin analyze`.

use std::collections::BTreeMap;

use serde::Serialize;
use sprayfin_core::metriz::{ConditionReport, Verdict};
use sprayfin_core::sample::SampleSpec;
use sprayfin_core::spray::SprayHomogeneity;
use sprayfin_spencer::ClaimTable;

use crate::input::FrameSection;

/// Bumped whenever a field is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub config: ConfigEcho,
    pub input: InputEcho,
    pub homogeneity: Option<SprayHomogeneity>,
    pub points: Vec<ConditionReport>,
    pub aggregate: Aggregate,
    pub spencer: Option<ClaimTable>,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        ToolInfo { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub sample: SampleSpec,
    pub order: usize,
    pub tol: f64,
    pub sep_rel: f64,
    pub rank_tol: f64,
    /// `None` means the rayon default.
    pub threads: Option<usize>,
    pub skip_homogeneity: bool,
    pub jacobi_check: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputEcho {
    pub source: String,
    pub label: String,
    pub dimension: usize,
    pub kind: &'static str,
    pub coeffs: Option<Vec<String>>,
    pub frame: Option<FrameSection>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub verdict: Verdict,
    pub metrizable: bool,
    pub exit_code: i32,
    pub verdict_counts: BTreeMap<String, usize>,
    pub classification_counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub points_ms: f64,
    pub total_ms: f64,
}
