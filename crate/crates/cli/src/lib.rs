//! Library side of the `sprayfin` command: loading inputs, running the
//! per-point analysis and the exact symbol checks, and building reports.

pub mod input;
pub mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use sprayfin_core::catalog;
use sprayfin_core::metriz::{aggregate, analyze_point, AnalysisOptions, Verdict};
use sprayfin_core::model::Model;
use sprayfin_spencer::{run_claims, ClaimTable, SpencerConfig, SpencerError};

use input::{load, InputError, SprayFile};
use report::{Aggregate, ConfigEcho, InputEcho, Report, Timing, ToolInfo, SCHEMA_VERSION};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("coefficients are not 2-homogeneous in y (max residual {max_residual:e}); pass --skip-homogeneity to analyze anyway")]
    Homogeneity { max_residual: f64 },
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Spencer(#[from] SpencerError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error(transparent)]
    Catalog(#[from] catalog::UnknownCatalogEntry),
}

impl CliError {
    /// Process exit code; 0..=2 are reserved for verdicts.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Config(_) | CliError::Catalog(_) => 3,
            CliError::Homogeneity { .. } => 4,
            CliError::Write { .. } => 5,
            CliError::Spencer(SpencerError::ResourceLimit { .. }) => 6,
            CliError::Spencer(_) => 3,
        }
    }
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        v if v.is_metrizable() => 0,
        Verdict::NotMetrizable => 1,
        _ => 2,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeArgs {
    /// Spray file path or catalog name.
    pub input: String,
    pub points: Option<usize>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub sep_rel: Option<f64>,
    pub rank_tol: Option<f64>,
    pub order: Option<usize>,
    pub threads: Option<usize>,
    pub skip_homogeneity: bool,
    pub jacobi_check: bool,
    /// Attach the default exact claim table.
    pub spencer: bool,
}

impl AnalyzeArgs {
    pub fn new(input: impl Into<String>) -> Self {
        AnalyzeArgs {
            input: input.into(),
            points: None,
            seed: None,
            tol: None,
            sep_rel: None,
            rank_tol: None,
            order: None,
            threads: None,
            skip_homogeneity: false,
            jacobi_check: false,
            spencer: false,
        }
    }
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn counts<T: serde::Serialize>(items: impl Iterator<Item = T>) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for it in items {
        let key = match serde_json::to_value(&it) {
            Ok(serde_json::Value::String(s)) => s,
            other => format!("{other:?}"),
        };
        *m.entry(key).or_insert(0) += 1;
    }
    m
}

pub fn analyze(args: &AnalyzeArgs) -> Result<Report, CliError> {
    let start = Instant::now();
    let loaded = load(&args.input)?;
    let mut sample = loaded.sample.clone();
    if let Some(p) = args.points {
        sample.count = p;
    }
    if let Some(s) = args.seed {
        sample.seed = s;
    }
    let mut opts = AnalysisOptions { jacobi_check: args.jacobi_check, ..AnalysisOptions::default() };
    if let Some(t) = args.tol {
        opts.tol = t;
    }
    if let Some(t) = args.sep_rel {
        opts.sep_rel = t;
    }
    if let Some(t) = args.rank_tol {
        opts.rank_tol = t;
    }
    if let Some(k) = args.order {
        if !(2..=8).contains(&k) {
            return Err(CliError::Config(format!("--order must be in 2..=8, got {k}")));
        }
        opts.order = k;
    }
    if !(opts.tol > 0.0 && opts.sep_rel > 0.0 && opts.rank_tol > 0.0) {
        return Err(CliError::Config("tolerances must be positive".into()));
    }
    let n = loaded.model.dim();
    let pts = sample.points(n).map_err(InputError::from)?;

    let homogeneity = match &loaded.model {
        Model::Spray(s) => {
            let h = s
                .check_homogeneity(&pts, opts.tol)
                .map_err(|source| InputError::Expr { field: "coeffs".into(), source })?;
            if !h.passed && !args.skip_homogeneity {
                let max_residual = h.per_coefficient.iter().map(|r| r.max_residual).fold(0.0, f64::max);
                return Err(CliError::Homogeneity { max_residual });
            }
            Some(h)
        }
        Model::Frame(_) => None,
    };

    let t_points = Instant::now();
    let model = &loaded.model;
    let points = with_threads(args.threads, || {
        pts.par_iter().enumerate().map(|(i, u)| analyze_point(model, u, i, &opts)).collect::<Vec<_>>()
    })?;
    let points_ms = t_points.elapsed().as_secs_f64() * 1e3;

    let verdict = aggregate(&points);
    let spencer = if args.spencer { Some(run_claims(&SpencerConfig::default())?) } else { None };
    let SprayFile { coeffs, frame, .. } = loaded.file.clone();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        tool: ToolInfo::current(),
        config: ConfigEcho {
            sample,
            order: opts.order,
            tol: opts.tol,
            sep_rel: opts.sep_rel,
            rank_tol: opts.rank_tol,
            threads: args.threads,
            skip_homogeneity: args.skip_homogeneity,
            jacobi_check: opts.jacobi_check,
        },
        input: InputEcho {
            source: loaded.source.clone(),
            label: model.label().to_string(),
            dimension: n,
            kind: match model {
                Model::Spray(_) => "spray",
                Model::Frame(_) => "frame",
            },
            coeffs,
            frame,
        },
        homogeneity,
        aggregate: Aggregate {
            verdict,
            metrizable: verdict.is_metrizable(),
            exit_code: verdict_exit_code(verdict),
            verdict_counts: counts(points.iter().map(|p| p.verdict)),
            classification_counts: counts(points.iter().map(|p| p.classification)),
        },
        points,
        spencer,
        timing: Timing { points_ms, total_ms: start.elapsed().as_secs_f64() * 1e3 },
    })
}

pub fn spencer(cfg: &SpencerConfig) -> Result<ClaimTable, CliError> {
    Ok(run_claims(cfg)?)
}

/// Plain-text rendering of a claim table.
pub fn format_claims(t: &ClaimTable) -> String {
    let mut s = format!("seed {}", t.seed);
    if let Some(s2) = t.second_seed {
        s.push_str(&format!(", genericity seed {s2}"));
    }
    s.push('\n');
    for f in &t.frames {
        let l: Vec<String> = f.lambdas.iter().map(ToString::to_string).collect();
        s.push_str(&format!("n={}: λ = ({})", f.n, l.join(", ")));
        if !f.completion.is_empty() {
            let w: Vec<String> = f.completion.iter().map(ToString::to_string).collect();
            s.push_str(&format!(", completion weights ({})", w.join(", ")));
        }
        s.push('\n');
    }
    let width = t.claims.iter().map(|c| c.id.len()).max().unwrap_or(0);
    for c in &t.claims {
        let status = match (c.matches, c.informational) {
            (true, _) => "match",
            (false, true) => "differs (informational)",
            (false, false) => "MISMATCH",
        };
        s.push_str(&format!(
            "{:width$}  formula {:>6}  brute {:>6}  {}  {}\n",
            c.id, c.formula, c.brute, status, c.statement
        ));
    }
    s.push_str(if t.all_authoritative_pass { "all authoritative checks pass\n" } else { "authoritative checks FAILED\n" });
    s
}

pub fn catalog_list() -> String {
    let entries = catalog::entries();
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    entries.iter().map(|e| format!("{:width$}  {}\n", e.name, e.description)).collect()
}

pub fn catalog_show(name: &str) -> Result<String, CliError> {
    let e = catalog::get(name)?;
    let mut s = format!("{}\n  {}\n  provenance: {}\n", e.name, e.description, e.provenance);
    s.push_str(&SprayFile::from_entry(&e).to_toml());
    Ok(s)
}

pub fn catalog_export(name: &str) -> Result<String, CliError> {
    let e = catalog::get(name)?;
    Ok(SprayFile::from_entry(&e).to_toml())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(verdict_exit_code(Verdict::MetrizableIsotropic), 0);
        assert_eq!(verdict_exit_code(Verdict::MetrizableCompleted), 0);
        assert_eq!(verdict_exit_code(Verdict::NotMetrizable), 1);
        assert_eq!(verdict_exit_code(Verdict::Inconclusive), 2);
        assert_eq!(CliError::Config(String::new()).exit_code(), 3);
        let e = CliError::Spencer(SpencerError::ResourceLimit { rows: 1, cols: 1, limit: 0 });
        assert_eq!(e.exit_code(), 6);
    }
}
