//! Spray files: TOML (or JSON) with `dimension`, `label` and either
//! `coeffs` or a `[frame]` table, plus an optional `[sample]` table.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sprayfin_core::catalog::{self, CatalogEntry};
use sprayfin_core::model::{FrameModel, Model};
use sprayfin_core::sample::{FiberSampling, SampleError, SampleSpec};
use sprayfin_core::{parse, ExprError, SprayModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SprayFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<FrameSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSection>,
}

/// Components of `h_i` and `v_i` in `(∂x, ∂y)` and the eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSection {
    pub h: Vec<Vec<String>>,
    pub v: Vec<Vec<String>>,
    pub eigenvalues: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Bounds for every base coordinate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 2]>,
    /// Bounds for `|y|`; the direction is uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_norm: Option<[f64; 2]>,
    /// Per-component bounds for `y`; one range applies to all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("`{0}` is neither a file nor a catalog entry (try `sprayfin catalog list`)")]
    NotFound(String),
    #[error("invalid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Shape(String),
    #[error("in {field}: {source}")]
    Expr { field: String, source: ExprError },
    #[error("sample: {0}")]
    Sample(#[from] SampleError),
}

/// A model ready for analysis, with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedInput {
    pub source: String,
    pub file: SprayFile,
    pub model: Model,
    pub sample: SampleSpec,
}

impl SprayFile {
    pub fn from_toml(text: &str) -> Result<Self, InputError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self, InputError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spray files serialize to TOML")
    }

    pub fn from_entry(e: &CatalogEntry) -> Self {
        let (coeffs, frame) = match &e.model {
            Model::Spray(s) => (Some(s.sources()), None),
            Model::Frame(f) => {
                let (h, v, eigenvalues) = f.sources();
                (None, Some(FrameSection { h, v, eigenvalues }))
            }
        };
        SprayFile {
            dimension: e.model.dim(),
            label: Some(e.name.to_string()),
            coeffs,
            frame,
            sample: Some(SampleSection::from_spec(&e.sample)),
        }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| "unnamed".into())
    }

    pub fn to_model(&self) -> Result<Model, InputError> {
        let n = self.dimension;
        if n < 2 {
            return Err(InputError::Shape(format!("dimension must be at least 2, got {n}")));
        }
        let expr = |field: String, s: &str| parse(s, n).map_err(|source| InputError::Expr { field, source });
        match (&self.coeffs, &self.frame) {
            (Some(c), None) => {
                if c.len() != n {
                    return Err(InputError::Shape(format!("expected {n} coefficients, got {}", c.len())));
                }
                let coeffs = c.iter().enumerate().map(|(i, s)| expr(format!("coeffs[{i}]"), s)).collect::<Result<_, _>>()?;
                Ok(Model::Spray(SprayModel::new(coeffs, self.label())))
            }
            (None, Some(f)) => {
                for (name, rows) in [("h", &f.h), ("v", &f.v)] {
                    if rows.len() != n || rows.iter().any(|r| r.len() != 2 * n) {
                        return Err(InputError::Shape(format!("frame.{name} must hold {n} fields of {} components", 2 * n)));
                    }
                }
                if f.eigenvalues.len() != n {
                    return Err(InputError::Shape(format!("frame.eigenvalues must hold {n} entries")));
                }
                for (name, rows) in [("h", &f.h), ("v", &f.v)] {
                    for (i, r) in rows.iter().enumerate() {
                        for (k, s) in r.iter().enumerate() {
                            expr(format!("frame.{name}[{i}][{k}]"), s)?;
                        }
                    }
                }
                let fm = FrameModel::parse(n, &f.h, &f.v, &f.eigenvalues, self.label())
                    .map_err(|source| InputError::Expr { field: "frame.eigenvalues".into(), source })?;
                Ok(Model::Frame(fm))
            }
            (Some(_), Some(_)) => Err(InputError::Shape("give either coeffs or [frame], not both".into())),
            (None, None) => Err(InputError::Shape("missing coeffs (or a [frame] table)".into())),
        }
    }

    pub fn sample_spec(&self) -> Result<SampleSpec, InputError> {
        let spec = self.sample.clone().unwrap_or_default().to_spec()?;
        if let FiberSampling::Box { ranges } = &spec.fiber {
            if ranges.len() != 1 && ranges.len() != self.dimension {
                return Err(InputError::Shape(format!("sample.y_box needs 1 or {} ranges", self.dimension)));
            }
        }
        Ok(spec)
    }
}

impl SampleSection {
    pub fn from_spec(s: &SampleSpec) -> Self {
        let (y_norm, y_box) = match &s.fiber {
            FiberSampling::Annulus { min, max } => (Some([*min, *max]), None),
            FiberSampling::Box { ranges } => (None, Some(ranges.clone())),
        };
        SampleSection { count: Some(s.count), seed: Some(s.seed), x: Some([s.x_lo, s.x_hi]), y_norm, y_box }
    }

    pub fn to_spec(&self) -> Result<SampleSpec, InputError> {
        let mut s = SampleSpec::default();
        if let Some(c) = self.count {
            s.count = c;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some([lo, hi]) = self.x {
            s.x_lo = lo;
            s.x_hi = hi;
        }
        s.fiber = match (&self.y_norm, &self.y_box) {
            (Some(_), Some(_)) => return Err(InputError::Shape("give sample.y_norm or sample.y_box, not both".into())),
            (Some([min, max]), None) => FiberSampling::Annulus { min: *min, max: *max },
            (None, Some(r)) => FiberSampling::Box { ranges: r.clone() },
            (None, None) => s.fiber,
        };
        s.validate()?;
        Ok(s)
    }
}

fn looks_like_json(path: &Path, text: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) || text.trim_start().starts_with('{')
}

/// Reads a spray file, falling back to a catalog entry of that name.
pub fn load(spec: &str) -> Result<LoadedInput, InputError> {
    let path = Path::new(spec);
    let file = if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: spec.into(), source })?;
        if looks_like_json(path, &text) {
            SprayFile::from_json(&text)?
        } else {
            SprayFile::from_toml(&text)?
        }
    } else if let Ok(e) = catalog::get(spec) {
        SprayFile::from_entry(&e)
    } else {
        return Err(InputError::NotFound(spec.into()));
    };
    let model = file.to_model()?;
    let sample = file.sample_spec()?;
    let source = if path.is_file() { spec.to_string() } else { format!("catalog:{spec}") };
    Ok(LoadedInput { source, file, model, sample })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_toml() {
        let f = SprayFile::from_toml("dimension = 2\ncoeffs = [\"y1^2\", \"0\"]\n").unwrap();
        assert!(matches!(f.to_model().unwrap(), Model::Spray(_)));
        assert_eq!(f.sample_spec().unwrap(), SampleSpec::default());
    }

    #[test]
    fn shape_errors() {
        let f = SprayFile::from_toml("dimension = 3\ncoeffs = [\"0\", \"0\"]\n").unwrap();
        assert!(matches!(f.to_model(), Err(InputError::Shape(_))));
        let f = SprayFile::from_toml("dimension = 2\ncoeffs = [\"y3\", \"0\"]\n").unwrap();
        assert!(matches!(f.to_model(), Err(InputError::Expr { .. })));
        assert!(SprayFile::from_toml("dimension = 2\ncoef = []\n").is_err());
    }

    #[test]
    fn sample_table() {
        let f = SprayFile::from_toml("dimension = 2\ncoeffs = [\"0\", \"0\"]\n[sample]\ncount = 4\ny_box = [[0.1, 0.5]]\n").unwrap();
        let s = f.sample_spec().unwrap();
        assert_eq!(s.count, 4);
        assert!(matches!(s.fiber, FiberSampling::Box { .. }));
        let bad = SampleSection { y_norm: Some([0.0, 1.0]), ..Default::default() };
        assert!(matches!(bad.to_spec(), Err(InputError::Sample(SampleError::ContainsZero))));
    }
}
