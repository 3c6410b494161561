//! Analysis inputs: a spray, or an explicit adapted frame.

use crate::expr::{parse, Expr, ExprError};
use crate::spray::SprayModel;

/// An adapted frame given directly by expressions on TM, with constant or
/// variable eigenvalues. Used for synthetic fixtures of the completed system.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameModel {
    pub n: usize,
    /// `h[i]` lists the `2n` components of `h_{i+1}` in `(∂x, ∂y)`.
    pub h: Vec<Vec<Expr>>,
    pub v: Vec<Vec<Expr>>,
    pub eigenvalues: Vec<Expr>,
    pub label: String,
}

impl FrameModel {
    pub fn parse(
        n: usize,
        h: &[Vec<String>],
        v: &[Vec<String>],
        eigenvalues: &[String],
        label: impl Into<String>,
    ) -> Result<FrameModel, ExprError> {
        let p = |rows: &[Vec<String>]| -> Result<Vec<Vec<Expr>>, ExprError> {
            rows.iter().map(|r| r.iter().map(|s| parse(s, n)).collect()).collect()
        };
        let fm = FrameModel {
            n,
            h: p(h)?,
            v: p(v)?,
            eigenvalues: eigenvalues.iter().map(|s| parse(s, n)).collect::<Result<_, _>>()?,
            label: label.into(),
        };
        assert_eq!(fm.h.len(), n, "need n horizontal fields");
        assert_eq!(fm.v.len(), n, "need n vertical fields");
        assert!(fm.h.iter().chain(&fm.v).all(|r| r.len() == 2 * n), "fields have 2n components");
        assert_eq!(fm.eigenvalues.len(), n, "need n eigenvalues");
        Ok(fm)
    }

    pub fn sources(&self) -> (Vec<Vec<String>>, Vec<Vec<String>>, Vec<String>) {
        let s = |rows: &[Vec<Expr>]| rows.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect();
        (s(&self.h), s(&self.v), self.eigenvalues.iter().map(|e| e.to_string()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Spray(SprayModel),
    Frame(FrameModel),
}

impl Model {
    pub fn dim(&self) -> usize {
        match self {
            Model::Spray(s) => s.n,
            Model::Frame(f) => f.n,
        }
    }

    pub fn label(&self) -> &str {
        match self {
            Model::Spray(s) => &s.label,
            Model::Frame(f) => &f.label,
        }
    }
}
