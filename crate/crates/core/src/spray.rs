//! Sprays given by coefficient expressions `ẍ^i = f^i(x, ẋ)`.

use serde::Serialize;

use crate::expr::{check_homogeneity, parse, Expr, ExprError, HomogeneityReport};
use crate::jet::Jet;
use crate::point::PointTM;

#[derive(Debug, Clone, PartialEq)]
pub struct SprayModel {
    pub n: usize,
    pub coeffs: Vec<Expr>,
    pub label: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SprayHomogeneity {
    pub passed: bool,
    pub per_coefficient: Vec<HomogeneityReport>,
}

impl SprayModel {
    pub fn new(coeffs: Vec<Expr>, label: impl Into<String>) -> SprayModel {
        let n = coeffs.len();
        assert!(n >= 2, "a spray needs dimension at least 2");
        assert!(coeffs.iter().all(|c| c.max_index() <= n), "variable index out of range");
        SprayModel { n, coeffs, label: label.into() }
    }

    pub fn parse(sources: &[&str], label: impl Into<String>) -> Result<SprayModel, ExprError> {
        let n = sources.len();
        let coeffs = sources.iter().map(|s| parse(s, n)).collect::<Result<Vec<_>, _>>()?;
        Ok(SprayModel::new(coeffs, label))
    }

    pub fn sources(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    /// Jets of `f^1..f^n` at `u`.
    pub fn coeff_jets(&self, u: &PointTM, order: usize) -> Result<Vec<Jet>, ExprError> {
        let seeds = u.seed_jets(order);
        self.coeffs.iter().map(|c| c.eval_with(&seeds)).collect()
    }

    /// Euler check of degree 2 for every coefficient.
    pub fn check_homogeneity(&self, samples: &[PointTM], tol: f64) -> Result<SprayHomogeneity, ExprError> {
        let per_coefficient = self
            .coeffs
            .iter()
            .map(|c| check_homogeneity(c, 2, samples, tol))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SprayHomogeneity { passed: per_coefficient.iter().all(|r| r.passed()), per_coefficient })
    }
}
