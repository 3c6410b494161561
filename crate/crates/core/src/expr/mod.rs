//! Arithmetic expressions over the coordinates `x1..xn, y1..yn` of TM.
//!
//! Grammar, loosest binding first: `+ -`, `* /`, unary `-`, `^`. All binary
//! levels associate to the left, so `a^2^3` is `(a^2)^3`. Exponents must be
//! integer constants. Functions: `sin cos exp log sqrt`. Decimal literals
//! (including `1.5e-3`) are stored as exact rationals.

mod parse;

use std::fmt;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::jet::{Jet, JetError};
use crate::point::PointTM;

pub use parse::parse;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    X,
    Y,
}

/// A coordinate; `index` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Func(Func, Box<Expr>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at {line}:{col}: found {found}, expected {}", expected.join(" or "))]
    Syntax { line: usize, col: usize, found: String, expected: Vec<String> },
    #[error("unknown variable `{name}` at {line}:{col} (dimension is {dimension})")]
    UnknownVariable { name: String, line: usize, col: usize, dimension: usize },
    #[error("exponent `{exponent}` at {line}:{col} is not an integer constant")]
    NonIntegerExponent { line: usize, col: usize, exponent: String },
    #[error("`{subexpr}` cannot be evaluated here: {source}")]
    Domain { subexpr: String, source: JetError },
}

// binding strength used by the printer
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        Expr::Const(r) if r < &BigRational::from_integer(0.into()) => 3,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(r) => write!(f, "{}", parse::rational_to_source(r)),
            Expr::Var(v) => {
                let c = if v.kind == VarKind::X { 'x' } else { 'y' };
                write!(f, "{c}{}", v.index + 1)
            }
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_wrapped(f, a, prec(a) < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = prec(self);
                write_wrapped(f, a, prec(a) < p)?;
                let s = match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                f.write_str(s)?;
                write_wrapped(f, b, prec(b) <= p)
            }
            Expr::Pow(a, k) => {
                // the base of `^` must be a primary, but a power base is fine (left-assoc)
                write_wrapped(f, a, prec(a) < 4)?;
                write!(f, "^{k}")
            }
            Expr::Func(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

fn domain(e: &Expr, source: JetError) -> ExprError {
    ExprError::Domain { subexpr: e.to_string(), source }
}

impl Expr {
    pub fn var(kind: VarKind, index: usize) -> Expr {
        Expr::Var(Var { kind, index })
    }

    /// Largest variable index used, 1-based (0 for constants).
    pub fn max_index(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(v) => v.index + 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Func(_, a) => a.max_index(),
            Expr::Bin(_, a, b) => a.max_index().max(b.max_index()),
        }
    }

    /// True when no transcendental function or division by a non-constant appears.
    pub fn is_polynomial(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var(_) => true,
            Expr::Neg(a) => a.is_polynomial(),
            Expr::Pow(a, k) => *k >= 0 && a.is_polynomial(),
            Expr::Func(..) => false,
            Expr::Bin(BinOp::Div, a, b) => a.is_polynomial() && b.constant_value().is_some(),
            Expr::Bin(_, a, b) => a.is_polynomial() && b.is_polynomial(),
        }
    }

    /// Plain floating-point evaluation.
    pub fn eval(&self, u: &PointTM) -> Result<f64, ExprError> {
        Ok(self.eval_jet(u, 0)?.value())
    }

    /// Taylor jet of the expression at `u` in the variables `(x1..xn, y1..yn)`.
    pub fn eval_jet(&self, u: &PointTM, order: usize) -> Result<Jet, ExprError> {
        let seeds = u.seed_jets(order);
        self.eval_with(&seeds)
    }

    /// Evaluates with arbitrary jets substituted for the coordinates
    /// (`seeds[i]` for `x_{i+1}`, `seeds[n+i]` for `y_{i+1}`).
    pub fn eval_with(&self, seeds: &[Jet]) -> Result<Jet, ExprError> {
        let n = seeds.len() / 2;
        let proto = &seeds[0];
        Ok(match self {
            Expr::Const(r) => Jet::constant(proto.nvars(), proto.order(), r.to_f64().unwrap_or(f64::NAN)),
            Expr::Var(v) => {
                let k = if v.kind == VarKind::X { v.index } else { n + v.index };
                seeds[k].clone()
            }
            Expr::Neg(a) => -a.eval_with(seeds)?,
            Expr::Bin(op, a, b) => {
                let (ja, jb) = (a.eval_with(seeds)?, b.eval_with(seeds)?);
                match op {
                    BinOp::Add => ja + jb,
                    BinOp::Sub => ja - jb,
                    BinOp::Mul => ja * jb,
                    BinOp::Div => ja.div_jet(&jb).map_err(|e| domain(self, e))?,
                }
            }
            Expr::Pow(a, k) => a.eval_with(seeds)?.powi(*k).map_err(|e| domain(self, e))?,
            Expr::Func(func, a) => {
                let j = a.eval_with(seeds)?;
                match func {
                    Func::Sin => j.sin(),
                    Func::Cos => j.cos(),
                    Func::Exp => j.exp(),
                    Func::Log => j.ln().map_err(|e| domain(self, e))?,
                    Func::Sqrt => j.sqrt().map_err(|e| domain(self, e))?,
                }
            }
        })
    }
}

/// One sample at which the Euler identity failed.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HomogeneityFailure {
    pub sample: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HomogeneityReport {
    pub degree: i32,
    pub checked: usize,
    pub max_residual: f64,
    pub failures: Vec<HomogeneityFailure>,
}

impl HomogeneityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `Σ y^j ∂e/∂y^j = degree·e` within `tol·(1+|e|)` at every sample.
pub fn check_homogeneity(
    e: &Expr,
    degree: i32,
    samples: &[PointTM],
    tol: f64,
) -> Result<HomogeneityReport, ExprError> {
    let mut failures = Vec::new();
    let mut max_residual: f64 = 0.0;
    for (k, u) in samples.iter().enumerate() {
        let j = e.eval_jet(u, 1)?;
        let n = u.dim();
        let euler: f64 = (0..n).map(|i| u.y[i] * j.d1(n + i)).sum();
        let residual = (euler - degree as f64 * j.value()).abs() / (1.0 + j.value().abs());
        max_residual = max_residual.max(residual);
        if !(residual <= tol) {
            failures.push(HomogeneityFailure { sample: k, value: j.value(), residual });
        }
    }
    Ok(HomogeneityReport { degree, checked: samples.len(), max_residual, failures })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64], y: &[f64]) -> PointTM {
        PointTM::new(x.to_vec(), y.to_vec())
    }

    #[test]
    fn power_node() {
        let e = parse("y1^2", 3).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::var(VarKind::Y, 0)), 2));
    }

    #[test]
    fn product_evaluates() {
        let e = parse("x1*y1*y3", 3).unwrap();
        let v = e.eval(&pt(&[1.0, 0.0, 0.0], &[2.0, 0.0, 3.0])).unwrap();
        assert_eq!(v, 6.0);
    }

    #[test]
    fn unknown_variable() {
        assert!(matches!(parse("y4", 3), Err(ExprError::UnknownVariable { .. })));
        assert!(matches!(parse("x0", 3), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn non_integer_exponent() {
        assert!(matches!(parse("y1^0.5", 3), Err(ExprError::NonIntegerExponent { .. })));
        assert!(matches!(parse("y1^y2", 3), Err(ExprError::NonIntegerExponent { .. })));
        assert_eq!(parse("y1^(4/2)", 3).unwrap(), parse("y1^2", 3).unwrap());
    }

    #[test]
    fn syntax_error_position() {
        match parse("y1 +\n  * y2", 3) {
            Err(ExprError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("sin y1", 3), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("(y1", 3), Err(ExprError::Syntax { .. })));
        assert!(matches!(parse("y1 y2", 3), Err(ExprError::Syntax { .. })));
    }

    #[test]
    fn precedence() {
        let u = pt(&[0.0; 2], &[3.0, 2.0]);
        assert_eq!(parse("-y1^2", 2).unwrap().eval(&u).unwrap(), -9.0);
        assert_eq!(parse("y1 - y2 - 1", 2).unwrap().eval(&u).unwrap(), 0.0);
        assert_eq!(parse("y1 / y2 * 2", 2).unwrap().eval(&u).unwrap(), 3.0);
        assert_eq!(parse("y2^2^3", 2).unwrap().eval(&u).unwrap(), 64.0);
        assert_eq!(parse("y2^-2", 2).unwrap().eval(&u).unwrap(), 0.25);
    }

    #[test]
    fn bilinear_jet() {
        let e = parse("y1*y3", 3).unwrap();
        let j = e.eval_jet(&pt(&[0.0; 3], &[2.0, 0.0, 3.0]), 2).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.derivative(&[0, 0, 0, 1, 0, 0]).unwrap(), 3.0);
        assert_eq!(j.derivative(&[0, 0, 0, 0, 0, 1]).unwrap(), 2.0);
        assert_eq!(j.derivative(&[0, 0, 0, 1, 0, 1]).unwrap(), 1.0);
        assert_eq!(j.derivative(&[0, 0, 0, 2, 0, 0]).unwrap(), 0.0);
        assert_eq!(j.derivative(&[1, 0, 0, 0, 0, 0]).unwrap(), 0.0);
    }

    #[test]
    fn domain_error_names_subexpression() {
        let e = parse("y1 + log(y2 - 1)", 2).unwrap();
        match e.eval(&pt(&[0.0; 2], &[1.0, 1.0])) {
            Err(ExprError::Domain { subexpr, .. }) => assert_eq!(subexpr, "log(y2 - 1)"),
            other => panic!("{other:?}"),
        }
        let e = parse("1/(y1 - y2)", 2).unwrap();
        assert!(matches!(e.eval(&pt(&[0.0; 2], &[1.0, 1.0])), Err(ExprError::Domain { .. })));
    }

    #[test]
    fn printer_minimal_parens() {
        for (src, printed) in [
            ("(y1 - y2) - (x1 - x2)", "y1 - y2 - (x1 - x2)"),
            ("-(y1*y2)", "-(y1*y2)"),
            ("(-y1)^2", "(-y1)^2"),
            ("y1 + -y2", "y1 + -y2"),
            ("exp(x1)/(y1*y2)", "exp(x1)/(y1*y2)"),
        ] {
            assert_eq!(parse(src, 2).unwrap().to_string(), printed);
        }
    }

    #[test]
    fn homogeneity_examples() {
        let samples = vec![pt(&[0.3, -0.2, 0.5], &[1.0, 2.0, -0.7]), pt(&[0.0; 3], &[0.4, 0.1, 1.5])];
        let e = parse("y1^2/y3", 3).unwrap();
        assert!(check_homogeneity(&e, 1, &samples, 1e-12).unwrap().passed());
        let e = parse("x1*y1*y3", 3).unwrap();
        assert!(check_homogeneity(&e, 2, &samples, 1e-12).unwrap().passed());
        let e = parse("y1+1", 3).unwrap();
        let r = check_homogeneity(&e, 1, &samples, 1e-12).unwrap();
        assert_eq!(r.failures.len(), 2);
    }
}
