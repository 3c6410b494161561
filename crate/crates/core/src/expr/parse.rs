//! Tokenizer and recursive-descent parser.
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" exponent)*
//! exponent:= "-" exponent | primary        (must fold to an integer constant)
//! primary := number | variable | func "(" expr ")" | "(" expr ")"
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{BinOp, Expr, ExprError, Func, Var, VarKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(_, s) => format!("number `{s}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn decimal_to_rational(mantissa: &str, exp: i64) -> BigRational {
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let digits = format!("{int_part}{frac_part}");
    let digits = if digits.is_empty() { "0".to_string() } else { digits };
    let num: BigInt = digits.parse().expect("digits only");
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    }
}

fn tokenize(src: &str) -> Result<Vec<Spanned>, ExprError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Spanned { tok, line: tl, col: tc });
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let mantissa: String = chars[start..i].iter().collect();
            let mut exp = 0i64;
            let mut text = mantissa.clone();
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                let ds = j;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                if j > ds {
                    let e: String = chars[i + 1..j].iter().collect();
                    exp = e.parse().map_err(|_| ExprError::Syntax {
                        line: tl,
                        col: tc,
                        found: format!("number `{mantissa}{e}`"),
                        expected: vec!["a number".into()],
                    })?;
                    text = chars[start..j].iter().collect();
                    i = j;
                }
            }
            if mantissa.matches('.').count() > 1 || mantissa == "." {
                return Err(ExprError::Syntax {
                    line: tl,
                    col: tc,
                    found: format!("`{text}`"),
                    expected: vec!["a number".into()],
                });
            }
            col += text.chars().count();
            out.push(Spanned { tok: Tok::Num(decimal_to_rational(&mantissa, exp), text), line: tl, col: tc });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Spanned { tok: Tok::Ident(s), line: tl, col: tc });
            continue;
        }
        return Err(ExprError::Syntax {
            line: tl,
            col: tc,
            found: format!("character `{c}`"),
            expected: vec!["an operator".into(), "a number".into(), "a variable".into(), "`(`".into()],
        });
    }
    out.push(Spanned { tok: Tok::End, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    n: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ExprError {
        let t = self.peek();
        ExprError::Syntax {
            line: t.line,
            col: t.col,
            found: t.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().tok {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let mut base = self.primary()?;
        while self.peek().tok == Tok::Caret {
            let caret = self.bump();
            let e = self.exponent()?;
            let k = match e.constant_value() {
                Some(r) if r.is_integer() => r.to_integer().to_i64(),
                _ => None,
            };
            match k {
                Some(k) if k.unsigned_abs() <= 1 << 20 => base = Expr::Pow(Box::new(base), k),
                _ => {
                    return Err(ExprError::NonIntegerExponent {
                        line: caret.line,
                        col: caret.col,
                        exponent: e.to_string(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ExprError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        const EXPECTED: [&str; 4] = ["a number", "a variable", "a function", "`(`"];
        let t = self.peek().clone();
        match &t.tok {
            Tok::Num(r, _) => {
                self.bump();
                Ok(Expr::Const(r.clone()))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                if self.peek().tok != Tok::RParen {
                    return Err(self.error(&["`)`", "an operator"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(f) = Func::from_name(name) {
                    self.bump();
                    if self.peek().tok != Tok::LParen {
                        return Err(self.error(&["`(`"]));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    if self.peek().tok != Tok::RParen {
                        return Err(self.error(&["`)`", "an operator"]));
                    }
                    self.bump();
                    return Ok(Expr::Func(f, Box::new(arg)));
                }
                let var = parse_var(name).ok_or_else(|| self.error(&EXPECTED))?;
                if var.index >= self.n {
                    return Err(ExprError::UnknownVariable {
                        name: name.clone(),
                        line: t.line,
                        col: t.col,
                        dimension: self.n,
                    });
                }
                self.bump();
                Ok(Expr::Var(var))
            }
            _ => Err(self.error(&EXPECTED)),
        }
    }
}

fn parse_var(name: &str) -> Option<Var> {
    let kind = match name.as_bytes().first()? {
        b'x' => VarKind::X,
        b'y' => VarKind::Y,
        _ => return None,
    };
    let digits = &name[1..];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    let idx: usize = digits.parse().ok()?;
    Some(Var { kind, index: idx - 1 })
}

/// Parses `source` as an expression over `x1..xn, y1..yn`.
pub fn parse(source: &str, n: usize) -> Result<Expr, ExprError> {
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0, n };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        return Err(p.error(&["an operator", "end of input"]));
    }
    Ok(e)
}

impl Expr {
    /// Folds the expression to a rational when it contains no variables or functions.
    pub fn constant_value(&self) -> Option<BigRational> {
        match self {
            Expr::Const(r) => Some(r.clone()),
            Expr::Var(_) | Expr::Func(..) => None,
            Expr::Neg(a) => a.constant_value().map(|r| -r),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.constant_value()?, b.constant_value()?);
                match op {
                    BinOp::Add => Some(a + b),
                    BinOp::Sub => Some(a - b),
                    BinOp::Mul => Some(a * b),
                    BinOp::Div => (!b.is_zero()).then(|| a / b),
                }
            }
            Expr::Pow(a, k) => {
                let a = a.constant_value()?;
                if a.is_zero() && *k < 0 {
                    return None;
                }
                let mut r = BigRational::one();
                let base = if *k < 0 { a.recip() } else { a };
                for _ in 0..k.unsigned_abs() {
                    r *= &base;
                }
                Some(r)
            }
        }
    }
}

pub(crate) fn rational_to_source(r: &BigRational) -> String {
    let neg = r.is_negative();
    let a = r.abs();
    let mut den = a.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut p2, mut p5) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        p2 += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        p5 += 1;
    }
    let body = if den.is_one() {
        let k = p2.max(p5);
        if k == 0 {
            a.numer().to_string()
        } else {
            let scaled = (a * BigRational::from_integer(num_traits::pow(BigInt::from(10), k))).to_integer();
            let s = format!("{:0>width$}", scaled.to_string(), width = k + 1);
            let (i, f) = s.split_at(s.len() - k);
            format!("{i}.{f}")
        }
    } else {
        format!("({}/{})", a.numer(), a.denom())
    };
    if neg {
        format!("(-{body})")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals_are_exact() {
        let e = parse("0.125", 1).unwrap();
        assert_eq!(e.constant_value().unwrap(), BigRational::new(1.into(), 8.into()));
        let e = parse("2.5e-1", 1).unwrap();
        assert_eq!(e.constant_value().unwrap(), BigRational::new(1.into(), 4.into()));
    }

    #[test]
    fn rational_source_round_trip() {
        for (p, q) in [(1, 8), (3, 1), (7, 20), (1, 3)] {
            let r = BigRational::new(p.into(), q.into());
            let s = rational_to_source(&r);
            assert_eq!(parse(&s, 1).unwrap().constant_value().unwrap(), r, "{s}");
        }
    }

    #[test]
    fn leading_zero_index_rejected() {
        assert!(matches!(parse("x01", 3), Err(ExprError::Syntax { .. })));
    }
}
