//! Linear forms in the unknown components `a_kk = Ω(v_k, h_k)` and their
//! algebraic Lie derivatives along frame fields.
//!
//! The only nonzero components of Ω in an adapted frame are `a_kk` for
//! `k < n`, so `Ω(X, Y) = Σ_k a_kk (ν^k_X ξ^k_Y - ξ^k_X ν^k_Y)`. Closedness
//! of Ω gives, for a frame field `e` outside `D_j = span{h_j, v_j}`,
//!
//! ```text
//! e(a_jj) = Ω([e,v_j], h_j) - Ω([e,h_j], v_j) + Ω([v_j,h_j], e)
//! ```
//!
//! Inside `D_j` the derivative is not determined by Ω alone; for `n = 3` the
//! reduced relation `η1 a11 + η2 a22 = 0` is used to trade `a_jj` for the
//! other component.

use std::fmt;

use crate::geom::Frame;
use crate::jet::Jet;

/// `Σ_k c[k] a_kk` with jet coefficients.
#[derive(Clone)]
pub struct OmegaLin {
    pub c: Vec<Jet>,
}

impl fmt::Debug for OmegaLin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<f64> = self.c.iter().map(Jet::value).collect();
        write!(f, "OmegaLin{v:?}")
    }
}

impl OmegaLin {
    pub fn zero(m: usize, nvars: usize, order: usize) -> OmegaLin {
        OmegaLin { c: vec![Jet::zero(nvars, order); m] }
    }

    /// The unknown `a_kk` itself.
    pub fn unit(m: usize, k: usize, nvars: usize, order: usize) -> OmegaLin {
        let mut o = OmegaLin::zero(m, nvars, order);
        o.c[k] = Jet::constant(nvars, order, 1.0);
        o
    }

    pub fn from_coeffs(c: Vec<Jet>) -> OmegaLin {
        OmegaLin { c }
    }

    pub fn add(&self, other: &OmegaLin) -> OmegaLin {
        OmegaLin { c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &OmegaLin) -> OmegaLin {
        OmegaLin { c: self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: &Jet) -> OmegaLin {
        OmegaLin { c: self.c.iter().map(|a| a * s).collect() }
    }

    pub fn scale_f(&self, s: f64) -> OmegaLin {
        OmegaLin { c: self.c.iter().map(|a| a.scale(s)).collect() }
    }

    pub fn values(&self) -> Vec<f64> {
        self.c.iter().map(Jet::value).collect()
    }

    pub fn order(&self) -> usize {
        self.c.iter().map(Jet::order).min().unwrap_or(0)
    }
}

pub fn sum(forms: &[OmegaLin]) -> OmegaLin {
    let mut acc = forms[0].clone();
    for f in &forms[1..] {
        acc = acc.add(f);
    }
    acc
}

/// Algebraic Ω-calculus over a frame.
pub struct OmegaCalculus<'a> {
    pub frame: &'a Frame,
    m: usize,
    // basis[b][j] = e_b(a_jj), None inside D_j when no relation is available
    basis: Vec<Vec<Option<OmegaLin>>>,
}

impl<'a> OmegaCalculus<'a> {
    /// Calculus without a reduced relation: derivatives of `a_jj` along `h_j`, `v_j` are unavailable.
    pub fn new(frame: &'a Frame) -> OmegaCalculus<'a> {
        let mut calc = OmegaCalculus { frame, m: frame.n - 1, basis: Vec::new() };
        let n = frame.n;
        calc.basis = (0..2 * n)
            .map(|b| (0..n - 1).map(|j| (!calc.in_d(b, j)).then(|| calc.closed_rule(b, j))).collect())
            .collect();
        calc
    }

    /// Calculus closed by the relation `eta[0] a11 + eta[1] a22 = 0` (`n = 3`).
    /// Both components of `eta` must be nonzero at the point.
    pub fn with_relation(frame: &'a Frame, eta: &[Jet; 2]) -> OmegaCalculus<'a> {
        assert_eq!(frame.n, 3, "the reduced relation is implemented for n = 3");
        let mut calc = OmegaCalculus::new(frame);
        for j in 0..2 {
            let o = 1 - j;
            // a_jj = r a_oo
            let r = (-&eta[o]).div_jet(&eta[j]).expect("eta components are nonzero");
            for b in [j, frame.n + j] {
                let e = &frame.fields[b];
                let base = calc.basis[b][o].clone().expect("e lies outside D_o");
                let mut res = base.scale(&r);
                let dr = r.along(e);
                res.c[o] = &res.c[o] + &dr;
                calc.basis[b][j] = Some(res);
            }
        }
        calc
    }

    fn in_d(&self, b: usize, j: usize) -> bool {
        b == j || b == self.frame.n + j
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    fn nvars(&self) -> usize {
        2 * self.frame.n
    }

    /// `Ω(X, Y)` for fields given by their frame components.
    pub fn omega_comps(&self, x: &[Jet], y: &[Jet]) -> OmegaLin {
        let n = self.frame.n;
        OmegaLin { c: (0..self.m).map(|k| &(&x[n + k] * &y[k]) - &(&x[k] * &y[n + k])).collect() }
    }

    pub fn omega(&self, x: &[Jet], y: &[Jet]) -> OmegaLin {
        self.omega_comps(&self.frame.comps(x), &self.frame.comps(y))
    }

    /// `Ω([A,B],C) + Ω([B,C],A) + Ω([C,A],B)`.
    pub fn cyc(&self, a: &[Jet], b: &[Jet], c: &[Jet]) -> OmegaLin {
        let f = self.frame;
        sum(&[
            self.omega(&f.bracket(a, b), c),
            self.omega(&f.bracket(b, c), a),
            self.omega(&f.bracket(c, a), b),
        ])
    }

    fn closed_rule(&self, b: usize, j: usize) -> OmegaLin {
        let f = self.frame;
        let e = &f.fields[b];
        let (h, v) = (f.h(j), f.v(j));
        sum(&[
            self.omega(&f.bracket(e, v), h),
            self.omega(&f.bracket(e, h), v).scale_f(-1.0),
            self.omega(&f.bracket(v, h), e),
        ])
    }

    /// `e_b(a_jj)` as a linear form, if determined.
    pub fn basis_derivative(&self, b: usize, j: usize) -> Option<&OmegaLin> {
        self.basis[b][j].as_ref()
    }

    /// `X(Σ c_j a_jj) = Σ X(c_j) a_jj + Σ c_j X^b e_b(a_jj)`.
    /// Returns `None` when a needed derivative inside some `D_j` is unavailable.
    pub fn lie(&self, x: &[Jet], form: &OmegaLin) -> Option<OmegaLin> {
        let comps = self.frame.comps(x);
        let mut out = OmegaLin { c: form.c.iter().map(|c| c.along(x)).collect() };
        for j in 0..self.m {
            if form.c[j].max_abs() == 0.0 {
                continue;
            }
            for (b, xb) in comps.iter().enumerate() {
                if xb.max_abs() == 0.0 {
                    continue;
                }
                let lb = self.basis[b][j].as_ref()?;
                out = out.add(&lb.scale(&(xb * &form.c[j])));
            }
        }
        Some(out)
    }

    pub fn unit(&self, k: usize) -> OmegaLin {
        OmegaLin::unit(self.m, k, self.nvars(), self.frame.order())
    }
}
