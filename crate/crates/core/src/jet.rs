//! Truncated multivariate Taylor jets.
//!
//! Coefficients are Taylor coefficients (`∂^α f / α!`) stored densely in
//! graded-lexicographic order. Monomials of degree `< d` always form a prefix,
//! so truncating a jet is just shortening the coefficient vector and jets of
//! different orders over the same variables share one index space.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

/// Highest order any jet space is built for.
pub const SPACE_CAPACITY: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("division by a jet whose constant term is {0:e}")]
    DivisionByZero(f64),
    #[error("{func} is undefined at {value}")]
    Domain { func: &'static str, value: f64 },
    #[error("derivative of order {requested} requested from a jet of order {order}")]
    OrderExceeded { requested: usize, order: usize },
}

/// Index bookkeeping shared by every jet over `nvars` variables.
pub struct JetSpace {
    nvars: usize,
    capacity: usize,
    exps: Vec<Vec<u8>>,
    deg_start: Vec<usize>,
    index: HashMap<Vec<u8>, usize>,
    // (lhs, rhs, result) triples sorted by the degree of the result
    products: Vec<(u32, u32, u32)>,
    prod_end: Vec<usize>,
    // raise[i * nvars + v] = index of exps[i] + e_v, or NONE past capacity
    raise: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("capacity", &self.capacity)
            .field("len", &self.exps.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, d: usize) -> Vec<Vec<u8>> {
    // lexicographically descending: x1^d first
    fn rec(nvars: usize, pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos == nvars - 1 {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(nvars, pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0u8; nvars];
    rec(nvars, 0, d, &mut cur, &mut out);
    out
}

impl JetSpace {
    fn build(nvars: usize, capacity: usize) -> JetSpace {
        assert!(nvars >= 1);
        let mut exps = Vec::new();
        let mut deg_start = Vec::with_capacity(capacity + 2);
        for d in 0..=capacity {
            deg_start.push(exps.len());
            exps.extend(monomials_of_degree(nvars, d));
        }
        deg_start.push(exps.len());
        let index: HashMap<Vec<u8>, usize> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();

        let degree = |i: usize| exps[i].iter().map(|&e| e as usize).sum::<usize>();
        let mut by_degree: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); capacity + 1];
        let mut sum = vec![0u8; nvars];
        for i in 0..exps.len() {
            let di = degree(i);
            for j in 0..deg_start[capacity - di + 1] {
                for v in 0..nvars {
                    sum[v] = exps[i][v] + exps[j][v];
                }
                let r = index[&sum];
                by_degree[di + degree(j)].push((i as u32, j as u32, r as u32));
            }
        }
        let mut products = Vec::new();
        let mut prod_end = Vec::with_capacity(capacity + 1);
        for bucket in by_degree {
            products.extend(bucket);
            prod_end.push(products.len());
        }

        let mut raise = vec![NONE; exps.len() * nvars];
        for i in 0..exps.len() {
            for v in 0..nvars {
                let mut e = exps[i].clone();
                e[v] += 1;
                if let Some(&r) = index.get(&e) {
                    raise[i * nvars + v] = r as u32;
                }
            }
        }
        JetSpace { nvars, capacity, exps, deg_start, index, products, prod_end, raise }
    }

    /// Shared space for `nvars` variables able to hold jets up to `order`.
    pub fn get(nvars: usize, order: usize) -> Arc<JetSpace> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<JetSpace>>>> = OnceLock::new();
        assert!(order <= SPACE_CAPACITY, "jet order {order} exceeds capacity {SPACE_CAPACITY}");
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap();
        if let Some(s) = guard.get(&nvars) {
            if s.capacity >= order {
                return s.clone();
            }
        }
        // small spaces are cheap, so build once at a comfortable capacity
        let cap = if nvars <= 8 { order.max(6) } else { order };
        let s = Arc::new(JetSpace::build(nvars, cap));
        guard.insert(nvars, s.clone());
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Number of monomials of total degree `<= order`.
    pub fn len_upto(&self, order: usize) -> usize {
        self.deg_start[order + 1]
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn index_of(&self, alpha: &[u8]) -> Option<usize> {
        self.index.get(alpha).copied()
    }
}

/// Truncated Taylor expansion of a scalar in `nvars` variables.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    order: usize,
    c: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(order {}, value {:e}", self.order, self.c[0])?;
        let nz = self.c.iter().skip(1).filter(|v| **v != 0.0).count();
        write!(f, ", {nz} nonzero higher terms)")
    }
}

fn factorial(k: u8) -> f64 {
    (1..=k as u64).product::<u64>() as f64
}

impl Jet {
    pub fn constant(nvars: usize, order: usize, value: f64) -> Jet {
        let space = JetSpace::get(nvars, order);
        let mut c = vec![0.0; space.len_upto(order)];
        c[0] = value;
        Jet { space, order, c }
    }

    pub fn zero(nvars: usize, order: usize) -> Jet {
        Jet::constant(nvars, order, 0.0)
    }

    /// The coordinate function `var` expanded about `value`.
    pub fn variable(nvars: usize, order: usize, var: usize, value: f64) -> Jet {
        assert!(var < nvars);
        let mut j = Jet::constant(nvars, order, value);
        if order >= 1 {
            j.c[1 + var] = 1.0;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    /// Taylor coefficient of the monomial with exponents `alpha` (0 if above the order).
    pub fn coeff(&self, alpha: &[u8]) -> f64 {
        match self.space.index_of(alpha) {
            Some(i) if i < self.c.len() => self.c[i],
            _ => 0.0,
        }
    }

    /// Partial derivative `∂^α f` at the expansion point.
    pub fn derivative(&self, alpha: &[u8]) -> Result<f64, JetError> {
        assert_eq!(alpha.len(), self.nvars());
        let total: usize = alpha.iter().map(|&a| a as usize).sum();
        if total > self.order {
            return Err(JetError::OrderExceeded { requested: total, order: self.order });
        }
        let weight: f64 = alpha.iter().map(|&a| factorial(a)).product();
        Ok(self.coeff(alpha) * weight)
    }

    /// First partial derivative along `var` at the expansion point.
    pub fn d1(&self, var: usize) -> f64 {
        if self.order == 0 {
            return 0.0;
        }
        self.c[1 + var]
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order);
        Jet { space: self.space.clone(), order, c: self.c[..self.space.len_upto(order)].to_vec() }
    }

    fn same_shape(&self, other: &Jet) -> (usize, Arc<JetSpace>) {
        assert_eq!(self.nvars(), other.nvars(), "jets over different variable counts");
        let space =
            if self.space.capacity >= other.space.capacity { self.space.clone() } else { other.space.clone() };
        (self.order.min(other.order), space)
    }

    fn zip(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let (order, space) = self.same_shape(other);
        let n = space.len_upto(order);
        let c = (0..n).map(|i| f(self.c[i], other.c[i])).collect();
        Jet { space, order, c }
    }

    pub fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet { space: self.space.clone(), order: self.order, c: self.c.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        self.map_coeffs(|v| v * s)
    }

    pub fn add_scalar(&self, s: f64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    pub fn mul_jet(&self, other: &Jet) -> Jet {
        let (order, space) = self.same_shape(other);
        let mut c = vec![0.0; space.len_upto(order)];
        let (a, b) = (&self.c, &other.c);
        for &(i, j, r) in &space.products[..space.prod_end[order]] {
            c[r as usize] += a[i as usize] * b[j as usize];
        }
        Jet { space, order, c }
    }

    /// `self` with its constant term removed.
    fn nilpotent_part(&self) -> Jet {
        let mut u = self.clone();
        u.c[0] = 0.0;
        u
    }

    /// `Σ_m a[m] u^m` where `u = self - value`.
    fn compose_series(&self, a: &[f64]) -> Jet {
        let u = self.nilpotent_part();
        let mut out = Jet { space: self.space.clone(), order: self.order, c: vec![0.0; self.c.len()] };
        out.c[0] = a[0];
        let mut p = u.clone();
        for (m, &am) in a.iter().enumerate().skip(1) {
            if m > 1 {
                p = p.mul_jet(&u);
            }
            if am != 0.0 {
                for (o, pv) in out.c.iter_mut().zip(&p.c) {
                    *o += am * pv;
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Result<Jet, JetError> {
        let c0 = self.c[0];
        if c0 == 0.0 || !c0.is_finite() {
            return Err(JetError::DivisionByZero(c0));
        }
        let a: Vec<f64> = (0..=self.order).map(|m| (-1f64).powi(m as i32) / c0.powi(m as i32 + 1)).collect();
        Ok(self.compose_series(&a))
    }

    pub fn div_jet(&self, other: &Jet) -> Result<Jet, JetError> {
        Ok(self.mul_jet(&other.recip()?))
    }

    pub fn exp(&self) -> Jet {
        let e = self.c[0].exp();
        let mut a = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                f *= m as f64;
            }
            a.push(e / f);
        }
        self.compose_series(&a)
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let c0 = self.c[0];
        if c0 <= 0.0 || !c0.is_finite() {
            return Err(JetError::Domain { func: "log", value: c0 });
        }
        let mut a = vec![c0.ln()];
        for m in 1..=self.order {
            let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
            a.push(sign / (m as f64 * c0.powi(m as i32)));
        }
        Ok(self.compose_series(&a))
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let c0 = self.c[0];
        if c0 <= 0.0 || !c0.is_finite() {
            return Err(JetError::Domain { func: "sqrt", value: c0 });
        }
        // generalized binomial coefficients of (1+t)^(1/2)
        let mut a = Vec::with_capacity(self.order + 1);
        let mut binom = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                binom *= (0.5 - (m as f64 - 1.0)) / m as f64;
            }
            a.push(c0.sqrt() * binom / c0.powi(m as i32));
        }
        Ok(self.compose_series(&a))
    }

    fn trig(&self, phase: usize) -> Jet {
        let (s, c) = self.c[0].sin_cos();
        let cycle = [s, c, -s, -c];
        let mut a = Vec::with_capacity(self.order + 1);
        let mut f = 1.0;
        for m in 0..=self.order {
            if m > 0 {
                f *= m as f64;
            }
            a.push(cycle[(m + phase) % 4] / f);
        }
        self.compose_series(&a)
    }

    pub fn sin(&self) -> Jet {
        self.trig(0)
    }

    pub fn cos(&self) -> Jet {
        self.trig(1)
    }

    pub fn powi(&self, k: i64) -> Result<Jet, JetError> {
        if k < 0 {
            return self.recip()?.powi(-k);
        }
        let mut result = Jet::constant(self.nvars(), self.order, 1.0);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        Ok(result)
    }

    /// `∂f/∂x_var` as a jet one order lower.
    pub fn partial(&self, var: usize) -> Jet {
        assert!(var < self.nvars());
        if self.order == 0 {
            return Jet::zero(self.nvars(), 0);
        }
        let order = self.order - 1;
        let sp = &self.space;
        let n = sp.len_upto(order);
        let nv = sp.nvars;
        let c = (0..n)
            .map(|i| {
                let r = sp.raise[i * nv + var] as usize;
                (sp.exps[i][var] as f64 + 1.0) * self.c[r]
            })
            .collect();
        Jet { space: sp.clone(), order, c }
    }

    /// Derivative along the vector field with component jets `field`.
    pub fn along(&self, field: &[Jet]) -> Jet {
        assert_eq!(field.len(), self.nvars());
        let target = if self.order == 0 { 0 } else { self.order - 1 };
        let mut acc = Jet::zero(self.nvars(), target);
        for (v, x) in field.iter().enumerate() {
            if x.c.iter().all(|&t| t == 0.0) {
                continue;
            }
            acc = &acc + &x.mul_jet(&self.partial(v));
        }
        acc
    }

    /// `Σ w_k j_k`, truncated to the lowest order among `jets`.
    pub fn linear_combination(jets: &[&Jet], weights: &[f64]) -> Jet {
        assert_eq!(jets.len(), weights.len());
        let order = jets.iter().map(|j| j.order).min().expect("at least one jet");
        let space = jets.iter().max_by_key(|j| j.space.capacity).unwrap().space.clone();
        let len = space.len_upto(order);
        let mut c = vec![0.0; len];
        for (j, &w) in jets.iter().zip(weights) {
            if w != 0.0 {
                for (o, v) in c.iter_mut().zip(&j.c[..len]) {
                    *o += w * v;
                }
            }
        }
        Jet { space, order, c }
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl<'a> Add<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl<'a> Sub<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl<'a> Mul<&'a Jet> for &'a Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        self.mul_jet(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        &self + &rhs
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        &self * &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}
