//! Symbol tableaux on symmetric tensors over the adapted basis
//! `h_1..h_n, v_1..v_n`.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::Serialize;

use crate::ratmat::{q, Acc, RatMat, SparseVec, Q};
use crate::SpencerError;

/// All sorted multi-indices of length `m` over `0..n`, in lexicographic order.
pub fn multisets(n: usize, m: usize) -> Vec<Vec<u8>> {
    (0..n as u8).combinations_with_replacement(m).collect()
}

/// Coordinates of `S^m` over a basis of size `n`.
#[derive(Debug, Clone)]
pub struct MultisetIndex {
    list: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
}

impl MultisetIndex {
    pub fn new(n: usize, m: usize) -> Self {
        let list = multisets(n, m);
        let index = list.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        MultisetIndex { list, index }
    }

    pub fn len(&self) -> usize {
        self.list.len()
    }

    pub fn is_empty(&self) -> bool {
        self.list.is_empty()
    }

    pub fn at(&self, i: usize) -> &[u8] {
        &self.list[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.list.iter().map(Vec::as_slice)
    }

    /// Index of the multiset formed by `parts`, in any order.
    pub fn get(&self, parts: &[u8]) -> usize {
        let mut k = parts.to_vec();
        k.sort_unstable();
        self.index[&k]
    }
}

/// Linear images of a basis vector: at most one term.
pub type Image = Option<(usize, Q)>;

/// The pointwise linear algebra of an adapted frame with constant eigenvalues.
///
/// Basis vector `a < n` is `h_{a+1}`, `a >= n` is `v_{a-n+1}`. The last
/// horizontal vector is the spray and the last vertical one the Liouville
/// field, with eigenvalue 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Frame {
    pub n: usize,
    /// `λ_1..λ_n`, with `λ_n = 0`.
    #[serde(serialize_with = "ser_rats")]
    pub lambdas: Vec<Q>,
}

pub(crate) fn ser_rats<S: serde::Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

fn ser_opt_rats<S: serde::Serializer>(v: &Option<Vec<Q>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => ser_rats(v, s),
        None => s.serialize_none(),
    }
}

impl Frame {
    /// `lambdas` holds `λ_1..λ_{n-1}`; they must be distinct and nonzero.
    pub fn new(lambdas: Vec<Q>) -> Result<Self, SpencerError> {
        let n = lambdas.len() + 1;
        if n < 2 {
            return Err(SpencerError::Invalid("dimension must be at least 2".into()));
        }
        let mut l = lambdas;
        l.push(Q::zero());
        for (i, a) in l.iter().enumerate() {
            if l[..i].contains(a) {
                return Err(SpencerError::Invalid(format!("eigenvalues must be distinct, got {a} twice")));
            }
        }
        Ok(Frame { n, lambdas: l })
    }

    /// Distinct nonzero small rationals drawn from a seeded generator.
    pub fn random(n: usize, seed: u64) -> Result<Self, SpencerError> {
        if n < 2 {
            return Err(SpencerError::Invalid("dimension must be at least 2".into()));
        }
        let mut rng = Pcg64::seed_from_u64(seed);
        let mut l: Vec<Q> = Vec::new();
        while l.len() < n - 1 {
            let x = random_rational(&mut rng);
            if !l.contains(&x) {
                l.push(x);
            }
        }
        Frame::new(l)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn liouville(&self) -> usize {
        2 * self.n - 1
    }

    pub fn spray(&self) -> usize {
        self.n - 1
    }

    pub fn h(&self, a: usize) -> Image {
        (a < self.n).then(|| (a, Q::one()))
    }

    pub fn j(&self, a: usize) -> Image {
        (a < self.n).then(|| (a + self.n, Q::one()))
    }

    pub fn phi(&self, a: usize) -> Image {
        (a < self.n && !self.lambdas[a].is_zero()).then(|| (a + self.n, self.lambdas[a].clone()))
    }

    pub fn id(&self, a: usize) -> Image {
        Some((a, Q::one()))
    }
}

pub(crate) fn random_rational(rng: &mut Pcg64) -> Q {
    loop {
        let p: i64 = rng.random_range(-40..=40);
        let d: i64 = rng.random_range(1..=9);
        if p != 0 {
            return q(p, d);
        }
    }
}

/// The symbol of the metrizability operator, optionally completed by the
/// second-order relation `Σ_i f_i A(v_i, v_i) = 0` over `i < n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolTableau {
    pub frame: Frame,
    /// Weights `f_1..f_{n-1}` of the completing relation.
    #[serde(serialize_with = "ser_opt_rats")]
    pub completion: Option<Vec<Q>>,
}

impl SymbolTableau {
    pub fn new(frame: Frame) -> Self {
        SymbolTableau { frame, completion: None }
    }

    pub fn completed(frame: Frame, weights: Vec<Q>) -> Result<Self, SpencerError> {
        if weights.len() != frame.n - 1 || weights.iter().any(Zero::is_zero) {
            return Err(SpencerError::Invalid(format!(
                "completion needs {} nonzero weights, got {}",
                frame.n - 1,
                weights.len()
            )));
        }
        Ok(SymbolTableau { frame, completion: Some(weights) })
    }

    /// Completion with random nonzero weights.
    pub fn completed_random(frame: Frame, seed: u64) -> Self {
        let mut rng = Pcg64::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let w = (0..frame.n - 1).map(|_| random_rational(&mut rng)).collect();
        SymbolTableau { frame, completion: Some(w) }
    }

    /// Constraint rows on the coordinates of `A ∈ S^m`.
    pub fn rows(&self, m: usize) -> (RatMat, MultisetIndex) {
        assert!(m >= 2, "symbol rows start at order 2");
        let f = &self.frame;
        let big = f.dim();
        let idx = MultisetIndex::new(big, m);
        let mut mat = RatMat::new(idx.len());
        let c = f.liouville() as u8;
        for z in multisets(big, m - 1) {
            let mut k = z.clone();
            k.push(c);
            mat.push(vec![(idx.get(&k), Q::one())]);
        }
        let two = q(2, 1);
        for z in multisets(big, m - 2) {
            for x in 0..big {
                for y in x + 1..big {
                    for (op, w) in [(Frame::h as fn(&Frame, usize) -> Image, &two), (Frame::phi, &Q::one())] {
                        let mut acc = Acc::new();
                        for (p, r, s) in [(x, y, Q::one()), (y, x, -Q::one())] {
                            if let (Some((a, ca)), Some((b, cb))) = (op(f, p), f.j(r)) {
                                let mut k = z.clone();
                                k.extend([a as u8, b as u8]);
                                acc.add(idx.get(&k), &(w * ca * cb * &s));
                            }
                        }
                        let r = acc.finish();
                        if !r.is_empty() {
                            mat.push(r);
                        }
                    }
                }
            }
            if let Some(wts) = &self.completion {
                let mut acc = Acc::new();
                for (i, wt) in wts.iter().enumerate() {
                    let v = (f.n + i) as u8;
                    let mut k = z.clone();
                    k.extend([v, v]);
                    acc.add(idx.get(&k), wt);
                }
                mat.push(acc.finish());
            }
        }
        (mat, idx)
    }

    /// Basis of the symbol kernel `g_m`.
    pub fn g_basis(&self, m: usize, limit: usize) -> Result<(Vec<SparseVec>, MultisetIndex), SpencerError> {
        let (mat, idx) = self.rows(m);
        mat.check_size(limit)?;
        let (_, ns) = mat.rank_nullity()?;
        Ok((ns, idx))
    }

    pub fn dim_g(&self, m: usize, limit: usize) -> Result<usize, SpencerError> {
        Ok(self.g_basis(m, limit)?.0.len())
    }

    /// Rank of the order-`m` symbol constraints.
    pub fn rank_sigma(&self, m: usize, limit: usize) -> Result<usize, SpencerError> {
        let (mat, _) = self.rows(m);
        mat.check_size(limit)?;
        Ok(mat.rank_nullity()?.0)
    }
}
