//! The obstruction map τ on the codomain of σ₃, its prolongation τ¹ on the
//! codomain of σ₄, and the exactness checks against the symbol maps.
//!
//! Codomain coordinates: `C(a..)` is the Liouville component `A(a.., C)`;
//! `G(z..; x, y)` and `F(z..; x, y)` are the components skew in the
//! horizontal pair `x < y < n`, built from `h` and `Φ` respectively.

use std::collections::HashMap;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ratmat::{dot, q, Acc, RatMat, SparseVec, Q};
use crate::tableau::{multisets, Frame, Image};
use crate::SpencerError;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    C(Vec<u8>),
    G(Vec<u8>, u8, u8),
    F(Vec<u8>, u8, u8),
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    G,
    F,
}

/// Codomain of σ_m for `m = slots + 3`.
#[derive(Debug, Clone)]
pub struct TauDomain {
    keys: Vec<Key>,
    index: HashMap<Key, usize>,
}

impl TauDomain {
    pub fn new(frame: &Frame, slots: usize) -> Self {
        let big = frame.dim();
        let mut keys: Vec<Key> = multisets(big, slots + 2).into_iter().map(Key::C).collect();
        for w in multisets(big, slots + 1) {
            for (x, y) in (0..frame.n as u8).tuple_combinations() {
                keys.push(Key::G(w.clone(), x, y));
                keys.push(Key::F(w.clone(), x, y));
            }
        }
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        TauDomain { keys, index }
    }

    pub fn dim(&self) -> usize {
        self.keys.len()
    }
}

struct Row<'a> {
    frame: &'a Frame,
    dom: &'a TauDomain,
    w: &'a [u8],
    acc: Acc,
}

impl<'a> Row<'a> {
    fn new(frame: &'a Frame, dom: &'a TauDomain, w: &'a [u8]) -> Self {
        Row { frame, dom, w, acc: Acc::new() }
    }

    fn slots(&self, extra: &[usize]) -> Vec<u8> {
        let mut s: Vec<u8> = self.w.iter().copied().chain(extra.iter().map(|&a| a as u8)).collect();
        s.sort_unstable();
        s
    }

    fn put(&mut self, kind: Kind, slots: &[usize], x: usize, y: usize, c: &Q) {
        let n = self.frame.n;
        if x >= n || y >= n || x == y {
            return;
        }
        let (a, b, c) = if x < y { (x, y, c.clone()) } else { (y, x, -c) };
        let s = self.slots(slots);
        let key = match kind {
            Kind::G => Key::G(s, a as u8, b as u8),
            Kind::F => Key::F(s, a as u8, b as u8),
        };
        self.acc.add(self.dom.index[&key], &c);
    }

    fn put_c(&mut self, x: Image, y: Image, c: &Q) {
        if let (Some((a, ca)), Some((b, cb))) = (x, y) {
            let key = Key::C(self.slots(&[a, b]));
            self.acc.add(self.dom.index[&key], &(c * ca * cb));
        }
    }

    /// `c · B_kind(z; x, y)` for images of basis vectors.
    fn ev(&mut self, kind: Kind, z: Image, x: Image, y: Image, c: &Q) {
        if let (Some((a, ca)), Some((b, cb)), Some((d, cd))) = (z, x, y) {
            self.put(kind, &[a], b, d, &(c * ca * cb * cd));
        }
    }

    /// `c · B_kind(s, t; x, y)` with two symmetric slots.
    fn ev2(&mut self, kind: Kind, s: Image, t: Image, x: usize, y: usize, c: &Q) {
        if let (Some((a, ca)), Some((b, cb))) = (s, t) {
            self.put(kind, &[a, b], x, y, &(c * ca * cb));
        }
    }

    fn finish(self) -> SparseVec {
        self.acc.finish()
    }
}

type Op = fn(&Frame, usize) -> Image;

/// Rows of τ with the extra symmetric slots `w` held fixed.
fn tau_rows(frame: &Frame, dom: &TauDomain, w: &[u8]) -> Vec<SparseVec> {
    let n = frame.n;
    let big = frame.dim();
    let e = |a: usize| frame.id(a);
    let one = Q::one();
    let half = q(1, 2);
    let mut rows = Vec::new();
    let cyclic: [(Kind, Op); 4] = [(Kind::G, Frame::h), (Kind::G, Frame::j), (Kind::F, Frame::phi), (Kind::F, Frame::j)];
    for (x, y, z) in itertools::iproduct!(0..big, 0..big, 0..big) {
        for (kind, op) in cyclic {
            let mut r = Row::new(frame, dom, w);
            for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                r.ev(kind, op(frame, a), e(b), e(c), &one);
            }
            rows.push(r.finish());
        }
    }
    let c = e(frame.liouville());
    let s = e(frame.spray());
    for (x, y) in itertools::iproduct!(0..big, 0..big) {
        let mut r = Row::new(frame, dom, w);
        r.ev(Kind::G, c.clone(), e(x), e(y), &half);
        r.put_c(frame.h(x), frame.j(y), &-&one);
        r.put_c(frame.h(y), frame.j(x), &one);
        rows.push(r.finish());

        let mut r = Row::new(frame, dom, w);
        r.ev(Kind::F, c.clone(), e(x), e(y), &one);
        r.put_c(frame.phi(x), frame.j(y), &-&one);
        r.put_c(frame.phi(y), frame.j(x), &one);
        rows.push(r.finish());

        let mut r = Row::new(frame, dom, w);
        r.ev(Kind::F, e(x), e(y), s.clone(), &one);
        r.put_c(e(x), frame.phi(y), &-&one);
        rows.push(r.finish());
    }
    let l = &frame.lambdas;
    for p in (0..n).permutations(3) {
        let (i, j, k) = (p[0], p[1], p[2]);
        let mut r = Row::new(frame, dom, w);
        r.ev(Kind::G, e(i + n), e(j), e(k), &half);
        r.ev(Kind::F, e(j), e(i), e(k), &(&l[k] - &l[i]).recip());
        r.ev(Kind::F, e(k), e(i), e(j), &(&l[i] - &l[j]).recip());
        rows.push(r.finish());
    }
    rows.retain(|r| !r.is_empty());
    rows
}

/// Rows of the extra component of τ¹, polarized in both arguments.
fn tau_h_rows(frame: &Frame, dom: &TauDomain) -> Vec<SparseVec> {
    let big = frame.dim();
    let half = q(1, 2);
    let one = Q::one();
    let orderings = |a: u8, b: u8| if a == b { vec![(a as usize, b as usize)] } else { vec![(a as usize, b as usize), (b as usize, a as usize)] };
    let mut rows = Vec::new();
    for xs in multisets(big, 2) {
        for ys in multisets(big, 2) {
            let mut r = Row::new(frame, dom, &[]);
            for (x1, x2) in orderings(xs[0], xs[1]) {
                for &(y1, y2) in &orderings(ys[0], ys[1]) {
                    r.ev2(Kind::G, frame.phi(x1), frame.j(y1), x2, y2, &half);
                    r.ev2(Kind::G, frame.phi(y1), frame.j(x1), x2, y2, &-&half);
                    r.ev2(Kind::F, frame.h(y1), frame.j(x1), x2, y2, &one);
                    r.ev2(Kind::F, frame.h(x1), frame.j(y1), x2, y2, &-&one);
                }
            }
            let r = r.finish();
            if !r.is_empty() {
                rows.push(r);
            }
        }
    }
    rows
}

/// Remove `a` and `b` from the sorted multiset `t`, if both occur.
fn remove_pair(t: &[u8], a: usize, b: usize) -> Option<Vec<u8>> {
    let mut rest = t.to_vec();
    for v in [a as u8, b as u8] {
        let pos = rest.iter().position(|&x| x == v)?;
        rest.remove(pos);
    }
    Some(rest)
}

/// σ_m applied to each coordinate vector of `S^m`.
fn sigma_images(frame: &Frame, dom: &TauDomain, m: usize) -> Vec<SparseVec> {
    let n = frame.n;
    let c = frame.liouville() as u8;
    let two = q(2, 1);
    let ops: [(Kind, Op, &Q); 2] = [(Kind::G, Frame::h, &two), (Kind::F, Frame::phi, &Q::one())];
    multisets(frame.dim(), m)
        .into_iter()
        .map(|t| {
            let mut acc = Acc::new();
            if let Some(pos) = t.iter().position(|&a| a == c) {
                let mut rest = t.clone();
                rest.remove(pos);
                acc.add(dom.index[&Key::C(rest)], &Q::one());
            }
            for (x, y) in (0..n).tuple_combinations() {
                for (p, r, sign) in [(x, y, Q::one()), (y, x, -Q::one())] {
                    for (kind, op, wt) in ops {
                        if let (Some((a, ca)), Some((b, cb))) = (op(frame, p), frame.j(r)) {
                            if let Some(rest) = remove_pair(&t, a, b) {
                                let key = match kind {
                                    Kind::G => Key::G(rest, x as u8, y as u8),
                                    Kind::F => Key::F(rest, x as u8, y as u8),
                                };
                                acc.add(dom.index[&key], &(wt * ca * cb * &sign));
                            }
                        }
                    }
                }
            }
            acc.finish()
        })
        .collect()
}

fn nonzero_compositions(rows: &[SparseVec], images: &[SparseVec]) -> usize {
    rows.iter().map(|r| images.iter().filter(|c| !dot(r, c).is_zero()).count()).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TauReport {
    pub domain_dim: usize,
    pub rank_tau: usize,
    pub nullity_tau: usize,
    /// Rank of σ₃ computed from its images in the τ domain.
    pub rank_sigma3: usize,
    /// Number of (τ row, σ₃ image) pairs with nonzero product.
    pub composition_nonzero: usize,
}

/// Kernel dimension of τ and the composition check τ ∘ σ₃ = 0.
pub fn tau_nullity(frame: &Frame, limit: usize) -> Result<TauReport, SpencerError> {
    if frame.n < 3 {
        return Err(SpencerError::Invalid("τ needs n >= 3".into()));
    }
    let dom = TauDomain::new(frame, 0);
    let rows = tau_rows(frame, &dom, &[]);
    let tau = RatMat::from_rows(dom.dim(), rows);
    tau.check_size(limit)?;
    let images = sigma_images(frame, &dom, 3);
    let sigma = RatMat::from_rows(dom.dim(), images);
    let (rank_tau, _) = tau.rank_nullity()?;
    Ok(TauReport {
        domain_dim: dom.dim(),
        rank_tau,
        nullity_tau: dom.dim() - rank_tau,
        rank_sigma3: sigma.rank(),
        composition_nonzero: nonzero_compositions(tau.rows(), sigma.rows()),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tau1Report {
    pub domain_dim: usize,
    pub sym4_dim: usize,
    pub rank_sigma4: usize,
    pub kernel_sigma4: usize,
    pub rank_id_tau: usize,
    pub rank_tau1: usize,
    /// Independent equations added by the τ_h component.
    pub tau_h_extra: usize,
    pub nullity_tau1: usize,
    /// `Ker τ¹ = Im σ₄`, given the inclusion below.
    pub exact: bool,
    /// Nonzero (τ¹ row, σ₄ image) products; the τ_h rows are included.
    pub composition_nonzero: usize,
}

/// Exactness of `S⁴ → codomain → ...` at the codomain of σ₄.
pub fn tau1_check(frame: &Frame, limit: usize) -> Result<Tau1Report, SpencerError> {
    if frame.n < 3 {
        return Err(SpencerError::Invalid("τ¹ needs n >= 3".into()));
    }
    let dom = TauDomain::new(frame, 1);
    let ws: Vec<[u8; 1]> = (0..frame.dim() as u8).map(|w| [w]).collect();
    let id_tau: Vec<SparseVec> = ws.iter().flat_map(|w| tau_rows(frame, &dom, w)).collect();
    let tau_h = tau_h_rows(frame, &dom);
    let images = sigma_images(frame, &dom, 4);
    let sym4_dim = images.len();

    let id_tau = RatMat::from_rows(dom.dim(), id_tau);
    let mut tau1 = id_tau.clone();
    for r in tau_h {
        tau1.push(r);
    }
    tau1.check_size(limit)?;
    let sigma = RatMat::from_rows(dom.dim(), images);

    let rank_id_tau = id_tau.rank();
    let (rank_tau1, _) = tau1.rank_nullity()?;
    let rank_sigma4 = sigma.rank();
    let kernel_sigma4 = sigma.transpose().nullspace().len();
    if rank_sigma4 + kernel_sigma4 != sym4_dim {
        return Err(SpencerError::Inconsistent(format!(
            "σ₄ rank {rank_sigma4} + kernel {kernel_sigma4} != {sym4_dim}"
        )));
    }
    let nullity_tau1 = dom.dim() - rank_tau1;
    let composition_nonzero = nonzero_compositions(tau1.rows(), sigma.rows());
    Ok(Tau1Report {
        domain_dim: dom.dim(),
        sym4_dim,
        rank_sigma4,
        kernel_sigma4,
        rank_id_tau,
        rank_tau1,
        tau_h_extra: rank_tau1 - rank_id_tau,
        nullity_tau1,
        exact: composition_nonzero == 0 && nullity_tau1 == rank_sigma4,
        composition_nonzero,
    })
}
