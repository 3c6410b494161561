//! Sparse exact rational matrices.
//!
//! Rank uses fraction-free elimination on primitive integer rows. The
//! nullspace comes from a separate Gauss-Jordan reduction over the rationals,
//! so `rank + nullity = cols` compares two independent eliminations.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::SpencerError;

pub type Q = BigRational;

/// Sorted `(column, value)` pairs with no explicit zeros.
pub type SparseVec = Vec<(usize, Q)>;

type IntRow = Vec<(usize, BigInt)>;

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Accumulates coefficients by column and drops the ones that cancel.
#[derive(Debug, Clone, Default)]
pub struct Acc(BTreeMap<usize, Q>);

impl Acc {
    pub fn new() -> Self {
        Acc(BTreeMap::new())
    }

    pub fn add(&mut self, col: usize, value: &Q) {
        if value.is_zero() {
            return;
        }
        let e = self.0.entry(col).or_insert_with(Q::zero);
        *e += value;
    }

    pub fn finish(self) -> SparseVec {
        self.0.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }
}

/// Dot product of two sorted sparse vectors.
pub fn dot(a: &[(usize, Q)], b: &[(usize, Q)]) -> Q {
    let (mut i, mut j) = (0, 0);
    let mut s = Q::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                s += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatMat {
    cols: usize,
    rows: Vec<SparseVec>,
}

impl RatMat {
    pub fn new(cols: usize) -> Self {
        RatMat { cols, rows: Vec::new() }
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Self {
        let mut m = RatMat::new(cols);
        for r in rows {
            m.push(r);
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let sparse = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged dense matrix");
                r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(c, v)| (c, v.clone())).collect()
            })
            .collect();
        RatMat::from_rows(cols, sparse)
    }

    pub fn push(&mut self, row: SparseVec) {
        debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0), "row not sorted");
        debug_assert!(row.iter().all(|(c, v)| *c < self.cols && !v.is_zero()));
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn check_size(&self, limit: usize) -> Result<(), SpencerError> {
        if self.rows.len() > limit || self.cols > limit {
            return Err(SpencerError::ResourceLimit { rows: self.rows.len(), cols: self.cols, limit });
        }
        Ok(())
    }

    pub fn transpose(&self) -> RatMat {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                cols[*c].push((i, v.clone()));
            }
        }
        RatMat { cols: self.rows.len(), rows: cols }
    }

    /// `self · v` as a sparse vector indexed by row.
    pub fn apply(&self, v: &[(usize, Q)]) -> SparseVec {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let d = dot(r, v);
                (!d.is_zero()).then_some((i, d))
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut seen = HashSet::new();
        let mut work: Vec<IntRow> = Vec::new();
        for r in &self.rows {
            let p = primitive(r);
            if !p.is_empty() && seen.insert(p.clone()) {
                work.push(p);
            }
        }
        work.sort_by(|a, b| a[0].0.cmp(&b[0].0).then(a.len().cmp(&b.len())));
        let mut pivots: HashMap<usize, IntRow> = HashMap::new();
        for mut r in work {
            while let Some(&(c, _)) = r.first() {
                match pivots.get(&c) {
                    Some(p) => {
                        r = cancel_leading(&r, p);
                        make_primitive(&mut r);
                    }
                    None => {
                        pivots.insert(c, r);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }

    /// Basis of `{x : self · x = 0}`, one vector per free column.
    pub fn nullspace(&self) -> Vec<SparseVec> {
        let mut pivots: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for row in &self.rows {
            let mut r = row.clone();
            while let Some((c, lead)) = r.first().cloned() {
                match pivots.get(&c) {
                    Some(p) => r = axpy(&r, &-lead, p),
                    None => {
                        let inv = lead.recip();
                        for e in r.iter_mut() {
                            e.1 *= &inv;
                        }
                        pivots.insert(c, r);
                        break;
                    }
                }
            }
        }
        let pcols: Vec<usize> = pivots.keys().copied().collect();
        for (k, &c) in pcols.iter().enumerate().rev() {
            let pr = pivots[&c].clone();
            for &c2 in &pcols[..k] {
                let row = pivots.get_mut(&c2).unwrap();
                if let Ok(pos) = row.binary_search_by_key(&c, |e| e.0) {
                    let f = -row[pos].1.clone();
                    *row = axpy(row, &f, &pr);
                }
            }
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|c| !pivots.contains_key(c)) {
            let mut v = vec![(free, Q::one())];
            for (&c, row) in &pivots {
                if let Ok(pos) = row.binary_search_by_key(&free, |e| e.0) {
                    v.push((c, -row[pos].1.clone()));
                }
            }
            v.sort_by_key(|e| e.0);
            basis.push(v);
        }
        basis
    }

    /// Rank and nullspace, failing if the two eliminations disagree.
    pub fn rank_nullity(&self) -> Result<(usize, Vec<SparseVec>), SpencerError> {
        let r = self.rank();
        let ns = self.nullspace();
        if r + ns.len() != self.cols {
            return Err(SpencerError::Inconsistent(format!(
                "rank {r} + nullity {} != {} columns",
                ns.len(),
                self.cols
            )));
        }
        Ok((r, ns))
    }
}

/// `a + f·b` for sorted sparse rows.
fn axpy(a: &[(usize, Q)], f: &Q, b: &[(usize, Q)]) -> SparseVec {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map_or(usize::MAX, |e| e.0);
        let cb = b.get(j).map_or(usize::MAX, |e| e.0);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, f * &b[j].1));
            j += 1;
        } else {
            let v = &a[i].1 + f * &b[j].1;
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn primitive(row: &[(usize, Q)]) -> IntRow {
    let den = row.iter().fold(BigInt::one(), |l, (_, v)| l.lcm(v.denom()));
    let mut r: IntRow = row.iter().map(|(c, v)| (*c, v.numer() * (&den / v.denom()))).collect();
    make_primitive(&mut r);
    r
}

fn make_primitive(r: &mut IntRow) {
    let Some(first) = r.first() else { return };
    let mut g = first.1.abs();
    for (_, v) in r.iter().skip(1) {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    let neg = first.1.is_negative();
    if !g.is_one() || neg {
        if neg {
            g = -g;
        }
        for e in r.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
}

/// `a·row − b·pivot` where `a`, `b` are the leading entries reduced by their
/// gcd; the leading column cancels.
fn cancel_leading(row: &IntRow, pivot: &IntRow) -> IntRow {
    let g = row[0].1.gcd(&pivot[0].1);
    let a = &pivot[0].1 / &g;
    let b = &row[0].1 / &g;
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        if ci < cj {
            out.push((ci, &a * &row[i].1));
            i += 1;
        } else if cj < ci {
            out.push((cj, -(&b * &pivot[j].1)));
            j += 1;
        } else {
            let v = &a * &row[i].1 - &b * &pivot[j].1;
            if !v.is_zero() {
                out.push((ci, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMat {
        RatMat::from_dense(&rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect::<Vec<_>>())
    }

    #[test]
    fn rank_of_small_matrices() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]).rank(), 2);
        assert_eq!(m(&[&[0, 0], &[0, 0]]).rank(), 0);
        assert_eq!(RatMat::new(3).rank(), 0);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let a = m(&[&[1, 2, 3, 4], &[2, 4, 7, 9]]);
        let (r, ns) = a.rank_nullity().unwrap();
        assert_eq!(r, 2);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(a.apply(v).is_empty());
        }
    }

    #[test]
    fn size_guard() {
        let a = RatMat::new(30);
        assert!(matches!(a.check_size(20), Err(SpencerError::ResourceLimit { cols: 30, .. })));
        assert!(a.check_size(30).is_ok());
    }
}
