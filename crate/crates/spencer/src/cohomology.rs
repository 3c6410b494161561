//! The Spencer sequence `g_{m+1} ⊗ T* → g_m ⊗ Λ² → S^{m-1} ⊗ Λ³` and its
//! cohomology at the middle term.

use std::collections::HashMap;

use itertools::Itertools;
use serde::Serialize;

use crate::ratmat::{Acc, RatMat, SparseVec};
use crate::tableau::{MultisetIndex, SymbolTableau};
use crate::SpencerError;

struct Wedges {
    pairs: HashMap<(usize, usize), usize>,
    pair_list: Vec<(usize, usize)>,
    triples: HashMap<(usize, usize, usize), usize>,
}

impl Wedges {
    fn new(big: usize) -> Self {
        let pair_list: Vec<(usize, usize)> = (0..big).tuple_combinations().collect();
        let pairs = pair_list.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let triples = (0..big).tuple_combinations().enumerate().map(|(i, t)| (t, i)).collect();
        Wedges { pairs, pair_list, triples }
    }
}

/// Distinct entries of a sorted multiset, each with the multiset left after
/// removing one copy.
fn splits(t: &[u8]) -> impl Iterator<Item = (usize, Vec<u8>)> + '_ {
    t.iter().enumerate().filter(|(i, a)| *i == 0 || t[i - 1] != **a).map(|(i, &a)| {
        let mut rest = t.to_vec();
        rest.remove(i);
        (a as usize, rest)
    })
}

/// `δ(A ⊗ e^w)(Z; X, Y) = A(X, Z) δ_{Y w} − A(Y, Z) δ_{X w}` on coordinates of
/// `S^{m+1}`; the result is indexed by `(S^m, pair)`.
fn delta1(a: &SparseVec, w: usize, upper: &MultisetIndex, lower: &MultisetIndex, wedges: &Wedges) -> SparseVec {
    let np = wedges.pairs.len();
    let mut acc = Acc::new();
    for (col, val) in a {
        for (x, z) in splits(upper.at(*col)) {
            if x == w {
                continue;
            }
            let (p, s) = if x < w { ((x, w), val.clone()) } else { ((w, x), -val) };
            acc.add(lower.get(&z) * np + wedges.pairs[&p], &s);
        }
    }
    acc.finish()
}

/// `δB(Z; a, b, c) = B(a, Z; b, c) − B(b, Z; a, c) + B(c, Z; a, b)` with `B`
/// indexed by `(S^m, pair)`.
fn delta2(b: &SparseVec, upper: &MultisetIndex, lower: &MultisetIndex, wedges: &Wedges) -> SparseVec {
    let np = wedges.pairs.len();
    let nt = wedges.triples.len();
    let mut acc = Acc::new();
    for (col, val) in b {
        let (p, q) = wedges.pair_list[col % np];
        for (x, z) in splits(upper.at(col / np)) {
            if x == p || x == q {
                continue;
            }
            let mut perm = [x, p, q];
            let inversions = (0..3).flat_map(|i| (i + 1..3).map(move |j| (i, j))).filter(|&(i, j)| perm[i] > perm[j]).count();
            perm.sort_unstable();
            let v = if inversions % 2 == 0 { val.clone() } else { -val };
            acc.add(lower.get(&z) * nt + wedges.triples[&(perm[0], perm[1], perm[2])], &v);
        }
    }
    acc.finish()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpencerCohomology {
    pub m: usize,
    pub dim_g_next: usize,
    pub dim_g: usize,
    pub rank_delta1: usize,
    pub kernel_delta2: usize,
    pub dim_h: usize,
    /// Number of `δ₁` images whose `δ₂` image is nonzero.
    pub complex_defects: usize,
    /// Number of `δ₁` images that leave `g_m ⊗ Λ²`.
    pub image_defects: usize,
}

/// Dimension of `H^{m,2}` from explicit δ₁ and δ₂ matrices.
pub fn spencer_h(tab: &SymbolTableau, m: usize, limit: usize) -> Result<SpencerCohomology, SpencerError> {
    if m < 2 {
        return Err(SpencerError::Invalid("Spencer cohomology needs m >= 2".into()));
    }
    let big = tab.frame.dim();
    let wedges = Wedges::new(big);
    let np = wedges.pairs.len();
    let (g_next, idx_next) = tab.g_basis(m + 1, limit)?;
    let (g_m, idx_m) = tab.g_basis(m, limit)?;
    let idx_low = MultisetIndex::new(big, m - 1);

    let mut d1 = RatMat::new(idx_m.len() * np);
    for a in &g_next {
        for w in 0..big {
            let img = delta1(a, w, &idx_next, &idx_m, &wedges);
            if !img.is_empty() {
                d1.push(img);
            }
        }
    }
    d1.check_size(limit)?;

    let mut d2 = RatMat::new(idx_low.len() * wedges.triples.len());
    for a in &g_m {
        for k in 0..np {
            let b: SparseVec = a.iter().map(|(c, v)| (c * np + k, v.clone())).sorted_by_key(|e| e.0).collect();
            let img = delta2(&b, &idx_m, &idx_low, &wedges);
            if !img.is_empty() {
                d2.push(img);
            }
        }
    }
    d2.check_size(limit)?;
    let dom2 = g_m.len() * np;
    let rank_delta1 = d1.rank_nullity()?.0;
    let kernel_delta2 = dom2 - d2.rank_nullity()?.0;

    let complex_defects = d1.rows().iter().filter(|r| !delta2(r, &idx_m, &idx_low, &wedges).is_empty()).count();
    let (symbol, _) = tab.rows(m);
    let image_defects = d1
        .rows()
        .iter()
        .filter(|r| {
            (0..np).any(|k| {
                let slice: SparseVec = r.iter().filter(|(c, _)| c % np == k).map(|(c, v)| (c / np, v.clone())).collect();
                !slice.is_empty() && !symbol.apply(&slice).is_empty()
            })
        })
        .count();

    Ok(SpencerCohomology {
        m,
        dim_g_next: g_next.len(),
        dim_g: g_m.len(),
        rank_delta1,
        kernel_delta2,
        dim_h: kernel_delta2 - rank_delta1,
        complex_defects,
        image_defects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_skip_repeats() {
        let s: Vec<_> = splits(&[0, 0, 2]).collect();
        assert_eq!(s, vec![(0, vec![0, 2]), (2, vec![0, 0])]);
    }
}
