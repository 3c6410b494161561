//! Cartan's test for quasi-regularity of a basis ordering.

use num_traits::Zero;
use serde::Serialize;

use crate::ratmat::{Acc, RatMat};
use crate::tableau::{multisets, SymbolTableau};
use crate::SpencerError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CartanResult {
    pub k: usize,
    pub order: Vec<usize>,
    pub dim_next: usize,
    /// `dim (g_k)_{e_1..e_j}` for `j = 0..2n`; entry 0 is `dim g_k`.
    pub reduced: Vec<usize>,
    pub reduced_sum: usize,
    pub passes: bool,
}

/// Compares `dim g_{k+1}` with `Σ_j dim (g_k)_{e_1..e_j}` where the reduced
/// spaces kill every argument among the first `j` vectors of `order`.
pub fn cartan_test(tab: &SymbolTableau, k: usize, order: &[usize], limit: usize) -> Result<CartanResult, SpencerError> {
    let big = tab.frame.dim();
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != (0..big).collect::<Vec<_>>() {
        return Err(SpencerError::Invalid(format!("basis order must be a permutation of 0..{big}")));
    }
    let (gk, idx) = tab.g_basis(k, limit)?;
    let dim_next = tab.dim_g(k + 1, limit)?;
    let lower = multisets(big, k - 1);

    // Coordinates of g_k basis vectors, looked up by S^k index.
    let mut coeff: Vec<Vec<(usize, _)>> = vec![Vec::new(); idx.len()];
    for (b, v) in gk.iter().enumerate() {
        for (c, x) in v {
            coeff[*c].push((b, x.clone()));
        }
    }

    let mut reduced = vec![gk.len()];
    let mut mat = RatMat::new(gk.len());
    for &e in order {
        for z in &lower {
            let mut t = z.clone();
            t.push(e as u8);
            let mut acc = Acc::new();
            for (b, x) in &coeff[idx.get(&t)] {
                if !x.is_zero() {
                    acc.add(*b, x);
                }
            }
            let row = acc.finish();
            if !row.is_empty() {
                mat.push(row);
            }
        }
        mat.check_size(limit)?;
        reduced.push(gk.len() - mat.rank());
    }
    let reduced_sum = reduced.iter().sum();
    Ok(CartanResult { k, order: order.to_vec(), dim_next, reduced, reduced_sum, passes: dim_next == reduced_sum })
}
