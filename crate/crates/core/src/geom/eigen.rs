//! Eigenpairs of the Jacobi endomorphism and their Taylor jets.
//!
//! The last slot always holds the eigenvalue 0 with eigenvector `y`, kept
//! unnormalized. The other eigenvectors have unit Euclidean norm with the
//! component of largest magnitude positive; eigenvalues are sorted in
//! decreasing order unless a permutation is requested.

use nalgebra::DMatrix;

use super::{norm, GeomError};
use crate::jet::Jet;
use crate::jetmat::JetMat;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Relative separation threshold, multiplied by `max(‖Φ‖, tiny)`.
    pub sep_rel: f64,
    /// Relabeling of the first `n-1` eigenpairs: slot `k` receives sorted pair `perm[k]`.
    pub permutation: Option<Vec<usize>>,
    /// Constant factors applied to the first `n-1` eigenvectors after normalization.
    pub scales: Option<Vec<f64>>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { sep_rel: 1e-7, permutation: None, scales: None }
    }
}

#[derive(Debug, Clone)]
pub struct NumericEigen {
    pub values: Vec<f64>,
    /// Columns are eigenvectors, last column `y`.
    pub vectors: DMatrix<f64>,
    pub min_gap: f64,
}

fn normalize(v: &mut [f64]) {
    let nrm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
    let big = v.iter().copied().fold(0.0f64, |m, t| if t.abs() > m.abs() { t } else { m });
    let s = if big < 0.0 { -1.0 / nrm } else { 1.0 / nrm };
    v.iter_mut().for_each(|t| *t *= s);
}

/// Eigenvalues and eigenvectors of `phi` at a point with fiber coordinate `y`.
pub fn numeric_eigen(phi: &DMatrix<f64>, y: &[f64], opts: &EigenOptions) -> Result<NumericEigen, GeomError> {
    let n = phi.nrows();
    let scale = norm(phi);
    let threshold = opts.sep_rel * scale;
    if scale == 0.0 || !scale.is_finite() {
        return Err(GeomError::EigenvalueCollision { a: 0.0, b: 0.0, threshold });
    }
    let ev = phi.clone().schur().complex_eigenvalues();
    if let Some(z) = ev.iter().find(|z| z.im.abs() > threshold) {
        return Err(GeomError::ComplexEigenvalues { imag: z.im.abs() });
    }
    let mut vals: Vec<f64> = ev.iter().map(|z| z.re).collect();
    let zero = (0..n).min_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs())).unwrap();
    vals.remove(zero);
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.push(0.0);
    let mut min_gap = f64::INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            let g = (vals[a] - vals[b]).abs();
            min_gap = min_gap.min(g);
            if g < threshold {
                return Err(GeomError::EigenvalueCollision { a: vals[a], b: vals[b], threshold });
            }
        }
    }
    if let Some(perm) = &opts.permutation {
        assert_eq!(perm.len(), n - 1);
        let sorted = vals.clone();
        for k in 0..n - 1 {
            vals[k] = sorted[perm[k]];
        }
    }
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &lam) in vals.iter().enumerate().take(n - 1) {
        let shifted = phi - DMatrix::identity(n, n) * lam;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t.expect("requested V^T");
        let idx = (0..n).min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b])).unwrap();
        let mut v: Vec<f64> = vt.row(idx).iter().copied().collect();
        normalize(&mut v);
        if let Some(s) = &opts.scales {
            v.iter_mut().for_each(|t| *t *= s[k]);
        }
        vectors.set_column(k, &nalgebra::DVector::from_vec(v));
    }
    vectors.set_column(n - 1, &nalgebra::DVector::from_column_slice(y));
    Ok(NumericEigen { values: vals, vectors, min_gap })
}

/// Jets of the eigenpairs, with the same order as `phi`.
#[derive(Debug, Clone)]
pub struct EigenJets {
    pub numeric: NumericEigen,
    pub values: Vec<Jet>,
    /// Eigenvector jets; `vectors[k][i]` is component `i` of eigenvector `k`.
    pub vectors: Vec<Vec<Jet>>,
}

impl EigenJets {
    /// Matrix with the eigenvector jets as columns.
    pub fn matrix(&self) -> JetMat {
        JetMat::from_columns(&self.vectors)
    }
}

/// Extends numeric eigenpairs to jets by simplified Newton iteration on the
/// bordered system `(Φ - λ)p = 0, p0·p = 1`, then renormalizes to unit length.
/// `y` holds the fiber coordinate jets used for the last slot.
pub fn eigen_jets(phi: &JetMat, y: &[Jet], num: NumericEigen, opts: &EigenOptions) -> EigenJets {
    let n = phi.rows();
    let order = phi.order();
    let nv = phi.nvars();
    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for k in 0..n - 1 {
        let lam0 = num.values[k];
        let scale_k = opts.scales.as_ref().map_or(1.0, |s| s[k]);
        let p0: Vec<f64> = num.vectors.column(k).iter().map(|t| t / scale_k).collect();
        let mut border = DMatrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                border[(i, j)] = phi.get(i, j).value() - if i == j { lam0 } else { 0.0 };
            }
            border[(i, n)] = -p0[i];
            border[(n, i)] = p0[i];
        }
        let inv = border.try_inverse().expect("simple eigenvalue gives an invertible bordered matrix");
        let mut lam = Jet::constant(nv, order, lam0);
        let mut p: Vec<Jet> = p0.iter().map(|&t| Jet::constant(nv, order, t)).collect();
        for _ in 0..=order {
            let mut res: Vec<Jet> = phi.mul_vec(&p).iter().zip(&p).map(|(a, b)| a - &(&lam * b)).collect();
            let dot = Jet::linear_combination(&p.iter().collect::<Vec<_>>(), &p0);
            res.push(dot.add_scalar(-1.0));
            let refs: Vec<&Jet> = res.iter().collect();
            for i in 0..n {
                let w: Vec<f64> = (0..=n).map(|c| -inv[(i, c)]).collect();
                p[i] = &p[i] + &Jet::linear_combination(&refs, &w);
            }
            let w: Vec<f64> = (0..=n).map(|c| -inv[(n, c)]).collect();
            lam = &lam + &Jet::linear_combination(&refs, &w);
        }
        let sq = p.iter().fold(Jet::zero(nv, order), |acc, t| &acc + &(t * t));
        let inv_norm = sq.sqrt().and_then(|s| s.recip()).expect("eigenvector jet has nonzero norm");
        let p: Vec<Jet> = p.iter().map(|t| (t * &inv_norm).scale(scale_k)).collect();
        values.push(lam);
        vectors.push(p);
    }
    values.push(Jet::zero(nv, order));
    vectors.push(y.iter().map(|t| t.truncate(order)).collect());
    EigenJets { numeric: num, values, vectors }
}

/// First-order perturbation of simple eigenpairs: for each direction `d`,
/// `dλ_k = w_k dΦ p_k` and `dp_k = Σ_{l≠k} (w_l dΦ p_k)/(λ_k-λ_l) p_l`,
/// projected to keep `|p_k|` fixed. `w_l` are the rows of `P⁻¹`.
/// Returns `(dλ[d][k], dp[d])` with `dp[d]` having eigenvector columns.
pub fn first_order_eigen(
    values: &[f64],
    vectors: &DMatrix<f64>,
    dphi: &[DMatrix<f64>],
) -> (Vec<Vec<f64>>, Vec<DMatrix<f64>>) {
    let n = values.len();
    let w = vectors.clone().try_inverse().expect("eigenvectors form a basis");
    let mut dl = Vec::new();
    let mut dp = Vec::new();
    for d in dphi {
        let mut dlk = vec![0.0; n];
        let mut dpk = DMatrix::zeros(n, n);
        for k in 0..n - 1 {
            let pk = vectors.column(k);
            let dpk_vec = d * pk;
            dlk[k] = (w.row(k) * &dpk_vec)[(0, 0)];
            let mut col = nalgebra::DVector::zeros(n);
            for l in 0..n {
                if l != k {
                    let c = (w.row(l) * &dpk_vec)[(0, 0)] / (values[k] - values[l]);
                    col += vectors.column(l) * c;
                }
            }
            let along = col.dot(&pk) / pk.dot(&pk);
            col -= pk * along;
            dpk.set_column(k, &col);
        }
        dl.push(dlk);
        dp.push(dpk);
    }
    (dl, dp)
}
