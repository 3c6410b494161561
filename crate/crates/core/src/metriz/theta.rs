//! Compatibility columns of the completed system and the matrix Θ.
//!
//! With the relation `f1 a11 + f2 a22 = 0` (`f = η`), each compatibility
//! map `τ̃_k` expands to a linear form `η^k_1 a11 + η^k_2 a22`. Θ collects
//! `(η_1, η_2)` and the six expanded columns; the completed system is
//! formally integrable iff rank Θ = 1.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::omega::{sum, OmegaCalculus, OmegaLin};
use crate::jet::Jet;

/// Which expansion of the fifth column to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TildeTauForm {
    /// Full Leibniz expansion: the term `(h1 f2) v2(a22)`.
    #[default]
    Corrected,
    /// Literal term `(h1 f1) a22` in place of the above.
    AsPrinted,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaReport {
    /// Row `r` holds `(η_r, η^1_r .. η^6_r)`.
    pub matrix: [[f64; 7]; 2],
    pub singular_values: [f64; 2],
    pub rank: usize,
}

/// Numeric rank of a 2×k matrix: 1 when `σ2 ≤ rank_tol·σ1`.
pub fn rank_2xk(m: &DMatrix<f64>, rank_tol: f64) -> (usize, [f64; 2]) {
    let sv = m.clone().svd(false, false).singular_values;
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.resize(2, 0.0);
    let rank = if s[0] == 0.0 {
        0
    } else if s[1] <= rank_tol * s[0] {
        1
    } else {
        2
    };
    (rank, [s[0], s[1]])
}

/// The six expanded columns for `n = 3`. `calc` must carry the reduced relation.
pub fn tilde_tau_columns(calc: &OmegaCalculus, eta: &[Jet; 2], form: TildeTauForm) -> Option<Vec<OmegaLin>> {
    let fr = calc.frame;
    let (h1, h2, s) = (fr.h(0), fr.h(1), fr.h(2));
    let (v1, v2, c) = (fr.v(0), fr.v(1), fr.v(2));
    let (f1, f2) = (&eta[0], &eta[1]);
    let a1 = calc.unit(0);
    let a2 = calc.unit(1);
    let ap = |x: &[Jet], g: &Jet| g.along(x);
    let pair = |p: Jet, q: Jet| OmegaLin::from_coeffs(vec![p, q]);
    let zero = Jet::zero(f1.nvars(), 0);
    let l = |x: &[Jet], form: &OmegaLin| calc.lie(x, form);
    let br = |x: &[Jet], y: &[Jet]| fr.bracket(x, y);

    let col1 = pair(ap(c, f1), ap(c, f2));
    let col2 = sum(&[
        calc.omega(&br(s, v1), h1).scale(&f1.scale(2.0)),
        calc.omega(&br(s, v2), h2).scale(&f2.scale(2.0)),
        pair(ap(s, f1), ap(s, f2)),
    ]);
    let c_v2v1h1 = calc.cyc(v2, v1, h1);
    let col3 = sum(&[
        pair(ap(v1, &ap(v2, f1)), ap(v1, &ap(v2, f2))),
        l(&br(v1, v2), &a2)?.scale(f2),
        l(v1, &a1)?.scale(&ap(v2, f1)),
        c_v2v1h1.scale(&ap(v1, f1)),
        calc.cyc(v1, v2, h2).scale(&ap(v2, f2)),
        l(v2, &a2)?.scale(&ap(v1, f2)),
        l(v1, &c_v2v1h1)?.scale(f1),
        l(v2, &calc.cyc(v2, v1, h2))?.scale(&-f2),
    ]);
    let col4 = sum(&[
        pair(ap(h1, &ap(h2, f1)), zero.clone()),
        l(h1, &a1)?.scale(&ap(h2, f1)),
        l(h2, &a1)?.scale(&ap(h1, f1)),
        pair(zero.clone(), ap(h1, &ap(h2, f2))),
        l(h1, &a2)?.scale(&ap(h2, f2)),
        l(h2, &a2)?.scale(&ap(h1, f2)),
        l(&br(h1, h2), &a2)?.scale(f2),
        l(h1, &calc.cyc(h2, v1, h1))?.scale(f1),
        l(h2, &calc.cyc(v2, h1, h2))?.scale(&-f2),
    ]);
    let fifth_term = match form {
        TildeTauForm::Corrected => l(v2, &a2)?.scale(&ap(h1, f2)),
        TildeTauForm::AsPrinted => pair(zero.clone(), ap(h1, f1)),
    };
    let col5 = sum(&[
        pair(ap(h1, &ap(v2, f1)), zero.clone()),
        l(h1, &a1)?.scale(&ap(v2, f1)),
        l(v2, &a1)?.scale(&ap(h1, f1)),
        pair(zero.clone(), ap(h1, &ap(v2, f2))),
        l(h1, &a2)?.scale(&ap(v2, f2)),
        l(h1, &c_v2v1h1)?.scale(f1),
        fifth_term,
        l(&br(h1, v2), &a2)?.scale(f2),
        l(v2, &calc.cyc(v2, h1, h2))?.scale(&-f2),
    ]);
    let col6 = sum(&[
        pair(ap(v1, &ap(h2, f1)), zero.clone()),
        l(v1, &a1)?.scale(&ap(h2, f1)),
        l(h2, &a1)?.scale(&ap(v1, f1)),
        pair(zero.clone(), ap(v1, &ap(h2, f2))),
        l(v1, &a2)?.scale(&ap(h2, f2)),
        l(v1, &calc.cyc(h2, v1, h1))?.scale(f1),
        l(h2, &a2)?.scale(&ap(v1, f2)),
        l(&br(v1, h2), &a2)?.scale(f2),
        l(h2, &calc.cyc(v2, v1, h2))?.scale(&-f2),
    ]);
    Some(vec![col1, col2, col3, col4, col5, col6])
}

/// Assembles Θ and its numeric rank.
pub fn theta_matrix(eta: &[f64; 2], columns: &[OmegaLin], rank_tol: f64) -> ThetaReport {
    let mut matrix = [[0.0; 7]; 2];
    for r in 0..2 {
        matrix[r][0] = eta[r];
        for (k, col) in columns.iter().enumerate() {
            matrix[r][k + 1] = col.c[r].value();
        }
    }
    let m = DMatrix::from_fn(2, 7, |r, k| matrix[r][k]);
    let (rank, singular_values) = rank_2xk(&m, rank_tol);
    ThetaReport { matrix, singular_values, rank }
}
