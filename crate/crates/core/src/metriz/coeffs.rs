//! Coefficients of the third-order compatibility condition in an adapted frame.
//!
//! Indices are 0-based. `ξ^k_Z`, `ν^k_Z` denote frame components of `Z`.

use serde::Serialize;

use super::omega::OmegaLin;
use crate::geom::Frame;
use crate::jet::Jet;

/// Coefficient formulas evaluated from brackets of one frame.
pub struct Brackets<'a> {
    pub frame: &'a Frame,
}

impl<'a> Brackets<'a> {
    pub fn new(frame: &'a Frame) -> Self {
        Brackets { frame }
    }

    fn br(&self, a: &[Jet], b: &[Jet]) -> Vec<Jet> {
        self.frame.bracket(a, b)
    }

    fn xi(&self, k: usize, z: &[Jet]) -> Jet {
        self.frame.comps(z)[k].clone()
    }

    fn nu(&self, k: usize, z: &[Jet]) -> Jet {
        self.frame.comps(z)[self.frame.n + k].clone()
    }

    /// `κ^i_{ij}`:
    ///
    /// ```text
    /// λ_j ( v_j ξ^i_[h_i,h_j] - v_j ν^i_[h_j,v_i] - h_j ν^i_[v_i,v_j] + h_j ξ^i_[v_j,h_i] )
    /// + λ_i ( ν^i_[v_i,W] - ξ^i_[W,h_i] - ν^j_[v_j,h_i] ξ^i_[v_j,h_j] - ξ^j_[h_i,h_j] ξ^i_[h_j,v_j]
    ///         - ν^j_[v_j,v_i] ν^i_[v_j,h_j] - ξ^j_[v_i,h_j] ν^i_[h_j,v_j] ),   W = [h_j, v_j]
    /// ```
    pub fn kappa(&self, i: usize, j: usize) -> Jet {
        let f = self.frame;
        let (hi, hj, vi, vj) = (f.h(i), f.h(j), f.v(i), f.v(j));
        let (li, lj) = (&f.lambdas[i], &f.lambdas[j]);
        let w = self.br(hj, vj);
        let t1 = &(&(&self.xi(i, &self.br(hi, hj)).along(vj) - &self.nu(i, &self.br(hj, vi)).along(vj))
            - &self.nu(i, &self.br(vi, vj)).along(hj))
            + &self.xi(i, &self.br(vj, hi)).along(hj);
        let vjhj = self.br(vj, hj);
        let t2 = [
            self.nu(i, &self.br(vi, &w)),
            -self.xi(i, &self.br(&w, hi)),
            -(&self.nu(j, &self.br(vj, hi)) * &self.xi(i, &vjhj)),
            -(&self.xi(j, &self.br(hi, hj)) * &self.xi(i, &w)),
            -(&self.nu(j, &self.br(vj, vi)) * &self.nu(i, &vjhj)),
            -(&self.xi(j, &self.br(vi, hj)) * &self.nu(i, &w)),
        ];
        let t2 = t2.iter().skip(1).fold(t2[0].clone(), |acc, t| &acc + t);
        &(lj * &t1) + &(li * &t2)
    }

    /// `θ^k_{ij} = (λ_i - λ_j)(ξ^k_{W_j} ν^k_{W_i} - ξ^k_{W_i} ν^k_{W_j})`, `W_i = [h_i, v_i]`.
    pub fn theta(&self, k: usize, i: usize, j: usize) -> Jet {
        let f = self.frame;
        let wi = self.br(f.h(i), f.v(i));
        let wj = self.br(f.h(j), f.v(j));
        let d = &f.lambdas[i] - &f.lambdas[j];
        let inner = &(&self.xi(k, &wj) * &self.nu(k, &wi)) - &(&self.xi(k, &wi) * &self.nu(k, &wj));
        &d * &inner
    }

    /// `(β^i_{ij}, γ^i_{ij}) = λ_j (ν^i, ξ^i) of [v_j, h_j]`.
    pub fn beta_gamma(&self, i: usize, j: usize) -> (Jet, Jet) {
        let f = self.frame;
        let w = self.br(f.v(j), f.h(j));
        let c = f.comps(&w);
        (&f.lambdas[j] * &c[f.n + i], &f.lambdas[j] * &c[i])
    }

    /// Largest component of `[h_j, v_j]` outside `D_j`, over `j < n`.
    pub fn involutivity_defect(&self) -> f64 {
        let f = self.frame;
        let n = f.n;
        let mut worst: f64 = 0.0;
        for j in 0..n - 1 {
            let c = f.comps(&self.br(f.h(j), f.v(j)));
            for (k, ck) in c.iter().enumerate() {
                if k != j && k != n + j {
                    worst = worst.max(ck.value().abs());
                }
            }
        }
        worst
    }

    /// `η = (κ^1_{12} + θ^1_{12}, κ^2_{21} + θ^2_{12})`.
    pub fn eta(&self) -> [Jet; 2] {
        [&self.kappa(0, 1) + &self.theta(0, 0, 1), &self.kappa(1, 0) + &self.theta(1, 0, 1)]
    }

    /// Coefficient form `κ^i_{ij} a_ii + κ^j_{ij} a_jj + Σ_k θ^k_{ij} a_kk` over `k < n`,
    /// where `κ^j_{ij}` is `κ` with the roles of `i` and `j` exchanged.
    pub fn third_order_form(&self, i: usize, j: usize) -> OmegaLin {
        let n = self.frame.n;
        let mut c: Vec<Jet> = (0..n - 1).map(|k| self.theta(k, i, j)).collect();
        c[i] = &c[i] + &self.kappa(i, j);
        c[j] = &c[j] + &self.kappa(j, i);
        OmegaLin::from_coeffs(c)
    }

    /// `(λ_j - λ_i)([h_j,v_j](a_ii) - [h_i,v_i](a_jj))`, the first-order part
    /// left out of the reduced relation, via the closed-form Lie rule.
    pub fn dropped_terms(&self, calc: &super::omega::OmegaCalculus, i: usize, j: usize) -> Option<OmegaLin> {
        let f = self.frame;
        let wi = self.br(f.h(i), f.v(i));
        let wj = self.br(f.h(j), f.v(j));
        let a = calc.lie(&wj, &calc.unit(i))?;
        let b = calc.lie(&wi, &calc.unit(j))?;
        let d = &f.lambdas[j] - &f.lambdas[i];
        Some(a.sub(&b).scale(&d))
    }
}

/// Numeric table of the third-order coefficients at one point.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CoefficientTable {
    /// `(i, j, κ^i_{ij})`, 1-based indices, `i ≠ j < n`.
    pub kappa: Vec<(usize, usize, f64)>,
    /// `(k, i, j, θ^k_{ij})`, `i < j < n`, `k < n`.
    pub theta: Vec<(usize, usize, usize, f64)>,
    /// `(i, j, β^i_{ij}, γ^i_{ij})` for all `i ≠ j`.
    pub beta_gamma: Vec<(usize, usize, f64, f64)>,
}

impl CoefficientTable {
    pub fn compute(b: &Brackets) -> CoefficientTable {
        let n = b.frame.n;
        let mut kappa = Vec::new();
        let mut theta = Vec::new();
        let mut beta_gamma = Vec::new();
        for i in 0..n - 1 {
            for j in 0..n - 1 {
                if i != j {
                    kappa.push((i + 1, j + 1, b.kappa(i, j).value()));
                }
                if i < j {
                    for k in 0..n - 1 {
                        theta.push((k + 1, i + 1, j + 1, b.theta(k, i, j).value()));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (be, ga) = b.beta_gamma(i, j);
                    beta_gamma.push((i + 1, j + 1, be.value(), ga.value()));
                }
            }
        }
        CoefficientTable { kappa, theta, beta_gamma }
    }

    pub fn max_kappa_theta(&self) -> f64 {
        let k = self.kappa.iter().fold(0.0f64, |m, t| m.max(t.2.abs()));
        self.theta.iter().fold(k, |m, t| m.max(t.3.abs()))
    }

    pub fn max_beta_gamma(&self) -> f64 {
        self.beta_gamma.iter().fold(0.0f64, |m, t| m.max(t.2.abs()).max(t.3.abs()))
    }
}
