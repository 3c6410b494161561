//! Connection, Jacobi endomorphism, curvature, eigenframe and the dynamical
//! covariant derivative of a spray at a point.
//!
//! Conventions: `ẍ = f(x, ẋ)`, `N^i_j = -½ ∂f^i/∂y^j`, horizontal fields
//! `δ_j = ∂/∂x^j - N^i_j ∂/∂y^i`, `S = y^j δ_j`. Variables of every jet are
//! ordered `(x1..xn, y1..yn)`.

mod eigen;
mod frame;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::ExprError;
use crate::jet::Jet;
use crate::jetmat::JetMat;
use crate::point::PointTM;
use crate::spray::SprayModel;

pub use eigen::{eigen_jets, first_order_eigen, numeric_eigen, EigenJets, EigenOptions, NumericEigen};
pub use frame::{Frame, FrameData, FrameSource};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("eigenvalue collision: {a:e} and {b:e} are closer than {threshold:e}")]
    EigenvalueCollision { a: f64, b: f64, threshold: f64 },
    #[error("Jacobi endomorphism has complex eigenvalues (imaginary part {imag:e})")]
    ComplexEigenvalues { imag: f64 },
    #[error("the frame is singular at this point")]
    SingularFrame,
    #[error("jet order {got} is too low, {needed} required")]
    OrderTooLow { got: usize, needed: usize },
    #[error("the point has y = 0")]
    ZeroVelocity,
}

/// Jets of the spray data at one point, computed to a fixed order `K`:
/// `f` to `K`, `N` to `K-1`, `Φ` to `K-2`.
#[derive(Debug, Clone)]
pub struct SprayJets {
    pub n: usize,
    pub order: usize,
    pub point: PointTM,
    pub f: Vec<Jet>,
    /// Components of `S = y^i ∂x_i + f^i ∂y_i`.
    pub spray_field: Vec<Jet>,
    pub conn: JetMat,
    pub phi: JetMat,
}

impl SprayJets {
    pub fn compute(spray: &SprayModel, u: &PointTM, order: usize) -> Result<SprayJets, GeomError> {
        if order < 2 {
            return Err(GeomError::OrderTooLow { got: order, needed: 2 });
        }
        if u.y_norm() == 0.0 {
            return Err(GeomError::ZeroVelocity);
        }
        let n = spray.n;
        assert_eq!(u.dim(), n);
        let seeds = u.seed_jets(order);
        let f = spray.coeff_jets(u, order)?;
        let spray_field: Vec<Jet> = seeds[n..].iter().chain(&f).cloned().collect();
        let conn = JetMat::from_fn(n, n, |i, j| f[i].partial(n + j).scale(-0.5));
        let sf: Vec<Jet> = spray_field.iter().map(|j| j.truncate(order - 1)).collect();
        let phi = JetMat::from_fn(n, n, |i, j| {
            let mut acc = -f[i].partial(j).truncate(order - 2);
            for l in 0..n {
                acc = &acc - &(conn.get(i, l) * conn.get(l, j));
            }
            &acc - &conn.get(i, j).along(&sf)
        });
        Ok(SprayJets { n, order, point: u.clone(), f, spray_field, conn, phi })
    }

    /// Horizontal lift of the coordinate field `∂x_j` as a field on TM.
    pub fn delta(&self, j: usize) -> Vec<Jet> {
        let n = self.n;
        let order = self.order - 1;
        (0..2 * n)
            .map(|a| {
                if a < n {
                    Jet::constant(2 * n, order, if a == j { 1.0 } else { 0.0 })
                } else {
                    -self.conn.get(a - n, j)
                }
            })
            .collect()
    }

    pub fn connection(&self) -> DMatrix<f64> {
        self.conn.value()
    }

    pub fn jacobi(&self) -> DMatrix<f64> {
        self.phi.value()
    }

    /// `R^i_{jk}` from the bracket of horizontal fields: `δ_k N^i_j - δ_j N^i_k`.
    pub fn curvature(&self) -> Curvature {
        let n = self.n;
        let deltas: Vec<Vec<Jet>> = (0..n).map(|j| self.delta(j)).collect();
        let mut r = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.conn.get(i, j).along(&deltas[k]).value();
                    let b = self.conn.get(i, k).along(&deltas[j]).value();
                    r[(i * n + j) * n + k] = a - b;
                }
            }
        }
        Curvature { n, r }
    }

    /// `R^i_{jk}` from the Jacobi endomorphism: `⅓(∂Φ^i_k/∂y^j - ∂Φ^i_j/∂y^k)`.
    pub fn curvature_from_jacobi(&self) -> Result<Curvature, GeomError> {
        if self.order < 3 {
            return Err(GeomError::OrderTooLow { got: self.order, needed: 3 });
        }
        let n = self.n;
        let mut r = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.phi.get(i, k).d1(n + j) - self.phi.get(i, j).d1(n + k);
                    r[(i * n + j) * n + k] = v / 3.0;
                }
            }
        }
        Ok(Curvature { n, r })
    }

    /// Jets of `Φ' = S(Φ) + NΦ - ΦN`, order `K-3`.
    pub fn phi_prime(&self) -> Result<JetMat, GeomError> {
        if self.order < 3 {
            return Err(GeomError::OrderTooLow { got: self.order, needed: 3 });
        }
        let n = self.n;
        let phi = &self.phi;
        let conn = self.conn.truncate(self.order - 3);
        Ok(JetMat::from_fn(n, n, |i, j| {
            let mut acc = phi.get(i, j).along(&self.spray_field);
            for a in 0..n {
                acc = &acc + &(conn.get(i, a) * phi.get(a, j));
                acc = &acc - &(phi.get(i, a) * conn.get(a, j));
            }
            acc
        }))
    }

    /// `Φ'(δ_j) = v[S, Φ(δ_j)] - Φ(h[S, δ_j])` evaluated from vector-field brackets.
    pub fn phi_prime_by_brackets(&self) -> Result<DMatrix<f64>, GeomError> {
        if self.order < 3 {
            return Err(GeomError::OrderTooLow { got: self.order, needed: 3 });
        }
        let n = self.n;
        let s = &self.spray_field;
        let phi0 = self.phi.value();
        let conn0 = self.conn.value();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let dj = self.delta(j);
            let phi_x: Vec<Jet> = (0..2 * n)
                .map(|a| if a < n { Jet::zero(2 * n, self.order - 2) } else { self.phi.get(a - n, j).clone() })
                .collect();
            let b1 = bracket(s, &phi_x);
            let b2 = bracket(s, &dj);
            // v(Z) has y-part Z^y + N Z^x, h(Z) has x-part Z^x
            for i in 0..n {
                let mut v = b1[n + i].value();
                for a in 0..n {
                    v += conn0[(i, a)] * b1[a].value();
                    v -= phi0[(i, a)] * b2[a].value();
                }
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Residual of the Euler identities for `N` (degree 1) and `Φ` (degree 2).
    pub fn homogeneity_residuals(&self) -> (f64, f64) {
        let n = self.n;
        let y = &self.point.y;
        let euler = |j: &Jet, deg: f64| {
            let e: f64 = (0..n).map(|k| y[k] * j.d1(n + k)).sum();
            (e - deg * j.value()).abs()
        };
        let mut rn: f64 = 0.0;
        let mut rp: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                rn = rn.max(euler(self.conn.get(i, j), 1.0));
                rp = rp.max(euler(self.phi.get(i, j), 2.0));
            }
        }
        (rn, rp)
    }
}

/// `Z = [X, Y]` with `Z^a = X(Y^a) - Y(X^a)`.
pub fn bracket(x: &[Jet], y: &[Jet]) -> Vec<Jet> {
    x.iter().zip(y).map(|(xa, ya)| &ya.along(x) - &xa.along(y)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curvature {
    pub n: usize,
    /// Row-major `R^i_{jk}` at index `(i*n + j)*n + k`.
    pub r: Vec<f64>,
}

impl Curvature {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.r[(i * self.n + j) * self.n + k]
    }

    /// `y^j R^i_{jk}`, which should reproduce `Φ^i_k`.
    pub fn contract(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, k| (0..n).map(|j| y[j] * self.get(i, j, k)).sum())
    }

    pub fn max_abs_diff(&self, other: &Curvature) -> f64 {
        self.r.iter().zip(&other.r).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn connection(spray: &SprayModel, u: &PointTM) -> Result<DMatrix<f64>, GeomError> {
    Ok(SprayJets::compute(spray, u, 2)?.connection())
}

pub fn jacobi(spray: &SprayModel, u: &PointTM) -> Result<DMatrix<f64>, GeomError> {
    Ok(SprayJets::compute(spray, u, 2)?.jacobi())
}

pub fn curvature(spray: &SprayModel, u: &PointTM) -> Result<Curvature, GeomError> {
    Ok(SprayJets::compute(spray, u, 2)?.curvature())
}

/// Frobenius norm.
pub fn norm(m: &DMatrix<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}
