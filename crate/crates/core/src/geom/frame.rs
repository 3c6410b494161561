//! Adapted frames `{h_1..h_n, v_1..v_n}` on TM and their structure functions.

use nalgebra::DMatrix;
use serde::Serialize;

use super::{bracket, EigenJets, GeomError, SprayJets};
use crate::expr::Expr;
use crate::jet::Jet;
use crate::jetmat::JetMat;
use crate::point::PointTM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameSource {
    /// Eigenframe of the Jacobi endomorphism of a spray.
    Spray,
    /// Fields given explicitly as expressions.
    Explicit,
}

/// Jets of `2n` vector fields on TM together with the dual coframe.
///
/// Field `k < n` is `h_{k+1}`, field `n + k` is `v_{k+1}`. Coframe row `k`
/// is `ξ^{k+1}`, row `n + k` is `ν^{k+1}`.
#[derive(Debug, Clone)]
pub struct Frame {
    pub n: usize,
    pub fields: Vec<Vec<Jet>>,
    pub coframe: JetMat,
    pub lambdas: Vec<Jet>,
    pub source: FrameSource,
}

/// Pointwise summary of a frame.
#[derive(Debug, Clone, Serialize)]
pub struct FrameData {
    pub eigenvalues: Vec<f64>,
    pub labels: Vec<String>,
    /// `structure[a][b]` holds the `(ξ^1..ξ^n, ν^1..ν^n)` components of `[e_a, e_b]`.
    pub structure: Vec<Vec<Vec<f64>>>,
    pub reconstruction_residual: f64,
}

impl Frame {
    /// Eigenframe of a spray: `h_i` has x-part `p_i` and y-part `-N p_i`,
    /// `v_i` has y-part `p_i`; `h_n = S` and `v_n = C`.
    pub fn from_spray(sj: &SprayJets, eig: &EigenJets) -> Result<Frame, GeomError> {
        let n = sj.n;
        let order = sj.order - 2;
        let conn = sj.conn.truncate(order);
        let mut fields = Vec::with_capacity(2 * n);
        for k in 0..n - 1 {
            let p: Vec<Jet> = eig.vectors[k].iter().map(|t| t.truncate(order)).collect();
            let np = conn.mul_vec(&p);
            fields.push(p.iter().cloned().chain(np.iter().map(|t| -t)).collect());
        }
        fields.push(sj.spray_field.iter().map(|t| t.truncate(order)).collect());
        for k in 0..n {
            let p = &eig.vectors[k];
            let zero = Jet::zero(2 * n, order);
            fields.push((0..n).map(|_| zero.clone()).chain(p.iter().map(|t| t.truncate(order))).collect());
        }
        let lambdas = eig.values.iter().map(|t| t.truncate(order)).collect();
        Frame::from_fields(n, fields, lambdas, FrameSource::Spray)
    }

    pub fn from_fields(
        n: usize,
        fields: Vec<Vec<Jet>>,
        lambdas: Vec<Jet>,
        source: FrameSource,
    ) -> Result<Frame, GeomError> {
        assert_eq!(fields.len(), 2 * n);
        let coframe = JetMat::from_columns(&fields).inverse().ok_or(GeomError::SingularFrame)?;
        Ok(Frame { n, fields, coframe, lambdas, source })
    }

    /// Frame whose fields and eigenvalues are expressions in `(x, y)`.
    pub fn from_exprs(
        h: &[Vec<Expr>],
        v: &[Vec<Expr>],
        lambdas: &[Expr],
        u: &PointTM,
        order: usize,
    ) -> Result<Frame, GeomError> {
        let n = u.dim();
        let seeds = u.seed_jets(order);
        let eval = |es: &Vec<Expr>| es.iter().map(|e| e.eval_with(&seeds)).collect::<Result<Vec<_>, _>>();
        let mut fields = Vec::with_capacity(2 * n);
        for es in h.iter().chain(v) {
            fields.push(eval(es)?);
        }
        let lambdas = lambdas.iter().map(|e| e.eval_with(&seeds)).collect::<Result<Vec<_>, _>>()?;
        Frame::from_fields(n, fields, lambdas, FrameSource::Explicit)
    }

    pub fn order(&self) -> usize {
        self.coframe.order()
    }

    pub fn h(&self, i: usize) -> &Vec<Jet> {
        &self.fields[i]
    }

    pub fn v(&self, i: usize) -> &Vec<Jet> {
        &self.fields[self.n + i]
    }

    pub fn label(&self, a: usize) -> String {
        if a < self.n {
            format!("h{}", a + 1)
        } else {
            format!("v{}", a - self.n + 1)
        }
    }

    pub fn bracket(&self, x: &[Jet], y: &[Jet]) -> Vec<Jet> {
        bracket(x, y)
    }

    /// Frame components `(ξ^1..ξ^n, ν^1..ν^n)` of a field.
    pub fn comps(&self, x: &[Jet]) -> Vec<Jet> {
        self.coframe.mul_vec(x)
    }

    /// Structure functions of `[e_a, e_b]`.
    pub fn structure(&self, a: usize, b: usize) -> Vec<Jet> {
        self.comps(&bracket(&self.fields[a], &self.fields[b]))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.lambdas.iter().map(Jet::value).collect()
    }

    /// Horizontal parts of `h_1..h_n` as matrix columns.
    pub fn horizontal_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, k| self.fields[k][i].value())
    }

    pub fn data(&self) -> FrameData {
        let m = 2 * self.n;
        let mut structure = vec![vec![vec![0.0; m]; m]; m];
        let mut residual: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let br = bracket(&self.fields[a], &self.fields[b]);
                let c = self.comps(&br);
                for k in 0..m {
                    structure[a][b][k] = c[k].value();
                    structure[b][a][k] = -c[k].value();
                }
                for coord in 0..m {
                    let rebuilt: f64 = (0..m).map(|k| c[k].value() * self.fields[k][coord].value()).sum();
                    residual = residual.max((rebuilt - br[coord].value()).abs());
                }
            }
        }
        FrameData {
            eigenvalues: self.eigenvalues(),
            labels: (0..m).map(|a| self.label(a)).collect(),
            structure,
            reconstruction_residual: residual,
        }
    }

    /// Largest component of `[[e_a,e_b],e_c] + [[e_b,e_c],e_a] + [[e_c,e_a],e_b]`
    /// over all triples; needs frame order at least 2.
    pub fn jacobi_residual(&self) -> f64 {
        let m = 2 * self.n;
        let f = &self.fields;
        let br: Vec<Vec<Vec<Jet>>> =
            (0..m).map(|a| (0..m).map(|b| if a < b { bracket(&f[a], &f[b]) } else { Vec::new() }).collect()).collect();
        let get = |a: usize, b: usize| -> Vec<Jet> {
            if a < b {
                br[a][b].clone()
            } else {
                br[b][a].iter().map(|t| -t).collect()
            }
        };
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let t1 = bracket(&get(a, b), &f[c]);
                    let t2 = bracket(&get(b, c), &f[a]);
                    let t3 = bracket(&get(c, a), &f[b]);
                    for k in 0..m {
                        worst = worst.max((t1[k].value() + t2[k].value() + t3[k].value()).abs());
                    }
                }
            }
        }
        worst
    }
}
