//! Small dense matrices of jets.

use nalgebra::DMatrix;

use crate::jet::Jet;

#[derive(Debug, Clone)]
pub struct JetMat {
    rows: usize,
    cols: usize,
    data: Vec<Jet>,
}

impl JetMat {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Jet) -> JetMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        JetMat { rows, cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<Jet>]) -> JetMat {
        let rows = cols[0].len();
        JetMat::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn constant(m: &DMatrix<f64>, nvars: usize, order: usize) -> JetMat {
        JetMat::from_fn(m.nrows(), m.ncols(), |i, j| Jet::constant(nvars, order, m[(i, j)]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Jet {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.data[i * self.cols + j] = v;
    }

    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn nvars(&self) -> usize {
        self.data[0].nvars()
    }

    pub fn column(&self, j: usize) -> Vec<Jet> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).value())
    }

    pub fn map(&self, f: impl Fn(&Jet) -> Jet) -> JetMat {
        JetMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn truncate(&self, order: usize) -> JetMat {
        self.map(|j| j.truncate(order))
    }

    pub fn mul(&self, other: &JetMat) -> JetMat {
        assert_eq!(self.cols, other.rows);
        let order = self.order().min(other.order());
        JetMat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Jet::zero(self.nvars(), order);
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Jet]) -> Vec<Jet> {
        assert_eq!(self.cols, v.len());
        let order = self.order().min(v.iter().map(Jet::order).min().unwrap_or(0));
        (0..self.rows)
            .map(|i| {
                let mut acc = Jet::zero(self.nvars(), order);
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * &v[k]);
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &JetMat) -> JetMat {
        JetMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn add(&self, other: &JetMat) -> JetMat {
        JetMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    /// Inverse by Newton-Schulz iteration from the numeric inverse; `None` if singular.
    pub fn inverse(&self) -> Option<JetMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let order = self.order();
        let inv0 = self.value().try_inverse()?;
        if inv0.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let mut x = JetMat::constant(&inv0, self.nvars(), order);
        let two = JetMat::from_fn(n, n, |i, j| Jet::constant(self.nvars(), order, if i == j { 2.0 } else { 0.0 }));
        // each step doubles the number of correct orders
        let mut correct = 1usize;
        while correct <= order {
            x = x.mul(&two.sub(&self.mul(&x)));
            correct *= 2;
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Jet::variable(2, 4, 0, 0.3);
        let b = Jet::variable(2, 4, 1, -0.7);
        let m = JetMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => a.exp(),
            (0, 1) => &a * &b,
            (1, 0) => b.sin(),
            _ => b.add_scalar(2.0),
        });
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let mut e = id.get(i, j).clone();
                if i == j {
                    e = e.add_scalar(-1.0);
                }
                assert!(e.max_abs() < 1e-12, "{i}{j}: {}", e.max_abs());
            }
        }
    }
}
