//! Points of the slashed tangent bundle.

use serde::{Deserialize, Serialize};

use crate::jet::Jet;

/// A point `(x, y)` of TM with `y ≠ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTM {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl PointTM {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> PointTM {
        assert_eq!(x.len(), y.len(), "x and y must have the same length");
        PointTM { x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn y_norm(&self) -> f64 {
        self.y.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Coordinates as one vector `(x1..xn, y1..yn)`.
    pub fn coords(&self) -> Vec<f64> {
        self.x.iter().chain(&self.y).copied().collect()
    }

    pub fn from_coords(c: &[f64]) -> PointTM {
        let n = c.len() / 2;
        PointTM::new(c[..n].to_vec(), c[n..].to_vec())
    }

    /// Coordinate jets of all `2n` variables at this point.
    pub fn seed_jets(&self, order: usize) -> Vec<Jet> {
        let c = self.coords();
        (0..c.len()).map(|k| Jet::variable(c.len(), order, k, c[k])).collect()
    }

    /// The same base point with the fiber coordinate multiplied by `t`.
    pub fn scale_y(&self, t: f64) -> PointTM {
        PointTM::new(self.x.clone(), self.y.iter().map(|v| v * t).collect())
    }
}
