//! Seeded sampling of points on TM.

use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::point::PointTM;

/// How fiber coordinates are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FiberSampling {
    /// Uniform direction, norm uniform in `[min, max]`.
    Annulus { min: f64, max: f64 },
    /// Component `i` uniform in `ranges[i]`; a single range applies to all components.
    Box { ranges: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    /// Each base coordinate uniform in `[x_lo, x_hi]`.
    pub x_lo: f64,
    pub x_hi: f64,
    pub fiber: FiberSampling,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { count: 50, seed: 1, x_lo: -1.0, x_hi: 1.0, fiber: FiberSampling::Annulus { min: 0.5, max: 2.0 } }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SampleError {
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("bounds [{0}, {1}] are not ordered")]
    Unordered(f64, f64),
    #[error("the fiber region must exclude y = 0")]
    ContainsZero,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), SampleError> {
        if self.count == 0 {
            return Err(SampleError::EmptySample);
        }
        if !(self.x_lo <= self.x_hi) {
            return Err(SampleError::Unordered(self.x_lo, self.x_hi));
        }
        match self.fiber {
            FiberSampling::Annulus { min, max } => {
                if !(min <= max) {
                    return Err(SampleError::Unordered(min, max));
                }
                if !(min > 0.0) {
                    return Err(SampleError::ContainsZero);
                }
            }
            FiberSampling::Box { ref ranges } => {
                if ranges.is_empty() {
                    return Err(SampleError::EmptySample);
                }
                if let Some(r) = ranges.iter().find(|r| !(r[0] <= r[1])) {
                    return Err(SampleError::Unordered(r[0], r[1]));
                }
                if ranges.iter().all(|r| r[0] <= 0.0 && r[1] >= 0.0) {
                    return Err(SampleError::ContainsZero);
                }
            }
        }
        Ok(())
    }

    /// Draws `count` points in dimension `n`; identical for identical specs.
    pub fn points(&self, n: usize) -> Result<Vec<PointTM>, SampleError> {
        self.validate()?;
        let mut rng = Pcg64::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.count);
        for _ in 0..self.count {
            let x: Vec<f64> = (0..n).map(|_| uniform(&mut rng, self.x_lo, self.x_hi)).collect();
            let y = match self.fiber {
                FiberSampling::Annulus { min, max } => {
                    let dir = loop {
                        let d: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
                        let r = d.iter().map(|t| t * t).sum::<f64>().sqrt();
                        if r > 0.1 && r <= 1.0 {
                            break d.into_iter().map(|t| t / r).collect::<Vec<_>>();
                        }
                    };
                    let r = uniform(&mut rng, min, max);
                    dir.into_iter().map(|t| t * r).collect()
                }
                FiberSampling::Box { ref ranges } => (0..n)
                    .map(|i| {
                        let r = ranges[i.min(ranges.len() - 1)];
                        uniform(&mut rng, r[0], r[1])
                    })
                    .collect(),
            };
            out.push(PointTM::new(x, y));
        }
        Ok(out)
    }
}

fn uniform(rng: &mut Pcg64, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}
