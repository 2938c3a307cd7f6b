//! Coordinate boxes and the sample sets drawn from them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seed used for every default random sample set.
pub const DEFAULT_SEED: u64 = 42;

/// Axis-aligned box `∏ [lo_i, hi_i]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch("box bounds differ in length".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::Invalid("box bounds must be finite with lo <= hi".into()));
        }
        Ok(BoxDomain { lo, hi })
    }

    /// `[-r, r]ⁿ`.
    pub fn cube(n: usize, r: f64) -> Self {
        BoxDomain { lo: vec![-r; n], hi: vec![r; n] }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dim() && p.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Same center, half-widths multiplied by `f`.
    pub fn scaled(&self, f: f64) -> Self {
        let c = self.center();
        let lo = c.iter().zip(&self.lo).map(|(c, a)| c - f * (c - a)).collect();
        let hi = c.iter().zip(&self.hi).map(|(c, b)| c + f * (b - c)).collect();
        BoxDomain { lo, hi }
    }

    /// Product with another box (coordinates of `self` first).
    pub fn product(&self, other: &BoxDomain) -> Self {
        let mut lo = self.lo.clone();
        lo.extend(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend(&other.hi);
        BoxDomain { lo, hi }
    }

    /// Tensor grid with `k` points per axis (the center when `k == 1`),
    /// in lexicographic order.
    pub fn grid(&self, k: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let axis = |i: usize| -> Vec<f64> {
            if k <= 1 {
                vec![0.5 * (self.lo[i] + self.hi[i])]
            } else {
                (0..k).map(|t| self.lo[i] + (self.hi[i] - self.lo[i]) * t as f64 / (k - 1) as f64).collect()
            }
        };
        let axes: Vec<Vec<f64>> = (0..n).map(axis).collect();
        let mut out = vec![Vec::with_capacity(n)];
        for ax in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    ax.iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(*x);
                        q
                    })
                })
                .collect();
        }
        out
    }

    /// `count` uniform points from a ChaCha stream seeded with `seed`.
    pub fn random_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                self.lo
                    .iter()
                    .zip(&self.hi)
                    .map(|(a, b)| if a == b { *a } else { rng.gen_range(*a..=*b) })
                    .collect()
            })
            .collect()
    }
}
