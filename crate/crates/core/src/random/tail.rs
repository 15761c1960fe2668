use super::RngStream;
use crate::{Error, Result};

/// Last epoch index `⌈(1 + δ)T⌉`.
///
/// Products like `1.1 * 10` land a hair above the integer in floating point,
/// so values within 1e-9 (relative) of an integer snap to it before the ceiling.
pub fn tail_end(t: usize, delta: f64) -> usize {
    let x = (1.0 + delta) * t as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.abs().max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Law of the output epoch `R(T)` on `{T, …, ⌈(1+δ)T⌉}` with
/// `P(R(T) = j) ∝ η_j m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailDistribution {
    lo: usize,
    hi: usize,
    weights: Vec<f64>,
    total: f64,
}

impl TailDistribution {
    /// `weights[i]` is the weight of epoch `lo + i`.
    pub fn new(lo: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("tail distribution needs at least one epoch"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::invalid(format!("tail weight must be positive and finite, got {w}")));
        }
        let total = weights.iter().sum();
        Ok(TailDistribution {
            lo,
            hi: lo + weights.len() - 1,
            weights,
            total,
        })
    }

    /// Builds the law for horizon `T` and tail fraction `δ`, with
    /// `weight(j) = η_j m_j`.
    pub fn for_horizon<W>(t: usize, delta: f64, weight: W) -> Result<Self>
    where
        W: Fn(usize) -> f64,
    {
        if t == 0 {
            return Err(Error::invalid("horizon T must be at least 1"));
        }
        let hi = tail_end(t, delta);
        Self::new(t, (t..=hi).map(weight).collect())
    }

    pub fn lo(&self) -> usize {
        self.lo
    }

    pub fn hi(&self) -> usize {
        self.hi
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn probability(&self, j: usize) -> f64 {
        if j < self.lo || j > self.hi {
            0.0
        } else {
            self.weights[j - self.lo] / self.total
        }
    }
}

/// Draws `R(T)` by inversion over the cumulative weights.
pub fn tail_index(rng: &mut RngStream, td: &TailDistribution) -> usize {
    if td.lo == td.hi {
        return td.lo;
    }
    let target = rng.uniform_open01() * td.total;
    let mut acc = 0.0;
    for (i, w) in td.weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return td.lo + i;
        }
    }
    td.hi
}
