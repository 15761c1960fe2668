//! Finite-sum objectives `f(x) = (1/n) Σ_i f_i(x)`.

use crate::data::{row_sq_norms, RowNorms, SparseDataset};
use crate::{Error, Result};

/// A smooth finite-sum objective.
///
/// Implementors provide per-component gradients through
/// [`FiniteSum::add_grad_unchecked`]; batch and full gradients are built on
/// top of it with a fixed ascending-in-`idx` summation order, so
/// `full_grad(x)` and `grad_batch(&[0..n], x)` agree bit for bit.
pub trait FiniteSum: Sync {
    fn n(&self) -> usize;

    fn dim(&self) -> usize;

    /// Lipschitz constant of every `∇f_i`.
    fn smoothness(&self) -> f64;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// `f_i(x)`.
    fn component_value(&self, i: usize, x: &[f64]) -> Result<f64>;

    /// `out += ∇f_i(x)` without bounds or length checks.
    fn add_grad_unchecked(&self, i: usize, x: &[f64], out: &mut [f64]);

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `out += ∇f_i(x)`.
    fn grad_index(&self, i: usize, x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        self.check_dim(out)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        self.add_grad_unchecked(i, x, out);
        Ok(())
    }

    /// `(1/|idx|) Σ_{i∈idx} ∇f_i(x)`, summed in the order of `idx`.
    fn grad_batch(&self, idx: &[usize], x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.grad_batch_into(idx, x, &mut out)?;
        Ok(out)
    }

    /// Like [`FiniteSum::grad_batch`], overwriting `out`.
    fn grad_batch_into(&self, idx: &[usize], x: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_dim(x)?;
        self.check_dim(out)?;
        if idx.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some(&i) = idx.iter().find(|&&i| i >= self.n()) {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        out.iter_mut().for_each(|v| *v = 0.0);
        for &i in idx {
            self.add_grad_unchecked(i, x, out);
        }
        let k = idx.len() as f64;
        out.iter_mut().for_each(|v| *v /= k);
        Ok(())
    }

    /// Exact `∇f(x)`: one ascending pass over all components.
    fn full_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.grad_batch(&all, x)
    }
}

/// `log(1 + exp(−t))` without overflow.
#[inline]
fn log1p_exp_neg(t: f64) -> f64 {
    (-t).max(0.0) + (-t.abs()).exp().ln_1p()
}

/// `σ(−z) = 1 / (1 + e^z)` without overflow.
#[inline]
fn sigmoid_neg(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Logistic loss with the non-convex penalty
///
/// ```text
/// f(x) = (1/n) Σ_i log(1 + exp(−y_i ⟨w_i, x⟩)) + (λ/2) Σ_j x_j² / (1 + x_j²)
/// ```
///
/// Each component `f_i` carries the full penalty, so `∇f_i` is sparse in the
/// loss part and dense in the penalty part. Every `∇f_i` is Lipschitz with
/// constant `‖w_i‖²/4 + λ`; [`FiniteSum::smoothness`] returns the maximum over `i`.
#[derive(Debug, Clone)]
pub struct LogisticNcvx {
    ds: SparseDataset,
    lambda: f64,
    norms: RowNorms,
    smoothness: f64,
}

impl LogisticNcvx {
    pub fn new(ds: SparseDataset, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::invalid(format!("lambda must be ≥ 0, got {lambda}")));
        }
        let norms = row_sq_norms(&ds);
        let smoothness = norms.max() / 4.0 + lambda;
        if !(smoothness > 0.0) {
            return Err(Error::invalid(
                "smoothness constant is zero (all rows empty and lambda = 0)",
            ));
        }
        Ok(LogisticNcvx {
            ds,
            lambda,
            norms,
            smoothness,
        })
    }

    pub fn dataset(&self) -> &SparseDataset {
        &self.ds
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn norms(&self) -> &RowNorms {
        &self.norms
    }

    /// Smoothness constant of the single component `f_i`.
    pub fn component_smoothness(&self, i: usize) -> f64 {
        self.norms.sq_norms[i] / 4.0 + self.lambda
    }

    #[inline]
    fn margin(&self, i: usize, x: &[f64]) -> f64 {
        let (idx, val) = self.ds.row(i);
        let dot: f64 = idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum();
        self.ds.label(i) * dot
    }

    fn penalty(&self, x: &[f64]) -> f64 {
        0.5 * self.lambda * x.iter().map(|&v| v * v / (1.0 + v * v)).sum::<f64>()
    }
}

impl FiniteSum for LogisticNcvx {
    fn n(&self) -> usize {
        self.ds.n()
    }

    fn dim(&self) -> usize {
        self.ds.d()
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let n = self.n();
        let loss: f64 = (0..n).map(|i| log1p_exp_neg(self.margin(i, x))).sum();
        Ok(loss / n as f64 + self.penalty(x))
    }

    fn component_value(&self, i: usize, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if i >= self.n() {
            return Err(Error::IndexOutOfRange { index: i, n: self.n() });
        }
        Ok(log1p_exp_neg(self.margin(i, x)) + self.penalty(x))
    }

    #[inline]
    fn add_grad_unchecked(&self, i: usize, x: &[f64], out: &mut [f64]) {
        let y = self.ds.label(i);
        let coef = -y * sigmoid_neg(self.margin(i, x));
        let (idx, val) = self.ds.row(i);
        if self.lambda == 0.0 {
            for (&j, &v) in idx.iter().zip(val) {
                out[j] += coef * v;
            }
            return;
        }
        // One add per coordinate, so accumulating the same component twice
        // gives exactly twice its gradient.
        let mut next = 0;
        for (j, (o, &xj)) in out.iter_mut().zip(x).enumerate() {
            let s = 1.0 + xj * xj;
            let mut g = self.lambda * xj / (s * s);
            if next < idx.len() && idx[next] == j {
                g += coef * val[next];
                next += 1;
            }
            *o += g;
        }
    }
}
