//! Geom-SARAH, its baselines, and exact IFO accounting.
//!
//! Every per-component gradient an optimizer asks for goes through an
//! [`Oracle`], which counts it. Trace metrics (`f(x)`, `‖∇f(x)‖²`) are
//! computed with direct full passes and are never counted.

mod epoch;
mod run;
mod descent;

pub use epoch::{geom_sarah_epoch, run_epoch, sgd_epoch, Estimator, EpochOutcome};
pub use run::{run_baseline, run_geom_sarah, run_method, Horizon};
pub use descent::{population_variance, descent_statistical_check, DescentReport};

use crate::objective::FiniteSum;
use crate::schedules::EpochParams;

/// Cumulative count of IFO queries (one `∇f_i(x)` evaluation each).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct IfoCounter(u64);

impl IfoCounter {
    pub fn get(&self) -> u64 {
        self.0
    }

    pub fn add(&mut self, k: u64) {
        self.0 += k;
    }
}

/// Counting access to an objective's component gradients.
pub struct Oracle<'a, F: FiniteSum + ?Sized> {
    obj: &'a F,
    counter: IfoCounter,
}

impl<'a, F: FiniteSum + ?Sized> Oracle<'a, F> {
    pub fn new(obj: &'a F) -> Self {
        Oracle {
            obj,
            counter: IfoCounter::default(),
        }
    }

    pub fn objective(&self) -> &'a F {
        self.obj
    }

    pub fn queries(&self) -> u64 {
        self.counter.get()
    }

    /// `out = (1/|idx|) Σ_{i∈idx} ∇f_i(x)`; costs `|idx|` queries.
    pub fn grad_batch_into(&mut self, idx: &[usize], x: &[f64], out: &mut [f64]) -> crate::Result<()> {
        self.obj.grad_batch_into(idx, x, out)?;
        self.counter.add(idx.len() as u64);
        Ok(())
    }
}

/// Metrics and parameters of one finished epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Inner steps actually taken.
    pub n_drawn: u64,
    /// Queries spent in this epoch.
    pub ifo_epoch: u64,
    pub ifo_cumulative: u64,
    pub f_value: f64,
    pub grad_norm_sq: f64,
    pub params: EpochParams,
}

/// Full record of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub schedule: String,
    pub seed: u64,
    /// Number of components `n` of the objective.
    pub n: usize,
    pub initial_f: f64,
    pub initial_grad_norm_sq: f64,
    pub records: Vec<EpochRecord>,
    /// Selected output epoch `R(T)`.
    pub output_index: usize,
    pub output_iterate: Vec<f64>,
    /// Support `[T, ⌈(1+δ)T⌉]` of the output law (a single point for baselines).
    pub tail_window: (usize, usize),
}

impl RunTrace {
    pub fn final_ifo(&self) -> u64 {
        self.records.last().map_or(0, |r| r.ifo_cumulative)
    }

    pub fn final_grad_norm_sq(&self) -> f64 {
        self.records
            .last()
            .map_or(self.initial_grad_norm_sq, |r| r.grad_norm_sq)
    }

    pub fn final_f(&self) -> f64 {
        self.records.last().map_or(self.initial_f, |r| r.f_value)
    }
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}
