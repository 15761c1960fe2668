use std::collections::VecDeque;

use super::epoch::{geom_sarah_epoch, run_epoch, sgd_epoch, Estimator};
use super::{norm_sq, EpochRecord, RunTrace};
use crate::objective::FiniteSum;
use crate::random::{tail_end, tail_index, RngStream, TailDistribution};
use crate::schedules::{BaselineKind, Schedule};
use crate::{Error, Result};

/// When a run stops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horizon {
    /// `T` outer epochs. Geom-SARAH runs `⌈(1+δ)T⌉` epochs and draws its
    /// output from the tail window; baselines run exactly `T`.
    Epochs(usize),
    /// Run whole epochs until the cumulative query count reaches this value.
    IfoBudget(u64),
}

/// Largest `t ≥ 1` with `⌈(1+δ)t⌉ ≤ epochs`, if any.
fn largest_horizon(epochs: usize, delta: f64) -> Option<usize> {
    let mut t = ((epochs as f64) / (1.0 + delta)).floor() as usize;
    while t > 0 && tail_end(t, delta) > epochs {
        t -= 1;
    }
    while tail_end(t + 1, delta) <= epochs {
        t += 1;
    }
    (t >= 1).then_some(t)
}

fn metrics<F: FiniteSum + ?Sized>(obj: &F, x: &[f64]) -> Result<(f64, f64)> {
    Ok((obj.value(x)?, norm_sq(&obj.full_grad(x)?)))
}

fn drive<F>(obj: &F, schedule: &Schedule, horizon: Horizon, x0: &[f64], seed: u64) -> Result<RunTrace>
where
    F: FiniteSum + ?Sized,
{
    schedule.validate()?;
    obj.check_dim(x0)?;
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("starting point has non-finite entries"));
    }
    let baseline = schedule.baseline_kind();
    let tail = baseline.is_none();
    let delta = if tail { schedule.delta } else { 0.0 };

    let (max_epochs, budget, fixed_t) = match horizon {
        Horizon::Epochs(0) | Horizon::IfoBudget(0) => {
            return Err(Error::invalid("horizon must be positive"));
        }
        Horizon::Epochs(t) if tail => (tail_end(t, delta), None, Some(t)),
        Horizon::Epochs(t) => (t, None, Some(t)),
        Horizon::IfoBudget(b) => (usize::MAX, Some(b), None),
    };

    let n = obj.n();
    let smoothness = obj.smoothness();
    let parent = RngStream::new(seed);
    let (initial_f, initial_grad_norm_sq) = metrics(obj, x0)?;

    let mut x = x0.to_vec();
    let mut ifo = 0u64;
    let mut records = Vec::new();
    let mut weights = Vec::new();
    let mut snapshots: VecDeque<(usize, Vec<f64>)> = VecDeque::new();

    for j in 1..=max_epochs {
        if budget.is_some_and(|b| ifo >= b) {
            break;
        }
        let p = schedule.params(j, n, smoothness)?;
        let epoch_rng = parent.split(j as u64);
        let out = match baseline {
            Some(BaselineKind::Sgd) => sgd_epoch(obj, &x, &p, &epoch_rng)?,
            Some(BaselineKind::Svrg | BaselineKind::Scsg) => {
                run_epoch(obj, &x, &p, Estimator::SvrgAnchored, &epoch_rng, |_, _, _| {})?
            }
            Some(BaselineKind::SarahFull) | None => geom_sarah_epoch(obj, &x, &p, &epoch_rng)?,
        };
        x = out.x_out;
        ifo += out.ifo_cost;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { epoch: j });
        }
        let (f_value, grad_norm_sq) = metrics(obj, &x)?;
        if !f_value.is_finite() || !grad_norm_sq.is_finite() {
            return Err(Error::NonFinite { epoch: j });
        }
        records.push(EpochRecord {
            epoch: j,
            n_drawn: out.n_drawn,
            ifo_epoch: out.ifo_cost,
            ifo_cumulative: ifo,
            f_value,
            grad_norm_sq,
            params: p,
        });

        if tail {
            weights.push(p.eta * p.m);
            // Snapshots below the smallest possible final T are never needed.
            let keep_from = match fixed_t {
                Some(t) => t,
                None => largest_horizon(j, delta).unwrap_or(1),
            };
            if j >= keep_from {
                snapshots.push_back((j, x.clone()));
            }
            while snapshots.front().is_some_and(|(i, _)| *i < keep_from) {
                snapshots.pop_front();
            }
        }
    }

    let last = records.len();
    let (output_index, output_iterate, tail_window) = if tail {
        let t = fixed_t.or_else(|| largest_horizon(last, delta)).unwrap_or(last);
        let hi = tail_end(t, delta).min(last);
        let td = TailDistribution::new(t, weights[t - 1..hi].to_vec())?;
        let r = tail_index(&mut parent.split(0), &td);
        let iterate = snapshots
            .iter()
            .find(|(i, _)| *i == r)
            .map(|(_, v)| v.clone())
            .expect("tail snapshot retained");
        (r, iterate, (t, hi))
    } else {
        (last, x, (last, last))
    };

    Ok(RunTrace {
        schedule: schedule.to_string(),
        seed,
        n,
        initial_f,
        initial_grad_norm_sq,
        records,
        output_index,
        output_iterate,
        tail_window,
    })
}

/// Geom-SARAH for `T` outer epochs: runs `⌈(1+δ)T⌉` epochs from `x0` and
/// returns the iterate of epoch `R(T)`.
pub fn run_geom_sarah<F>(obj: &F, schedule: &Schedule, t: usize, x0: &[f64], seed: u64) -> Result<RunTrace>
where
    F: FiniteSum + ?Sized,
{
    if schedule.baseline_kind().is_some() {
        return Err(Error::invalid(format!("{schedule} is a baseline schedule")));
    }
    drive(obj, schedule, Horizon::Epochs(t), x0, seed)
}

/// A baseline optimizer; the output is the last iterate.
pub fn run_baseline<F>(obj: &F, schedule: &Schedule, horizon: Horizon, x0: &[f64], seed: u64) -> Result<RunTrace>
where
    F: FiniteSum + ?Sized,
{
    if schedule.baseline_kind().is_none() {
        return Err(Error::invalid(format!("{schedule} is not a baseline schedule")));
    }
    drive(obj, schedule, horizon, x0, seed)
}

/// Runs any schedule under any horizon.
pub fn run_method<F>(obj: &F, schedule: &Schedule, horizon: Horizon, x0: &[f64], seed: u64) -> Result<RunTrace>
where
    F: FiniteSum + ?Sized,
{
    drive(obj, schedule, horizon, x0, seed)
}
