use super::Oracle;
use crate::objective::FiniteSum;
use crate::random::{geom_sample, RngStream, SubsetSampler};
use crate::schedules::{EpochParams, InnerLoop};
use crate::Result;

/// Inner-loop gradient estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Recursive SARAH update
    /// `v_{k+1} = (1/b) Σ_{i∈I_k} (∇f_i(x_{k+1}) − ∇f_i(x_k)) + v_k`.
    Sarah,
    /// SVRG update anchored at the epoch start `x̃`:
    /// `v_{k+1} = (1/b) Σ_{i∈I_k} (∇f_i(x_{k+1}) − ∇f_i(x̃)) + v_0`.
    SvrgAnchored,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochOutcome {
    pub x_out: Vec<f64>,
    pub n_drawn: u64,
    pub ifo_cost: u64,
}

fn inner_steps(p: &EpochParams, rng: &mut RngStream) -> Result<u64> {
    match p.inner {
        InnerLoop::Geometric => geom_sample(rng, p.m / p.b as f64),
        InnerLoop::Fixed(k) => Ok(k),
    }
}

/// One epoch of the anchored variance-reduced loop.
///
/// Random draws come from children of `rng`: split 0 for the big batch,
/// split 1 for the inner length and split 2 (then split `k` again) for the
/// mini-batch of step `k`. `inspect(k, x_k, v_k)` is called for
/// `k = 0, …, N`, i.e. once per estimator value including the anchor.
///
/// Costs `B + 2bN` queries.
pub fn run_epoch<F, I>(
    obj: &F,
    x_in: &[f64],
    p: &EpochParams,
    estimator: Estimator,
    rng: &RngStream,
    mut inspect: I,
) -> Result<EpochOutcome>
where
    F: FiniteSum + ?Sized,
    I: FnMut(u64, &[f64], &[f64]),
{
    obj.check_dim(x_in)?;
    let d = obj.dim();
    let mut big_rng = rng.split(0);
    let mut len_rng = rng.split(1);
    let step_root = rng.split(2);

    let mut oracle = Oracle::new(obj);
    let mut sampler = SubsetSampler::new(obj.n());
    let mut batch = Vec::with_capacity(p.big_batch.max(p.b));

    sampler.sample_into(&mut big_rng, p.big_batch, &mut batch)?;
    let mut v = vec![0.0; d];
    oracle.grad_batch_into(&batch, x_in, &mut v)?;
    let anchor_grad = match estimator {
        Estimator::SvrgAnchored => v.clone(),
        Estimator::Sarah => Vec::new(),
    };

    let steps = inner_steps(p, &mut len_rng)?;
    let mut x = x_in.to_vec();
    let mut x_prev = vec![0.0; d];
    let mut g_new = vec![0.0; d];
    let mut g_old = vec![0.0; d];
    for k in 0..steps {
        inspect(k, &x, &v);
        x_prev.copy_from_slice(&x);
        for (xi, vi) in x.iter_mut().zip(&v) {
            *xi -= p.eta * vi;
        }
        let mut step_rng = step_root.split(k);
        sampler.sample_into(&mut step_rng, p.b, &mut batch)?;
        oracle.grad_batch_into(&batch, &x, &mut g_new)?;
        match estimator {
            Estimator::Sarah => {
                oracle.grad_batch_into(&batch, &x_prev, &mut g_old)?;
                for ((vi, gn), go) in v.iter_mut().zip(&g_new).zip(&g_old) {
                    *vi += gn - go;
                }
            }
            Estimator::SvrgAnchored => {
                oracle.grad_batch_into(&batch, x_in, &mut g_old)?;
                for (((vi, gn), go), ga) in v.iter_mut().zip(&g_new).zip(&g_old).zip(&anchor_grad) {
                    *vi = (gn - go) + ga;
                }
            }
        }
    }
    inspect(steps, &x, &v);

    Ok(EpochOutcome {
        x_out: x,
        n_drawn: steps,
        ifo_cost: oracle.queries(),
    })
}

/// One Geom-SARAH epoch: big-batch anchor, geometric (or fixed) inner
/// length, SARAH updates.
pub fn geom_sarah_epoch<F>(obj: &F, x_in: &[f64], p: &EpochParams, rng: &RngStream) -> Result<EpochOutcome>
where
    F: FiniteSum + ?Sized,
{
    run_epoch(obj, x_in, p, Estimator::Sarah, rng, |_, _, _| {})
}

/// Plain mini-batch SGD steps `x ← x − η ∇f_I(x)`; costs `b` per step.
pub fn sgd_epoch<F>(obj: &F, x_in: &[f64], p: &EpochParams, rng: &RngStream) -> Result<EpochOutcome>
where
    F: FiniteSum + ?Sized,
{
    obj.check_dim(x_in)?;
    let mut len_rng = rng.split(1);
    let step_root = rng.split(2);
    let steps = inner_steps(p, &mut len_rng)?;

    let mut oracle = Oracle::new(obj);
    let mut sampler = SubsetSampler::new(obj.n());
    let mut batch = Vec::with_capacity(p.b);
    let mut g = vec![0.0; obj.dim()];
    let mut x = x_in.to_vec();
    for k in 0..steps {
        let mut step_rng = step_root.split(k);
        sampler.sample_into(&mut step_rng, p.b, &mut batch)?;
        oracle.grad_batch_into(&batch, &x, &mut g)?;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= p.eta * gi;
        }
    }
    Ok(EpochOutcome {
        x_out: x,
        n_drawn: steps,
        ifo_cost: oracle.queries(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_logistic;
    use crate::objective::LogisticNcvx;
    use crate::schedules::{nonadaptive_schedule, q_schedule};

    fn obj(n: usize, d: usize) -> LogisticNcvx {
        LogisticNcvx::new(synth_logistic(n, d, 5, 1.0).unwrap(), 0.1).unwrap()
    }

    #[test]
    fn zero_steps_returns_input_and_costs_big_batch() {
        let f = obj(40, 4);
        let p = EpochParams {
            inner: InnerLoop::Fixed(0),
            ..q_schedule(3, 40, f.smoothness()).unwrap()
        };
        let x = vec![0.3, -0.1, 0.2, 0.0];
        let out = geom_sarah_epoch(&f, &x, &p, &RngStream::new(1)).unwrap();
        assert_eq!(out.x_out, x);
        assert_eq!(out.n_drawn, 0);
        assert_eq!(out.ifo_cost, p.big_batch as u64);
    }

    #[test]
    fn geometric_zero_draw_also_keeps_iterate() {
        // Find a stream whose geometric draw is 0 and check the epoch is a no-op.
        let f = obj(40, 4);
        let p = q_schedule(2, 40, f.smoothness()).unwrap();
        let x = vec![0.1; 4];
        let mut found = false;
        for s in 0..200 {
            let rng = RngStream::new(s);
            let out = geom_sarah_epoch(&f, &x, &p, &rng).unwrap();
            if out.n_drawn == 0 {
                assert_eq!(out.x_out, x);
                assert_eq!(out.ifo_cost, p.big_batch as u64);
                found = true;
                break;
            }
        }
        assert!(found);
    }

    #[test]
    fn cost_identity() {
        let f = obj(64, 4);
        let p = nonadaptive_schedule(16, 64, f.smoothness()).unwrap();
        for s in 0..50 {
            let out = geom_sarah_epoch(&f, &[0.0; 4], &p, &RngStream::new(s)).unwrap();
            assert_eq!(out.ifo_cost, 16 + 2 * p.b as u64 * out.n_drawn);
        }
    }

    #[test]
    fn svrg_full_batch_is_gradient_descent() {
        let f = obj(30, 3);
        let l = f.smoothness();
        let p = EpochParams {
            eta: 1.0 / (2.0 * l),
            b: 30,
            m: 900.0,
            big_batch: 30,
            inner: InnerLoop::Fixed(5),
        };
        let out = run_epoch(&f, &[0.0; 3], &p, Estimator::SvrgAnchored, &RngStream::new(3), |_, _, _| {}).unwrap();
        let mut x = vec![0.0; 3];
        for _ in 0..5 {
            let g = f.full_grad(&x).unwrap();
            x.iter_mut().zip(&g).for_each(|(xi, gi)| *xi -= p.eta * gi);
        }
        for (a, b) in out.x_out.iter().zip(&x) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn sgd_costs_b_per_step() {
        let f = obj(100, 3);
        let p = EpochParams {
            eta: 0.1,
            b: 32,
            m: 1024.0,
            big_batch: 0,
            inner: InnerLoop::Fixed(7),
        };
        let out = sgd_epoch(&f, &[0.0; 3], &p, &RngStream::new(2)).unwrap();
        assert_eq!(out.ifo_cost, 32 * 7);
    }
}
