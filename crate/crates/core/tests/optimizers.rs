mod common;

use common::*;
use geom_sarah::data::synth_logistic;
use geom_sarah::objective::{FiniteSum, LogisticNcvx};
use geom_sarah::optimizers::{run_baseline, run_epoch, run_geom_sarah, run_method, Estimator, Horizon};
use geom_sarah::random::{tail_end, RngStream};
use geom_sarah::schedules::{BaselineKind, EpochParams, InnerLoop, Schedule};
use geom_sarah::{Error, Result};

fn logistic(n: usize, d: usize, seed: u64) -> LogisticNcvx {
    LogisticNcvx::new(synth_logistic(n, d, seed, 1.0).unwrap(), 0.1).unwrap()
}

/// `f_i(x) = ½ c_i ‖x‖²`, reporting a smoothness constant chosen by the test.
struct Quadratic {
    curv: Vec<f64>,
    dim: usize,
    claimed_l: f64,
}

impl FiniteSum for Quadratic {
    fn n(&self) -> usize {
        self.curv.len()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn smoothness(&self) -> f64 {
        self.claimed_l
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let c = self.curv.iter().sum::<f64>() / self.curv.len() as f64;
        Ok(0.5 * c * x.iter().map(|v| v * v).sum::<f64>())
    }

    fn component_value(&self, i: usize, x: &[f64]) -> Result<f64> {
        Ok(0.5 * self.curv[i] * x.iter().map(|v| v * v).sum::<f64>())
    }

    fn add_grad_unchecked(&self, i: usize, x: &[f64], out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(x) {
            *o += self.curv[i] * v;
        }
    }
}

#[test]
fn same_seed_same_trace() {
    let o = logistic(200, 5, 1);
    let x0 = vec![0.0; 5];
    for s in [Schedule::q(), Schedule::e(2.0), Schedule::baseline(BaselineKind::Scsg)] {
        let a = run_method(&o, &s, Horizon::Epochs(6), &x0, 42).unwrap();
        let b = run_method(&o, &s, Horizon::Epochs(6), &x0, 42).unwrap();
        let c = run_method(&o, &s, Horizon::Epochs(6), &x0, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.records, c.records);
    }
}

#[test]
fn diverging_run_aborts_with_epoch() {
    // True curvature 100, claimed 1: the step 1/(2L) overshoots badly.
    let q = Quadratic { curv: vec![100.0; 16], dim: 3, claimed_l: 1.0 };
    let err = run_geom_sarah(&q, &Schedule::q(), 200, &[1.0, -1.0, 0.5], 7).unwrap_err();
    match err {
        Error::NonFinite { epoch } => assert!(epoch >= 1),
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn honest_smoothness_converges_on_quadratic() {
    let q = Quadratic { curv: (1..=16).map(f64::from).collect(), dim: 3, claimed_l: 16.0 };
    let tr = run_geom_sarah(&q, &Schedule::q(), 20, &[1.0, -1.0, 0.5], 7).unwrap();
    assert!(tr.final_grad_norm_sq() < 1e-6 * tr.initial_grad_norm_sq);
}

#[test]
fn ifo_identity_for_every_method() {
    let o = logistic(150, 4, 2);
    let x0 = vec![0.0; 4];
    let schedules = [
        Schedule::q(),
        Schedule::e(2.0),
        Schedule::nonadaptive(40),
        Schedule::baseline(BaselineKind::SarahFull),
        Schedule::baseline(BaselineKind::Svrg),
        Schedule::baseline(BaselineKind::Scsg),
    ];
    for s in schedules {
        let tr = run_method(&o, &s, Horizon::Epochs(5), &x0, 3).unwrap();
        let mut total = 0;
        for r in &tr.records {
            total += r.params.big_batch as u64 + 2 * r.params.b as u64 * r.n_drawn;
            assert_eq!(r.ifo_cumulative, total, "{s}");
        }
    }
    let sgd = run_method(&o, &Schedule::baseline(BaselineKind::Sgd), Horizon::Epochs(3), &x0, 3).unwrap();
    for r in &sgd.records {
        assert_eq!(r.ifo_epoch, r.params.b as u64 * r.n_drawn);
    }
}

#[test]
fn big_batch_anchor_is_unbiased() {
    let o = logistic(20, 3, 4);
    let x = vec![0.4, -0.2, 0.7];
    let full = ref_full_grad(o.dataset(), 0.1, &x);
    let p = EpochParams {
        eta: 0.1 / o.smoothness(),
        b: 1,
        m: 1.0,
        big_batch: 5,
        inner: InnerLoop::Fixed(0),
    };
    let reps = 40_000u64;
    let mut sum = [0.0; 3];
    let mut sum_sq = [0.0; 3];
    for r in 0..reps {
        run_epoch(&o, &x, &p, Estimator::Sarah, &RngStream::new(9).split(r), |_, _, v| {
            for t in 0..3 {
                sum[t] += v[t];
                sum_sq[t] += v[t] * v[t];
            }
        })
        .unwrap();
    }
    for t in 0..3 {
        let mean = sum[t] / reps as f64;
        let se = ((sum_sq[t] / reps as f64 - mean * mean) / reps as f64).sqrt();
        assert!((mean - full[t]).abs() < 4.0 * se, "coord {t}: {mean} vs {}", full[t]);
    }
}

#[test]
fn q_geom_sarah_reduces_gradient_norm_hundredfold() {
    let o = logistic(1000, 20, 5);
    let tr = run_geom_sarah(&o, &Schedule::q(), 60, &[0.0; 20], 11).unwrap();
    let g0 = tr.initial_grad_norm_sq.sqrt();
    let g = norm(&ref_full_grad(o.dataset(), 0.1, &tr.output_iterate));
    assert!(g <= g0 / 100.0, "‖∇f‖ went from {g0} to {g}");
}

#[test]
fn tail_output_comes_from_window() {
    let o = logistic(50, 3, 6);
    for (t, s) in [(3, Schedule::q()), (4, Schedule::e(2.0)), (5, Schedule::nonadaptive(10))] {
        for seed in 0..20 {
            let tr = run_geom_sarah(&o, &s, t, &[0.0; 3], seed).unwrap();
            let hi = tail_end(t, s.delta);
            assert_eq!(tr.records.len(), hi);
            assert_eq!(tr.tail_window, (t, hi));
            assert!((t..=hi).contains(&tr.output_index));
        }
    }
    // δ = 0 always returns epoch T.
    let tr = run_geom_sarah(&o, &Schedule::nonadaptive(10), 4, &[0.0; 3], 1).unwrap();
    assert_eq!(tr.output_index, 4);
    assert_eq!(tr.output_iterate, {
        let mut again = run_geom_sarah(&o, &Schedule::nonadaptive(10).with_delta(0.0), 4, &[0.0; 3], 1).unwrap();
        again.output_iterate.split_off(0)
    });
}

#[test]
fn budget_horizon_stops_after_crossing() {
    let o = logistic(100, 3, 7);
    let budget = 2_000;
    for s in [Schedule::q(), Schedule::baseline(BaselineKind::SarahFull), Schedule::baseline(BaselineKind::Sgd)] {
        let tr = run_method(&o, &s, Horizon::IfoBudget(budget), &[0.0; 3], 2).unwrap();
        let last = tr.records.last().unwrap();
        assert!(last.ifo_cumulative >= budget, "{s}");
        assert!(last.ifo_cumulative - last.ifo_epoch < budget, "{s}");
        let (t, hi) = tr.tail_window;
        assert!(hi <= tr.records.len() && t <= hi);
    }
}

#[test]
fn baseline_entry_points_check_kind() {
    let o = logistic(30, 2, 8);
    assert!(run_geom_sarah(&o, &Schedule::baseline(BaselineKind::Sgd), 2, &[0.0; 2], 0).is_err());
    assert!(run_baseline(&o, &Schedule::q(), Horizon::Epochs(2), &[0.0; 2], 0).is_err());
    assert!(matches!(
        run_geom_sarah(&o, &Schedule::q(), 2, &[0.0; 3], 0),
        Err(Error::Dimension { expected: 2, got: 3 })
    ));
}

#[test]
fn full_batch_sarah_matches_gradient_descent() {
    let o = logistic(40, 3, 9);
    let n = 40;
    let eta = 1.0 / (2.0 * o.smoothness());
    let p = EpochParams { eta, b: n, m: (n * n) as f64, big_batch: n, inner: InnerLoop::Fixed(10) };
    let mut x_gd = vec![0.2, 0.1, -0.3];
    let out = run_epoch(&o, &x_gd.clone(), &p, Estimator::Sarah, &RngStream::new(1), |_, _, _| {}).unwrap();
    for _ in 0..10 {
        let g = ref_full_grad(o.dataset(), 0.1, &x_gd);
        for (x, gi) in x_gd.iter_mut().zip(g) {
            *x -= eta * gi;
        }
    }
    assert!(dist(&out.x_out, &x_gd) < 1e-12);
}
