//! Seeded statistical and numerical checks behind the `check` subcommand.
//!
//! Every check uses fixed seeds, so the outcome and the printed summary are
//! the same on every run of the same build.

use crate::data::synth_logistic;
use crate::objective::{FiniteSum, LogisticNcvx};
use crate::optimizers::{run_epoch, descent_statistical_check, Estimator};
use crate::par::ExecMode;
use crate::random::{
    exact_subset_mean_variance, geom_sample, geometrization_identity_check, subset_variance_bound, tail_index,
    RngStream, SubsetSampler, TailDistribution,
};
use crate::schedules::{q_schedule, EpochParams, InnerLoop, Schedule, ScheduleKind};
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn outcome(name: &'static str, res: Result<(bool, String)>) -> CheckOutcome {
    match res {
        Ok((pass, detail)) => CheckOutcome { name, pass, detail },
        Err(e) => CheckOutcome {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every check in a fixed order.
pub fn run_self_tests() -> Vec<CheckOutcome> {
    vec![
        outcome("geometric sampler", geometric_sampler()),
        outcome("subset sampler", subset_sampler()),
        outcome("tail output law", tail_law()),
        outcome("geometrization identity", geometrization()),
        outcome("subset variance bound", subset_variance()),
        outcome("gradient finite differences", finite_differences()),
        outcome("full-batch degeneracy", full_batch()),
        outcome("one-epoch descent bound", one_epoch_bound()),
        outcome("schedule invariants", schedule_invariants()),
    ]
}

fn geometric_sampler() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for (s, mean) in [1.0, 4.0, 25.0].into_iter().enumerate() {
        let mut rng = RngStream::new(101).split(s as u64);
        let draws = 200_000;
        let mut sum = 0.0;
        let mut zeros = 0usize;
        for _ in 0..draws {
            let k = geom_sample(&mut rng, mean)?;
            sum += k as f64;
            zeros += usize::from(k == 0);
        }
        let se_mean = (mean * (1.0 + mean) / draws as f64).sqrt();
        let p0 = 1.0 / (1.0 + mean);
        let se_p0 = (p0 * (1.0 - p0) / draws as f64).sqrt();
        worst = worst
            .max((sum / draws as f64 - mean).abs() / se_mean)
            .max((zeros as f64 / draws as f64 - p0).abs() / se_p0);
    }
    Ok((worst < 4.0, format!("max deviation {worst:.2} std-errs")))
}

fn subset_sampler() -> Result<(bool, String)> {
    let (m, k, draws) = (5usize, 2usize, 100_000usize);
    let mut rng = RngStream::new(202);
    let mut sampler = SubsetSampler::new(m);
    let mut pairs = vec![0usize; m * m];
    let mut out = Vec::new();
    for _ in 0..draws {
        sampler.sample_into(&mut rng, k, &mut out)?;
        let (a, b) = (out[0].min(out[1]), out[0].max(out[1]));
        if a == b {
            return Ok((false, "repeated index".into()));
        }
        pairs[a * m + b] += 1;
    }
    let p = 1.0 / 10.0;
    let se = (p * (1.0 - p) / draws as f64).sqrt();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            worst = worst.max((pairs[a * m + b] as f64 / draws as f64 - p).abs() / se);
        }
    }
    Ok((worst < 4.0, format!("max pair deviation {worst:.2} std-errs")))
}

fn tail_law() -> Result<(bool, String)> {
    let td = TailDistribution::new(2, vec![4.0, 9.0, 16.0])?;
    let mut rng = RngStream::new(303);
    let draws = 50_000;
    let mut counts = [0usize; 3];
    for _ in 0..draws {
        counts[tail_index(&mut rng, &td) - 2] += 1;
    }
    let worst = (0..3)
        .map(|i| (counts[i] as f64 / draws as f64 - td.probability(i + 2)).abs())
        .fold(0.0, f64::max);
    Ok((worst < 0.01, format!("max |freq − prob| = {worst:.4}")))
}

fn geometrization() -> Result<(bool, String)> {
    type Seq = (&'static str, fn(u64) -> f64);
    let seqs: [Seq; 3] = [
        ("k", |k| k as f64),
        ("k^2", |k| (k as f64) * (k as f64)),
        ("0.9^k", |k| 0.9f64.powf(k as f64)),
    ];
    let mut worst: f64 = 0.0;
    let mut s = 0;
    for (_, d) in seqs {
        for mean in [1.0, 4.0, 25.0] {
            let mut rng = RngStream::new(404).split(s);
            s += 1;
            let r = geometrization_identity_check(d, mean, 1_000_000, &mut rng)?;
            worst = worst.max(r.gap_in_std_errs());
        }
    }
    Ok((worst < 3.0, format!("max gap {worst:.2} std-errs over 9 cases")))
}

fn subset_variance() -> Result<(bool, String)> {
    let mut rng = RngStream::new(505);
    let mut cases = 0;
    for m in 1..=8usize {
        for _ in 0..4 {
            let dim = 1 + rng.below(4) as usize;
            let pop: Vec<Vec<f64>> = (0..m)
                .map(|_| (0..dim).map(|_| 4.0 * rng.uniform_open01() - 2.0).collect())
                .collect();
            for k in 1..=m {
                let exact = exact_subset_mean_variance(&pop, k);
                let bound = subset_variance_bound(&pop, k);
                cases += 1;
                let ok = if k == m { exact == 0.0 } else { exact <= bound * (1.0 + 1e-12) };
                if !ok {
                    return Ok((false, format!("M={m} k={k}: {exact} > {bound}")));
                }
            }
        }
    }
    Ok((true, format!("{cases} (population, k) cases")))
}

fn finite_differences() -> Result<(bool, String)> {
    let obj = LogisticNcvx::new(synth_logistic(100, 10, 606, 1.0)?, 0.1)?;
    let mut rng = RngStream::new(607);
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    let mut g = vec![0.0; obj.dim()];
    for _ in 0..100 {
        let i = rng.below(obj.n() as u64) as usize;
        let x: Vec<f64> = (0..obj.dim()).map(|_| 4.0 * rng.uniform_open01() - 2.0).collect();
        g.iter_mut().for_each(|v| *v = 0.0);
        obj.grad_index(i, &x, &mut g)?;
        let mut err2 = 0.0;
        let mut norm2 = 0.0;
        let mut xp = x.clone();
        for j in 0..obj.dim() {
            xp[j] = x[j] + h;
            let fp = obj.component_value(i, &xp)?;
            xp[j] = x[j] - h;
            let fm = obj.component_value(i, &xp)?;
            xp[j] = x[j];
            let fd = (fp - fm) / (2.0 * h);
            err2 += (fd - g[j]).powi(2);
            norm2 += g[j] * g[j];
        }
        worst = worst.max(err2.sqrt() / norm2.sqrt().max(1e-12));
    }
    Ok((worst < 1e-5, format!("max relative error {worst:.2e} over 100 pairs")))
}

fn full_batch() -> Result<(bool, String)> {
    let obj = LogisticNcvx::new(synth_logistic(64, 8, 707, 1.0)?, 0.1)?;
    let n = obj.n();
    let p = EpochParams {
        eta: 1.0 / (2.0 * obj.smoothness()),
        b: n,
        m: (n * n) as f64,
        big_batch: n,
        inner: InnerLoop::Fixed(50),
    };
    let x0 = vec![0.5; obj.dim()];
    let mut worst: f64 = 0.0;
    let mut failure = None;
    run_epoch(&obj, &x0, &p, Estimator::Sarah, &RngStream::new(708), |_, x, v| {
        match obj.full_grad(x) {
            Ok(g) => {
                let err: f64 = g.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                let norm: f64 = g.iter().map(|a| a * a).sum::<f64>().sqrt();
                worst = worst.max(err / norm.max(f64::MIN_POSITIVE));
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((worst < 1e-12, format!("max relative error {worst:.2e} over 50 steps")))
}

fn one_epoch_bound() -> Result<(bool, String)> {
    let obj = LogisticNcvx::new(synth_logistic(100, 5, 808, 1.0)?, 0.1)?;
    let p = q_schedule(3, obj.n(), obj.smoothness())?;
    let x0 = vec![0.0; obj.dim()];
    let r = descent_statistical_check(&obj, &p, &x0, 2000, &RngStream::new(809), ExecMode::default())?;
    Ok((
        r.pass,
        format!("lhs {:.6e} vs rhs {:.6e} (se {:.2e})", r.lhs, r.rhs, r.std_err),
    ))
}

fn schedule_invariants() -> Result<(bool, String)> {
    let kinds = [
        Schedule::q(),
        Schedule::e(2.0),
        Schedule::nonadaptive(7),
        Schedule {
            kind: ScheduleKind::SarahFull { big_batch: None },
            delta: 0.0,
        },
        Schedule {
            kind: ScheduleKind::Svrg { big_batch: None },
            delta: 0.0,
        },
        Schedule {
            kind: ScheduleKind::Scsg { c: 1.0 },
            delta: 0.0,
        },
        Schedule {
            kind: ScheduleKind::Sgd,
            delta: 0.0,
        },
    ];
    let mut checked = 0usize;
    for s in kinds {
        for n in [1usize, 10, 1000, 1_000_000] {
            let s = match s.kind {
                ScheduleKind::NonAdaptive { big_batch } => Schedule::nonadaptive(big_batch.min(n)),
                _ => s,
            };
            for l in [0.1, 1.0, 100.0] {
                let mut prev = 0.0;
                for j in (1..=10_000).step_by(7).chain([10_000]) {
                    let p = s.params(j, n, l)?;
                    checked += 1;
                    if !p.step_condition_holds(l) || !p.batch_condition_holds() {
                        return Ok((false, format!("{s} j={j} n={n} L={l}: {p:?}")));
                    }
                    if s.baseline_kind().is_none() {
                        if p.lambda() < prev {
                            return Ok((false, format!("{s}: λ_j decreased at j={j}")));
                        }
                        prev = p.lambda();
                    }
                }
            }
        }
    }
    Ok((true, format!("{checked} parameter sets")))
}
