use super::epoch::geom_sarah_epoch;
use super::norm_sq;
use crate::objective::FiniteSum;
use crate::par::{self, ExecMode};
use crate::random::RngStream;
use crate::schedules::EpochParams;
use crate::{Error, Result};

/// `(1/n) Σ_i ‖∇f_i(x) − ∇f(x)‖²`, by enumeration.
pub fn population_variance<F: FiniteSum + ?Sized>(obj: &F, x: &[f64]) -> Result<f64> {
    let full = obj.full_grad(x)?;
    let mut gi = vec![0.0; obj.dim()];
    let mut total = 0.0;
    for i in 0..obj.n() {
        gi.iter_mut().for_each(|v| *v = 0.0);
        obj.grad_index(i, x, &mut gi)?;
        total += gi.iter().zip(&full).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    }
    Ok(total / obj.n() as f64)
}

/// Monte-Carlo check of the one-epoch bound
/// `E‖∇f(x̃_j)‖² ≤ (2b/(ηm)) E[f(x̃_{j−1}) − f(x̃_j)] + σ² 1{B<n} / B`.
#[derive(Debug, Clone, Copy)]
pub struct DescentReport {
    /// Sample mean of `‖∇f(x̃_j)‖²`.
    pub lhs: f64,
    /// Sample estimate of the right-hand side.
    pub rhs: f64,
    /// Standard error of `lhs − rhs` (paired over replicates).
    pub std_err: f64,
    /// Largest population variance over the start point and every endpoint.
    pub sigma2: f64,
    pub replicates: usize,
    /// `lhs ≤ rhs + 3·std_err`.
    pub pass: bool,
}

/// Runs `replicates` independent epochs of Geom-SARAH from `x0` with
/// parameters `p`; replicate `r` draws from `rng.split(r)`.
pub fn descent_statistical_check<F>(
    obj: &F,
    p: &EpochParams,
    x0: &[f64],
    replicates: usize,
    rng: &RngStream,
    mode: ExecMode,
) -> Result<DescentReport>
where
    F: FiniteSum + ?Sized,
{
    if replicates == 0 {
        return Err(Error::invalid("need at least one replicate"));
    }
    if !p.step_condition_holds(obj.smoothness()) {
        return Err(Error::invalid("epoch parameters violate 2ηL ≤ min(1, b/√m)"));
    }
    let f0 = obj.value(x0)?;
    let coef = 2.0 * p.b as f64 / (p.eta * p.m);

    let outcomes: Vec<Result<(f64, f64, f64)>> = par::map_range(mode, replicates, |r| {
        let out = geom_sarah_epoch(obj, x0, p, &rng.split(r as u64))?;
        let gn = norm_sq(&obj.full_grad(&out.x_out)?);
        let decrease = f0 - obj.value(&out.x_out)?;
        let var = population_variance(obj, &out.x_out)?;
        Ok((gn, decrease, var))
    });

    let mut sigma2 = population_variance(obj, x0)?;
    let mut sum_g = 0.0;
    let mut sum_d = 0.0;
    let mut zs = Vec::with_capacity(replicates);
    for o in outcomes {
        let (gn, dec, var) = o?;
        sigma2 = sigma2.max(var);
        sum_g += gn;
        sum_d += dec;
        zs.push(gn - coef * dec);
    }
    let rf = replicates as f64;
    let lhs = sum_g / rf;
    let variance_term = if p.big_batch < obj.n() {
        sigma2 / p.big_batch as f64
    } else {
        0.0
    };
    let rhs = coef * sum_d / rf + variance_term;

    let zbar = zs.iter().sum::<f64>() / rf;
    let std_err = if replicates > 1 {
        (zs.iter().map(|z| (z - zbar).powi(2)).sum::<f64>() / (rf - 1.0) / rf).sqrt()
    } else {
        0.0
    };

    Ok(DescentReport {
        lhs,
        rhs,
        std_err,
        sigma2,
        replicates,
        pass: lhs <= rhs + 3.0 * std_err,
    })
}
