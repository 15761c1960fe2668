//! Per-epoch hyperparameters `(η_j, b_j, m_j, B_j)` for every method.
//!
//! For the geometric methods `m_j` is the expected number of inner-loop
//! queries, so the inner length is drawn with mean `m_j / b_j`. The fixed
//! length baselines (SARAH, SVRG, SGD) report `m_j = b_j²` together with an
//! explicit step count, which keeps `2η_j L ≤ min(1, b_j/√m_j)` and
//! `b_j ≤ √m_j` meaningful (and tight) at their step size `1/(2L)`.

use std::fmt;

use crate::{Error, Result};

/// Big batch used by the low-precision SARAH/SVRG variants.
pub const LOW_PRECISION_BIG_BATCH: usize = 1024;
/// Mini-batch size of the SGD baseline.
pub const SGD_BATCH: usize = 32;
/// Growth base of E-Geom-SARAH used in the benchmarks.
pub const DEFAULT_ALPHA: f64 = 2.0;

/// How many inner steps an epoch runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerLoop {
    /// `N ~ Geom` with `E[N] = m / b`.
    Geometric,
    /// Exactly this many steps.
    Fixed(u64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochParams {
    pub eta: f64,
    pub b: usize,
    pub m: f64,
    /// Anchor batch size `B`. Zero for SGD, which has no anchor.
    pub big_batch: usize,
    pub inner: InnerLoop,
}

impl EpochParams {
    /// Expected number of inner steps.
    pub fn mean_inner_steps(&self) -> f64 {
        match self.inner {
            InnerLoop::Geometric => self.m / self.b as f64,
            InnerLoop::Fixed(k) => k as f64,
        }
    }

    /// `λ_j = η_j m_j / b_j`, the weight that drives the tail law and the
    /// epoch-to-epoch analysis.
    pub fn lambda(&self) -> f64 {
        self.eta * self.m / self.b as f64
    }

    /// `2ηL ≤ min(1, b/√m)`, allowing one part in 10^12 of rounding.
    pub fn step_condition_holds(&self, smoothness: f64) -> bool {
        let lhs = 2.0 * self.eta * smoothness;
        let rhs = (self.b as f64 / self.m.sqrt()).min(1.0);
        lhs <= rhs * (1.0 + 1e-12)
    }

    /// `b ≤ √m`.
    pub fn batch_condition_holds(&self) -> bool {
        (self.b as f64) * (self.b as f64) <= self.m * (1.0 + 1e-12)
    }
}

fn floor_sqrt_real(m: f64) -> usize {
    let mut r = m.sqrt().floor() as usize;
    // Correct a possible off-by-one from sqrt rounding.
    while (r as f64 + 1.0) * (r as f64 + 1.0) <= m {
        r += 1;
    }
    while r > 0 && (r as f64) * (r as f64) > m {
        r -= 1;
    }
    r
}

/// `⌈√n⌉` in exact integer arithmetic.
pub fn ceil_sqrt(n: usize) -> usize {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// `⌈n^{2/3}⌉` in exact integer arithmetic.
pub fn ceil_pow_two_thirds(n: usize) -> usize {
    let target = (n as u128) * (n as u128);
    let mut b = (n as f64).powf(2.0 / 3.0).floor().max(0.0) as u128;
    while b > 0 && (b - 1).pow(3) >= target {
        b -= 1;
    }
    while b.pow(3) < target {
        b += 1;
    }
    b as usize
}

fn check_common(n: usize, smoothness: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(smoothness > 0.0) || !smoothness.is_finite() {
        return Err(Error::invalid(format!("smoothness must be positive, got {smoothness}")));
    }
    Ok(())
}

/// `m, B → b = max(1, ⌊√m⌋), η = b / (2L√m)`.
fn geometric_params(m: f64, big_batch: usize, smoothness: f64) -> EpochParams {
    let b = floor_sqrt_real(m).max(1);
    EpochParams {
        eta: b as f64 / (2.0 * smoothness * m.sqrt()),
        b,
        m,
        big_batch,
        inner: InnerLoop::Geometric,
    }
}

/// Q-Geom-SARAH: `m_j = B_j = j² ∧ n`.
pub fn q_schedule(j: usize, n: usize, smoothness: f64) -> Result<EpochParams> {
    check_common(n, smoothness)?;
    if j == 0 {
        return Err(Error::invalid("epoch index starts at 1"));
    }
    let m = j.checked_mul(j).map_or(n, |sq| sq.min(n));
    Ok(geometric_params(m as f64, m, smoothness))
}

/// E-Geom-SARAH: `m_j = α^{2j} ∧ n`, `B_j = ⌈α^{2j} ∧ n⌉`.
pub fn e_schedule(j: usize, n: usize, smoothness: f64, alpha: f64) -> Result<EpochParams> {
    check_common(n, smoothness)?;
    if j == 0 {
        return Err(Error::invalid("epoch index starts at 1"));
    }
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
    }
    let m = alpha.powf(2.0 * j as f64).min(n as f64);
    let big_batch = (m.ceil() as usize).clamp(1, n);
    Ok(geometric_params(m, big_batch, smoothness))
}

/// Non-adaptive Geom-SARAH: `B_j = m_j = B` for every epoch.
pub fn nonadaptive_schedule(big_batch: usize, n: usize, smoothness: f64) -> Result<EpochParams> {
    check_common(n, smoothness)?;
    if big_batch == 0 || big_batch > n {
        return Err(Error::invalid(format!("B = {big_batch} must be in 1..={n}")));
    }
    Ok(geometric_params(big_batch as f64, big_batch, smoothness))
}

/// `B = ⌈σ² / (4με²)⌉ ∧ n`, the batch for a target `f(x) − f* ≤ ε²`.
pub fn nonadaptive_batch_for_value(sigma2: f64, mu: f64, eps: f64, n: usize) -> Result<usize> {
    check_targets(sigma2, mu, eps)?;
    Ok(clamp_batch(sigma2 / (4.0 * mu * eps * eps), n))
}

/// `B = ⌈8σ²/ε² + 8σ^{4/3}L^{2/3} / (ε^{4/3}μ^{2/3})⌉ ∧ n`, the batch for a
/// target `‖∇f(x)‖² ≤ ε²`.
pub fn nonadaptive_batch_for_grad(sigma2: f64, mu: f64, eps: f64, smoothness: f64, n: usize) -> Result<usize> {
    check_targets(sigma2, mu, eps)?;
    check_common(n, smoothness)?;
    let sigma = sigma2.sqrt();
    let raw = 8.0 * sigma2 / (eps * eps)
        + 8.0 * sigma.powf(4.0 / 3.0) * smoothness.powf(2.0 / 3.0) / (eps.powf(4.0 / 3.0) * mu.powf(2.0 / 3.0));
    Ok(clamp_batch(raw, n))
}

fn check_targets(sigma2: f64, mu: f64, eps: f64) -> Result<()> {
    if !(sigma2 >= 0.0 && mu > 0.0 && eps > 0.0) {
        return Err(Error::invalid(format!(
            "need σ² ≥ 0, μ > 0, ε > 0 (got σ²={sigma2}, μ={mu}, ε={eps})"
        )));
    }
    Ok(())
}

fn clamp_batch(raw: f64, n: usize) -> usize {
    if raw >= n as f64 {
        n
    } else {
        (raw.ceil() as usize).clamp(1, n)
    }
}

/// Baseline method families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineKind {
    SarahFull,
    Svrg,
    Scsg,
    Sgd,
}

/// Per-epoch parameters for a baseline.
///
/// `big_batch` replaces `B = n` for the low-precision SARAH/SVRG variants and
/// is ignored by SCSG and SGD. `c_scsg` is SCSG's growth constant in
/// `B_j = ⌈c j^{3/2}⌉ ∧ n`.
pub fn baseline_schedule(
    kind: BaselineKind,
    n: usize,
    smoothness: f64,
    j: usize,
    big_batch: Option<usize>,
    c_scsg: f64,
) -> Result<EpochParams> {
    check_common(n, smoothness)?;
    if j == 0 {
        return Err(Error::invalid("epoch index starts at 1"));
    }
    let anchor = big_batch.unwrap_or(n).clamp(1, n);
    let half_step = 1.0 / (2.0 * smoothness);
    let params = match kind {
        BaselineKind::SarahFull => {
            let b = ceil_sqrt(n).min(n);
            EpochParams {
                eta: half_step,
                b,
                m: (b * b) as f64,
                big_batch: anchor,
                inner: InnerLoop::Fixed(ceil_sqrt(n) as u64),
            }
        }
        BaselineKind::Svrg => {
            let b = ceil_pow_two_thirds(n).min(n);
            EpochParams {
                eta: half_step,
                b,
                m: (b * b) as f64,
                big_batch: anchor,
                inner: InnerLoop::Fixed(n.div_ceil(b) as u64),
            }
        }
        BaselineKind::Scsg => {
            if !(c_scsg > 0.0) || !c_scsg.is_finite() {
                return Err(Error::invalid(format!("SCSG constant must be positive, got {c_scsg}")));
            }
            let raw = c_scsg * (j as f64).powf(1.5);
            let big = clamp_batch(raw, n);
            geometric_params(big as f64, big, smoothness)
        }
        BaselineKind::Sgd => {
            let b = SGD_BATCH.min(n);
            EpochParams {
                eta: half_step,
                b,
                m: (b * b) as f64,
                big_batch: 0,
                inner: InnerLoop::Fixed(n.div_ceil(b) as u64),
            }
        }
    };
    Ok(params)
}

/// Which rule produces the epoch parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleKind {
    /// Quadratic growth `m_j = B_j = j² ∧ n`.
    Q,
    /// Exponential growth `m_j = α^{2j} ∧ n`.
    E { alpha: f64 },
    /// Fixed `B_j = m_j = B` sized for a function-value target.
    NonAdaptiveF { sigma2: f64, mu: f64, eps: f64 },
    /// Fixed `B_j = m_j = B` sized for a gradient-norm target.
    NonAdaptiveG { sigma2: f64, mu: f64, eps: f64 },
    /// Fixed `B_j = m_j = B` given directly.
    NonAdaptive { big_batch: usize },
    SarahFull { big_batch: Option<usize> },
    Svrg { big_batch: Option<usize> },
    Scsg { c: f64 },
    Sgd,
}

/// A complete method schedule: the rule plus the tail fraction `δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub delta: f64,
}

impl Schedule {
    pub fn q() -> Self {
        Schedule {
            kind: ScheduleKind::Q,
            delta: 1.0,
        }
    }

    pub fn e(alpha: f64) -> Self {
        Schedule {
            kind: ScheduleKind::E { alpha },
            delta: 0.5,
        }
    }

    pub fn nonadaptive(big_batch: usize) -> Self {
        Schedule {
            kind: ScheduleKind::NonAdaptive { big_batch },
            delta: 0.0,
        }
    }

    pub fn baseline(kind: BaselineKind) -> Self {
        let kind = match kind {
            BaselineKind::SarahFull => ScheduleKind::SarahFull { big_batch: None },
            BaselineKind::Svrg => ScheduleKind::Svrg { big_batch: None },
            BaselineKind::Scsg => ScheduleKind::Scsg { c: 1.0 },
            BaselineKind::Sgd => ScheduleKind::Sgd,
        };
        Schedule { kind, delta: 0.0 }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    /// The baseline family, or `None` for the Geom-SARAH variants.
    pub fn baseline_kind(&self) -> Option<BaselineKind> {
        match self.kind {
            ScheduleKind::SarahFull { .. } => Some(BaselineKind::SarahFull),
            ScheduleKind::Svrg { .. } => Some(BaselineKind::Svrg),
            ScheduleKind::Scsg { .. } => Some(BaselineKind::Scsg),
            ScheduleKind::Sgd => Some(BaselineKind::Sgd),
            _ => None,
        }
    }

    /// Checks constants that do not depend on the problem.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::invalid(format!("delta must be in [0, 1], got {}", self.delta)));
        }
        match self.kind {
            ScheduleKind::E { alpha } => {
                if !(alpha > 1.0) || !alpha.is_finite() {
                    return Err(Error::invalid(format!("alpha must exceed 1, got {alpha}")));
                }
                if self.delta == 0.0 {
                    return Err(Error::invalid("E-Geom-SARAH needs delta in (0, 1]"));
                }
            }
            ScheduleKind::NonAdaptive { .. }
            | ScheduleKind::NonAdaptiveF { .. }
            | ScheduleKind::NonAdaptiveG { .. } => {
                if self.delta != 0.0 {
                    return Err(Error::invalid("non-adaptive Geom-SARAH uses delta = 0"));
                }
                if let ScheduleKind::NonAdaptiveF { sigma2, mu, eps }
                | ScheduleKind::NonAdaptiveG { sigma2, mu, eps } = self.kind
                {
                    check_targets(sigma2, mu, eps)?;
                }
            }
            ScheduleKind::Scsg { c } if !(c > 0.0) => {
                return Err(Error::invalid(format!("SCSG constant must be positive, got {c}")));
            }
            _ => {}
        }
        Ok(())
    }

    pub fn params(&self, j: usize, n: usize, smoothness: f64) -> Result<EpochParams> {
        match self.kind {
            ScheduleKind::Q => q_schedule(j, n, smoothness),
            ScheduleKind::E { alpha } => e_schedule(j, n, smoothness, alpha),
            ScheduleKind::NonAdaptive { big_batch } => {
                nonadaptive_schedule(big_batch, n, smoothness)
            }
            ScheduleKind::NonAdaptiveF { sigma2, mu, eps } => {
                let big = nonadaptive_batch_for_value(sigma2, mu, eps, n)?;
                nonadaptive_schedule(big, n, smoothness)
            }
            ScheduleKind::NonAdaptiveG { sigma2, mu, eps } => {
                let big = nonadaptive_batch_for_grad(sigma2, mu, eps, smoothness, n)?;
                nonadaptive_schedule(big, n, smoothness)
            }
            ScheduleKind::SarahFull { big_batch } => {
                baseline_schedule(BaselineKind::SarahFull, n, smoothness, j, big_batch, 1.0)
            }
            ScheduleKind::Svrg { big_batch } => {
                baseline_schedule(BaselineKind::Svrg, n, smoothness, j, big_batch, 1.0)
            }
            ScheduleKind::Scsg { c } => baseline_schedule(BaselineKind::Scsg, n, smoothness, j, None, c),
            ScheduleKind::Sgd => baseline_schedule(BaselineKind::Sgd, n, smoothness, j, None, 1.0),
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ScheduleKind::Q => write!(f, "q-geom-sarah(delta={})", self.delta),
            ScheduleKind::E { alpha } => write!(f, "e-geom-sarah(alpha={alpha},delta={})", self.delta),
            ScheduleKind::NonAdaptive { big_batch } => write!(f, "nonadaptive-geom-sarah(B={big_batch})"),
            ScheduleKind::NonAdaptiveF { sigma2, mu, eps } => {
                write!(f, "nonadaptive-f-geom-sarah(sigma2={sigma2},mu={mu},eps={eps})")
            }
            ScheduleKind::NonAdaptiveG { sigma2, mu, eps } => {
                write!(f, "nonadaptive-g-geom-sarah(sigma2={sigma2},mu={mu},eps={eps})")
            }
            ScheduleKind::SarahFull { big_batch: None } => write!(f, "sarah"),
            ScheduleKind::SarahFull { big_batch: Some(b) } => write!(f, "sarah(B={b})"),
            ScheduleKind::Svrg { big_batch: None } => write!(f, "svrg"),
            ScheduleKind::Svrg { big_batch: Some(b) } => write!(f, "svrg(B={b})"),
            ScheduleKind::Scsg { c } => write!(f, "scsg(c={c})"),
            ScheduleKind::Sgd => write!(f, "sgd(b={SGD_BATCH})"),
        }
    }
}
