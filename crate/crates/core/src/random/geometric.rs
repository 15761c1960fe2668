use super::RngStream;
use crate::{Error, Result};

/// Success ratio `γ` of the geometric law on `{0, 1, 2, …}` with the given
/// mean: `E[N] = γ / (1 − γ)`.
pub fn geom_gamma(mean: f64) -> f64 {
    mean / (1.0 + mean)
}

/// Draws `N` with `P(N = k) = γ^k (1 − γ)` for `k ≥ 0`, where `γ` is chosen so
/// that `E[N] = mean`.
///
/// Sampled by inversion: `N = ⌊ln U / ln γ⌋` with `U` uniform on (0, 1).
pub fn geom_sample(rng: &mut RngStream, mean: f64) -> Result<u64> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::invalid(format!("geometric mean must be positive, got {mean}")));
    }
    let ln_gamma = -(1.0 / mean).ln_1p();
    let u = rng.uniform_open01();
    let k = (u.ln() / ln_gamma).floor();
    // `as` saturates for draws beyond u64::MAX, which have probability ~0.
    Ok(k as u64)
}

/// Monte-Carlo and exact sides of the geometrization identity
/// `E[D_N − D_{N+1}] = (D_0 − E[D_N]) / E[N]`.
#[derive(Debug, Clone, Copy)]
pub struct GeomIdentity {
    pub lhs_estimate: f64,
    pub rhs_exact: f64,
    pub std_err: f64,
}

impl GeomIdentity {
    /// `|lhs − rhs| / std_err`. The standard error is floored at
    /// `1e-12·max(1, |rhs|)` so that a deterministic increment (zero sample
    /// variance) is compared up to summation rounding.
    pub fn gap_in_std_errs(&self) -> f64 {
        let gap = (self.lhs_estimate - self.rhs_exact).abs();
        let floor = 1e-12 * self.rhs_exact.abs().max(1.0);
        gap / self.std_err.max(floor)
    }
}

/// Checks the geometrization identity for the sequence `d` at the given mean.
///
/// The left side is a sample mean over `n_draws` geometric draws. The right
/// side uses `E[D_N] = Σ_k (1 − γ) γ^k D_k`, summed until the remaining tail
/// mass `γ^{k+1}` drops below 1e-20. `d` must grow at most polynomially.
pub fn geometrization_identity_check<D>(
    d: D,
    mean: f64,
    n_draws: usize,
    rng: &mut RngStream,
) -> Result<GeomIdentity>
where
    D: Fn(u64) -> f64,
{
    if n_draws == 0 {
        return Err(Error::invalid("n_draws must be positive"));
    }
    // Welford accumulation of D_N − D_{N+1}.
    let mut avg = 0.0;
    let mut m2 = 0.0;
    for t in 0..n_draws {
        let n = geom_sample(rng, mean)?;
        let z = d(n) - d(n + 1);
        let delta = z - avg;
        avg += delta / (t + 1) as f64;
        m2 += delta * (z - avg);
    }
    let var = if n_draws > 1 {
        m2 / (n_draws - 1) as f64
    } else {
        0.0
    };

    let gamma = geom_gamma(mean);
    let mut expect = 0.0;
    let mut weight = 1.0 - gamma;
    let mut tail = gamma;
    let mut k = 0u64;
    loop {
        expect += weight * d(k);
        if tail < 1e-20 {
            break;
        }
        weight *= gamma;
        tail *= gamma;
        k += 1;
    }

    Ok(GeomIdentity {
        lhs_estimate: avg,
        rhs_exact: (d(0) - expect) / mean,
        std_err: (var / n_draws as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_gives_unit_mean() {
        let g = geom_gamma(1.0);
        assert_eq!(g, 0.5);
        assert_eq!(g / (1.0 - g), 1.0);
    }

    #[test]
    fn rejects_non_positive_mean() {
        let mut r = RngStream::new(0);
        assert!(geom_sample(&mut r, 0.0).is_err());
        assert!(geom_sample(&mut r, -1.0).is_err());
        assert!(geom_sample(&mut r, f64::NAN).is_err());
    }

    #[test]
    fn empirical_mean_at_nine() {
        let mean = 9.0;
        let gamma = geom_gamma(mean);
        let var = gamma / (1.0 - gamma).powi(2);
        let draws = 100_000;
        let se = (var / draws as f64).sqrt();
        let mut r = RngStream::new(11);
        let total: u64 = (0..draws).map(|_| geom_sample(&mut r, mean).unwrap()).sum();
        let m = total as f64 / draws as f64;
        assert!((m - mean).abs() < 3.0 * se, "mean {m}, se {se}");
    }

    #[test]
    fn small_mean_mass_at_zero() {
        let mean = 0.01;
        let p0 = 1.0 - geom_gamma(mean);
        assert!((p0 - 1.0 / 1.01).abs() < 1e-15);
        assert!((p0 - 0.9901).abs() < 1e-4);
        let draws = 200_000;
        let mut r = RngStream::new(5);
        let zeros = (0..draws)
            .filter(|_| geom_sample(&mut r, mean).unwrap() == 0)
            .count();
        let freq = zeros as f64 / draws as f64;
        let se = (p0 * (1.0 - p0) / draws as f64).sqrt();
        assert!((freq - p0).abs() < 4.0 * se, "freq {freq}");
    }

    #[test]
    fn pmf_matches_law() {
        // Frequencies of the first few values against γ^k(1−γ).
        let mean = 2.0;
        let gamma = geom_gamma(mean);
        let draws = 200_000;
        let mut counts = [0usize; 6];
        let mut r = RngStream::new(9);
        for _ in 0..draws {
            let k = geom_sample(&mut r, mean).unwrap() as usize;
            if k < counts.len() {
                counts[k] += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = gamma.powi(k as i32) * (1.0 - gamma);
            let f = c as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((f - p).abs() < 4.5 * se, "k={k}: {f} vs {p}");
        }
    }

    #[test]
    fn identity_constant_sequence() {
        let mut r = RngStream::new(1);
        let res = geometrization_identity_check(|_| 3.5, 4.0, 1000, &mut r).unwrap();
        assert_eq!(res.lhs_estimate, 0.0);
        assert!(res.rhs_exact.abs() < 1e-12);
    }

    #[test]
    fn identity_linear_sequence() {
        let mut r = RngStream::new(2);
        let res = geometrization_identity_check(|k| k as f64, 7.0, 1000, &mut r).unwrap();
        assert_eq!(res.lhs_estimate, -1.0);
        assert!((res.rhs_exact + 1.0).abs() < 1e-12, "{}", res.rhs_exact);
    }

    #[test]
    fn identity_square_sequence_series_oracle() {
        // E[N²] = γ(1+γ)/(1−γ)² in closed form; the truncated series must hit it.
        let mean: f64 = 4.0;
        let gamma = geom_gamma(mean);
        let en2 = gamma * (1.0 + gamma) / (1.0 - gamma).powi(2);
        let mut r = RngStream::new(3);
        let res = geometrization_identity_check(|k| (k * k) as f64, mean, 1_000_000, &mut r).unwrap();
        assert!((res.rhs_exact - (0.0 - en2) / mean).abs() < 1e-10);
        assert!(res.gap_in_std_errs() < 3.0, "{res:?}");
    }
}
