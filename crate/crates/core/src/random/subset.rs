use super::RngStream;
use crate::{Error, Result};

/// Uniform `k`-subsets of `{0, …, M−1}` by partial Fisher–Yates.
///
/// The arena holds the identity permutation between calls. A draw performs
/// `k` swaps, copies out the first `k` slots and then undoes the swaps in
/// reverse, so each draw costs `O(k)` and its output depends only on the
/// stream, `M` and `k`, never on earlier draws.
#[derive(Debug, Clone)]
pub struct SubsetSampler {
    arena: Vec<usize>,
    swaps: Vec<usize>,
}

impl SubsetSampler {
    pub fn new(population: usize) -> Self {
        SubsetSampler {
            arena: (0..population).collect(),
            swaps: Vec::new(),
        }
    }

    pub fn population(&self) -> usize {
        self.arena.len()
    }

    /// Writes `k` distinct indices into `out` (cleared first).
    pub fn sample_into(&mut self, rng: &mut RngStream, k: usize, out: &mut Vec<usize>) -> Result<()> {
        let m = self.arena.len();
        if k == 0 || k > m {
            return Err(Error::invalid(format!(
                "subset size {k} must be in 1..={m}"
            )));
        }
        self.swaps.clear();
        for i in 0..k {
            let j = i + rng.below((m - i) as u64) as usize;
            self.arena.swap(i, j);
            self.swaps.push(j);
        }
        out.clear();
        out.extend_from_slice(&self.arena[..k]);
        for (i, &j) in self.swaps.iter().enumerate().rev() {
            self.arena.swap(i, j);
        }
        Ok(())
    }

    pub fn sample(&mut self, rng: &mut RngStream, k: usize) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(k);
        self.sample_into(rng, k, &mut out)?;
        Ok(out)
    }
}

/// `k` distinct indices from `{0, …, population−1}`, every `k`-subset
/// equally likely.
pub fn sample_without_replacement(rng: &mut RngStream, population: usize, k: usize) -> Result<Vec<usize>> {
    SubsetSampler::new(population).sample(rng, k)
}

/// Exact variance `E‖z̄_J − z̄‖²` of the mean over a uniform random `k`-subset
/// `J` of the population, by enumerating every subset.
///
/// Intended for small populations (M ≤ ~20).
pub fn exact_subset_mean_variance(population: &[Vec<f64>], k: usize) -> f64 {
    let m = population.len();
    assert!(k >= 1 && k <= m, "subset size out of range");
    let dim = population[0].len();
    let mut full = vec![0.0; dim];
    for z in population {
        for (f, v) in full.iter_mut().zip(z) {
            *f += v;
        }
    }
    full.iter_mut().for_each(|f| *f /= m as f64);

    let mut combo: Vec<usize> = (0..k).collect();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut mean = vec![0.0; dim];
    loop {
        mean.iter_mut().for_each(|x| *x = 0.0);
        for &c in &combo {
            for (s, v) in mean.iter_mut().zip(&population[c]) {
                *s += v;
            }
        }
        total += mean
            .iter()
            .zip(&full)
            .map(|(s, f)| (s / k as f64 - f).powi(2))
            .sum::<f64>();
        count += 1;

        // Advance to the next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return total / count as f64;
            }
            i -= 1;
            if combo[i] < m - k + i {
                combo[i] += 1;
                for t in i + 1..k {
                    combo[t] = combo[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Upper bound `1{k<M}/k · (1/M) Σ‖z_j‖²` on the subset-mean variance.
pub fn subset_variance_bound(population: &[Vec<f64>], k: usize) -> f64 {
    let m = population.len();
    if k >= m {
        return 0.0;
    }
    let mean_sq: f64 = population
        .iter()
        .map(|z| z.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        / m as f64;
    mean_sq / k as f64
}
