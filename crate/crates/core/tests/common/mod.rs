//! Reference implementations used as oracles by the integration tests.
//!
//! These are written directly from the objective's formula and share no code
//! with the library beyond reading the dataset.
#![allow(dead_code)]

use geom_sarah::data::SparseDataset;

pub fn ref_component_value(ds: &SparseDataset, lambda: f64, i: usize, x: &[f64]) -> f64 {
    let (idx, val) = ds.row(i);
    let dot: f64 = idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum();
    let t = -ds.label(i) * dot;
    let loss = if t > 0.0 { t + (-t).exp().ln_1p() } else { t.exp().ln_1p() };
    let pen: f64 = x.iter().map(|&xj| xj * xj / (1.0 + xj * xj)).sum();
    loss + 0.5 * lambda * pen
}

pub fn ref_value(ds: &SparseDataset, lambda: f64, x: &[f64]) -> f64 {
    (0..ds.n()).map(|i| ref_component_value(ds, lambda, i, x)).sum::<f64>() / ds.n() as f64
}

pub fn ref_component_grad(ds: &SparseDataset, lambda: f64, i: usize, x: &[f64]) -> Vec<f64> {
    let (idx, val) = ds.row(i);
    let y = ds.label(i);
    let dot: f64 = idx.iter().zip(val).map(|(&j, &v)| v * x[j]).sum();
    // d/dz log(1 + e^{-y z}) = −y / (1 + e^{y z})
    let coef = -y / (1.0 + (y * dot).exp());
    let mut g: Vec<f64> = x
        .iter()
        .map(|&xj| lambda * xj / ((1.0 + xj * xj) * (1.0 + xj * xj)))
        .collect();
    for (&j, &v) in idx.iter().zip(val) {
        g[j] += coef * v;
    }
    g
}

pub fn ref_full_grad(ds: &SparseDataset, lambda: f64, x: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; x.len()];
    for i in 0..ds.n() {
        for (a, b) in g.iter_mut().zip(ref_component_grad(ds, lambda, i, x)) {
            *a += b;
        }
    }
    let n = ds.n() as f64;
    g.iter_mut().for_each(|a| *a /= n);
    g
}

pub fn ref_variance(ds: &SparseDataset, lambda: f64, x: &[f64]) -> f64 {
    let full = ref_full_grad(ds, lambda, x);
    (0..ds.n())
        .map(|i| {
            ref_component_grad(ds, lambda, i, x)
                .iter()
                .zip(&full)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
        })
        .sum::<f64>()
        / ds.n() as f64
}

pub fn ref_smoothness(ds: &SparseDataset, lambda: f64) -> f64 {
    (0..ds.n())
        .map(|i| ds.row(i).1.iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max)
        / 4.0
        + lambda
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Central finite-difference gradient of `f` at `x`.
pub fn fd_grad<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|j| {
            xp[j] = x[j] + h;
            let fp = f(&xp);
            xp[j] = x[j] - h;
            let fm = f(&xp);
            xp[j] = x[j];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}
