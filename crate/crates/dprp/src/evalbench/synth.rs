//! Synthetic benchmark data: rows uniform on the sphere, scaled to a cycle
//! of norms. Exercises the norm dependence of the sign-change machinery
//! without shipping external datasets.

use rand_distr::{Distribution, StandardNormal};

use crate::core::{Dataset, RngStream};
use crate::error::Result;

/// Raw entries uniform in `[-scale, scale]`.
pub fn uniform_values(p: usize, scale: f64, stream: &RngStream) -> Vec<f64> {
    use rand::Rng;
    let mut rng = stream.rng();
    (0..p).map(|_| rng.random_range(-scale..scale)).collect()
}

/// Two unit vectors with inner product `rho`, for synthetic estimator
/// checks at a chosen similarity.
pub fn unit_pair_with_cosine(p: usize, rho: f64, stream: &RngStream) -> (Vec<f64>, Vec<f64>) {
    assert!(rho.abs() < 1.0, "rho must lie in (-1, 1)");
    let mut rng = stream.rng();
    let mut u: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut w: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut u {
        *x /= nu;
    }
    let dot: f64 = u.iter().zip(&w).map(|(a, b)| a * b).sum();
    for i in 0..p {
        w[i] -= dot * u[i];
    }
    let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let s = (1.0 - rho * rho).sqrt();
    let v: Vec<f64> = (0..p).map(|i| rho * u[i] + s * w[i] / nw).collect();
    (u, v)
}

/// `n` rows in dimension `p`, uniform directions, row `i` scaled to
/// `norms[i % norms.len()]`. The dataset bound is `max(1, max |entry|)`.
pub fn sphere_dataset(p: usize, n: usize, norms: &[f64], stream: &RngStream) -> Result<Dataset> {
    assert!(!norms.is_empty(), "at least one norm is required");
    let mut rows = Vec::with_capacity(n);
    let mut max_abs = 0.0f64;
    for i in 0..n {
        let mut rng = stream.derive(i as u64).rng();
        let mut row: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let target = norms[i % norms.len()];
        for v in &mut row {
            *v *= target / norm;
            max_abs = max_abs.max(v.abs());
        }
        rows.push(row);
    }
    Dataset::new(rows, max_abs.max(1.0))
}
