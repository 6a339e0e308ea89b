//! Monte Carlo oracle runner: seeded, brute-force sampling estimates with
//! standard errors, used to verify every closed form in the crate.
//!
//! The samplers here are deliberately independent of the library paths they
//! check: projections, permutations, and noise are drawn with plain loops,
//! not through the mechanism implementations.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::analytic::EstimatorKind;
use crate::core::RngStream;
use crate::error::{Error, Result};

/// A sampling estimate with its standard error.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Sample mean and variance of a scalar statistic.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub std_error_mean: f64,
    pub n: u64,
}

fn check_n(n: u64) -> Result<()> {
    if n < 100 {
        return Err(Error::Validation(format!(
            "oracle sample count must be at least 100, got {n}"
        )));
    }
    Ok(())
}

const CHUNK: u64 = 1 << 14;

/// Mean/variance of `f` over `n` draws, parallel over fixed-size chunks with
/// one derived stream per chunk, so the result does not depend on thread
/// scheduling.
fn sample_moments<F>(n: u64, stream: &RngStream, f: F) -> Moments
where
    F: Fn(&mut ChaCha12Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.derive(c).rng();
            let m = CHUNK.min(n - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..m {
                let x = f(&mut rng);
                s += x;
                s2 += x * x;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = sum / n as f64;
    let variance = (sum_sq / n as f64 - mean * mean).max(0.0) * n as f64 / (n - 1) as f64;
    Moments {
        mean,
        variance,
        std_error_mean: (variance / n as f64).sqrt(),
        n,
    }
}

fn frequency<F>(n: u64, stream: &RngStream, f: F) -> McEstimate
where
    F: Fn(&mut ChaCha12Rng) -> bool + Sync,
{
    let m = sample_moments(n, stream, |rng| if f(rng) { 1.0 } else { 0.0 });
    McEstimate {
        estimate: m.mean,
        std_error: (m.mean * (1.0 - m.mean) / n as f64).sqrt(),
        n,
    }
}

/// Empirical sign-collision probability of two vectors at angle `theta`
/// under one Gaussian projection per draw.
pub fn collision_probability(theta: f64, n: u64, stream: &RngStream) -> Result<McEstimate> {
    check_n(n)?;
    let (c, s) = (theta.cos(), theta.sin());
    Ok(frequency(n, stream, move |rng| {
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        // u = (1, 0), v = (cos theta, sin theta)
        (g1 >= 0.0) == (g1 * c + g2 * s >= 0.0)
    }))
}

/// Mean and variance of the plain sign-angle estimator over `reps` sketches
/// of `k` bits each.
pub fn angle_estimator_moments(
    theta: f64,
    k: usize,
    reps: u64,
    stream: &RngStream,
) -> Result<Moments> {
    check_n(reps)?;
    let (c, s) = (theta.cos(), theta.sin());
    Ok(sample_moments(reps, stream, move |rng| {
        let mut disagreements = 0u32;
        for _ in 0..k {
            let g1: f64 = StandardNormal.sample(rng);
            let g2: f64 = StandardNormal.sample(rng);
            if (g1 >= 0.0) != (g1 * c + g2 * s >= 0.0) {
                disagreements += 1;
            }
        }
        std::f64::consts::PI * disagreements as f64 / k as f64
    }))
}

/// Mean and variance of the debiased randomized-response angle estimator:
/// both sign sketches are flipped bitwise at strength `eps_prime` before
/// debiasing.
pub fn rr_angle_estimator_moments(
    theta: f64,
    k: usize,
    eps_prime: f64,
    reps: u64,
    stream: &RngStream,
) -> Result<Moments> {
    check_n(reps)?;
    let (c, s) = (theta.cos(), theta.sin());
    let flip = crate::dp_sign::flip_probability(eps_prime);
    Ok(sample_moments(reps, stream, move |rng| {
        let mut collisions = 0u32;
        for _ in 0..k {
            let g1: f64 = StandardNormal.sample(rng);
            let g2: f64 = StandardNormal.sample(rng);
            let mut collide = (g1 >= 0.0) == (g1 * c + g2 * s >= 0.0);
            let f1 = rng.random::<f64>() < flip;
            let f2 = rng.random::<f64>() < flip;
            if f1 != f2 {
                collide = !collide;
            }
            if collide {
                collisions += 1;
            }
        }
        let observed = collisions as f64 / k as f64;
        let p_clean = crate::estimators::rr_collision_unmap(observed, eps_prime);
        std::f64::consts::PI * (1.0 - p_clean)
    }))
}

/// `Pr(r * max_i |G_i| > |G'|)` for `p` iid standard Gaussians against an
/// independent one, estimated once per `r` on shared draws.
pub fn p_plus_gaussian_mc(
    rs: &[f64],
    p: usize,
    n: u64,
    stream: &RngStream,
) -> Result<Vec<McEstimate>> {
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let hits = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.derive(c).rng();
            let m = CHUNK.min(n - c * CHUNK);
            let mut counts = vec![0u64; rs.len()];
            for _ in 0..m {
                let mut max_abs = 0.0f64;
                for _ in 0..p {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    max_abs = max_abs.max(g.abs());
                }
                let y: f64 = StandardNormal.sample(&mut rng);
                let ya = y.abs();
                for (i, &r) in rs.iter().enumerate() {
                    if r * max_abs > ya {
                        counts[i] += 1;
                    }
                }
            }
            counts
        })
        .reduce(
            || vec![0u64; rs.len()],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(hits
        .into_iter()
        .map(|h| {
            let est = h as f64 / n as f64;
            McEstimate {
                estimate: est,
                std_error: (est * (1.0 - est) / n as f64).sqrt(),
                n,
            }
        })
        .collect())
}

/// `Pr(beta >= |sum_i w_i u_i|)` under Rademacher signs for a fixed data
/// vector, the quantity the central-limit form approximates.
pub fn p_plus_rademacher_mc(u: &[f64], beta: f64, n: u64, stream: &RngStream) -> Result<McEstimate> {
    check_n(n)?;
    Ok(frequency(n, stream, move |rng| {
        let mut acc = 0.0f64;
        let mut bits: u64 = 0;
        let mut left = 0u32;
        for &ui in u {
            if left == 0 {
                bits = rng.random::<u64>();
                left = 64;
            }
            if bits & 1 == 1 {
                acc += ui;
            } else {
                acc -= ui;
            }
            bits >>= 1;
            left -= 1;
        }
        beta >= acc.abs()
    }))
}

/// Empirical exceedance of a chi-square threshold (sum of `df` squared
/// standard normals).
pub fn chi_square_exceed_mc(
    df: usize,
    threshold: f64,
    n: u64,
    stream: &RngStream,
) -> Result<McEstimate> {
    check_n(n)?;
    Ok(frequency(n, stream, move |rng| {
        let mut z = 0.0f64;
        for _ in 0..df {
            let g: f64 = StandardNormal.sample(rng);
            z += g * g;
        }
        z >= threshold
    }))
}

/// Empirical exceedance of a half-normal sum threshold.
pub fn half_normal_exceed_mc(
    terms: usize,
    threshold: f64,
    n: u64,
    stream: &RngStream,
) -> Result<McEstimate> {
    check_n(n)?;
    Ok(frequency(n, stream, move |rng| {
        let mut z = 0.0f64;
        for _ in 0..terms {
            let g: f64 = StandardNormal.sample(rng);
            z += g.abs();
        }
        z >= threshold
    }))
}

/// Empirical exceedance of a binomial threshold.
pub fn binomial_exceed_mc(
    trials: usize,
    prob: f64,
    threshold: f64,
    n: u64,
    stream: &RngStream,
) -> Result<McEstimate> {
    check_n(n)?;
    Ok(frequency(n, stream, move |rng| {
        let mut x = 0u32;
        for _ in 0..trials {
            if rng.random::<f64>() < prob {
                x += 1;
            }
        }
        x as f64 >= threshold
    }))
}

fn bivariate_pair(r: f64, rho: f64, rng: &mut ChaCha12Rng) -> (f64, f64) {
    // X ~ N(0, r^2), Y ~ N(0, 1) with correlation rho (sigma_y = 1 wlog).
    let g1: f64 = StandardNormal.sample(rng);
    let g2: f64 = StandardNormal.sample(rng);
    let x = r * g1;
    let y = rho * g1 + (1.0 - rho * rho).sqrt() * g2;
    (x, y)
}

/// Empirical `Pr(|X| > |Y|)` for the correlated Gaussian pair.
pub fn abs_exceed_mc(r: f64, rho: f64, n: u64, stream: &RngStream) -> Result<McEstimate> {
    check_n(n)?;
    Ok(frequency(n, stream, move |rng| {
        let (x, y) = bivariate_pair(r, rho, rng);
        x.abs() > y.abs()
    }))
}

/// Empirical `E[|X| | |X| > |Y|]` for the correlated Gaussian pair.
pub fn conditional_abs_expectation_mc(
    r: f64,
    rho: f64,
    n: u64,
    stream: &RngStream,
) -> Result<Moments> {
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let (sum, sum_sq, count) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.derive(c).rng();
            let m = CHUNK.min(n - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            let mut cnt = 0u64;
            for _ in 0..m {
                let (x, y) = bivariate_pair(r, rho, &mut rng);
                if x.abs() > y.abs() {
                    s += x.abs();
                    s2 += x * x;
                    cnt += 1;
                }
            }
            (s, s2, cnt)
        })
        .reduce(|| (0.0, 0.0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    if count < 100 {
        return Err(Error::Validation(
            "conditioning event too rare for the requested sample size".into(),
        ));
    }
    let mean = sum / count as f64;
    let variance = (sum_sq / count as f64 - mean * mean).max(0.0);
    Ok(Moments {
        mean,
        variance,
        std_error_mean: (variance / count as f64).sqrt(),
        n: count,
    })
}

/// Empirical `Pr(|X| > t | |X| > |Y|)`.
pub fn conditional_tail_mc(
    r: f64,
    rho: f64,
    t: f64,
    n: u64,
    stream: &RngStream,
) -> Result<McEstimate> {
    check_n(n)?;
    let chunks = n.div_ceil(CHUNK);
    let (hits, count) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.derive(c).rng();
            let m = CHUNK.min(n - c * CHUNK);
            let mut h = 0u64;
            let mut cnt = 0u64;
            for _ in 0..m {
                let (x, y) = bivariate_pair(r, rho, &mut rng);
                if x.abs() > y.abs() {
                    cnt += 1;
                    if x.abs() > t {
                        h += 1;
                    }
                }
            }
            (h, cnt)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if count < 100 {
        return Err(Error::Validation(
            "conditioning event too rare for the requested sample size".into(),
        ));
    }
    let est = hits as f64 / count as f64;
    Ok(McEstimate {
        estimate: est,
        std_error: (est * (1.0 - est) / count as f64).sqrt(),
        n: count,
    })
}

/// Draws of the inner-product estimator `sum_j (x_j + a_j)(y_j + b_j)` with
/// a fresh projection and fresh noise per repetition.
pub fn estimator_moments(
    kind: EstimatorKind,
    u: &[f64],
    v: &[f64],
    k: usize,
    sigma: f64,
    reps: u64,
    stream: &RngStream,
) -> Result<Moments> {
    check_n(reps)?;
    if u.len() != v.len() {
        return Err(Error::Dimension("u and v lengths differ".into()));
    }
    let p = u.len();
    Ok(sample_moments(reps, stream, move |rng| {
        let (xs, ys): (Vec<f64>, Vec<f64>) = match kind {
            EstimatorKind::Raw => (u.to_vec(), v.to_vec()),
            EstimatorKind::Rp => {
                let scale = 1.0 / (k as f64).sqrt();
                let mut xs = vec![0.0; k];
                let mut ys = vec![0.0; k];
                for i in 0..p {
                    for j in 0..k {
                        let w: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
                        xs[j] += w * u[i];
                        ys[j] += w * v[i];
                    }
                }
                for j in 0..k {
                    xs[j] *= scale;
                    ys[j] *= scale;
                }
                (xs, ys)
            }
            EstimatorKind::Oporp => {
                // Fisher-Yates permutation, fixed-length bins, Rademacher
                // weights; all drawn inline.
                let mut perm: Vec<u32> = (0..p as u32).collect();
                for i in (1..p).rev() {
                    let j = rng.random_range(0..=i);
                    perm.swap(i, j);
                }
                let bin_len = p.div_ceil(k);
                let mut xs = vec![0.0; k];
                let mut ys = vec![0.0; k];
                for i in 0..p {
                    let w: f64 = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    let b = perm[i] as usize / bin_len;
                    xs[b] += w * u[i];
                    ys[b] += w * v[i];
                }
                (xs, ys)
            }
        };
        let mut g = 0.0;
        for (x, y) in xs.iter().zip(&ys) {
            let a: f64 = StandardNormal.sample(rng);
            let b: f64 = StandardNormal.sample(rng);
            g += (x + sigma * a) * (y + sigma * b);
        }
        g
    }))
}

/// Per-trial count of projections whose sign a worst-case neighbor could
/// change, over fresh Gaussian matrices: the frequency with which the count
/// exceeds `bound`.
pub fn n_plus_exceed_mc(
    p: usize,
    k: usize,
    beta: f64,
    norm: f64,
    bound: usize,
    trials: u64,
    stream: &RngStream,
) -> Result<McEstimate> {
    check_n(trials)?;
    // Direction does not matter for the bound; constant entries at the
    // requested norm keep the data in a [-C, C] box.
    let entry = norm / (p as f64).sqrt();
    Ok(frequency(trials, stream, move |rng| {
        let mut count = 0usize;
        for _ in 0..k {
            let mut dot = 0.0f64;
            let mut max_abs = 0.0f64;
            for _ in 0..p {
                let w: f64 = StandardNormal.sample(rng);
                dot += w * entry;
                max_abs = max_abs.max(w.abs());
            }
            if beta * max_abs >= dot.abs() {
                count += 1;
            }
        }
        count > bound
    }))
}
