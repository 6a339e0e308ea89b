//! Closed-form and numerically evaluated quantities: tail bounds, the sign
//! change probability `P+` and its count bound `N+`, bivariate-normal
//! conditional quantities, and estimator variance formulas.
//!
//! Everything here is a pure function of its arguments.

mod normal;
mod quad;

pub use normal::{
    erf, ln_normal_cdf, ln_two_phi_minus_one, normal_cdf, normal_pdf, two_phi_minus_one,
};
pub use quad::integrate;

use crate::core::DataVector;
use crate::error::{Error, Result};

/// A tail bound: `Pr(Z >= threshold) <= bound`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBound {
    pub threshold: f64,
    pub bound: f64,
}

/// Chi-square tail: for `Z` a sum of `n` squared iid standard Gaussians,
/// `Pr(Z >= n + 2 sqrt(n t) + 2 t) <= exp(-t)`.
pub fn chi_square_tail(n: u64, t: f64) -> Result<TailBound> {
    if n == 0 {
        return Err(Error::Domain("chi_square_tail requires n >= 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain("chi_square_tail requires t > 0".into()));
    }
    let nf = n as f64;
    Ok(TailBound {
        threshold: nf + 2.0 * (nf * t).sqrt() + 2.0 * t,
        bound: (-t).exp(),
    })
}

/// Half-normal tail: for `Z` a sum of `n` iid |N(0,1)| variables,
/// `Pr(Z >= sqrt(2 n^2 log 2 + 2 n t)) <= exp(-t)`.
pub fn half_normal_tail(n: u64, t: f64) -> Result<TailBound> {
    if n == 0 {
        return Err(Error::Domain("half_normal_tail requires n >= 1".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain("half_normal_tail requires t > 0".into()));
    }
    let nf = n as f64;
    Ok(TailBound {
        threshold: (2.0 * nf * nf * std::f64::consts::LN_2 + 2.0 * nf * t).sqrt(),
        bound: (-t).exp(),
    })
}

/// Chernoff bound for `X ~ Binomial(n, p)` with mean `mu = n p`:
/// `Pr(X >= (1 + eta) mu) <= exp(-eta^2 mu / (eta + 2))`.
pub fn binomial_tail(n: u64, p: f64, eta: f64) -> Result<TailBound> {
    if n == 0 {
        return Err(Error::Domain("binomial_tail requires n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain("binomial_tail requires p in [0, 1]".into()));
    }
    if !(eta >= 0.0) {
        return Err(Error::Domain("binomial_tail requires eta >= 0".into()));
    }
    let mu = n as f64 * p;
    Ok(TailBound {
        threshold: (1.0 + eta) * mu,
        bound: (-(eta * eta * mu) / (eta + 2.0)).exp(),
    })
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho.abs() < 1.0) {
        return Err(Error::Domain(format!("|rho| must be < 1, got {rho}")));
    }
    Ok(())
}

/// For a centered bivariate normal pair `(X, Y)` with `r = sigma_x / sigma_y`
/// and correlation `rho`:
/// `Pr(|X| > |Y|) = (1/pi) [atan((r - rho)/sqrt(1 - rho^2))
///                        + atan((r + rho)/sqrt(1 - rho^2))]`.
pub fn abs_exceed_prob(r: f64, rho: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("abs_exceed_prob requires r > 0".into()));
    }
    check_rho(rho)?;
    let s = (1.0 - rho * rho).sqrt();
    Ok((((r - rho) / s).atan() + ((r + rho) / s).atan()) / std::f64::consts::PI)
}

/// Conditional expectation `E[|X| given |X| > |Y|]` for the same pair.
pub fn conditional_abs_expectation(r: f64, rho: f64, sigma_x: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("conditional_abs_expectation requires r > 0".into()));
    }
    if !(sigma_x > 0.0) {
        return Err(Error::Domain("sigma_x must be positive".into()));
    }
    check_rho(rho)?;
    let s = (1.0 - rho * rho).sqrt();
    let numer = (r - rho) / (1.0 + r * r - 2.0 * r * rho).sqrt()
        + (r + rho) / (1.0 + r * r + 2.0 * r * rho).sqrt();
    let denom = ((r - rho) / s).atan() + ((r + rho) / s).atan();
    Ok(sigma_x * (std::f64::consts::PI / 2.0).sqrt() * numer / denom)
}

/// Conditional tail: `Pr(|X| > t given |X| > |Y|) <= exp(-t^2 / (2 sigma_x^2))`.
pub fn conditional_tail_bound(t: f64, sigma_x: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain("t must be nonnegative".into()));
    }
    if !(sigma_x > 0.0) {
        return Err(Error::Domain("sigma_x must be positive".into()));
    }
    Ok((-(t * t) / (2.0 * sigma_x * sigma_x)).exp())
}

/// Probability that the largest of `p` iid |N(0,1)| magnitudes exceeds an
/// independent |N(0, 1/r^2)| magnitude:
/// `P+(r, p) = Int_0^inf  2 p [2 Phi(t) - 1]^(p-1) [2 Phi(r t) - 1] phi(t) dt`.
///
/// Evaluated by adaptive composite Gauss-Legendre on `[0, T]` with
/// `T = sqrt(2 log p) + 10` (the max of `p` half-normals concentrates at
/// `sqrt(2 log p)`), residual tolerance 1e-8. Increasing in both `r` and `p`.
pub fn p_plus_gaussian(r: f64, p: u64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("p_plus_gaussian requires 0 < r <= 1, got {r}")));
    }
    if p == 0 {
        return Err(Error::Domain("p_plus_gaussian requires p >= 1".into()));
    }
    let pf = p as f64;
    let upper = (2.0 * pf.ln().max(0.0)).sqrt() + 10.0;
    let integrand = move |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let log_base = ln_two_phi_minus_one(t);
        let power = ((pf - 1.0) * log_base).exp();
        2.0 * pf * power * two_phi_minus_one(r * t) * normal_pdf(t)
    };
    let v = integrate(integrand, 0.0, upper, 1e-8)?;
    Ok(v.clamp(0.0, 1.0))
}

/// Central-limit approximation of the sign change probability under a
/// Rademacher projection vector: `2 Phi(r) - 1` with `r = beta / ||u||`,
/// independent of the dimension. The approximation degrades for very small
/// dimension; `small_p` flags `p < 20`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PPlusApprox {
    pub value: f64,
    pub small_p: bool,
}

pub fn p_plus_rademacher(r: f64, p: u64) -> Result<PPlusApprox> {
    if !(r > 0.0) {
        return Err(Error::Domain("p_plus_rademacher requires r > 0".into()));
    }
    Ok(PPlusApprox {
        value: two_phi_minus_one(r),
        small_p: p < 20,
    })
}

/// Which `P+` evaluation backs an `N+` bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum PPlusFlavor {
    Gaussian,
    Rademacher,
}

/// High-probability bound on the number of projected signs (out of `k`) a
/// single beta-adjacent change can affect:
/// `N+ = min{ F k + (1/2)[L + sqrt(L^2 + 8 F k L)], k }` with `L = log(1/delta)`
/// and `F = P+(beta/||u||, p)`, rounded up to an integer. Requires
/// `beta <= norm_u`; callers that allow smaller norms fall back to `k`.
pub fn n_plus_bound(
    norm_u: f64,
    beta: f64,
    delta: f64,
    k: usize,
    p: usize,
    flavor: PPlusFlavor,
) -> Result<usize> {
    if !(norm_u > 0.0) || !(beta > 0.0) {
        return Err(Error::Domain("norm_u and beta must be positive".into()));
    }
    if beta > norm_u {
        return Err(Error::Domain(format!(
            "n_plus_bound requires beta <= ||u|| (beta = {beta}, ||u|| = {norm_u})"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain("n_plus_bound requires 0 < delta < 1".into()));
    }
    if k == 0 || p == 0 {
        return Err(Error::Domain("k and p must be >= 1".into()));
    }
    let r = beta / norm_u;
    let f = match flavor {
        PPlusFlavor::Gaussian => p_plus_gaussian(r, p as u64)?,
        PPlusFlavor::Rademacher => p_plus_rademacher(r, p as u64)?.value,
    };
    let kf = k as f64;
    let l = (1.0 / delta).ln();
    let raw = f * kf + 0.5 * (l + (l * l + 8.0 * f * kf * l).sqrt());
    let capped = raw.min(kf).ceil() as usize;
    Ok(capped.min(k).max(1))
}

/// Variance of the sign-collision angle estimator: `theta (pi - theta) / k`.
pub fn signrp_angle_variance(theta: f64, k: usize) -> f64 {
    theta * (std::f64::consts::PI - theta) / k as f64
}

/// Asymptotic variance of the debiased randomized-response angle estimator
/// over `k` bits:
/// `[theta (pi - theta) + 2 pi^2 e / (e - 1)^2 + 4 pi^2 e^2 / (e - 1)^4] / k`
/// with `e = exp(eps_prime)`.
pub fn rr_angle_variance(theta: f64, k: usize, eps_prime: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let e = eps_prime.exp();
    let d = e - 1.0;
    let v = theta * (pi - theta) + 2.0 * pi * pi * e / (d * d)
        + 4.0 * pi * pi * e * e / (d * d * d * d);
    v / k as f64
}

/// Which inner-product estimator a variance formula describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Noisy raw vectors, length p.
    Raw,
    /// Dense Rademacher projection sketches, length k.
    Rp,
    /// OPORP count-sketch, length k.
    Oporp,
}

/// Closed-form variance of the inner-product estimator `sum x~_j y~_j` when
/// each sketch coordinate carries independent `N(0, sigma^2)` noise.
pub fn inner_product_variance(
    kind: EstimatorKind,
    u: &DataVector,
    v: &DataVector,
    k: usize,
    sigma: f64,
) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::Dimension(format!(
            "u has dim {}, v has dim {}",
            u.dim(),
            v.dim()
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::Domain("sigma must be nonnegative".into()));
    }
    let p = u.dim();
    let su2: f64 = u.values().iter().map(|x| x * x).sum();
    let sv2: f64 = v.values().iter().map(|x| x * x).sum();
    let suv: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
    let su2v2: f64 = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| a * a * b * b)
        .sum();
    let s2 = sigma * sigma;
    let s4 = s2 * s2;
    match kind {
        EstimatorKind::Raw => Ok(s2 * (su2 + sv2) + p as f64 * s4),
        EstimatorKind::Rp | EstimatorKind::Oporp => {
            if k == 0 {
                return Err(Error::Domain("k must be >= 1".into()));
            }
            if kind == EstimatorKind::Oporp && k > p {
                return Err(Error::Dimension(format!("oporp requires k <= p (k = {k}, p = {p})")));
            }
            let kf = k as f64;
            let geom = (su2 * sv2 + suv * suv - 2.0 * su2v2) / kf;
            let factor = match kind {
                EstimatorKind::Rp => 1.0,
                EstimatorKind::Oporp => {
                    if p > 1 {
                        (p - k) as f64 / (p - 1) as f64
                    } else {
                        0.0
                    }
                }
                EstimatorKind::Raw => unreachable!(),
            };
            Ok(s2 * (su2 + sv2) + kf * s4 + geom * factor)
        }
    }
}

/// Ratio of raw-noise variance to projected-noise variance for unit-norm
/// data: `R = (2 sigma^2 + p sigma^4) / (2 sigma^2 + k sigma^4 + 1/k)`.
pub fn variance_ratio(p: usize, k: usize, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let s4 = s2 * s2;
    (2.0 * s2 + p as f64 * s4) / (2.0 * s2 + k as f64 * s4 + 1.0 / k as f64)
}

/// Order-of-magnitude guide for the variance-minimizing sketch length of the
/// randomized-response angle estimator: `k* ~ eps theta (pi - theta) / F`.
/// Asymptotic, not exact.
pub fn optimal_k_star(theta: f64, epsilon: f64, f_plus: f64) -> Result<f64> {
    if !(f_plus > 0.0) {
        return Err(Error::Domain("optimal_k_star requires F > 0".into()));
    }
    Ok(epsilon * theta * (std::f64::consts::PI - theta) / f_plus)
}
