//! Noise calibration: sensitivities, the classic and optimal Gaussian
//! mechanisms, the Laplace mechanism, and budget composition.
//!
//! The optimal Gaussian scale follows the analytic calibration of
//! Balle & Wang (2018): the smallest sigma satisfying
//! `Phi(D/(2 sigma) - eps sigma / D) - e^eps Phi(-D/(2 sigma) - eps sigma / D) = delta`
//! found by bisection, which is justified because the left side is strictly
//! decreasing in sigma.

use crate::analytic::{ln_normal_cdf, normal_cdf};
use crate::error::{Error, Result};
use crate::projections::DenseMatrix;

/// How a sensitivity value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum SensitivityBasis {
    /// Max row norms of a realized projection matrix.
    ExactFromMatrix,
    /// Deterministic row norms (Rademacher projections, OPORP, raw data).
    ClosedForm,
    /// High-probability bound holding up to the stated delta share.
    HighProbabilityBound { delta_share: f64 },
}

/// l1/l2 sensitivities of a projection under single-coordinate adjacency.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Sensitivity {
    pub l1: f64,
    pub l2: f64,
    pub basis: SensitivityBasis,
}

/// Exact sensitivities of `u -> (1/sqrt k) W^T u`: the largest row l1/l2
/// norm of `W`, scaled by `beta / sqrt(k)`.
///
/// Row l2 norms are computed as `beta * sqrt(sum_j w_ij^2 / k)` so that
/// Rademacher matrices yield `l2 = beta` bit-exactly.
pub fn sensitivity_from_matrix(w: &DenseMatrix, beta: f64) -> Result<Sensitivity> {
    if w.p() == 0 || w.k() == 0 {
        return Err(Error::Dimension("empty projection matrix".into()));
    }
    if !(beta > 0.0) {
        return Err(Error::Domain("beta must be positive".into()));
    }
    let k = w.k() as f64;
    let mut max_sq = 0.0f64;
    let mut max_l1 = 0.0f64;
    for i in 0..w.p() {
        let row = w.row(i);
        let sq: f64 = row.iter().map(|x| x * x).sum();
        let l1: f64 = row.iter().map(|x| x.abs()).sum();
        max_sq = max_sq.max(sq);
        max_l1 = max_l1.max(l1);
    }
    Ok(Sensitivity {
        l1: beta * max_l1 / k.sqrt(),
        l2: beta * (max_sq / k).sqrt(),
        basis: SensitivityBasis::ExactFromMatrix,
    })
}

/// High-probability bound on the l2 sensitivity of a Gaussian projection
/// matrix: `beta sqrt(1 + 2 sqrt(log(p/delta)/k) + 2 log(p/delta)/k)`,
/// exceeded with probability at most `delta_share`.
pub fn sensitivity_l2_bound(p: usize, k: usize, beta: f64, delta_share: f64) -> Result<f64> {
    if p == 0 || k == 0 {
        return Err(Error::Domain("p and k must be >= 1".into()));
    }
    if !(delta_share > 0.0 && delta_share < 1.0) {
        return Err(Error::Domain("delta share must lie in (0, 1)".into()));
    }
    let l = (p as f64 / delta_share).ln() / k as f64;
    Ok(beta * (1.0 + 2.0 * l.sqrt() + 2.0 * l).sqrt())
}

/// High-probability bound on the l1 sensitivity of a Gaussian projection
/// matrix: `beta sqrt(2 k log 2 + 2 log(p/delta))`.
pub fn sensitivity_l1_bound(p: usize, k: usize, beta: f64, delta_share: f64) -> Result<f64> {
    if p == 0 || k == 0 {
        return Err(Error::Domain("p and k must be >= 1".into()));
    }
    if !(delta_share > 0.0 && delta_share < 1.0) {
        return Err(Error::Domain("delta share must lie in (0, 1)".into()));
    }
    Ok(beta
        * (2.0 * k as f64 * std::f64::consts::LN_2 + 2.0 * (p as f64 / delta_share).ln()).sqrt())
}

/// A calibrated noise distribution together with the budget it buys.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum NoiseDistribution {
    Gaussian,
    Laplace,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NoiseCalibration {
    pub distribution: NoiseDistribution,
    /// sigma for Gaussian, lambda for Laplace.
    pub scale: f64,
    pub epsilon: f64,
    pub delta: f64,
    /// The sensitivity the scale was calibrated against.
    pub sensitivity: f64,
}

/// Classic Gaussian mechanism scale,
/// `sigma = delta2 sqrt(2 (log(1/delta) + eps)) / eps`; valid for
/// `0 < delta < 1/2`.
pub fn classic_gaussian_sigma(delta2: f64, eps: f64, delta: f64) -> Result<f64> {
    if !(delta2 > 0.0) {
        return Err(Error::Domain("sensitivity must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    if !(delta > 0.0 && delta < 0.5) {
        return Err(Error::Validation(
            "delta out of range for classic mechanism (requires 0 < delta < 1/2)".into(),
        ));
    }
    Ok(delta2 * (2.0 * ((1.0 / delta).ln() + eps)).sqrt() / eps)
}

/// Left side of the optimal-calibration equation minus delta, as a function
/// of `x = sigma / delta2`. Strictly decreasing in `x`. The `e^eps Phi(b)`
/// product is evaluated in log space so large epsilon cannot overflow.
fn optimal_equation_residual(x: f64, eps: f64, delta: f64) -> f64 {
    let a = 0.5 / x - eps * x;
    let b = -0.5 / x - eps * x;
    let log_term = eps + ln_normal_cdf(b);
    let term = if log_term > 700.0 {
        f64::INFINITY
    } else {
        log_term.exp()
    };
    normal_cdf(a) - term - delta
}

/// Exact-tail check of a Gaussian scale: returns
/// `Phi(d/(2 sigma) - eps sigma/d) - e^eps Phi(-d/(2 sigma) - eps sigma/d) - delta`
/// for sensitivity `d`. Zero at the optimal scale; negative means the scale
/// over-delivers.
pub fn optimal_gaussian_residual(delta2: f64, eps: f64, delta: f64, sigma: f64) -> f64 {
    optimal_equation_residual(sigma / delta2, eps, delta)
}

const OPT_TOL: f64 = 1e-12;
const OPT_MAX_ITER: usize = 200;

/// Optimal Gaussian mechanism scale: the root of the exact-tail equation.
///
/// Solved by bisection on `sigma / delta2` (the equation depends on the
/// ratio only, so the result is exactly linear in `delta2`). The initial
/// upper bracket is the classic scale plus one, which always over-delivers;
/// when the classic formula does not apply (`delta >= 1/2`) the bracket is
/// grown by doubling.
pub fn optimal_gaussian_sigma(delta2: f64, eps: f64, delta: f64) -> Result<f64> {
    if !(delta2 > 0.0) {
        return Err(Error::Domain("sensitivity must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain("optimal mechanism requires 0 < delta < 1".into()));
    }

    let mut lo = 1e-6;
    if optimal_equation_residual(lo, eps, delta) < 0.0 {
        // Already below delta at a negligible scale; shrink further.
        lo = 1e-12;
        if optimal_equation_residual(lo, eps, delta) < 0.0 {
            return Ok(lo * delta2);
        }
    }
    let mut hi = if delta < 0.5 {
        (2.0 * ((1.0 / delta).ln() + eps)).sqrt() / eps + 1.0
    } else {
        1.0
    };
    let mut grow = 0;
    while optimal_equation_residual(hi, eps, delta) > 0.0 {
        hi *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(Error::Calibration(
                "could not bracket the optimal Gaussian scale".into(),
            ));
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..OPT_MAX_ITER {
        let r = optimal_equation_residual(x, eps, delta);
        if r.abs() < OPT_TOL {
            return Ok(x * delta2);
        }
        if r > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        x = 0.5 * (lo + hi);
    }
    let r = optimal_equation_residual(x, eps, delta);
    if r.abs() < OPT_TOL {
        Ok(x * delta2)
    } else {
        Err(Error::Calibration(format!(
            "optimal Gaussian scale did not converge (residual {r:.3e})"
        )))
    }
}

/// Gaussian scale for Gaussian-matrix projections calibrated from parameters
/// only: the l2-sensitivity bound at delta/2 fed to the classic mechanism at
/// delta/2. Usually slightly larger than calibrating against the realized
/// matrix.
pub fn analytic_rp_gaussian_sigma(
    p: usize,
    k: usize,
    beta: f64,
    eps: f64,
    delta: f64,
) -> Result<f64> {
    let bound = sensitivity_l2_bound(p, k, beta, delta / 2.0)?;
    classic_gaussian_sigma(bound, eps, delta / 2.0)
}

/// Laplace mechanism scale `lambda = delta1 / eps`.
pub fn laplace_lambda(delta1: f64, eps: f64) -> Result<f64> {
    if !(delta1 > 0.0) {
        return Err(Error::Domain("sensitivity must be positive".into()));
    }
    if !(eps > 0.0) {
        return Err(Error::Domain("epsilon must be positive".into()));
    }
    Ok(delta1 / eps)
}

/// Sequential composition: budgets add in both components.
pub fn compose(budgets: &[(f64, f64)]) -> (f64, f64) {
    budgets
        .iter()
        .fold((0.0, 0.0), |(e, d), &(ei, di)| (e + ei, d + di))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::RngStream;
    use crate::projections::{materialize, ProjectionKind, ProjectionOp, ProjectionSpec};
    use approx::assert_relative_eq;

    fn dense(kind: ProjectionKind, p: usize, k: usize, seed: u64) -> DenseMatrix {
        let spec = ProjectionSpec { kind, p, k, seed };
        match materialize(&spec).unwrap() {
            ProjectionOp::Dense { matrix, .. } => matrix,
            _ => unreachable!(),
        }
    }

    #[test]
    fn rademacher_sensitivities_are_deterministic() {
        for &(p, k) in &[(16usize, 4usize), (64, 16), (100, 7), (33, 32)] {
            let m = dense(ProjectionKind::VerySparse { s: 1.0 }, p, k, 9);
            let s = sensitivity_from_matrix(&m, 1.0).unwrap();
            assert_eq!(s.l2, 1.0, "Delta2 must equal beta exactly at p={p}, k={k}");
            assert_relative_eq!(s.l1, (k as f64).sqrt(), max_relative = 1e-12);
        }
        let m = dense(ProjectionKind::VerySparse { s: 1.0 }, 16, 4, 9);
        let s = sensitivity_from_matrix(&m, 2.5).unwrap();
        assert_eq!(s.l2, 2.5);
    }

    #[test]
    fn identity_like_matrix_sensitivity() {
        // One nonzero entry per row: Delta1 = Delta2 = beta / sqrt(k).
        let k = 8;
        let m = DenseMatrix::from_entries(8, k, {
            let mut e = vec![0.0; 64];
            for i in 0..8 {
                e[i * k + i] = 1.0;
            }
            e
        });
        let s = sensitivity_from_matrix(&m, 2.0).unwrap();
        assert_relative_eq!(s.l1, 2.0 / (k as f64).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(s.l2, 2.0 / (k as f64).sqrt(), max_relative = 1e-14);
        assert!(s.l2 <= s.l1 + 1e-15);
    }

    #[test]
    fn l2_bound_limit_and_substitution() {
        // log(p/delta)/k -> 0 drives the bound to beta.
        let b = sensitivity_l2_bound(2, 1 << 30, 1.0, 0.5).unwrap();
        assert!((b - 1.0).abs() < 1e-3);
        let l = (1024.0f64 * 1e6).ln() / 512.0;
        assert_relative_eq!(
            sensitivity_l2_bound(1024, 512, 1.0, 1e-6).unwrap(),
            (1.0 + 2.0 * l.sqrt() + 2.0 * l).sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn l1_bound_substitution() {
        let expect = (2.0 * 512.0 * std::f64::consts::LN_2 + 2.0 * (1024.0f64 * 1e6).ln()).sqrt();
        assert_relative_eq!(
            sensitivity_l1_bound(1024, 512, 1.0, 1e-6).unwrap(),
            expect,
            max_relative = 1e-14
        );
        // Large-k limit: the k log 2 term dominates.
        let b = sensitivity_l1_bound(16, 1 << 20, 1.0, 1e-3).unwrap();
        assert_relative_eq!(
            b,
            (2.0 * (1 << 20) as f64 * std::f64::consts::LN_2).sqrt(),
            max_relative = 1e-3
        );
    }

    #[test]
    fn sampled_gaussian_matrices_respect_l2_bound() {
        let (p, k) = (256, 64);
        let delta = 0.05;
        let bound = sensitivity_l2_bound(p, k, 1.0, delta).unwrap();
        let trials = 400;
        let mut exceed = 0;
        for t in 0..trials {
            let m = dense(ProjectionKind::Gaussian, p, k, 1000 + t);
            let s = sensitivity_from_matrix(&m, 1.0).unwrap();
            if s.l2 >= bound {
                exceed += 1;
            }
        }
        // Expected exceedance <= delta * trials = 20; allow 3-sigma slack.
        let slack = 3.0 * (trials as f64 * delta * (1.0 - delta)).sqrt();
        assert!(
            (exceed as f64) <= trials as f64 * delta + slack,
            "exceeded in {exceed}/{trials} trials"
        );
        let _ = RngStream::from_seed(0); // silence unused import on some paths
    }

    #[test]
    fn classic_sigma_anchors() {
        assert_relative_eq!(
            classic_gaussian_sigma(1.0, 1.0, (-1.0f64).exp()).unwrap(),
            2.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            classic_gaussian_sigma(2.0, 1.0, (-1.0f64).exp()).unwrap(),
            4.0,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            classic_gaussian_sigma(1.0, 10.0, 1e-6).unwrap(),
            (2.0 * ((1e6f64).ln() + 10.0)).sqrt() / 10.0,
            max_relative = 1e-12
        );
        assert!((classic_gaussian_sigma(1.0, 10.0, 1e-6).unwrap() - 0.6902).abs() < 1e-3);
        assert!(classic_gaussian_sigma(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn optimal_sigma_residual_and_dominance() {
        for &eps in &[0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
            for &delta in &[1e-6, 1e-3] {
                let sigma = optimal_gaussian_sigma(1.0, eps, delta).unwrap();
                let r = optimal_gaussian_residual(1.0, eps, delta, sigma);
                assert!(
                    r.abs() < 1e-12,
                    "residual {r:.2e} at eps={eps}, delta={delta}"
                );
                let classic = classic_gaussian_sigma(1.0, eps, delta).unwrap();
                assert!(sigma < classic, "eps={eps}, delta={delta}");
            }
        }
    }

    #[test]
    fn optimal_sigma_scales_exactly_with_sensitivity() {
        let a = optimal_gaussian_sigma(1.0, 1.0, 1e-6).unwrap();
        let b = optimal_gaussian_sigma(2.0, 1.0, 1e-6).unwrap();
        assert_eq!(b, 2.0 * a);
    }

    #[test]
    fn optimal_equation_is_strictly_decreasing_in_sigma() {
        // Grid stops before the deep tail where both Phi terms underflow and
        // the residual flattens at exactly -delta.
        for &eps in &[0.5, 2.0, 10.0] {
            let mut last = f64::INFINITY;
            for i in 1..=12 {
                let x = 0.05 * i as f64;
                let v = optimal_equation_residual(x, eps, 1e-4);
                assert!(v < last, "not decreasing at x = {x}, eps = {eps}");
                last = v;
            }
        }
    }

    #[test]
    fn optimal_sigma_large_eps_behavior() {
        let s10 = optimal_gaussian_sigma(1.0, 10.0, 1e-6).unwrap();
        let s100 = optimal_gaussian_sigma(1.0, 100.0, 1e-6).unwrap();
        assert!(s100 < s10);
        // sigma * sqrt(eps) stays bounded as eps grows.
        let mut scaled = Vec::new();
        for &eps in &[10.0, 30.0, 100.0, 300.0, 1000.0] {
            let s = optimal_gaussian_sigma(1.0, eps, 1e-6).unwrap();
            scaled.push(s * eps.sqrt());
        }
        for w in scaled.windows(2) {
            assert!(w[1] < w[0] * 1.5, "sigma sqrt(eps) blew up: {scaled:?}");
        }
        assert!(scaled.iter().all(|v| *v < 10.0));
    }

    #[test]
    fn optimal_sigma_accepts_large_delta() {
        // The classic formula rejects delta >= 1/2; the optimal one covers it.
        let s = optimal_gaussian_sigma(1.0, 1.0, 0.6).unwrap();
        assert!(s > 0.0);
        assert!(optimal_gaussian_residual(1.0, 1.0, 0.6, s).abs() < 1e-12);
    }

    #[test]
    fn laplace_anchors() {
        assert_eq!(laplace_lambda(1.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(
            laplace_lambda(256.0f64.sqrt(), 10.0).unwrap(),
            1.6,
            max_relative = 1e-14
        );
        let a = laplace_lambda(1.0, 2.0).unwrap();
        let b = laplace_lambda(3.0, 2.0).unwrap();
        assert_relative_eq!(b, 3.0 * a, max_relative = 1e-14);
    }

    #[test]
    fn composition_sums() {
        assert_eq!(compose(&[(1.0, 0.0), (1.0, 0.0)]), (2.0, 0.0));
        let t = 8;
        let parts: Vec<(f64, f64)> = (0..t).map(|_| (1.0 / t as f64, 1e-6 / t as f64)).collect();
        let (e, d) = compose(&parts);
        assert_relative_eq!(e, 1.0, max_relative = 1e-12);
        assert_relative_eq!(d, 1e-6, max_relative = 1e-12);
        let (e, d) = compose(&[(0.5, 1e-7), (1.5, 1e-7)]);
        assert_relative_eq!(e, 2.0, max_relative = 1e-14);
        assert_relative_eq!(d, 2e-7, max_relative = 1e-14);
    }

    #[test]
    fn analytic_rp_sigma_exceeds_exact_calibration() {
        let (p, k) = (128, 32);
        let eps = 2.0;
        let delta = 1e-4;
        let analytic = analytic_rp_gaussian_sigma(p, k, 1.0, eps, delta).unwrap();
        let mut larger = 0;
        let trials = 200;
        for t in 0..trials {
            let m = dense(ProjectionKind::Gaussian, p, k, 7000 + t);
            let s = sensitivity_from_matrix(&m, 1.0).unwrap();
            let exact = classic_gaussian_sigma(s.l2, eps, delta).unwrap();
            if analytic >= exact {
                larger += 1;
            }
        }
        assert!(larger == trials, "analytic sigma smaller in {} trials", trials - larger);
    }
}
