//! Similarity recovery from sketches: inner product and cosine from real
//! sketches, angle from sign sketches, and the debiased angle from
//! randomized-response sketches, each with a theoretical variance attached
//! where a closed form exists.

use std::f64::consts::PI;

use crate::analytic::{rr_angle_variance, signrp_angle_variance};
use crate::error::{Error, Result};
use crate::projections::{ProjectionKind, Sketch};

/// A point estimate plus its variance prediction. The variance is a plug-in
/// evaluated at the estimate itself; `None` when no closed form applies.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub estimate: f64,
    pub theoretical_variance: Option<f64>,
    pub estimator: String,
    pub inputs_digest: String,
    pub flags: Vec<String>,
}

fn check_same_provenance(a: &Sketch, b: &Sketch) -> Result<String> {
    let pa = &a.provenance;
    let pb = &b.provenance;
    if pa.spec_digest != pb.spec_digest {
        return Err(Error::Provenance(format!(
            "sketches come from different operators ({} vs {})",
            pa.spec_digest, pb.spec_digest
        )));
    }
    if pa.mechanism != pb.mechanism {
        return Err(Error::Provenance(format!(
            "sketches come from different mechanisms ({} vs {})",
            pa.mechanism, pb.mechanism
        )));
    }
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "sketch lengths differ ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    Ok(format!("{}:{}", pa.mechanism, pa.spec_digest))
}

/// Inner-product estimate `sum_j x~_j y~_j`.
///
/// The attached variance is the closed form for unit-norm data with the
/// provenance noise scale plugged in (the cross-moment term, which depends
/// on the unreleased vectors, is dropped); it is absent when the two
/// sketches carry different noise scales.
pub fn inner_product(a: &Sketch, b: &Sketch) -> Result<EstimateReport> {
    let digest = check_same_provenance(a, b)?;
    let xs = a.payload.real()?;
    let ys = b.payload.real()?;
    let estimate: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();

    let sigma = match (a.provenance.noise_scale, b.provenance.noise_scale) {
        (Some(sa), Some(sb)) if sa == sb => Some(sa),
        (None, None) => Some(0.0),
        _ => None,
    };
    let theoretical_variance = sigma.map(|s| {
        let s2 = s * s;
        let n = xs.len() as f64;
        let rho = estimate.clamp(-1.0, 1.0);
        match a.provenance.spec.map(|sp| sp.kind) {
            None => 2.0 * s2 + n * s2 * s2, // raw vectors: n = p
            Some(ProjectionKind::Oporp) => {
                let spec = a.provenance.spec.unwrap();
                let factor = if spec.p > 1 {
                    (spec.p - spec.k) as f64 / (spec.p - 1) as f64
                } else {
                    0.0
                };
                2.0 * s2 + n * s2 * s2 + (1.0 + rho * rho) / n * factor
            }
            Some(_) => 2.0 * s2 + n * s2 * s2 + (1.0 + rho * rho) / n,
        }
    });
    Ok(EstimateReport {
        estimate,
        theoretical_variance,
        estimator: "inner-product".into(),
        inputs_digest: digest,
        flags: Vec::new(),
    })
}

/// Normalized cosine estimate `x~.y~ / (|x~| |y~|)`. No variance formula is
/// attached for the normalized estimator.
pub fn cosine_normalized(a: &Sketch, b: &Sketch) -> Result<EstimateReport> {
    let digest = check_same_provenance(a, b)?;
    let xs = a.payload.real()?;
    let ys = b.payload.real()?;
    let nx = xs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ny = ys.iter().map(|v| v * v).sum::<f64>().sqrt();
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::Domain("cosine of a zero-norm sketch".into()));
    }
    let dot: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    Ok(EstimateReport {
        estimate: dot / (nx * ny),
        theoretical_variance: None,
        estimator: "cosine-normalized".into(),
        inputs_digest: digest,
        flags: Vec::new(),
    })
}

/// Hamming distance between two sign sketches.
pub fn hamming_distance(a: &Sketch, b: &Sketch) -> Result<usize> {
    let sa = a.payload.signs()?;
    let sb = b.payload.signs()?;
    if sa.len() != sb.len() {
        return Err(Error::Dimension("sign lengths differ".into()));
    }
    Ok(sa.iter().zip(sb).filter(|(x, y)| x != y).count())
}

/// Angle estimate from sign collisions:
/// `theta^ = pi (1 - collisions / k)`, always in `[0, pi]`, with the
/// plug-in variance `theta^ (pi - theta^) / k`.
pub fn angle_from_signs(a: &Sketch, b: &Sketch) -> Result<EstimateReport> {
    let digest = check_same_provenance(a, b)?;
    let k = a.len();
    let distance = hamming_distance(a, b)?;
    let estimate = PI * distance as f64 / k as f64;
    Ok(EstimateReport {
        estimate,
        theoretical_variance: Some(signrp_angle_variance(estimate, k)),
        estimator: "angle-from-signs".into(),
        inputs_digest: digest,
        flags: Vec::new(),
    })
}

/// Collision probability after symmetric randomized response at strength
/// `eps_prime`, as a function of the clean collision probability.
pub fn rr_collision_map(p_clean: f64, eps_prime: f64) -> f64 {
    let e = eps_prime.exp();
    let shrink = (e - 1.0) * (e - 1.0) / ((e + 1.0) * (e + 1.0));
    p_clean * shrink + 2.0 * e / ((e + 1.0) * (e + 1.0))
}

/// Inverse of [`rr_collision_map`]: recovers the clean collision probability
/// from the observed one.
pub fn rr_collision_unmap(p_observed: f64, eps_prime: f64) -> f64 {
    let e = eps_prime.exp();
    let grow = (e + 1.0) * (e + 1.0) / ((e - 1.0) * (e - 1.0));
    grow * p_observed - 2.0 * e / ((e - 1.0) * (e - 1.0))
}

/// Debiased angle estimate from two randomized-response sign sketches that
/// share the strength `eps_prime`. Unbiased, so NOT clamped to `[0, pi]`;
/// out-of-range estimates are flagged instead. The attached variance is the
/// asymptotic randomized-response variance at the (clamped) estimate.
///
/// Refuses smooth-flipped and OPORP-signed sketches: their per-bit strengths
/// are heterogeneous and no closed-form debiasing applies (retrieval uses
/// raw Hamming distance there).
pub fn angle_from_rr_signs(a: &Sketch, b: &Sketch, eps_prime: f64) -> Result<EstimateReport> {
    let digest = check_same_provenance(a, b)?;
    if a.provenance.mechanism != "dp-signrp-rr" {
        return Err(Error::Unsupported(format!(
            "debiased angle needs uniform randomized-response sketches, got {}",
            a.provenance.mechanism
        )));
    }
    if !(eps_prime > 0.0) {
        return Err(Error::Domain("eps_prime must be positive".into()));
    }
    for s in [a, b] {
        match s.provenance.eps_prime {
            Some(e) if e == eps_prime => {}
            other => {
                return Err(Error::Provenance(format!(
                    "sketch eps_prime {other:?} does not match requested {eps_prime}"
                )))
            }
        }
    }
    let k = a.len();
    let collisions = (k - hamming_distance(a, b)?) as f64 / k as f64;
    let p_rr = rr_collision_unmap(collisions, eps_prime);
    let estimate = PI * (1.0 - p_rr);
    let mut flags = Vec::new();
    if !(0.0..=PI).contains(&estimate) {
        flags.push("estimate outside [0, pi]".into());
    }
    let clamped = estimate.clamp(0.0, PI);
    Ok(EstimateReport {
        estimate,
        theoretical_variance: Some(rr_angle_variance(clamped, k, eps_prime)),
        estimator: "angle-from-rr-signs".into(),
        inputs_digest: digest,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::{DataVector, RngStream};
    use crate::projections::{
        materialize, oporp_project, project, take_signs, Payload, ProjectionSpec, Provenance,
    };
    use approx::assert_relative_eq;

    fn sign_sketch(mechanism: &str, digest: &str, signs: Vec<i8>, eps: Option<f64>) -> Sketch {
        let mut provenance = Provenance::non_private(mechanism, digest.into());
        provenance.eps_prime = eps;
        Sketch {
            payload: Payload::Signs(signs),
            provenance,
        }
    }

    #[test]
    fn provenance_gating() {
        let a = sign_sketch("m", "d1", vec![1, -1], None);
        let b = sign_sketch("m", "d2", vec![1, -1], None);
        assert!(angle_from_signs(&a, &b).is_err());
        let c = sign_sketch("other", "d1", vec![1, -1], None);
        assert!(angle_from_signs(&a, &c).is_err());
    }

    #[test]
    fn self_cosine_is_one() {
        let spec = ProjectionSpec::oporp(16, 8, 1);
        let op = materialize(&spec).unwrap();
        let u = DataVector::new(vec![0.25; 16], 1.0).unwrap();
        let sk = oporp_project(&op, &u).unwrap();
        let r = cosine_normalized(&sk, &sk).unwrap();
        assert_relative_eq!(r.estimate, 1.0, max_relative = 1e-14);
        let mut neg = sk.clone();
        if let Payload::Real(v) = &mut neg.payload {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        let r = cosine_normalized(&sk, &neg).unwrap();
        assert_relative_eq!(r.estimate, -1.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_norm_sketch_is_rejected() {
        let a = Sketch {
            payload: Payload::Real(vec![0.0, 0.0]),
            provenance: Provenance::non_private("m", "d".into()),
        };
        assert!(cosine_normalized(&a, &a).is_err());
    }

    #[test]
    fn angle_extremes() {
        let a = sign_sketch("m", "d", vec![1, -1, 1, -1], None);
        let r = angle_from_signs(&a, &a).unwrap();
        assert_eq!(r.estimate, 0.0);
        let b = sign_sketch("m", "d", vec![-1, 1, -1, 1], None);
        let r = angle_from_signs(&a, &b).unwrap();
        assert_relative_eq!(r.estimate, PI, max_relative = 1e-14);
        assert!(r.estimate <= PI && r.estimate >= 0.0);
    }

    #[test]
    fn rr_collision_roundtrip_is_exact() {
        for &eps in &[0.3, 1.0, 2.0, 5.0] {
            for i in 0..=20 {
                let p = i as f64 / 20.0;
                let observed = rr_collision_map(p, eps);
                let back = rr_collision_unmap(observed, eps);
                assert_relative_eq!(back, p, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rr_angle_reduces_to_plain_angle_at_huge_eps() {
        let signs_a = vec![1, 1, -1, 1, -1, -1, 1, 1];
        let signs_b = vec![1, -1, -1, 1, 1, -1, 1, -1];
        let a = sign_sketch("dp-signrp-rr", "d", signs_a.clone(), Some(50.0));
        let b = sign_sketch("dp-signrp-rr", "d", signs_b.clone(), Some(50.0));
        let rr = angle_from_rr_signs(&a, &b, 50.0).unwrap();
        let pa = sign_sketch("m", "d", signs_a, None);
        let pb = sign_sketch("m", "d", signs_b, None);
        let plain = angle_from_signs(&pa, &pb).unwrap();
        assert_relative_eq!(rr.estimate, plain.estimate, epsilon = 1e-10);
    }

    #[test]
    fn rr_angle_gating() {
        let a = sign_sketch("dp-signrp-rr", "d", vec![1, -1], Some(1.0));
        let b = sign_sketch("dp-signrp-rr", "d", vec![1, -1], Some(2.0));
        assert!(angle_from_rr_signs(&a, &b, 1.0).is_err());
        let c = sign_sketch("dp-signrp-rr-smooth", "d", vec![1, -1], None);
        let d = sign_sketch("dp-signrp-rr-smooth", "d", vec![1, -1], None);
        assert!(matches!(
            angle_from_rr_signs(&c, &d, 1.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn rr_angle_out_of_range_is_flagged_not_clamped() {
        // All bits collide at small eps': the debiased estimate goes negative.
        let a = sign_sketch("dp-signrp-rr", "d", vec![1; 16], Some(0.5));
        let b = sign_sketch("dp-signrp-rr", "d", vec![1; 16], Some(0.5));
        let r = angle_from_rr_signs(&a, &b, 0.5).unwrap();
        assert!(r.estimate < 0.0);
        assert!(r.flags.iter().any(|f| f.contains("outside")));
    }

    #[test]
    fn hamming_and_angle_rank_identically() {
        let q = sign_sketch("m", "d", vec![1, 1, 1, 1, 1, 1, 1, 1], None);
        let mut reports: Vec<(usize, f64)> = Vec::new();
        for flips in 0..=8 {
            let mut s = vec![1i8; 8];
            for item in s.iter_mut().take(flips) {
                *item = -1;
            }
            let cand = sign_sketch("m", "d", s, None);
            let d = hamming_distance(&q, &cand).unwrap();
            let a = angle_from_signs(&q, &cand).unwrap().estimate;
            reports.push((d, a));
        }
        for w in reports.windows(2) {
            assert!(w[0].0 < w[1].0);
            assert!(w[0].1 < w[1].1);
        }
    }

    #[test]
    fn inner_product_of_noiseless_projections_tracks_dot() {
        // Mean over seeds approaches u.v; variance prediction present.
        let p = 32;
        let uv: Vec<f64> = (0..p).map(|i| ((i % 5) as f64 - 2.0) / 4.0).collect();
        let vv: Vec<f64> = (0..p).map(|i| ((i % 7) as f64 - 3.0) / 5.0).collect();
        let nu = uv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv = vv.iter().map(|x| x * x).sum::<f64>().sqrt();
        let u = DataVector::new(uv.iter().map(|x| x / nu).collect(), 1.0).unwrap();
        let v = DataVector::new(vv.iter().map(|x| x / nv).collect(), 1.0).unwrap();
        let dot: f64 = u.values().iter().zip(v.values()).map(|(a, b)| a * b).sum();
        let mut mean = 0.0;
        let n = 400;
        for seed in 0..n {
            let spec = ProjectionSpec::rademacher(p, 8, seed);
            let op = materialize(&spec).unwrap();
            let a = project(&op, &u).unwrap();
            let b = project(&op, &v).unwrap();
            let r = inner_product(&a, &b).unwrap();
            assert!(r.theoretical_variance.is_some());
            mean += r.estimate;
        }
        mean /= n as f64;
        // s.e. ~ sqrt(Var/n) with Var ~ (1 + rho^2)/k ~ 0.14
        assert!((mean - dot).abs() < 3.0 * (0.14f64 / n as f64).sqrt());
        let _ = RngStream::from_seed(0);
    }

    #[test]
    fn take_signs_then_angle_recovers_orthogonality() {
        // Orthogonal vectors have angle pi/2: collision fraction near 1/2.
        let u = DataVector::new(vec![1.0, 0.0], 1.0).unwrap();
        let v = DataVector::new(vec![0.0, 1.0], 1.0).unwrap();
        let spec = ProjectionSpec::gaussian(2, 4000, 77);
        let op = materialize(&spec).unwrap();
        let a = take_signs(&project(&op, &u).unwrap()).unwrap();
        let b = take_signs(&project(&op, &v).unwrap()).unwrap();
        let r = angle_from_signs(&a, &b).unwrap();
        let se = r.theoretical_variance.unwrap().sqrt();
        assert!((r.estimate - PI / 2.0).abs() < 4.0 * se);
    }
}
