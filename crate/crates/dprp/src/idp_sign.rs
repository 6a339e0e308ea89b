//! Individual-DP sign mechanisms.
//!
//! The point-wise relaxation: only the fixed data vector and its
//! beta-neighbors must be indistinguishable, so perturbation is confined to
//! projections whose sign a neighbor could actually change. The
//! noise-indicator marks exactly those: for a scaled Rademacher projection a
//! single-coordinate change moves `x_j` by at most `beta / sqrt(k)`, so
//! `|x_j| > beta / sqrt(k)` pins the sign for every neighbor.
//!
//! These mechanisms do not satisfy standard DP; the guarantee is relative to
//! the vector they were calibrated on.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::analytic::normal_cdf;
use crate::core::{DataVector, PrivacyBudget, RngStream};
use crate::dp_sign::keep_probability;
use crate::error::{Error, Result};
use crate::mechanisms::optimal_gaussian_sigma;
use crate::projections::{
    materialize, project, Payload, ProjectionOp, ProjectionSpec, Provenance, Sketch,
};

/// Which projections a beta-neighbor could flip.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseIndicators {
    /// `indicators[j]` is true iff the per-bit threshold covers `|x_j|`.
    pub indicators: Vec<bool>,
    /// Indices with indicator set (the set A).
    pub active: Vec<usize>,
    /// Per-bit thresholds used (beta / sqrt(k), or the per-column variant).
    pub thresholds: Vec<f64>,
}

impl NoiseIndicators {
    pub fn n_plus(&self) -> usize {
        self.active.len()
    }
}

fn indicators_from(values: &[f64], thresholds: &[f64]) -> NoiseIndicators {
    let indicators: Vec<bool> = values
        .iter()
        .zip(thresholds)
        .map(|(&x, &t)| t >= x.abs())
        .collect();
    let active = indicators
        .iter()
        .enumerate()
        .filter_map(|(j, &i)| i.then_some(j))
        .collect();
    NoiseIndicators {
        indicators,
        active,
        thresholds: thresholds.to_vec(),
    }
}

/// Noise indicators for a scaled Rademacher sketch: `I_j = 1` iff
/// `beta / sqrt(k) >= |x_j|`. The sketch must come from a Rademacher dense
/// projection (the threshold encodes max |w_ij| = 1).
pub fn noise_indicators(x: &Sketch, beta: f64) -> Result<NoiseIndicators> {
    if !(beta > 0.0) {
        return Err(Error::Domain("beta must be positive".into()));
    }
    let spec = x.provenance.spec.as_ref().ok_or_else(|| {
        Error::Provenance("sketch carries no projection spec".into())
    })?;
    if !spec.kind.is_rademacher() {
        return Err(Error::Unsupported(format!(
            "noise indicators assume a Rademacher projection, got {}",
            spec.kind.name()
        )));
    }
    let values = x.payload.real()?;
    let threshold = beta / (spec.k as f64).sqrt();
    Ok(indicators_from(values, &vec![threshold; values.len()]))
}

/// Per-column thresholds `beta max_i |w_ij| / sqrt(k)` for non-Rademacher
/// dense matrices (the general form of the indicator test).
pub fn column_thresholds(op: &ProjectionOp, beta: f64) -> Result<Vec<f64>> {
    let matrix = op.dense_matrix()?;
    let sqrt_k = (matrix.k() as f64).sqrt();
    Ok(matrix
        .column_abs_max()
        .into_iter()
        .map(|m| beta * m / sqrt_k)
        .collect())
}

fn indicator_thresholds(
    op: &ProjectionOp,
    beta: f64,
    allow_non_rademacher: bool,
) -> Result<Vec<f64>> {
    let spec = op.spec();
    if spec.kind.is_rademacher() {
        Ok(vec![beta / (spec.k as f64).sqrt(); spec.k])
    } else if allow_non_rademacher {
        column_thresholds(op, beta)
    } else {
        Err(Error::Unsupported(
            "iDP sign mechanisms default to Rademacher projections; set the non-Rademacher \
             flag to use per-column thresholds"
                .into(),
        ))
    }
}

/// Randomized-response plan calibrated on one vector: bits in A flip with
/// probability `1/(e^{eps/N+} + 1)`, bits outside A are exact.
#[derive(Clone, Debug)]
pub struct IdpRrPlan {
    pub indicators: NoiseIndicators,
    /// `eps / N+`; infinite when A is empty.
    pub eps_prime: f64,
    /// The calibrated vector's projected values.
    pub x: Vec<f64>,
}

impl IdpRrPlan {
    /// Exact probability that each output bit equals +1 when this fixed plan
    /// is applied to a vector projecting to `values` (sign(0) = +1).
    pub fn bit_distribution(&self, values: &[f64]) -> Vec<f64> {
        let keep = keep_probability(self.eps_prime);
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let plus = v >= 0.0;
                if self.indicators.indicators[j] {
                    if plus {
                        keep
                    } else {
                        1.0 - keep
                    }
                } else if plus {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<i8> {
        self.bit_distribution(&self.x)
            .iter()
            .map(|&p| if rng.random::<f64>() < p { 1 } else { -1 })
            .collect()
    }
}

/// Gaussian plan calibrated on one vector: bits in A are signs of
/// `x_j + N(0, sigma^2)` with sigma from the optimal mechanism at
/// `Delta2 = beta sqrt(N+ / k)`; bits outside A are exact.
#[derive(Clone, Debug)]
pub struct IdpGPlan {
    pub indicators: NoiseIndicators,
    /// None when A is empty (no noise path).
    pub sigma: Option<f64>,
    pub sensitivity: f64,
    pub x: Vec<f64>,
}

impl IdpGPlan {
    /// Probability that each output bit equals +1 for a vector projecting to
    /// `values`, under this fixed plan.
    pub fn bit_distribution(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if self.indicators.indicators[j] {
                    match self.sigma {
                        Some(s) => normal_cdf(v / s),
                        None => unreachable!("active set nonempty implies sigma"),
                    }
                } else if v >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<i8> {
        self.x
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let noisy = if self.indicators.indicators[j] {
                    let g: f64 = StandardNormal.sample(rng);
                    v + self.sigma.expect("sigma present when A nonempty") * g
                } else {
                    v
                };
                if noisy >= 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }
}

fn scaled_projection(op: &ProjectionOp, u: &DataVector) -> Result<Vec<f64>> {
    let sk = project(op, u)?;
    let Payload::Real(v) = sk.payload else { unreachable!() };
    Ok(v)
}

/// Builds the randomized-response plan for `u`.
pub fn idp_signrp_rr_plan(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
    allow_non_rademacher: bool,
) -> Result<IdpRrPlan> {
    budget.validate()?;
    let thresholds = indicator_thresholds(op, budget.beta, allow_non_rademacher)?;
    let x = scaled_projection(op, u)?;
    let indicators = indicators_from(&x, &thresholds);
    let eps_prime = if indicators.n_plus() == 0 {
        f64::INFINITY
    } else {
        budget.epsilon / indicators.n_plus() as f64
    };
    Ok(IdpRrPlan { indicators, eps_prime, x })
}

/// Builds the Gaussian plan for `u`.
pub fn idp_signrp_g_plan(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
    allow_non_rademacher: bool,
) -> Result<IdpGPlan> {
    budget.validate()?;
    if budget.delta <= 0.0 {
        return Err(Error::Validation("idp-signrp-g requires delta > 0".into()));
    }
    let thresholds = indicator_thresholds(op, budget.beta, allow_non_rademacher)?;
    let x = scaled_projection(op, u)?;
    let indicators = indicators_from(&x, &thresholds);
    let spec = op.spec();
    let n_plus = indicators.n_plus();
    let sensitivity = budget.beta * (n_plus as f64 / spec.k as f64).sqrt();
    let sigma = if n_plus == 0 {
        None
    } else {
        Some(optimal_gaussian_sigma(
            sensitivity,
            budget.epsilon,
            budget.delta,
        )?)
    };
    Ok(IdpGPlan { indicators, sigma, sensitivity, x })
}

fn idp_provenance(
    mechanism: &str,
    spec: &ProjectionSpec,
    budget: &PrivacyBudget,
    n_plus: usize,
) -> Provenance {
    let mut provenance = Provenance::non_private(mechanism, spec.digest()).with_spec(*spec);
    provenance.budget = Some(*budget);
    // A itself stays out of the provenance: it is derivable from u, which
    // the adversary does not hold, and publishing it would leak sign
    // magnitudes. The count alone is recorded.
    provenance.n_plus = Some(n_plus);
    if n_plus == 0 {
        provenance.notes.push("vacuous budget: no bit needed perturbation".into());
    }
    provenance
}

/// iDP sign mechanism with Gaussian pre-sign noise on the indicated bits;
/// `(eps, delta)`-iDP for the calibrated vector.
pub fn idp_signrp_g(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    rng: &RngStream,
) -> Result<Sketch> {
    let op = materialize(spec)?;
    let plan = idp_signrp_g_plan(&op, u, budget, false)?;
    let mut r = rng.rng();
    let signs = plan.sample(&mut r);
    let mut provenance = idp_provenance("idp-signrp-g", spec, budget, plan.indicators.n_plus());
    provenance.noise_scale = plan.sigma;
    provenance.sensitivity = Some(plan.sensitivity);
    Ok(Sketch {
        payload: Payload::Signs(signs),
        provenance,
    })
}

/// iDP sign mechanism by randomized response on the indicated bits;
/// eps-iDP for the calibrated vector (delta, if supplied, is ignored by the
/// flipping rule and only recorded).
pub fn idp_signrp_rr(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    rng: &RngStream,
) -> Result<Sketch> {
    let op = materialize(spec)?;
    let plan = idp_signrp_rr_plan(&op, u, budget, false)?;
    let mut r = rng.rng();
    let signs = plan.sample(&mut r);
    let mut provenance = idp_provenance("idp-signrp-rr", spec, budget, plan.indicators.n_plus());
    provenance.eps_prime = Some(plan.eps_prime);
    if budget.delta > 0.0 {
        provenance.notes.push("delta recorded only; flipping is pure eps-iDP".into());
    }
    Ok(Sketch {
        payload: Payload::Signs(signs),
        provenance,
    })
}
