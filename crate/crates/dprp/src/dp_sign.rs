//! Sign-output DP mechanisms.
//!
//! All four mechanisms share one shape: project, take signs, then keep each
//! sign with a per-bit probability `e^{eps'_j} / (e^{eps'_j} + 1)` and flip
//! it otherwise. They differ in how `eps'_j` is derived:
//!
//! - randomized response over dense projections splits the budget by the
//!   sign-change bound `N+` (or by `k` when no norm lower bound is assumed),
//! - the smooth variant grows `eps'_j` with the projected value's distance
//!   from zero in units of the largest possible single-coordinate shift,
//!   which preserves pure epsilon-DP while flipping far fewer bits,
//! - the OPORP variants drop the `1/k` factor entirely because each data
//!   coordinate lands in exactly one bin; empty bins emit a fair coin.

use rand::Rng;

use crate::analytic::{n_plus_bound, PPlusFlavor};
use crate::core::{mix_seed, DataVector, PrivacyBudget, RngStream};
use crate::error::{Error, Result};
use crate::projections::{
    materialize, oporp_project, project, Payload, ProjectionKind, ProjectionOp, ProjectionSpec,
    Provenance, Sketch,
};

/// Probability of keeping a sign at randomized-response strength
/// `eps_prime`: `e^{eps'} / (e^{eps'} + 1)`, always above 1/2.
pub fn keep_probability(eps_prime: f64) -> f64 {
    if eps_prime.is_infinite() {
        1.0
    } else {
        1.0 / (1.0 + (-eps_prime).exp())
    }
}

/// Probability of flipping a sign, `1 / (e^{eps'} + 1)`.
pub fn flip_probability(eps_prime: f64) -> f64 {
    if eps_prime.is_infinite() {
        0.0
    } else {
        1.0 / (1.0 + eps_prime.exp())
    }
}

/// How the per-bit keep probabilities were derived.
#[derive(Clone, Debug, PartialEq)]
pub enum FlipDerivation {
    Rr {
        eps_prime: f64,
        n_plus: usize,
        /// True when no usable norm bound forced the pure-eps `eps/k` split.
        pure_fallback: bool,
    },
    RrSmooth {
        epsilon: f64,
        k: usize,
    },
    OporpRr {
        eps_run: f64,
        repetitions: u32,
    },
    OporpRrSmooth {
        eps_run: f64,
        repetitions: u32,
    },
}

/// Exact per-bit randomization plan. The sampling mechanisms and the privacy
/// audits both consume this, so what is audited is what is shipped.
#[derive(Clone, Debug, PartialEq)]
pub struct FlipPlan {
    /// sign(x_j) with sign(0) = +1.
    pub base_signs: Vec<i8>,
    /// Per-bit keep probability, in (1/2, 1].
    pub keep_probs: Vec<f64>,
    /// Bits replaced by a fair coin (OPORP empty bins).
    pub zero_coin: Vec<bool>,
    /// Ceiling levels for smooth variants.
    pub l_values: Option<Vec<u32>>,
    pub derivation: FlipDerivation,
}

impl FlipPlan {
    pub fn len(&self) -> usize {
        self.base_signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base_signs.is_empty()
    }

    /// Exact probability that output bit `j` equals +1.
    pub fn prob_plus(&self, j: usize) -> f64 {
        if self.zero_coin[j] {
            0.5
        } else if self.base_signs[j] == 1 {
            self.keep_probs[j]
        } else {
            1.0 - self.keep_probs[j]
        }
    }

    /// Draws one output bit vector.
    pub fn sample(&self, rng: &mut impl Rng) -> Vec<i8> {
        (0..self.len())
            .map(|j| {
                let u: f64 = rng.random();
                if u < self.prob_plus(j) {
                    1
                } else {
                    -1
                }
            })
            .collect()
    }

    /// Histogram of ceiling levels (smooth variants only).
    pub fn l_histogram(&self) -> Option<Vec<(u32, usize)>> {
        let ls = self.l_values.as_ref()?;
        let mut map = std::collections::BTreeMap::new();
        for &l in ls {
            *map.entry(l).or_insert(0usize) += 1;
        }
        Some(map.into_iter().collect())
    }
}

fn signs_of(values: &[f64]) -> Vec<i8> {
    values.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect()
}

fn require_dense_sign_kind(op: &ProjectionOp, rr: bool) -> Result<()> {
    match op.spec().kind {
        ProjectionKind::Gaussian => Ok(()),
        k if k.is_rademacher() => Ok(()),
        ProjectionKind::Oporp => Err(Error::Unsupported(
            "dense sign mechanism cannot run on an oporp spec".into(),
        )),
        k if rr => Err(Error::Unsupported(format!(
            "randomized-response sign mechanism needs a gaussian or rademacher projection, got {}",
            k.name()
        ))),
        _ => Ok(()),
    }
}

/// Per-bit plan for randomized response over a dense projection with a norm
/// lower bound `m`: every sign is kept with probability
/// `e^{eps/N+} / (e^{eps/N+} + 1)`. When `m < beta` the split falls back to
/// `N+ = k` (pure epsilon mode); otherwise `delta > 0` funds the `N+` bound.
pub fn signrp_rr_plan(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
    m: f64,
) -> Result<FlipPlan> {
    budget.validate()?;
    require_dense_sign_kind(op, true)?;
    if !(m >= 0.0) {
        return Err(Error::Domain("norm lower bound m must be >= 0".into()));
    }
    if u.norm_l2() < m {
        return Err(Error::Validation(format!(
            "data norm {} is below the declared lower bound {m}",
            u.norm_l2()
        )));
    }
    let spec = op.spec();
    let (n_plus, pure_fallback) = if m < budget.beta {
        (spec.k, true)
    } else {
        if budget.delta == 0.0 {
            return Err(Error::Validation(
                "the N+ budget split needs delta > 0; set m = 0 for the pure-eps fallback".into(),
            ));
        }
        let flavor = if spec.kind.is_rademacher() {
            PPlusFlavor::Rademacher
        } else {
            PPlusFlavor::Gaussian
        };
        (
            n_plus_bound(m, budget.beta, budget.delta, spec.k, spec.p, flavor)?,
            false,
        )
    };
    let eps_prime = budget.epsilon / n_plus as f64;
    let sketch = project(op, u)?;
    let values = sketch.payload.real()?;
    Ok(FlipPlan {
        base_signs: signs_of(values),
        keep_probs: vec![keep_probability(eps_prime); spec.k],
        zero_coin: vec![false; spec.k],
        l_values: None,
        derivation: FlipDerivation::Rr {
            eps_prime,
            n_plus,
            pure_fallback,
        },
    })
}

/// Per-bit plan for the smooth variant: `L_j` counts how many largest
/// possible single-coordinate shifts fit below `|x_j|`, and the bit keeps
/// its sign with probability `e^{(L_j/k) eps} / (e^{(L_j/k) eps} + 1)`.
/// Numerator and denominator of the ratio use the same scaling, so the
/// levels are invariant to the `1/sqrt k` convention. Pure epsilon-DP.
pub fn signrp_rr_smooth_plan(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
) -> Result<FlipPlan> {
    budget.validate()?;
    budget.require_pure()?;
    require_dense_sign_kind(op, false)?;
    let spec = op.spec();
    let matrix = op.dense_matrix()?;
    let sketch = project(op, u)?;
    let values = sketch.payload.real()?;
    let col_max = matrix.column_abs_max();
    let sqrt_k = (spec.k as f64).sqrt();
    let mut l_values = Vec::with_capacity(spec.k);
    let mut keep_probs = Vec::with_capacity(spec.k);
    for j in 0..spec.k {
        let l = if col_max[j] > 0.0 {
            let ratio = values[j].abs() * sqrt_k / (budget.beta * col_max[j]);
            (ratio.ceil() as u32).max(1)
        } else {
            // Entirely zero column: no neighbor moves this bit at all.
            1
        };
        l_values.push(l);
        keep_probs.push(keep_probability(l as f64 / spec.k as f64 * budget.epsilon));
    }
    Ok(FlipPlan {
        base_signs: signs_of(values),
        keep_probs,
        zero_coin: vec![false; spec.k],
        l_values: Some(l_values),
        derivation: FlipDerivation::RrSmooth {
            epsilon: budget.epsilon,
            k: spec.k,
        },
    })
}

/// OPORP sign variant: plain randomized response or smooth levels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignOporpVariant {
    Rr,
    RrSmooth,
}

impl SignOporpVariant {
    pub fn mechanism_name(&self) -> &'static str {
        match self {
            SignOporpVariant::Rr => "dp-signoporp-rr",
            SignOporpVariant::RrSmooth => "dp-signoporp-rr-smooth",
        }
    }
}

/// The `t` per-repetition operators behind a DP-SignOPORP run: each
/// repetition projects into `k/t` bins with its own derived seed.
pub fn signoporp_run_specs(spec: &ProjectionSpec, t: u32) -> Result<Vec<ProjectionSpec>> {
    if spec.kind != ProjectionKind::Oporp {
        return Err(Error::Unsupported("signoporp requires an oporp spec".into()));
    }
    spec.validate()?;
    if t == 0 || !spec.k.is_multiple_of(t as usize) {
        return Err(Error::Validation(format!(
            "repetitions t = {t} must divide k = {}",
            spec.k
        )));
    }
    let k_run = spec.k / t as usize;
    Ok((0..t)
        .map(|r| ProjectionSpec::oporp(spec.p, k_run, mix_seed(spec.seed, r as u64)))
        .collect())
}

/// Concatenated plan over `t` independent OPORP repetitions, each with
/// budget `eps/t`. Within a run the randomized-response strength carries no
/// `1/k` factor (one coordinate change touches exactly one bin); the smooth
/// variant uses `eps'_j = L_j * eps/t` with `L_j = ceil(|x_j| / beta)`.
/// Bins whose value is exactly zero emit a fair coin.
pub fn signoporp_plan(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    variant: SignOporpVariant,
) -> Result<FlipPlan> {
    let run_ops = signoporp_run_specs(spec, budget.repetitions)?
        .iter()
        .map(materialize)
        .collect::<Result<Vec<_>>>()?;
    signoporp_plan_with_ops(&run_ops, u, budget, variant)
}

/// [`signoporp_plan`] over pre-materialized run operators, for callers that
/// sketch many rows through the same operators.
pub fn signoporp_plan_with_ops(
    run_ops: &[ProjectionOp],
    u: &DataVector,
    budget: &PrivacyBudget,
    variant: SignOporpVariant,
) -> Result<FlipPlan> {
    budget.validate()?;
    budget.require_pure()?;
    let t = budget.repetitions;
    if run_ops.len() != t as usize {
        return Err(Error::Validation(format!(
            "expected {t} run operators, got {}",
            run_ops.len()
        )));
    }
    let k_total: usize = run_ops.iter().map(|op| op.spec().k).sum();
    let eps_run = budget.epsilon / t as f64;
    let mut base_signs = Vec::with_capacity(k_total);
    let mut keep_probs = Vec::with_capacity(k_total);
    let mut zero_coin = Vec::with_capacity(k_total);
    let mut l_values = Vec::with_capacity(k_total);
    for op in run_ops {
        let sketch = oporp_project(op, u)?;
        let values = sketch.payload.real()?;
        for &x in values {
            if x == 0.0 {
                base_signs.push(1);
                keep_probs.push(1.0);
                zero_coin.push(true);
                l_values.push(0);
                continue;
            }
            base_signs.push(if x < 0.0 { -1 } else { 1 });
            zero_coin.push(false);
            let eps_prime = match variant {
                SignOporpVariant::Rr => {
                    l_values.push(1);
                    eps_run
                }
                SignOporpVariant::RrSmooth => {
                    let l = ((x.abs() / budget.beta).ceil() as u32).max(1);
                    l_values.push(l);
                    l as f64 * eps_run
                }
            };
            keep_probs.push(keep_probability(eps_prime));
        }
    }
    let derivation = match variant {
        SignOporpVariant::Rr => FlipDerivation::OporpRr { eps_run, repetitions: t },
        SignOporpVariant::RrSmooth => FlipDerivation::OporpRrSmooth { eps_run, repetitions: t },
    };
    Ok(FlipPlan {
        base_signs,
        keep_probs,
        zero_coin,
        l_values: match variant {
            SignOporpVariant::RrSmooth => Some(l_values),
            SignOporpVariant::Rr => None,
        },
        derivation,
    })
}

fn plan_to_sketch(
    plan: &FlipPlan,
    mechanism: &str,
    spec: &ProjectionSpec,
    budget: &PrivacyBudget,
    rng: &RngStream,
) -> Sketch {
    let mut r = rng.rng();
    let signs = plan.sample(&mut r);
    let mut provenance = Provenance::non_private(mechanism, spec.digest()).with_spec(*spec);
    provenance.budget = Some(*budget);
    provenance.l_histogram = plan.l_histogram();
    provenance.zero_positions = plan
        .zero_coin
        .iter()
        .enumerate()
        .filter_map(|(j, &z)| z.then_some(j))
        .collect();
    match &plan.derivation {
        FlipDerivation::Rr { eps_prime, n_plus, pure_fallback } => {
            provenance.eps_prime = Some(*eps_prime);
            provenance.n_plus = Some(*n_plus);
            if *pure_fallback {
                provenance.notes.push("pure-eps fallback: eps' = eps / k".into());
            }
        }
        FlipDerivation::RrSmooth { .. } => {}
        FlipDerivation::OporpRr { eps_run, .. } => {
            provenance.eps_prime = Some(*eps_run);
        }
        FlipDerivation::OporpRrSmooth { .. } => {}
    }
    Sketch {
        payload: Payload::Signs(signs),
        provenance,
    }
}

/// DP-SignRP by randomized response. `(eps, delta)`-DP when the data norm
/// is at least `m >= beta`; epsilon-DP in the `m < beta` fallback.
pub fn signrp_rr(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    m: f64,
    rng: &RngStream,
) -> Result<Sketch> {
    signrp_rr_with_op(&materialize(spec)?, u, budget, m, rng)
}

/// [`signrp_rr`] over a pre-materialized operator.
pub fn signrp_rr_with_op(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
    m: f64,
    rng: &RngStream,
) -> Result<Sketch> {
    let plan = signrp_rr_plan(op, u, budget, m)?;
    Ok(plan_to_sketch(&plan, "dp-signrp-rr", op.spec(), budget, rng))
}

/// DP-SignRP with smooth flipping probability; epsilon-DP.
pub fn signrp_rr_smooth(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    rng: &RngStream,
) -> Result<Sketch> {
    signrp_rr_smooth_with_op(&materialize(spec)?, u, budget, rng)
}

/// [`signrp_rr_smooth`] over a pre-materialized operator.
pub fn signrp_rr_smooth_with_op(
    op: &ProjectionOp,
    u: &DataVector,
    budget: &PrivacyBudget,
    rng: &RngStream,
) -> Result<Sketch> {
    let plan = signrp_rr_smooth_plan(op, u, budget)?;
    Ok(plan_to_sketch(&plan, "dp-signrp-rr-smooth", op.spec(), budget, rng))
}

/// DP-SignOPORP with `budget.repetitions` independent runs; epsilon-DP by
/// composition of the per-run budgets.
pub fn signoporp(
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    variant: SignOporpVariant,
    rng: &RngStream,
) -> Result<Sketch> {
    let plan = signoporp_plan(spec, u, budget, variant)?;
    Ok(plan_to_sketch(&plan, variant.mechanism_name(), spec, budget, rng))
}

/// [`signoporp`] over pre-materialized run operators.
pub fn signoporp_with_ops(
    run_ops: &[ProjectionOp],
    spec: &ProjectionSpec,
    u: &DataVector,
    budget: &PrivacyBudget,
    variant: SignOporpVariant,
    rng: &RngStream,
) -> Result<Sketch> {
    let plan = signoporp_plan_with_ops(run_ops, u, budget, variant)?;
    Ok(plan_to_sketch(&plan, variant.mechanism_name(), spec, budget, rng))
}
