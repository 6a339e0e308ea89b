//! Exact privacy audits.
//!
//! Sign mechanisms admit exact per-bit output probabilities given the
//! operator and the data, so the audit enumerates a grid of single-coordinate
//! neighbors and compares log probability ratios against the claimed bound
//! directly; nothing is sampled. Gaussian-noise mechanisms are audited
//! through the exact tail mass of the privacy-loss variable instead, since
//! their loss is unbounded and only the `(eps, delta)` curve is claimed.
//!
//! A small mutation suite deliberately breaks the mechanisms (halved flip
//! probabilities, dropped fair coins on empty bins) to confirm the audits
//! have teeth.

use crate::core::{DataVector, PrivacyBudget};
use crate::dp_rp::{audit_noise_scale, DpRpConfig, DpRpVariant};
use crate::dp_sign::{
    signoporp_plan_with_ops, signoporp_run_specs, signrp_rr_plan, signrp_rr_smooth_plan, FlipPlan,
    SignOporpVariant,
};
use crate::error::Result;
use crate::idp_sign::{idp_signrp_g_plan, idp_signrp_rr_plan};
use crate::mechanisms::{optimal_gaussian_residual, NoiseDistribution};
use crate::projections::{materialize, oporp_bin_of, project, Payload, ProjectionOp, ProjectionSpec};

/// Margin tolerance: a claim passes iff the worst excess stays below this.
pub const AUDIT_TOL: f64 = 1e-9;

/// Mechanism under audit.
#[derive(Clone, Debug)]
pub enum AuditMechanism {
    /// Randomized response in its pure-eps form (`m = 0`, per-bit bound
    /// `eps/k`). The norm-bound form is only certified over matrix draws and
    /// has no per-matrix claim to audit.
    SignRpRrPure { spec: ProjectionSpec },
    /// Smooth flipping probability (per-bit bound `eps/k`).
    SignRpRrSmooth { spec: ProjectionSpec },
    /// OPORP sign mechanisms (per-bit and composed bound `eps`).
    SignOporp {
        spec: ProjectionSpec,
        variant: SignOporpVariant,
    },
    /// Two-sided point-wise audit of the randomized-response iDP mechanism:
    /// the plan calibrated on the base vector is applied to base and
    /// neighbor alike.
    IdpSignRpRr { spec: ProjectionSpec },
    /// Two-sided point-wise audit of the Gaussian iDP mechanism via the
    /// exact tail mass, plus sign stability outside the active set.
    IdpSignRpG { spec: ProjectionSpec },
    /// Full-precision mechanisms: exact tail mass for Gaussian noise,
    /// l1-ratio for Laplace.
    DpRp { config: DpRpConfig },
}

/// Deliberate defects for the mutation suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Halves every flip probability (mechanism becomes less private).
    HalvedFlipProbability,
    /// Emits a deterministic +1 instead of the fair coin on empty bins.
    DroppedZeroCoin,
}

fn apply_mutation(plan: &mut FlipPlan, mutation: Mutation) {
    match mutation {
        Mutation::HalvedFlipProbability => {
            for q in &mut plan.keep_probs {
                *q = 1.0 - (1.0 - *q) / 2.0;
            }
        }
        Mutation::DroppedZeroCoin => {
            for j in 0..plan.base_signs.len() {
                if plan.zero_coin[j] {
                    plan.zero_coin[j] = false;
                    plan.base_signs[j] = 1;
                    plan.keep_probs[j] = 1.0;
                }
            }
        }
    }
}

/// One audit job: mechanism, base vector, claimed budget, neighbor grid.
#[derive(Clone, Debug)]
pub struct AuditCase {
    pub mechanism: AuditMechanism,
    pub base: DataVector,
    pub budget: PrivacyBudget,
    /// Evenly spaced perturbations per coordinate in `[-beta, beta]`,
    /// endpoints included.
    pub grid_points: usize,
    pub mutation: Option<Mutation>,
}

impl AuditCase {
    pub fn new(mechanism: AuditMechanism, base: DataVector, budget: PrivacyBudget) -> Self {
        Self {
            mechanism,
            base,
            budget,
            grid_points: 21,
            mutation: None,
        }
    }

    pub fn with_mutation(mut self, mutation: Mutation) -> Self {
        self.mutation = Some(mutation);
        self
    }

    pub fn with_grid_points(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }
}

/// Audit outcome: worst margin over all neighbors/bits. PASS iff
/// `margin <= AUDIT_TOL`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct AuditReport {
    pub pass: bool,
    /// Worst (log-ratio - bound) for sign audits, worst (tail mass - delta)
    /// for Gaussian audits. Infinite when a zero-probability event appears
    /// on one side only.
    pub margin: f64,
    pub bound: String,
    pub neighbors_checked: usize,
    pub worst_case: Option<String>,
}

fn neighbor_grid(base: &DataVector, beta: f64, grid_points: usize) -> Vec<(usize, f64, DataVector)> {
    let mut out = Vec::new();
    let g = grid_points.max(2);
    for i in 0..base.dim() {
        for step in 0..g {
            let db = -beta + 2.0 * beta * step as f64 / (g - 1) as f64;
            if db == 0.0 {
                continue;
            }
            let mut values = base.values().to_vec();
            values[i] += db;
            if values[i].abs() > base.bound() {
                continue;
            }
            if let Ok(v) = DataVector::new(values, base.bound()) {
                out.push((i, db, v));
            }
        }
    }
    out
}

// log(a/b) with 0/0 treated as an impossible-event match (ratio 0).
fn log_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        (a / b).ln()
    }
}

fn bit_probs(plan: &FlipPlan, j: usize) -> [f64; 2] {
    let plus = plan.prob_plus(j);
    [plus, 1.0 - plus]
}

struct SignAuditAcc {
    per_bit_margin: f64,
    total_margin: f64,
    worst: Option<String>,
    neighbors: usize,
}

/// Per-bit and composed audit of a standard-DP sign mechanism: the plan is
/// recomputed from each neighbor, as the mechanism itself would.
fn audit_sign_mechanism<F>(
    case: &AuditCase,
    per_bit_bound: f64,
    total_bound: f64,
    plan_of: F,
    changed_bits: Option<&dyn Fn(usize) -> Vec<usize>>,
) -> Result<AuditReport>
where
    F: Fn(&DataVector) -> Result<FlipPlan>,
{
    let mut base_plan = plan_of(&case.base)?;
    if let Some(m) = case.mutation {
        apply_mutation(&mut base_plan, m);
    }
    let mut acc = SignAuditAcc {
        per_bit_margin: f64::NEG_INFINITY,
        total_margin: f64::NEG_INFINITY,
        worst: None,
        neighbors: 0,
    };
    for (i, db, neighbor) in neighbor_grid(&case.base, case.budget.beta, case.grid_points) {
        let mut neighbor_plan = plan_of(&neighbor)?;
        if let Some(m) = case.mutation {
            apply_mutation(&mut neighbor_plan, m);
        }
        acc.neighbors += 1;
        let mut total_uv = 0.0;
        let mut total_vu = 0.0;
        let changed = changed_bits.map(|f| f(i));
        for j in 0..base_plan.len() {
            let pu = bit_probs(&base_plan, j);
            let pv = bit_probs(&neighbor_plan, j);
            let mut bit_abs: f64 = 0.0;
            let mut up: f64 = 0.0;
            let mut down: f64 = 0.0;
            for b in 0..2 {
                let lr = log_ratio(pu[b], pv[b]);
                bit_abs = bit_abs.max(lr.abs());
                up = up.max(lr);
                down = down.max(-lr);
            }
            total_uv += up;
            total_vu += down;
            if let Some(changed) = &changed {
                if !changed.contains(&j) && bit_abs != 0.0 {
                    // Untouched bins must cancel exactly.
                    return Ok(AuditReport {
                        pass: false,
                        margin: f64::INFINITY,
                        bound: format!("untouched bit expected ratio 0, got {bit_abs}"),
                        neighbors_checked: acc.neighbors,
                        worst_case: Some(format!("coordinate {i}, db {db:.4}, bit {j}")),
                    });
                }
            }
            let margin = bit_abs - per_bit_bound;
            if margin > acc.per_bit_margin {
                acc.per_bit_margin = margin;
                acc.worst = Some(format!("coordinate {i}, db {db:.4}, bit {j}"));
            }
        }
        let total_excess = total_uv.max(total_vu) - total_bound;
        acc.total_margin = acc.total_margin.max(total_excess);
    }
    let margin = acc.per_bit_margin.max(acc.total_margin);
    Ok(AuditReport {
        pass: margin <= AUDIT_TOL,
        margin,
        bound: format!("per-bit {per_bit_bound:.6e}, composed {total_bound:.6e}"),
        neighbors_checked: acc.neighbors,
        worst_case: acc.worst,
    })
}

/// Two-sided point-wise audit with a plan fixed at the base vector: the
/// guarantee of the individual-DP mechanisms is for the calibrated vector
/// against its neighbors, so the same plan processes both sides.
fn audit_idp_rr(case: &AuditCase, spec: &ProjectionSpec) -> Result<AuditReport> {
    let op = materialize(spec)?;
    let plan = idp_signrp_rr_plan(&op, &case.base, &case.budget, false)?;
    // The fixed calibrated keep probability, with any mutation applied.
    let mut keep = crate::dp_sign::keep_probability(plan.eps_prime);
    if case.mutation == Some(Mutation::HalvedFlipProbability) {
        keep = 1.0 - (1.0 - keep) / 2.0;
    }
    let distribution = |values: &[f64]| -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                let plus = v >= 0.0;
                if plan.indicators.indicators[j] {
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
    };
    let dist_u = distribution(&plan.x);
    let mut margin = f64::NEG_INFINITY;
    let mut worst = None;
    let mut neighbors = 0;
    for (i, db, neighbor) in neighbor_grid(&case.base, case.budget.beta, case.grid_points) {
        let xv = projected_values(&op, &neighbor)?;
        let dist_v = distribution(&xv);
        neighbors += 1;
        let mut total_uv = 0.0;
        let mut total_vu = 0.0;
        for j in 0..dist_u.len() {
            let pu = [dist_u[j], 1.0 - dist_u[j]];
            let pv = [dist_v[j], 1.0 - dist_v[j]];
            let mut up: f64 = 0.0;
            let mut down: f64 = 0.0;
            for b in 0..2 {
                let lr = log_ratio(pu[b], pv[b]);
                up = up.max(lr);
                down = down.max(-lr);
            }
            total_uv += up;
            total_vu += down;
        }
        let excess = total_uv.max(total_vu) - case.budget.epsilon;
        if excess > margin {
            margin = excess;
            worst = Some(format!("coordinate {i}, db {db:.4}"));
        }
    }
    Ok(AuditReport {
        pass: margin <= AUDIT_TOL,
        margin,
        bound: format!("two-sided composed eps = {}", case.budget.epsilon),
        neighbors_checked: neighbors,
        worst_case: worst,
    })
}

fn projected_values(op: &ProjectionOp, u: &DataVector) -> Result<Vec<f64>> {
    let sk = project(op, u)?;
    let Payload::Real(v) = sk.payload else { unreachable!() };
    Ok(v)
}

/// Exact tail mass of the Gaussian privacy-loss variable for a mean shift of
/// l2 norm `d` at noise scale `sigma`:
/// `Phi(d/(2 sigma) - eps sigma/d) - e^eps Phi(-d/(2 sigma) - eps sigma/d)`.
/// A scan over the 1-d sufficient output direction confirms the loss crosses
/// the threshold exactly once before the closed form is trusted.
fn gaussian_tail_mass(d: f64, sigma: f64, eps: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    // Privacy loss at output x + sigma * g along the shift direction:
    // loss(s) = d s / sigma^2 + d^2 / (2 sigma^2), increasing in s, so the
    // above-threshold region is a single ray whose mass the closed form
    // integrates exactly.
    let loss = |s: f64| d * s / (sigma * sigma) + d * d / (2.0 * sigma * sigma);
    let mut last = f64::NEG_INFINITY;
    for step in 0..=40 {
        let l = loss(-10.0 * sigma + step as f64 * 0.5 * sigma);
        assert!(l >= last, "privacy loss must increase along the shift");
        last = l;
    }
    (optimal_gaussian_residual(d, eps, 0.0, sigma)).max(0.0)
}

fn audit_idp_g(case: &AuditCase, spec: &ProjectionSpec) -> Result<AuditReport> {
    let op = materialize(spec)?;
    let plan = idp_signrp_g_plan(&op, &case.base, &case.budget, false)?;
    let mut margin = f64::NEG_INFINITY;
    let mut worst = None;
    let mut neighbors = 0;
    for (i, db, neighbor) in neighbor_grid(&case.base, case.budget.beta, case.grid_points) {
        let xv = projected_values(&op, &neighbor)?;
        neighbors += 1;
        // Sign stability outside the active set is the load-bearing claim.
        for (j, (&xu, &xn)) in plan.x.iter().zip(&xv).enumerate() {
            if !plan.indicators.indicators[j] && (xu >= 0.0) != (xn >= 0.0) {
                return Ok(AuditReport {
                    pass: false,
                    margin: f64::INFINITY,
                    bound: "sign stability outside the active set".into(),
                    neighbors_checked: neighbors,
                    worst_case: Some(format!("coordinate {i}, db {db:.4}, bit {j}")),
                });
            }
        }
        let d: f64 = plan
            .indicators
            .active
            .iter()
            .map(|&j| (plan.x[j] - xv[j]).powi(2))
            .sum::<f64>()
            .sqrt();
        let excess = match plan.sigma {
            Some(sigma) => gaussian_tail_mass(d, sigma, case.budget.epsilon) - case.budget.delta,
            None => {
                if d > 0.0 {
                    // Would require noise but none was calibrated.
                    f64::INFINITY
                } else {
                    -case.budget.delta
                }
            }
        };
        if excess > margin {
            margin = excess;
            worst = Some(format!("coordinate {i}, db {db:.4}"));
        }
    }
    Ok(AuditReport {
        pass: margin <= AUDIT_TOL,
        margin,
        bound: format!(
            "two-sided tail mass <= delta = {} at eps = {}",
            case.budget.delta, case.budget.epsilon
        ),
        neighbors_checked: neighbors,
        worst_case: worst,
    })
}

fn audit_dp_rp(case: &AuditCase, config: &DpRpConfig) -> Result<AuditReport> {
    let op = match &config.spec {
        Some(spec) => Some(materialize(spec)?),
        None => None,
    };
    let calibration = audit_noise_scale(config, op.as_ref())?;
    // Noise-free mechanism output; the audit reasons about the noise
    // distribution around it analytically.
    let clean = |u: &DataVector| -> Result<Vec<f64>> {
        match config.variant {
            DpRpVariant::RawGOpt => Ok(u.values().to_vec()),
            DpRpVariant::Oporp => {
                let sk = crate::projections::oporp_project(op.as_ref().unwrap(), u)?;
                Ok(sk.payload.real()?.to_vec())
            }
            _ => projected_values(op.as_ref().unwrap(), u),
        }
    };
    let base_out = clean(&case.base)?;
    let mut margin = f64::NEG_INFINITY;
    let mut worst = None;
    let mut neighbors = 0;
    for (i, db, neighbor) in neighbor_grid(&case.base, case.budget.beta, case.grid_points) {
        let out = clean(&neighbor)?;
        neighbors += 1;
        let excess = match calibration.distribution {
            NoiseDistribution::Gaussian => {
                let d: f64 = base_out
                    .iter()
                    .zip(&out)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                gaussian_tail_mass(d, calibration.scale, case.budget.epsilon) - case.budget.delta
            }
            NoiseDistribution::Laplace => {
                let l1: f64 = base_out.iter().zip(&out).map(|(a, b)| (a - b).abs()).sum();
                l1 / calibration.scale - case.budget.epsilon
            }
        };
        if excess > margin {
            margin = excess;
            worst = Some(format!("coordinate {i}, db {db:.4}"));
        }
    }
    Ok(AuditReport {
        pass: margin <= AUDIT_TOL,
        margin,
        bound: match calibration.distribution {
            NoiseDistribution::Gaussian => format!(
                "tail mass <= delta = {} at eps = {}",
                case.budget.delta, case.budget.epsilon
            ),
            NoiseDistribution::Laplace => {
                format!("l1 shift / lambda <= eps = {}", case.budget.epsilon)
            }
        },
        neighbors_checked: neighbors,
        worst_case: worst,
    })
}

/// Runs the audit described by the case.
pub fn audit_privacy(case: &AuditCase) -> Result<AuditReport> {
    match &case.mechanism {
        AuditMechanism::SignRpRrPure { spec } => {
            let op = materialize(spec)?;
            let bound = case.budget.epsilon / spec.k as f64;
            let budget = case.budget;
            audit_sign_mechanism(
                case,
                bound,
                case.budget.epsilon,
                |u| signrp_rr_plan(&op, u, &budget, 0.0),
                None,
            )
        }
        AuditMechanism::SignRpRrSmooth { spec } => {
            let op = materialize(spec)?;
            let bound = case.budget.epsilon / spec.k as f64;
            let budget = case.budget;
            audit_sign_mechanism(
                case,
                bound,
                case.budget.epsilon,
                |u| signrp_rr_smooth_plan(&op, u, &budget),
                None,
            )
        }
        AuditMechanism::SignOporp { spec, variant } => {
            let run_specs = signoporp_run_specs(spec, case.budget.repetitions)?;
            let run_ops: Result<Vec<ProjectionOp>> = run_specs.iter().map(materialize).collect();
            let run_ops = run_ops?;
            let budget = case.budget;
            let variant = *variant;
            // A changed coordinate touches exactly one bin per repetition.
            let bins: Vec<Vec<usize>> = (0..case.base.dim())
                .map(|i| {
                    let mut touched = Vec::new();
                    let mut offset = 0;
                    for op in &run_ops {
                        if let ProjectionOp::Oporp { spec, permutation, .. } = op {
                            touched
                                .push(offset + oporp_bin_of(permutation[i], spec.p, spec.k));
                            offset += spec.k;
                        }
                    }
                    touched
                })
                .collect();
            let ops_ref = &run_ops;
            audit_sign_mechanism(
                case,
                case.budget.epsilon,
                case.budget.epsilon,
                |u| signoporp_plan_with_ops(ops_ref, u, &budget, variant),
                Some(&|i: usize| bins[i].clone()),
            )
        }
        AuditMechanism::IdpSignRpRr { spec } => audit_idp_rr(case, spec),
        AuditMechanism::IdpSignRpG { spec } => audit_idp_g(case, spec),
        AuditMechanism::DpRp { config } => audit_dp_rp(case, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(values: Vec<f64>) -> DataVector {
        DataVector::new(values, 1.0).unwrap()
    }

    fn pure(eps: f64) -> PrivacyBudget {
        PrivacyBudget::pure(eps).unwrap()
    }

    #[test]
    fn smooth_mechanism_passes_per_bit_audit() {
        let spec = ProjectionSpec::gaussian(4, 8, 5);
        let case = AuditCase::new(
            AuditMechanism::SignRpRrSmooth { spec },
            base(vec![0.4, -0.3, 0.2, 0.5]),
            pure(1.0),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
        assert!(report.neighbors_checked > 50);
    }

    #[test]
    fn pure_rr_passes_audit() {
        let spec = ProjectionSpec::rademacher(4, 8, 6);
        let case = AuditCase::new(
            AuditMechanism::SignRpRrPure { spec },
            base(vec![0.4, -0.3, 0.2, 0.5]),
            pure(2.0),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }

    #[test]
    fn oporp_untouched_bins_cancel_and_audit_passes() {
        for variant in [SignOporpVariant::Rr, SignOporpVariant::RrSmooth] {
            let spec = ProjectionSpec::oporp(6, 6, 2);
            let case = AuditCase::new(
                AuditMechanism::SignOporp { spec, variant },
                base(vec![0.4, 0.0, 0.2, -0.5, 0.3, 0.1]),
                pure(1.5),
            );
            let report = audit_privacy(&case).unwrap();
            assert!(report.pass, "{variant:?} margin {}", report.margin);
        }
    }

    #[test]
    fn halved_flip_probability_fails_audit() {
        let spec = ProjectionSpec::gaussian(4, 8, 5);
        let case = AuditCase::new(
            AuditMechanism::SignRpRrSmooth { spec },
            base(vec![0.4, -0.3, 0.2, 0.5]),
            pure(1.0),
        )
        .with_mutation(Mutation::HalvedFlipProbability);
        let report = audit_privacy(&case).unwrap();
        assert!(!report.pass);
        assert!(report.margin > 0.1);
    }

    #[test]
    fn dropped_coin_fails_oporp_audit() {
        let spec = ProjectionSpec::oporp(6, 6, 2);
        let case = AuditCase::new(
            AuditMechanism::SignOporp {
                spec,
                variant: SignOporpVariant::Rr,
            },
            // the zero coordinate makes one bin empty
            base(vec![0.4, 0.0, 0.2, -0.5, 0.3, 0.1]),
            pure(1.5),
        )
        .with_mutation(Mutation::DroppedZeroCoin);
        let report = audit_privacy(&case).unwrap();
        assert!(!report.pass);
        assert!(report.margin.is_infinite());
    }

    #[test]
    fn idp_rr_two_sided_audit_passes() {
        let spec = ProjectionSpec::rademacher(4, 8, 9);
        let case = AuditCase::new(
            AuditMechanism::IdpSignRpRr { spec },
            base(vec![0.3, -0.2, 0.4, 0.1]),
            pure(1.0),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }

    #[test]
    fn idp_g_tail_audit_passes() {
        let spec = ProjectionSpec::rademacher(4, 8, 9);
        let case = AuditCase::new(
            AuditMechanism::IdpSignRpG { spec },
            base(vec![0.3, -0.2, 0.4, 0.1]),
            PrivacyBudget::new(1.0, 1e-4).unwrap(),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }

    #[test]
    fn gaussian_rp_tail_audit_passes() {
        let spec = ProjectionSpec::gaussian(4, 8, 3);
        let config = DpRpConfig::new(
            DpRpVariant::RpGOpt,
            Some(spec),
            PrivacyBudget::new(2.0, 1e-5).unwrap(),
        );
        let case = AuditCase::new(
            AuditMechanism::DpRp { config },
            base(vec![0.3, -0.2, 0.4, 0.1]),
            PrivacyBudget::new(2.0, 1e-5).unwrap(),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }

    #[test]
    fn laplace_rp_ratio_audit_passes() {
        let spec = ProjectionSpec::gaussian(4, 8, 3);
        let config = DpRpConfig::new(DpRpVariant::RpL, Some(spec), pure(2.0));
        let case = AuditCase::new(AuditMechanism::DpRp { config }, base(vec![0.3, -0.2, 0.4, 0.1]), pure(2.0));
        let report = audit_privacy(&case).unwrap();
        assert!(report.pass, "margin {}", report.margin);
    }

    #[test]
    fn undersized_noise_fails_gaussian_audit() {
        // Claim a tighter budget than the calibration delivers.
        let spec = ProjectionSpec::gaussian(4, 8, 3);
        let config = DpRpConfig::new(
            DpRpVariant::RpGOpt,
            Some(spec),
            PrivacyBudget::new(4.0, 1e-3).unwrap(),
        );
        let case = AuditCase::new(
            AuditMechanism::DpRp { config },
            base(vec![0.3, -0.2, 0.4, 0.1]),
            PrivacyBudget::new(1.0, 1e-6).unwrap(),
        );
        let report = audit_privacy(&case).unwrap();
        assert!(!report.pass);
    }
}
