//! Full-precision DP mechanisms: optimal Gaussian noise on raw data, the
//! classic and optimal Gaussian mechanisms over dense projections, the
//! Laplace mechanism, Rademacher projections with closed-form sensitivity,
//! and DP-OPORP.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::core::{DataVector, PrivacyBudget, RngStream};
use crate::error::{Error, Result};
use crate::mechanisms::{
    classic_gaussian_sigma, laplace_lambda, optimal_gaussian_sigma, sensitivity_from_matrix,
    sensitivity_l2_bound, NoiseCalibration, NoiseDistribution,
};
use crate::projections::{
    materialize, oporp_project, project, Payload, ProjectionOp, ProjectionSpec, Provenance, Sketch,
};

/// Mechanism selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DpRpVariant {
    /// Optimal Gaussian noise added to the raw vector (length p output).
    RawGOpt,
    /// Gaussian projection + classic Gaussian mechanism.
    RpG,
    /// Gaussian projection + optimal Gaussian mechanism.
    RpGOpt,
    /// Gaussian projection + Laplace mechanism (pure epsilon).
    RpL,
    /// Rademacher projection + optimal Gaussian mechanism (sensitivity beta).
    RpGOptB,
    /// OPORP + optimal Gaussian mechanism (sensitivity beta).
    Oporp,
}

impl DpRpVariant {
    pub fn name(&self) -> &'static str {
        match self {
            DpRpVariant::RawGOpt => "raw-g-opt",
            DpRpVariant::RpG => "dp-rp-g",
            DpRpVariant::RpGOpt => "dp-rp-g-opt",
            DpRpVariant::RpL => "dp-rp-l",
            DpRpVariant::RpGOptB => "dp-rp-g-opt-b",
            DpRpVariant::Oporp => "dp-oporp",
        }
    }
}

/// How the sensitivity fed to the calibration is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensitivityMode {
    /// Max row norm of the realized matrix (default for Gaussian/uniform
    /// projections; equals the closed form for Rademacher).
    ExactFromMatrix,
    /// Parameter-only high-probability bound with a delta/2 + delta/2 split.
    AnalyticBound,
}

/// Mechanism configuration.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct DpRpConfig {
    pub variant: DpRpVariant,
    /// Absent for the raw variant (which needs only the dimension).
    pub spec: Option<ProjectionSpec>,
    pub budget: PrivacyBudget,
    pub sensitivity_mode: SensitivityMode,
}

impl DpRpConfig {
    pub fn new(variant: DpRpVariant, spec: Option<ProjectionSpec>, budget: PrivacyBudget) -> Self {
        Self {
            variant,
            spec,
            budget,
            sensitivity_mode: SensitivityMode::ExactFromMatrix,
        }
    }

    pub fn with_sensitivity_mode(mut self, mode: SensitivityMode) -> Self {
        self.sensitivity_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        match self.variant {
            DpRpVariant::RawGOpt => {
                if self.spec.is_some() {
                    return Err(Error::Validation(
                        "raw variant takes no projection spec".into(),
                    ));
                }
                if self.budget.delta <= 0.0 {
                    return Err(Error::Validation("raw-g-opt requires delta > 0".into()));
                }
                return Ok(());
            }
            DpRpVariant::RpL => {
                self.budget.require_pure()?;
                if self.sensitivity_mode == SensitivityMode::AnalyticBound {
                    // A high-probability bound leaves a failure event, which
                    // breaks pure epsilon-DP; the realized matrix must be used.
                    return Err(Error::Validation(
                        "the Laplace variant requires the exact sensitivity of the realized matrix"
                            .into(),
                    ));
                }
            }
            DpRpVariant::RpG => {
                if !(self.budget.delta > 0.0 && self.budget.delta < 0.5) {
                    return Err(Error::Validation(
                        "delta out of range for classic mechanism (requires 0 < delta < 1/2)"
                            .into(),
                    ));
                }
            }
            _ => {
                if self.budget.delta <= 0.0 {
                    return Err(Error::Validation(format!(
                        "{} requires delta > 0",
                        self.variant.name()
                    )));
                }
                // The parameter-only bound describes Gaussian matrices; the
                // Rademacher/OPORP variants have a deterministic closed form.
                if self.sensitivity_mode == SensitivityMode::AnalyticBound
                    && matches!(self.variant, DpRpVariant::RpGOptB | DpRpVariant::Oporp)
                {
                    return Err(Error::Validation(format!(
                        "{} has closed-form sensitivity beta; the analytic bound does not apply",
                        self.variant.name()
                    )));
                }
            }
        }
        let spec = self
            .spec
            .as_ref()
            .ok_or_else(|| Error::Validation("projection variant requires a spec".into()))?;
        spec.validate()?;
        match self.variant {
            DpRpVariant::RpGOptB if !spec.kind.is_rademacher() => Err(Error::Validation(
                "dp-rp-g-opt-b requires a Rademacher projection".into(),
            )),
            DpRpVariant::Oporp if spec.kind != crate::projections::ProjectionKind::Oporp => {
                Err(Error::Validation("dp-oporp requires an oporp spec".into()))
            }
            DpRpVariant::RpG | DpRpVariant::RpGOpt | DpRpVariant::RpL
                if spec.kind == crate::projections::ProjectionKind::Oporp =>
            {
                Err(Error::Validation(
                    "dense variants cannot run on an oporp spec".into(),
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Returns exactly the calibration `privatize` would apply, given the
/// materialized operator (pass `None` for variants with closed-form
/// sensitivity or the raw variant).
pub fn audit_noise_scale(cfg: &DpRpConfig, op: Option<&ProjectionOp>) -> Result<NoiseCalibration> {
    cfg.validate()?;
    let eps = cfg.budget.epsilon;
    let delta = cfg.budget.delta;
    let beta = cfg.budget.beta;
    let (distribution, scale, sensitivity) = match cfg.variant {
        // One coordinate moves by at most beta, so Delta2 = beta for raw
        // data; Rademacher rows and OPORP bins give the same closed form.
        DpRpVariant::RawGOpt | DpRpVariant::RpGOptB | DpRpVariant::Oporp => (
            NoiseDistribution::Gaussian,
            optimal_gaussian_sigma(beta, eps, delta)?,
            beta,
        ),
        DpRpVariant::RpG | DpRpVariant::RpGOpt => {
            let spec = cfg.spec.as_ref().unwrap();
            let (delta2, mech_delta) = match cfg.sensitivity_mode {
                SensitivityMode::ExactFromMatrix => {
                    let op = op.ok_or_else(|| {
                        Error::Calibration("exact sensitivity needs the realized operator".into())
                    })?;
                    (sensitivity_from_matrix(op.dense_matrix()?, beta)?.l2, delta)
                }
                SensitivityMode::AnalyticBound => (
                    sensitivity_l2_bound(spec.p, spec.k, beta, delta / 2.0)?,
                    delta / 2.0,
                ),
            };
            let sigma = match cfg.variant {
                DpRpVariant::RpG => classic_gaussian_sigma(delta2, eps, mech_delta)?,
                _ => optimal_gaussian_sigma(delta2, eps, mech_delta)?,
            };
            (NoiseDistribution::Gaussian, sigma, delta2)
        }
        DpRpVariant::RpL => {
            let op = op.ok_or_else(|| {
                Error::Calibration("exact sensitivity needs the realized operator".into())
            })?;
            let delta1 = sensitivity_from_matrix(op.dense_matrix()?, beta)?.l1;
            (
                NoiseDistribution::Laplace,
                laplace_lambda(delta1, eps)?,
                delta1,
            )
        }
    };
    Ok(NoiseCalibration {
        distribution,
        scale,
        epsilon: eps,
        delta,
        sensitivity,
    })
}

fn sample_noise(dist: NoiseDistribution, scale: f64, rng: &mut impl Rng) -> f64 {
    match dist {
        NoiseDistribution::Gaussian => {
            let g: f64 = StandardNormal.sample(rng);
            scale * g
        }
        NoiseDistribution::Laplace => {
            // Difference of two Exp(1) draws is a standard Laplace.
            let a: f64 = Exp1.sample(rng);
            let b: f64 = Exp1.sample(rng);
            scale * (a - b)
        }
    }
}

/// Runs the configured mechanism on one vector. The output sketch carries
/// the realized calibration in its provenance. Raw outputs have length p,
/// projected outputs length k.
pub fn privatize(cfg: &DpRpConfig, u: &DataVector, rng: &RngStream) -> Result<Sketch> {
    let op = match cfg.variant {
        DpRpVariant::RawGOpt => None,
        _ => Some(materialize(cfg.spec.as_ref().ok_or_else(|| {
            Error::Validation("projection variant requires a spec".into())
        })?)?),
    };
    privatize_with_op(cfg, op.as_ref(), u, rng)
}

/// Like [`privatize`] but reuses an already materialized operator, so a
/// dataset is projected through one matrix rather than re-sampling it per
/// row.
pub fn privatize_with_op(
    cfg: &DpRpConfig,
    op: Option<&ProjectionOp>,
    u: &DataVector,
    rng: &RngStream,
) -> Result<Sketch> {
    let calibration = audit_noise_scale(cfg, op)?;
    let (mut values, digest) = match cfg.variant {
        DpRpVariant::RawGOpt => (u.values().to_vec(), format!("raw-p{}", u.dim())),
        DpRpVariant::Oporp => {
            let op = op.unwrap();
            let sk = oporp_project(op, u)?;
            let Payload::Real(v) = sk.payload else { unreachable!() };
            (v, op.spec().digest())
        }
        _ => {
            let op = op.unwrap();
            let sk = project(op, u)?;
            let Payload::Real(v) = sk.payload else { unreachable!() };
            (v, op.spec().digest())
        }
    };
    let mut noise_rng = rng.rng();
    for v in &mut values {
        *v += sample_noise(calibration.distribution, calibration.scale, &mut noise_rng);
    }
    let mut provenance = Provenance::non_private(cfg.variant.name(), digest);
    provenance.spec = cfg.spec;
    provenance.budget = Some(cfg.budget);
    provenance.noise_scale = Some(calibration.scale);
    provenance.sensitivity = Some(calibration.sensitivity);
    Ok(Sketch {
        payload: Payload::Real(values),
        provenance,
    })
}

/// Privatizes every row of a dataset in parallel. Row `i` draws its noise
/// from `base.derive2(NOISE, i)`, so results are independent of scheduling
/// order and reproducible.
pub fn privatize_dataset(
    cfg: &DpRpConfig,
    rows: &[DataVector],
    base: &RngStream,
) -> Result<Vec<Sketch>> {
    use rayon::prelude::*;
    cfg.validate()?;
    let op = match cfg.variant {
        DpRpVariant::RawGOpt => None,
        _ => Some(materialize(cfg.spec.as_ref().unwrap())?),
    };
    rows.par_iter()
        .enumerate()
        .map(|(i, u)| {
            let stream = base.derive2(crate::core::stream_labels::NOISE, i as u64);
            privatize_with_op(cfg, op.as_ref(), u, &stream)
        })
        .collect()
}
