//! JSON configuration loading with validation and defaults
//! (beta = 1, delta = 1e-6 for approximate-DP variants, t = 1).

use std::path::{Path, PathBuf};

use dprp::core::PrivacyBudget;
use dprp::dp_rp::{DpRpConfig, DpRpVariant, SensitivityMode};
use dprp::dp_sign::SignOporpVariant;
use dprp::error::{Error, Result};
use dprp::projections::ProjectionSpec;

pub const DEFAULT_DELTA: f64 = 1e-6;

fn suggest(unknown: &str, options: &[&str]) -> Error {
    Error::Config(format!(
        "unknown variant '{unknown}'; expected one of: {}",
        options.join(", ")
    ))
}

/// Raw privatization config as written by users. Unknown fields are
/// rejected with their name; missing required fields report their path.
#[derive(Clone, Debug, serde::Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct PrivatizeConfig {
    pub variant: String,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub t: Option<u32>,
    #[serde(default)]
    pub k: Option<usize>,
    /// Norm lower bound for the randomized-response sign mechanism.
    #[serde(default)]
    pub m: Option<f64>,
    #[serde(default)]
    pub sign: bool,
    #[serde(default)]
    pub idp: bool,
    #[serde(default)]
    pub sensitivity_mode: Option<String>,
    /// Serialize real sketches at 32-bit precision (explicitly lossy).
    #[serde(default)]
    pub f32_output: bool,
}

/// Fully resolved mechanism selection.
#[derive(Clone, Debug)]
pub enum Mechanism {
    Full(DpRpConfig),
    Sign {
        spec: ProjectionSpec,
        budget: PrivacyBudget,
        variant: SignVariant,
    },
    Idp {
        spec: ProjectionSpec,
        budget: PrivacyBudget,
        gaussian: bool,
    },
}

#[derive(Clone, Copy, Debug)]
pub enum SignVariant {
    Rr { m: f64 },
    RrSmooth,
    Oporp(SignOporpVariant),
}

pub fn load_config(path: &Path) -> Result<PrivatizeConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: PrivatizeConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(cfg)
}

impl PrivatizeConfig {
    /// Applies defaults and resolves the variant string, checking parameter
    /// ranges up front.
    pub fn resolve(&self, p: usize, seed: u64) -> Result<(Mechanism, bool)> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.sign && self.idp {
            return Err(Error::Config("choose one of sign / idp, not both".into()));
        }
        let beta = self.beta.unwrap_or(1.0);
        let t = self.t.unwrap_or(1);
        let variant = self.variant.replace('_', "-");
        let k = self.k;
        let need_k = |k: Option<usize>| {
            k.ok_or_else(|| Error::Config("k is required for projection variants".into()))
        };

        let mechanism = if self.idp {
            let budget = PrivacyBudget::new(
                self.epsilon,
                match variant.as_str() {
                    "g" => self.delta.unwrap_or(DEFAULT_DELTA),
                    _ => self.delta.unwrap_or(0.0),
                },
            )?
            .with_beta(beta)?;
            let spec = ProjectionSpec::rademacher(p, need_k(k)?, seed);
            match variant.as_str() {
                "g" => Mechanism::Idp { spec, budget, gaussian: true },
                "rr" => Mechanism::Idp { spec, budget, gaussian: false },
                other => return Err(suggest(other, &["g", "rr"])),
            }
        } else if self.sign {
            let delta = self.delta.unwrap_or(match variant.as_str() {
                "rr" => DEFAULT_DELTA,
                _ => 0.0,
            });
            let budget = PrivacyBudget::new(self.epsilon, delta)?
                .with_beta(beta)?
                .with_repetitions(t)?;
            let k = need_k(k)?;
            match variant.as_str() {
                "rr" => Mechanism::Sign {
                    spec: ProjectionSpec::gaussian(p, k, seed),
                    budget,
                    variant: SignVariant::Rr { m: self.m.unwrap_or(0.0) },
                },
                "rr-smooth" => Mechanism::Sign {
                    spec: ProjectionSpec::rademacher(p, k, seed),
                    budget,
                    variant: SignVariant::RrSmooth,
                },
                "oporp-rr" => Mechanism::Sign {
                    spec: ProjectionSpec::oporp(p, k, seed),
                    budget,
                    variant: SignVariant::Oporp(SignOporpVariant::Rr),
                },
                "oporp-rr-smooth" => Mechanism::Sign {
                    spec: ProjectionSpec::oporp(p, k, seed),
                    budget,
                    variant: SignVariant::Oporp(SignOporpVariant::RrSmooth),
                },
                other => {
                    return Err(suggest(
                        other,
                        &["rr", "rr-smooth", "oporp-rr", "oporp-rr-smooth"],
                    ))
                }
            }
        } else {
            let dp_variant = match variant.as_str() {
                "raw-g-opt" => DpRpVariant::RawGOpt,
                "rp-g" => DpRpVariant::RpG,
                "rp-g-opt" => DpRpVariant::RpGOpt,
                "rp-l" => DpRpVariant::RpL,
                "rp-g-opt-b" => DpRpVariant::RpGOptB,
                "oporp" => DpRpVariant::Oporp,
                other => {
                    return Err(suggest(
                        other,
                        &["raw-g-opt", "rp-g", "rp-g-opt", "rp-l", "rp-g-opt-b", "oporp"],
                    ))
                }
            };
            let delta = self.delta.unwrap_or(match dp_variant {
                DpRpVariant::RpL => 0.0,
                _ => DEFAULT_DELTA,
            });
            let budget = PrivacyBudget::new(self.epsilon, delta)?
                .with_beta(beta)?
                .with_repetitions(t)?;
            let spec = match dp_variant {
                DpRpVariant::RawGOpt => None,
                DpRpVariant::RpGOptB => Some(ProjectionSpec::rademacher(p, need_k(k)?, seed)),
                DpRpVariant::Oporp => Some(ProjectionSpec::oporp(p, need_k(k)?, seed)),
                _ => Some(ProjectionSpec::gaussian(p, need_k(k)?, seed)),
            };
            let mut cfg = DpRpConfig::new(dp_variant, spec, budget);
            if let Some(mode) = &self.sensitivity_mode {
                cfg = cfg.with_sensitivity_mode(match mode.replace('_', "-").as_str() {
                    "exact-from-matrix" => SensitivityMode::ExactFromMatrix,
                    "analytic-bound" => SensitivityMode::AnalyticBound,
                    other => {
                        return Err(suggest(other, &["exact-from-matrix", "analytic-bound"]))
                    }
                });
            }
            cfg.validate()?;
            Mechanism::Full(cfg)
        };
        Ok((mechanism, self.f32_output))
    }
}

/// Synthetic data description for the benchmark harness.
#[derive(Clone, Debug, serde::Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub p: usize,
    #[serde(default = "default_db_rows")]
    pub database_rows: usize,
    #[serde(default = "default_query_rows")]
    pub query_rows: usize,
    #[serde(default = "default_norms")]
    pub norms: Vec<f64>,
}

fn default_db_rows() -> usize {
    2000
}
fn default_query_rows() -> usize {
    200
}
fn default_norms() -> Vec<f64> {
    vec![1.0, 5.0, 10.0]
}

/// Benchmark harness configuration.
#[derive(Clone, Debug, serde::Deserialize, serde::Serialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub database_csv: Option<PathBuf>,
    #[serde(default)]
    pub queries_csv: Option<PathBuf>,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default = "default_gold")]
    pub gold_size: usize,
    #[serde(default = "default_r_grid")]
    pub r_grid: Vec<usize>,
    #[serde(default = "default_seeds")]
    pub seeds: usize,
    pub cells: Vec<dprp::evalbench::BenchCell>,
    /// Labels for the k-NN mode, one per database row.
    #[serde(default)]
    pub labels_csv: Option<PathBuf>,
    #[serde(default = "default_votes")]
    pub votes: usize,
}

fn default_gold() -> usize {
    50
}
fn default_r_grid() -> Vec<usize> {
    vec![1, 5, 10, 20, 50]
}
fn default_seeds() -> usize {
    10
}
fn default_votes() -> usize {
    5
}

pub fn load_bench_config(path: &Path) -> Result<BenchConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: BenchConfig =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if cfg.cells.is_empty() {
        return Err(Error::Config("cells must be nonempty".into()));
    }
    for (i, cell) in cfg.cells.iter().enumerate() {
        if !(cell.epsilon > 0.0) {
            return Err(Error::Config(format!("cells[{i}].epsilon must be positive")));
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg: PrivatizeConfig =
            serde_json::from_str(r#"{"variant": "rp_g_opt", "epsilon": 1.0, "k": 8}"#).unwrap();
        let (mech, _) = cfg.resolve(16, 0).unwrap();
        match mech {
            Mechanism::Full(c) => {
                assert_eq!(c.budget.delta, DEFAULT_DELTA);
                assert_eq!(c.budget.beta, 1.0);
                assert_eq!(c.budget.repetitions, 1);
            }
            _ => panic!("expected full-precision mechanism"),
        }
    }

    #[test]
    fn bad_epsilon_rejected() {
        let cfg: PrivatizeConfig =
            serde_json::from_str(r#"{"variant": "oporp", "epsilon": 0.0, "k": 8}"#).unwrap();
        assert!(cfg.resolve(16, 0).is_err());
    }

    #[test]
    fn unknown_variant_lists_options() {
        let cfg: PrivatizeConfig =
            serde_json::from_str(r#"{"variant": "rp-q", "epsilon": 1.0, "k": 8}"#).unwrap();
        let err = cfg.resolve(16, 0).unwrap_err().to_string();
        assert!(err.contains("rp-q") && err.contains("rp-g-opt-b"), "{err}");
    }

    #[test]
    fn unknown_field_rejected_with_name() {
        let err = serde_json::from_str::<PrivatizeConfig>(
            r#"{"variant": "oporp", "epsilon": 1.0, "bogus": 3}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn sign_variants_resolve() {
        let cfg: PrivatizeConfig = serde_json::from_str(
            r#"{"variant": "oporp-rr-smooth", "epsilon": 2.0, "k": 8, "t": 2, "sign": true}"#,
        )
        .unwrap();
        let (mech, _) = cfg.resolve(16, 0).unwrap();
        match mech {
            Mechanism::Sign { budget, variant, .. } => {
                assert_eq!(budget.delta, 0.0);
                assert_eq!(budget.repetitions, 2);
                assert!(matches!(variant, SignVariant::Oporp(SignOporpVariant::RrSmooth)));
            }
            _ => panic!("expected sign mechanism"),
        }
    }
}
