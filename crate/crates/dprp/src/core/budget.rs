//! Privacy budget carried by every mechanism.

use crate::error::{Error, Result};

/// An `(epsilon, delta)` budget together with the adjacency bound `beta`
/// (neighbors differ in one coordinate by at most `beta`) and the number of
/// repetitions `t` used by mechanisms that split their budget.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PrivacyBudget {
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
    pub repetitions: u32,
}

impl PrivacyBudget {
    /// Approximate-DP budget with `beta = 1`, `t = 1`.
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        let b = Self {
            epsilon,
            delta,
            beta: 1.0,
            repetitions: 1,
        };
        b.validate()?;
        Ok(b)
    }

    /// Pure-epsilon budget (`delta = 0`).
    pub fn pure(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, 0.0)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = beta;
        self.validate()?;
        Ok(self)
    }

    pub fn with_repetitions(mut self, t: u32) -> Result<Self> {
        self.repetitions = t;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Validation(format!(
                "epsilon must be positive and finite, got {}",
                self.epsilon
            )));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::Validation(format!(
                "delta must lie in [0, 1), got {}",
                self.delta
            )));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::Validation(format!(
                "beta must be positive and finite, got {}",
                self.beta
            )));
        }
        if self.repetitions == 0 {
            return Err(Error::Validation("repetitions must be >= 1".into()));
        }
        Ok(())
    }

    /// Fails unless `delta == 0`; used by pure-DP mechanisms.
    pub fn require_pure(&self) -> Result<()> {
        if self.delta != 0.0 {
            return Err(Error::Validation(format!(
                "mechanism requires delta = 0 (pure DP), got delta = {}",
                self.delta
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(PrivacyBudget::new(0.0, 0.0).is_err());
        assert!(PrivacyBudget::new(-1.0, 0.0).is_err());
        assert!(PrivacyBudget::new(1.0, 1.0).is_err());
        assert!(PrivacyBudget::new(1.0, -0.1).is_err());
        assert!(PrivacyBudget::new(1.0, 0.5).unwrap().with_beta(0.0).is_err());
        assert!(PrivacyBudget::new(1.0, 0.0)
            .unwrap()
            .with_repetitions(0)
            .is_err());
    }

    #[test]
    fn pure_budget_enforced() {
        assert!(PrivacyBudget::pure(2.0).unwrap().require_pure().is_ok());
        assert!(PrivacyBudget::new(2.0, 1e-6)
            .unwrap()
            .require_pure()
            .is_err());
    }
}
