//! Differentially private random projections (DP-RP) and sign random
//! projections (DP-SignRP).
//!
//! The crate provides:
//!
//! - noise-calibrated projection mechanisms (Gaussian, Laplace, optimal
//!   Gaussian) over dense random projections and OPORP count-sketches,
//! - randomized-response sign mechanisms with smooth per-bit flipping
//!   probabilities, plus individual-DP (iDP) sign variants,
//! - unbiased similarity estimators with closed-form variance predictions,
//! - an empirical harness: retrieval benchmark, exact privacy audits, and a
//!   Monte Carlo oracle runner backing the numerical claims.
//!
//! All randomness flows through [`core::RngStream`], a splittable seeded
//! stream, so every sketch is a pure function of its inputs.

// Parameter guards use `!(x > 0.0)` so NaN inputs are rejected along with
// out-of-range ones.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod core;
pub mod dp_rp;
pub mod dp_sign;
pub mod error;
pub mod estimators;
pub mod evalbench;
pub mod idp_sign;
pub mod mechanisms;
pub mod projections;

pub use error::{Error, Result};
