//! Experimental harness: the retrieval benchmark, the k-NN classification
//! mode, exact privacy audits, and the Monte Carlo oracle runner.

pub mod audit;
pub mod oracle;
pub mod retrieval;
pub mod synth;

pub use audit::{audit_privacy, AuditCase, AuditMechanism, AuditReport, Mutation, AUDIT_TOL};
pub use oracle::{McEstimate, Moments};
pub use retrieval::{
    accuracy, build_gold_standard, knn_classify, precision_recall_at, run_retrieval, BenchCell,
    BenchMechanism, MetricsRow, RetrievalTask,
};
pub use synth::{sphere_dataset, uniform_values, unit_pair_with_cosine};
