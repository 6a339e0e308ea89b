//! Data model, privacy budget, deterministic randomness, and dataset IO.

mod budget;
mod data;
mod io;
mod rng;

pub use budget::PrivacyBudget;
pub use data::{max_normalize, validate_dataset, DataVector, Dataset, ValidationReport, Violation};
pub use io::{
    read_csv_dataset, read_matrix, read_signs, write_matrix_f32, write_matrix_f64, write_signs,
};
pub use rng::{mix_seed, stream_labels, RngStream};
