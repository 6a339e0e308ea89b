//! Data vectors and datasets.

use crate::error::{Error, Result};

/// A dense real vector with entries bounded by `[-bound, bound]`.
///
/// Vectors must have a positive l2 norm: mechanisms assume there is no
/// all-zero data sample.
#[derive(Clone, Debug, PartialEq)]
pub struct DataVector {
    values: Vec<f64>,
    bound: f64,
}

impl DataVector {
    /// Checked constructor; enforces the bound and the nonzero-norm
    /// invariant.
    pub fn new(values: Vec<f64>, bound: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Validation("vector must have length >= 1".into()));
        }
        if !(bound > 0.0) || !bound.is_finite() {
            return Err(Error::Validation(format!(
                "bound must be positive and finite, got {bound}"
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Validation(format!("entry {i} is not finite")));
            }
            if v.abs() > bound {
                return Err(Error::Validation(format!(
                    "entry {i} = {v} exceeds bound {bound}"
                )));
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::Validation("vector has zero norm".into()));
        }
        Ok(Self { values, bound })
    }

    /// Constructor with `bound = 1`.
    pub fn unit_bound(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1.0)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm_l2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// A dense dataset: rows share the dimension and the bound. Rows are stored
/// unvalidated so that [`validate_dataset`] can report violations; the
/// privatization paths construct checked [`DataVector`]s per row.
#[derive(Clone, Debug)]
pub struct Dataset {
    rows: Vec<Vec<f64>>,
    dim: usize,
    bound: f64,
    labels: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, bound: f64) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Validation("dataset must be nonempty".into()));
        }
        let dim = rows[0].len();
        if dim == 0 {
            return Err(Error::Validation("rows must have length >= 1".into()));
        }
        Ok(Self {
            rows,
            dim,
            bound,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rows.len() {
            return Err(Error::Validation(format!(
                "label count {} does not match row count {}",
                labels.len(),
                self.rows.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.iter().map(|r| r.as_slice())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Checked view of one row.
    pub fn row_vector(&self, i: usize) -> Result<DataVector> {
        DataVector::new(self.rows[i].clone(), self.bound)
    }
}

/// A single invariant violation found by [`validate_dataset`].
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub enum Violation {
    OutOfBound { row: usize, col: usize, value: f64 },
    ZeroNorm { row: usize },
    DimensionMismatch { row: usize, expected: usize, got: usize },
    NonFinite { row: usize, col: usize },
}

/// Outcome of dataset validation; valid iff no violations were found.
#[derive(Clone, Debug, Default, serde::Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every row against the dataset invariants: entries within
/// `[-bound, bound]`, uniform dimension, nonzero norm.
pub fn validate_dataset(d: &Dataset) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (i, row) in d.rows.iter().enumerate() {
        if row.len() != d.dim {
            report.violations.push(Violation::DimensionMismatch {
                row: i,
                expected: d.dim,
                got: row.len(),
            });
            continue;
        }
        let mut all_zero = true;
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() {
                report.violations.push(Violation::NonFinite { row: i, col: j });
                all_zero = false;
                continue;
            }
            if v != 0.0 {
                all_zero = false;
            }
            if v.abs() > d.bound {
                report
                    .violations
                    .push(Violation::OutOfBound { row: i, col: j, value: v });
            }
        }
        if all_zero {
            report.violations.push(Violation::ZeroNorm { row: i });
        }
    }
    report
}

/// Divides each column by its maximum absolute value so entries land in
/// `[-1, 1]`; all-zero columns are left untouched. Sets the bound to 1.
pub fn max_normalize(d: &Dataset) -> Result<Dataset> {
    let dim = d.dim;
    let mut col_max = vec![0.0f64; dim];
    for row in &d.rows {
        for (j, &v) in row.iter().enumerate().take(dim) {
            if v.abs() > col_max[j] {
                col_max[j] = v.abs();
            }
        }
    }
    let rows: Vec<Vec<f64>> = d
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| if col_max[j] > 0.0 { v / col_max[j] } else { v })
                .collect()
        })
        .collect();
    let mut out = Dataset::new(rows, 1.0)?;
    out.labels = d.labels.clone();
    Ok(out)
}
