//! Public projection operators: dense Gaussian / uniform / very-sparse
//! random projections, OPORP (one permutation + one random projection,
//! a count-sketch with fixed-length binning), and sign extraction.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::core::{stream_labels, DataVector, PrivacyBudget, RngStream};
use crate::error::{Error, Result};

/// Entry distribution of the projection operator. All dense kinds are
/// normalized so that `E[w_ij^2] = 1`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum ProjectionKind {
    /// iid N(0, 1) entries.
    Gaussian,
    /// `sqrt(3) * unif[-1, 1]` entries.
    Uniform,
    /// `+-sqrt(s)` with probability `1/(2s)` each, `0` otherwise.
    /// `s = 1` is the Rademacher distribution.
    VerySparse { s: f64 },
    /// One permutation + one Rademacher projection vector, fixed-length bins.
    Oporp,
}

impl ProjectionKind {
    pub fn is_rademacher(&self) -> bool {
        matches!(self, ProjectionKind::VerySparse { s } if *s == 1.0)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProjectionKind::Gaussian => "gaussian",
            ProjectionKind::Uniform => "uniform",
            ProjectionKind::VerySparse { s } if *s == 1.0 => "rademacher",
            ProjectionKind::VerySparse { .. } => "very_sparse",
            ProjectionKind::Oporp => "oporp",
        }
    }
}

/// Deterministic description of a projection operator. The same spec always
/// materializes to the identical operator.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProjectionSpec {
    pub kind: ProjectionKind,
    pub p: usize,
    pub k: usize,
    pub seed: u64,
}

impl ProjectionSpec {
    pub fn gaussian(p: usize, k: usize, seed: u64) -> Self {
        Self { kind: ProjectionKind::Gaussian, p, k, seed }
    }

    pub fn rademacher(p: usize, k: usize, seed: u64) -> Self {
        Self { kind: ProjectionKind::VerySparse { s: 1.0 }, p, k, seed }
    }

    pub fn oporp(p: usize, k: usize, seed: u64) -> Self {
        Self { kind: ProjectionKind::Oporp, p, k, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.k == 0 {
            return Err(Error::Validation("p and k must be >= 1".into()));
        }
        match self.kind {
            ProjectionKind::VerySparse { s } if !(s >= 1.0) => Err(Error::Validation(
                format!("very_sparse requires s >= 1, got {s}"),
            )),
            ProjectionKind::Oporp if self.k > self.p => Err(Error::Validation(format!(
                "oporp requires k <= p (k = {}, p = {})",
                self.k, self.p
            ))),
            _ => Ok(()),
        }
    }

    /// Content hash identifying the operator; estimators refuse to combine
    /// sketches from different digests.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind.name().as_bytes());
        if let ProjectionKind::VerySparse { s } = self.kind {
            h.update(s.to_le_bytes());
        }
        h.update((self.p as u64).to_le_bytes());
        h.update((self.k as u64).to_le_bytes());
        h.update(self.seed.to_le_bytes());
        let out = h.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    fn projection_stream(&self) -> RngStream {
        RngStream::from_seed(self.seed).derive(stream_labels::PROJECTION)
    }
}

/// Dense p x k matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    p: usize,
    k: usize,
    entries: Vec<f64>,
}

impl DenseMatrix {
    pub fn from_entries(p: usize, k: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), p * k, "entry count must equal p * k");
        Self { p, k, entries }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.k..(i + 1) * self.k]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }

    /// `max_i |w_ij|` for each column j.
    pub fn column_abs_max(&self) -> Vec<f64> {
        let mut out = vec![0.0f64; self.k];
        for i in 0..self.p {
            for (j, &v) in self.row(i).iter().enumerate() {
                if v.abs() > out[j] {
                    out[j] = v.abs();
                }
            }
        }
        out
    }

    /// `(1/sqrt k) W^T u` without validation.
    fn apply_scaled(&self, u: &[f64]) -> Vec<f64> {
        let scale = 1.0 / (self.k as f64).sqrt();
        let mut out = vec![0.0f64; self.k];
        for (i, &ui) in u.iter().enumerate() {
            if ui == 0.0 {
                continue;
            }
            for (j, &w) in self.row(i).iter().enumerate() {
                out[j] += ui * w;
            }
        }
        for v in &mut out {
            *v *= scale;
        }
        out
    }
}

/// A materialized operator: either a dense matrix or the OPORP permutation
/// plus projection vector. Immutable and shareable across threads.
#[derive(Clone, Debug)]
pub enum ProjectionOp {
    Dense {
        spec: ProjectionSpec,
        matrix: DenseMatrix,
    },
    Oporp {
        spec: ProjectionSpec,
        /// Bijection on [p]: coordinate i moves to position permutation[i].
        permutation: Vec<u32>,
        /// Rademacher projection vector of length p.
        weights: Vec<f64>,
    },
}

impl ProjectionOp {
    pub fn spec(&self) -> &ProjectionSpec {
        match self {
            ProjectionOp::Dense { spec, .. } | ProjectionOp::Oporp { spec, .. } => spec,
        }
    }

    pub fn dense_matrix(&self) -> Result<&DenseMatrix> {
        match self {
            ProjectionOp::Dense { matrix, .. } => Ok(matrix),
            ProjectionOp::Oporp { .. } => {
                Err(Error::Unsupported("operator is OPORP, not dense".into()))
            }
        }
    }
}

fn sample_dense_entry(kind: &ProjectionKind, rng: &mut impl Rng) -> f64 {
    match kind {
        ProjectionKind::Gaussian => StandardNormal.sample(rng),
        ProjectionKind::Uniform => 3.0f64.sqrt() * rng.random_range(-1.0..=1.0),
        ProjectionKind::VerySparse { s } => {
            let u: f64 = rng.random();
            let half = 0.5 / s;
            if u < half {
                s.sqrt()
            } else if u < 2.0 * half {
                -s.sqrt()
            } else {
                0.0
            }
        }
        ProjectionKind::Oporp => unreachable!("oporp has no dense entries"),
    }
}

/// Materializes the operator described by the spec. Deterministic: the same
/// spec yields a bit-identical operator.
pub fn materialize(spec: &ProjectionSpec) -> Result<ProjectionOp> {
    spec.validate()?;
    let mut rng = spec.projection_stream().rng();
    match spec.kind {
        ProjectionKind::Oporp => {
            // Seeded Fisher-Yates permutation, then the Rademacher vector.
            let mut permutation: Vec<u32> = (0..spec.p as u32).collect();
            for i in (1..spec.p).rev() {
                let j = rng.random_range(0..=i);
                permutation.swap(i, j);
            }
            let weights: Vec<f64> = (0..spec.p)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect();
            Ok(ProjectionOp::Oporp {
                spec: *spec,
                permutation,
                weights,
            })
        }
        _ => {
            let entries: Vec<f64> = (0..spec.p * spec.k)
                .map(|_| sample_dense_entry(&spec.kind, &mut rng))
                .collect();
            Ok(ProjectionOp::Dense {
                spec: *spec,
                matrix: DenseMatrix::from_entries(spec.p, spec.k, entries),
            })
        }
    }
}

/// Sketch payload: full-precision values or a +-1 sign vector.
#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Real(Vec<f64>),
    Signs(Vec<i8>),
}

impl Payload {
    pub fn len(&self) -> usize {
        match self {
            Payload::Real(v) => v.len(),
            Payload::Signs(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn real(&self) -> Result<&[f64]> {
        match self {
            Payload::Real(v) => Ok(v),
            Payload::Signs(_) => Err(Error::Unsupported("expected a real payload".into())),
        }
    }

    pub fn signs(&self) -> Result<&[i8]> {
        match self {
            Payload::Signs(v) => Ok(v),
            Payload::Real(_) => Err(Error::Unsupported("expected a sign payload".into())),
        }
    }
}

/// Where a sketch came from: mechanism, operator digest, budget, and the
/// calibration actually used. `NON_PRIVATE` marks plain projections.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub mechanism: String,
    pub spec_digest: String,
    /// The projection description, when one was involved.
    pub spec: Option<ProjectionSpec>,
    pub budget: Option<PrivacyBudget>,
    /// Gaussian sigma or Laplace lambda actually applied.
    pub noise_scale: Option<f64>,
    /// Sensitivity the noise was calibrated against.
    pub sensitivity: Option<f64>,
    /// Uniform per-bit randomized-response strength, when applicable.
    pub eps_prime: Option<f64>,
    /// Sign-change budget split (N+ or its iDP analogue).
    pub n_plus: Option<usize>,
    /// Histogram of per-bit ceiling levels for smooth mechanisms.
    pub l_histogram: Option<Vec<(u32, usize)>>,
    /// Positions whose pre-sign value was exactly zero.
    pub zero_positions: Vec<usize>,
    pub notes: Vec<String>,
}

pub const NON_PRIVATE: &str = "non-private";

impl Provenance {
    pub fn non_private(mechanism: &str, digest: String) -> Self {
        Self {
            mechanism: mechanism.to_string(),
            spec_digest: digest,
            spec: None,
            budget: None,
            noise_scale: None,
            sensitivity: None,
            eps_prime: None,
            n_plus: None,
            l_histogram: None,
            zero_positions: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_spec(mut self, spec: ProjectionSpec) -> Self {
        self.spec = Some(spec);
        self
    }
}

/// A projection output tagged with its provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct Sketch {
    pub payload: Payload,
    pub provenance: Provenance,
}

impl Sketch {
    pub fn len(&self) -> usize {
        self.payload.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payload.is_empty()
    }
}

/// Dense random projection `x = (1/sqrt k) W^T u`.
pub fn project(op: &ProjectionOp, u: &DataVector) -> Result<Sketch> {
    let matrix = match op {
        ProjectionOp::Dense { matrix, .. } => matrix,
        ProjectionOp::Oporp { .. } => {
            return Err(Error::Unsupported(
                "use oporp_project for OPORP operators".into(),
            ))
        }
    };
    if u.dim() != matrix.p() {
        return Err(Error::Dimension(format!(
            "vector dim {} does not match operator p {}",
            u.dim(),
            matrix.p()
        )));
    }
    Ok(Sketch {
        payload: Payload::Real(matrix.apply_scaled(u.values())),
        provenance: Provenance::non_private(
            &format!("{NON_PRIVATE}-rp-{}", op.spec().kind.name()),
            op.spec().digest(),
        )
        .with_spec(*op.spec()),
    })
}

/// OPORP bin index of a (pre-permutation) coordinate, with zero-padding to
/// the next multiple of k. Padding preserves unbiasedness: padded positions
/// contribute nothing.
pub fn oporp_bin_of(position: u32, p: usize, k: usize) -> usize {
    let bin_len = p.div_ceil(k);
    (position as usize) / bin_len
}

/// OPORP: permute, split into k fixed-length bins, one dot product per bin.
/// Output is NOT scaled by `1/sqrt k` (the per-bin products already estimate
/// the inner product without it); dense projections are.
pub fn oporp_project(op: &ProjectionOp, u: &DataVector) -> Result<Sketch> {
    let (spec, permutation, weights) = match op {
        ProjectionOp::Oporp { spec, permutation, weights } => (spec, permutation, weights),
        ProjectionOp::Dense { .. } => {
            return Err(Error::Unsupported("use project for dense operators".into()))
        }
    };
    if u.dim() != spec.p {
        return Err(Error::Dimension(format!(
            "vector dim {} does not match operator p {}",
            u.dim(),
            spec.p
        )));
    }
    let mut bins = vec![0.0f64; spec.k];
    for (i, &ui) in u.values().iter().enumerate() {
        if ui == 0.0 {
            continue;
        }
        bins[oporp_bin_of(permutation[i], spec.p, spec.k)] += weights[i] * ui;
    }
    Ok(Sketch {
        payload: Payload::Real(bins),
        provenance: Provenance::non_private(&format!("{NON_PRIVATE}-oporp"), spec.digest())
            .with_spec(*spec),
    })
}

/// Entrywise signs of a real sketch. `sign(0) = +1` by convention; exact
/// zeros are flagged in the provenance (DP sign mechanisms replace them with
/// a fair coin instead).
pub fn take_signs(sk: &Sketch) -> Result<Sketch> {
    let values = sk.payload.real()?;
    let mut zero_positions = Vec::new();
    let signs: Vec<i8> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            if v == 0.0 {
                zero_positions.push(j);
                1
            } else if v > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect();
    let mut provenance = sk.provenance.clone();
    provenance.mechanism = format!("{}-signs", provenance.mechanism);
    provenance.zero_positions = zero_positions;
    Ok(Sketch {
        payload: Payload::Signs(signs),
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit(values: Vec<f64>) -> DataVector {
        let bound = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        DataVector::new(values, bound).unwrap()
    }

    #[test]
    fn same_seed_is_bit_identical() {
        for kind in [
            ProjectionKind::Gaussian,
            ProjectionKind::Uniform,
            ProjectionKind::VerySparse { s: 3.0 },
        ] {
            let spec = ProjectionSpec { kind, p: 20, k: 6, seed: 5 };
            let a = materialize(&spec).unwrap();
            let b = materialize(&spec).unwrap();
            assert_eq!(a.dense_matrix().unwrap(), b.dense_matrix().unwrap());
        }
        let spec = ProjectionSpec::oporp(20, 5, 5);
        let (a, b) = (materialize(&spec).unwrap(), materialize(&spec).unwrap());
        match (a, b) {
            (
                ProjectionOp::Oporp { permutation: pa, weights: wa, .. },
                ProjectionOp::Oporp { permutation: pb, weights: wb, .. },
            ) => {
                assert_eq!(pa, pb);
                assert_eq!(wa, wb);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn rademacher_entries_are_plus_minus_one() {
        let spec = ProjectionSpec::rademacher(50, 10, 3);
        let op = materialize(&spec).unwrap();
        let m = op.dense_matrix().unwrap();
        for i in 0..50 {
            for &v in m.row(i) {
                assert!(v == 1.0 || v == -1.0);
            }
        }
    }

    #[test]
    fn entry_second_moment_is_one() {
        for kind in [
            ProjectionKind::Gaussian,
            ProjectionKind::Uniform,
            ProjectionKind::VerySparse { s: 1.0 },
            ProjectionKind::VerySparse { s: 3.0 },
            ProjectionKind::VerySparse { s: 10.0 },
        ] {
            let spec = ProjectionSpec { kind, p: 1000, k: 1000, seed: 11 };
            let op = materialize(&spec).unwrap();
            let m = op.dense_matrix().unwrap();
            let mut sum_sq = 0.0;
            for i in 0..1000 {
                sum_sq += m.row(i).iter().map(|v| v * v).sum::<f64>();
            }
            let mean_sq = sum_sq / 1e6;
            assert!(
                (mean_sq - 1.0).abs() < 0.01,
                "E[w^2] = {mean_sq} for {:?}",
                kind
            );
        }
    }

    #[test]
    fn very_sparse_zero_mass() {
        let spec = ProjectionSpec { kind: ProjectionKind::VerySparse { s: 10.0 }, p: 500, k: 500, seed: 2 };
        let op = materialize(&spec).unwrap();
        let m = op.dense_matrix().unwrap();
        let zeros = (0..500)
            .flat_map(|i| m.row(i))
            .filter(|&&v| v == 0.0)
            .count();
        let frac = zeros as f64 / 250_000.0;
        assert!((frac - 0.9).abs() < 0.01, "zero fraction {frac}");
    }

    #[test]
    fn basis_vector_projects_to_scaled_row() {
        let spec = ProjectionSpec::gaussian(6, 4, 17);
        let op = materialize(&spec).unwrap();
        let m = op.dense_matrix().unwrap().clone();
        let mut e2 = vec![0.0; 6];
        e2[2] = 1.0;
        let sk = project(&op, &unit(e2)).unwrap();
        let scale = 1.0 / 2.0; // 1/sqrt(4)
        for (j, &x) in sk.payload.real().unwrap().iter().enumerate() {
            assert_relative_eq!(x, scale * m.get(2, j), max_relative = 1e-14);
        }
    }

    #[test]
    fn hand_projection_p2_k1() {
        let m = DenseMatrix::from_entries(2, 1, vec![1.0, -1.0]);
        let spec = ProjectionSpec::gaussian(2, 1, 0);
        let op = ProjectionOp::Dense { spec, matrix: m };
        let sk = project(&op, &unit(vec![3.0, 1.0])).unwrap();
        assert_eq!(sk.payload.real().unwrap(), &[2.0]);
    }

    #[test]
    fn projection_is_linear() {
        let spec = ProjectionSpec::gaussian(8, 5, 23);
        let op = materialize(&spec).unwrap();
        let u = unit(vec![0.1, -0.2, 0.3, 0.0, 0.5, -0.1, 0.2, 0.4]);
        let v = unit(vec![0.3, 0.1, -0.3, 0.2, -0.5, 0.2, 0.1, -0.2]);
        let sum: Vec<f64> = u
            .values()
            .iter()
            .zip(v.values())
            .map(|(a, b)| a + b)
            .collect();
        let su = project(&op, &u).unwrap();
        let sv = project(&op, &v).unwrap();
        let ssum = project(&op, &unit(sum)).unwrap();
        for j in 0..5 {
            assert_relative_eq!(
                ssum.payload.real().unwrap()[j],
                su.payload.real().unwrap()[j] + sv.payload.real().unwrap()[j],
                max_relative = 1e-12,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn oporp_hand_example() {
        let spec = ProjectionSpec::oporp(4, 2, 0);
        let op = ProjectionOp::Oporp {
            spec,
            permutation: vec![0, 1, 2, 3],
            weights: vec![1.0, -1.0, 1.0, 1.0],
        };
        let sk = oporp_project(&op, &unit(vec![1.0, 1.0, 1.0, 1.0])).unwrap();
        assert_eq!(sk.payload.real().unwrap(), &[0.0, 2.0]);
    }

    #[test]
    fn oporp_k_equals_p_is_signed_permutation() {
        let spec = ProjectionSpec::oporp(6, 6, 41);
        let op = materialize(&spec).unwrap();
        let u = unit(vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let sk = oporp_project(&op, &u).unwrap();
        let mut seen: Vec<f64> = sk
            .payload
            .real()
            .unwrap()
            .iter()
            .map(|v| v.abs())
            .collect();
        seen.sort_by(f64::total_cmp);
        let mut expect: Vec<f64> = u.values().to_vec();
        expect.sort_by(f64::total_cmp);
        assert_eq!(seen, expect);
    }

    #[test]
    fn oporp_bins_partition_coordinates() {
        for &(p, k) in &[(12usize, 4usize), (13, 4), (7, 7), (30, 8)] {
            let spec = ProjectionSpec::oporp(p, k, 51);
            let op = materialize(&spec).unwrap();
            if let ProjectionOp::Oporp { permutation, .. } = &op {
                // permutation is a bijection
                let mut seen = vec![false; p];
                for &pos in permutation {
                    assert!(!seen[pos as usize]);
                    seen[pos as usize] = true;
                }
                // every coordinate feeds exactly one valid bin
                for &pos in permutation {
                    let b = oporp_bin_of(pos, p, k);
                    assert!(b < k, "bin {b} out of range for p={p}, k={k}");
                }
            }
        }
    }

    #[test]
    fn take_signs_conventions() {
        let sk = Sketch {
            payload: Payload::Real(vec![2.5, -0.1, 0.0]),
            provenance: Provenance::non_private("test", "d".into()),
        };
        let signs = take_signs(&sk).unwrap();
        assert_eq!(signs.payload.signs().unwrap(), &[1, -1, 1]);
        assert_eq!(signs.provenance.zero_positions, vec![2]);
    }

    #[test]
    fn signs_invariant_under_positive_rescaling() {
        let values = vec![0.3, -1.2, 0.7, -0.01];
        let a = Sketch {
            payload: Payload::Real(values.clone()),
            provenance: Provenance::non_private("test", "d".into()),
        };
        let b = Sketch {
            payload: Payload::Real(values.iter().map(|v| v * 17.5).collect()),
            provenance: Provenance::non_private("test", "d".into()),
        };
        assert_eq!(
            take_signs(&a).unwrap().payload.signs().unwrap(),
            take_signs(&b).unwrap().payload.signs().unwrap()
        );
    }

    #[test]
    fn digest_distinguishes_specs() {
        let a = ProjectionSpec::gaussian(10, 5, 1).digest();
        let b = ProjectionSpec::gaussian(10, 5, 2).digest();
        let c = ProjectionSpec::rademacher(10, 5, 1).digest();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, ProjectionSpec::gaussian(10, 5, 1).digest());
    }

    #[test]
    fn oporp_requires_k_le_p() {
        assert!(ProjectionSpec::oporp(4, 8, 0).validate().is_err());
        assert!(ProjectionSpec::oporp(8, 8, 0).validate().is_ok());
    }
}
