//! Retrieval benchmark: gold-standard construction by exact cosine,
//! precision/recall@R, mechanism sweeps, and a small k-NN classification
//! mode over the same sketches.

use rayon::prelude::*;

use crate::core::{stream_labels, DataVector, Dataset, PrivacyBudget, RngStream};
use crate::dp_rp::{privatize_with_op, DpRpConfig, DpRpVariant};
use crate::dp_sign::{
    signoporp_plan_with_ops, signoporp_run_specs, signrp_rr_plan, signrp_rr_smooth_plan,
    SignOporpVariant,
};
use crate::error::{Error, Result};
use crate::idp_sign::{idp_signrp_g_plan, idp_signrp_rr_plan};
use crate::projections::{
    materialize, oporp_project, project, take_signs, ProjectionOp, ProjectionSpec,
};

/// A retrieval problem: database, queries, and the exact-cosine gold
/// standard (top `gold_size` neighbors per query).
#[derive(Clone, Debug)]
pub struct RetrievalTask {
    pub database: Dataset,
    pub queries: Dataset,
    pub gold: Vec<Vec<usize>>,
    pub gold_size: usize,
    pub r_grid: Vec<usize>,
}

impl RetrievalTask {
    pub fn new(
        database: Dataset,
        queries: Dataset,
        gold_size: usize,
        r_grid: Vec<usize>,
    ) -> Result<Self> {
        let gold = build_gold_standard(&database, &queries, gold_size)?;
        Ok(Self {
            database,
            queries,
            gold,
            gold_size,
            r_grid,
        })
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return f64::NEG_INFINITY;
    }
    dot / (na * nb).sqrt()
}

/// Exact cosine top-`g` neighbors per query, mechanism- and seed-independent.
/// Ties break toward the smaller row id.
pub fn build_gold_standard(
    database: &Dataset,
    queries: &Dataset,
    g: usize,
) -> Result<Vec<Vec<usize>>> {
    if g == 0 {
        return Err(Error::Validation("gold size must be >= 1".into()));
    }
    if database.dim() != queries.dim() {
        return Err(Error::Dimension(
            "database and query dimensions differ".into(),
        ));
    }
    let g = g.min(database.n_rows());
    Ok((0..queries.n_rows())
        .into_par_iter()
        .map(|qi| {
            let q = queries.row(qi);
            let mut scored: Vec<(f64, usize)> = (0..database.n_rows())
                .map(|i| (cosine(q, database.row(i)), i))
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            scored.truncate(g);
            scored.into_iter().map(|(_, i)| i).collect()
        })
        .collect())
}

/// precision@R and recall@R of a ranked candidate list against a gold set.
pub fn precision_recall_at(retrieved: &[usize], gold: &[usize], r: usize) -> (f64, f64) {
    if r == 0 || gold.is_empty() {
        return (0.0, 0.0);
    }
    let gold_set: std::collections::HashSet<usize> = gold.iter().copied().collect();
    let hits = retrieved
        .iter()
        .take(r)
        .filter(|i| gold_set.contains(i))
        .count();
    (hits as f64 / r as f64, hits as f64 / gold.len() as f64)
}

/// Sketch family produced by a benchmark mechanism.
enum SketchSet {
    Real(Vec<Vec<f64>>),
    Signs(Vec<Vec<i8>>),
}

/// A mechanism to benchmark, with its sketch length.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "mechanism")]
pub enum BenchMechanism {
    NonPrivateRp { k: usize },
    NonPrivateSignRp { k: usize },
    NonPrivateOporp { k: usize },
    RawGOpt,
    RpG { k: usize },
    RpGOpt { k: usize },
    RpGOptB { k: usize },
    RpL { k: usize },
    Oporp { k: usize },
    SignRpRr { k: usize, m: f64 },
    SignRpRrSmooth { k: usize },
    SignOporpRr { k: usize, t: u32 },
    SignOporpRrSmooth { k: usize, t: u32 },
    IdpSignRpG { k: usize },
    IdpSignRpRr { k: usize },
}

impl BenchMechanism {
    pub fn label(&self) -> String {
        match self {
            BenchMechanism::NonPrivateRp { .. } => "non-private-rp".into(),
            BenchMechanism::NonPrivateSignRp { .. } => "non-private-signrp".into(),
            BenchMechanism::NonPrivateOporp { .. } => "non-private-oporp".into(),
            BenchMechanism::RawGOpt => "raw-g-opt".into(),
            BenchMechanism::RpG { .. } => "dp-rp-g".into(),
            BenchMechanism::RpGOpt { .. } => "dp-rp-g-opt".into(),
            BenchMechanism::RpGOptB { .. } => "dp-rp-g-opt-b".into(),
            BenchMechanism::RpL { .. } => "dp-rp-l".into(),
            BenchMechanism::Oporp { .. } => "dp-oporp".into(),
            BenchMechanism::SignRpRr { .. } => "dp-signrp-rr".into(),
            BenchMechanism::SignRpRrSmooth { .. } => "dp-signrp-rr-smooth".into(),
            BenchMechanism::SignOporpRr { t, .. } => format!("dp-signoporp-rr-t{t}"),
            BenchMechanism::SignOporpRrSmooth { t, .. } => format!("dp-signoporp-rr-smooth-t{t}"),
            BenchMechanism::IdpSignRpG { .. } => "idp-signrp-g".into(),
            BenchMechanism::IdpSignRpRr { .. } => "idp-signrp-rr".into(),
        }
    }

    pub fn k(&self, p: usize) -> usize {
        match self {
            BenchMechanism::RawGOpt => p,
            BenchMechanism::NonPrivateRp { k }
            | BenchMechanism::NonPrivateSignRp { k }
            | BenchMechanism::NonPrivateOporp { k }
            | BenchMechanism::RpG { k }
            | BenchMechanism::RpGOpt { k }
            | BenchMechanism::RpGOptB { k }
            | BenchMechanism::RpL { k }
            | BenchMechanism::Oporp { k }
            | BenchMechanism::SignRpRr { k, .. }
            | BenchMechanism::SignRpRrSmooth { k }
            | BenchMechanism::SignOporpRr { k, .. }
            | BenchMechanism::SignOporpRrSmooth { k, .. }
            | BenchMechanism::IdpSignRpG { k }
            | BenchMechanism::IdpSignRpRr { k } => *k,
        }
    }

    fn is_private(&self) -> bool {
        !matches!(
            self,
            BenchMechanism::NonPrivateRp { .. }
                | BenchMechanism::NonPrivateSignRp { .. }
                | BenchMechanism::NonPrivateOporp { .. }
        )
    }
}

/// One benchmark cell: mechanism plus budget.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct BenchCell {
    #[serde(flatten)]
    pub mechanism: BenchMechanism,
    pub epsilon: f64,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_beta")]
    pub beta: f64,
}

fn default_delta() -> f64 {
    1e-6
}

fn default_beta() -> f64 {
    1.0
}

/// Aggregated benchmark output for one (cell, R) pair.
#[derive(Clone, Debug, serde::Serialize)]
pub struct MetricsRow {
    pub mechanism: String,
    pub epsilon: f64,
    pub k: usize,
    pub r: usize,
    pub precision: f64,
    pub recall: f64,
    pub seeds: usize,
}

fn rows_of(d: &Dataset) -> Result<Vec<DataVector>> {
    (0..d.n_rows()).map(|i| d.row_vector(i)).collect()
}

fn budget_for(cell: &BenchCell) -> Result<PrivacyBudget> {
    let (delta, t) = match cell.mechanism {
        // pure-epsilon mechanisms
        BenchMechanism::RpL { .. }
        | BenchMechanism::SignRpRrSmooth { .. }
        | BenchMechanism::IdpSignRpRr { .. } => (0.0, 1),
        BenchMechanism::SignOporpRr { t, .. } | BenchMechanism::SignOporpRrSmooth { t, .. } => {
            (0.0, t)
        }
        BenchMechanism::SignRpRr { m, .. } if m < cell.beta => (0.0, 1),
        _ => (cell.delta, 1),
    };
    PrivacyBudget::new(cell.epsilon, delta)?
        .with_beta(cell.beta)?
        .with_repetitions(t)
}

/// Sketches all rows (database then queries) for one cell and seed.
fn sketch_all(
    cell: &BenchCell,
    db: &[DataVector],
    queries: &[DataVector],
    p: usize,
    spec_seed: u64,
    noise: &RngStream,
) -> Result<(SketchSet, SketchSet)> {
    let budget = budget_for(cell)?;
    let k = cell.mechanism.k(p);
    let row_stream = |i: usize| noise.derive2(stream_labels::NOISE, i as u64);
    let all: Vec<&DataVector> = db.iter().chain(queries.iter()).collect();

    let split = |v: Vec<Vec<f64>>| {
        let (d, q) = (v[..db.len()].to_vec(), v[db.len()..].to_vec());
        (SketchSet::Real(d), SketchSet::Real(q))
    };
    let split_signs = |v: Vec<Vec<i8>>| {
        let (d, q) = (v[..db.len()].to_vec(), v[db.len()..].to_vec());
        (SketchSet::Signs(d), SketchSet::Signs(q))
    };

    match &cell.mechanism {
        BenchMechanism::NonPrivateRp { .. } => {
            let op = materialize(&ProjectionSpec::rademacher(p, k, spec_seed))?;
            let v: Result<Vec<Vec<f64>>> = all
                .par_iter()
                .map(|u| Ok(project(&op, u)?.payload.real()?.to_vec()))
                .collect();
            Ok(split(v?))
        }
        BenchMechanism::NonPrivateOporp { .. } => {
            let op = materialize(&ProjectionSpec::oporp(p, k, spec_seed))?;
            let v: Result<Vec<Vec<f64>>> = all
                .par_iter()
                .map(|u| Ok(oporp_project(&op, u)?.payload.real()?.to_vec()))
                .collect();
            Ok(split(v?))
        }
        BenchMechanism::NonPrivateSignRp { .. } => {
            let op = materialize(&ProjectionSpec::rademacher(p, k, spec_seed))?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .map(|u| {
                    Ok(take_signs(&project(&op, u)?)?
                        .payload
                        .signs()?
                        .to_vec())
                })
                .collect();
            Ok(split_signs(v?))
        }
        BenchMechanism::RawGOpt
        | BenchMechanism::RpG { .. }
        | BenchMechanism::RpGOpt { .. }
        | BenchMechanism::RpGOptB { .. }
        | BenchMechanism::RpL { .. }
        | BenchMechanism::Oporp { .. } => {
            let (variant, spec) = match &cell.mechanism {
                BenchMechanism::RawGOpt => (DpRpVariant::RawGOpt, None),
                BenchMechanism::RpG { .. } => (
                    DpRpVariant::RpG,
                    Some(ProjectionSpec::gaussian(p, k, spec_seed)),
                ),
                BenchMechanism::RpGOpt { .. } => (
                    DpRpVariant::RpGOpt,
                    Some(ProjectionSpec::gaussian(p, k, spec_seed)),
                ),
                BenchMechanism::RpGOptB { .. } => (
                    DpRpVariant::RpGOptB,
                    Some(ProjectionSpec::rademacher(p, k, spec_seed)),
                ),
                BenchMechanism::RpL { .. } => (
                    DpRpVariant::RpL,
                    Some(ProjectionSpec::gaussian(p, k, spec_seed)),
                ),
                BenchMechanism::Oporp { .. } => (
                    DpRpVariant::Oporp,
                    Some(ProjectionSpec::oporp(p, k, spec_seed)),
                ),
                _ => unreachable!(),
            };
            let cfg = DpRpConfig::new(variant, spec, budget);
            cfg.validate()?;
            let op = match spec {
                Some(s) => Some(materialize(&s)?),
                None => None,
            };
            let v: Result<Vec<Vec<f64>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let sk = privatize_with_op(&cfg, op.as_ref(), u, &row_stream(i))?;
                    Ok(sk.payload.real()?.to_vec())
                })
                .collect();
            Ok(split(v?))
        }
        BenchMechanism::SignRpRr { m, .. } => {
            let op = materialize(&ProjectionSpec::gaussian(p, k, spec_seed))?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let plan = signrp_rr_plan(&op, u, &budget, *m)?;
                    Ok(plan.sample(&mut row_stream(i).rng()))
                })
                .collect();
            Ok(split_signs(v?))
        }
        BenchMechanism::SignRpRrSmooth { .. } => {
            let op = materialize(&ProjectionSpec::rademacher(p, k, spec_seed))?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let plan = signrp_rr_smooth_plan(&op, u, &budget)?;
                    Ok(plan.sample(&mut row_stream(i).rng()))
                })
                .collect();
            Ok(split_signs(v?))
        }
        BenchMechanism::SignOporpRr { t, .. } | BenchMechanism::SignOporpRrSmooth { t, .. } => {
            let variant = match cell.mechanism {
                BenchMechanism::SignOporpRr { .. } => SignOporpVariant::Rr,
                _ => SignOporpVariant::RrSmooth,
            };
            let spec = ProjectionSpec::oporp(p, k, spec_seed);
            let run_ops: Result<Vec<ProjectionOp>> =
                signoporp_run_specs(&spec, *t)?.iter().map(materialize).collect();
            let run_ops = run_ops?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let plan = signoporp_plan_with_ops(&run_ops, u, &budget, variant)?;
                    Ok(plan.sample(&mut row_stream(i).rng()))
                })
                .collect();
            Ok(split_signs(v?))
        }
        BenchMechanism::IdpSignRpG { .. } => {
            let op = materialize(&ProjectionSpec::rademacher(p, k, spec_seed))?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let plan = idp_signrp_g_plan(&op, u, &budget, false)?;
                    Ok(plan.sample(&mut row_stream(i).rng()))
                })
                .collect();
            Ok(split_signs(v?))
        }
        BenchMechanism::IdpSignRpRr { .. } => {
            let op = materialize(&ProjectionSpec::rademacher(p, k, spec_seed))?;
            let v: Result<Vec<Vec<i8>>> = all
                .par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let plan = idp_signrp_rr_plan(&op, u, &budget, false)?;
                    Ok(plan.sample(&mut row_stream(i).rng()))
                })
                .collect();
            Ok(split_signs(v?))
        }
    }
}

/// Ranks database ids for a query sketch: real payloads by descending
/// cosine, sign payloads by ascending Hamming distance; ties toward the
/// smaller id. Returns the top `top` ids.
fn rank(db: &SketchSet, query_index: usize, queries: &SketchSet, top: usize) -> Vec<usize> {
    match (db, queries) {
        (SketchSet::Real(db), SketchSet::Real(qs)) => {
            let q = &qs[query_index];
            let mut scored: Vec<(f64, usize)> = db
                .iter()
                .enumerate()
                .map(|(i, d)| (cosine(q, d), i))
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            scored.into_iter().take(top).map(|(_, i)| i).collect()
        }
        (SketchSet::Signs(db), SketchSet::Signs(qs)) => {
            let q = &qs[query_index];
            let mut scored: Vec<(usize, usize)> = db
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let dist = d.iter().zip(q).filter(|(a, b)| a != b).count();
                    (dist, i)
                })
                .collect();
            scored.sort();
            scored.into_iter().take(top).map(|(_, i)| i).collect()
        }
        _ => unreachable!("database and query sketches always share a family"),
    }
}

/// Runs every cell over every seed and averages precision/recall per
/// (cell, R). Cells parallelize; each derives disjoint streams from
/// (seed, cell index), so tables are reproducible.
pub fn run_retrieval(
    task: &RetrievalTask,
    cells: &[BenchCell],
    seeds: &[u64],
) -> Result<Vec<MetricsRow>> {
    let db_rows = rows_of(&task.database)?;
    let query_rows = rows_of(&task.queries)?;
    let p = task.database.dim();
    let r_max = task.r_grid.iter().copied().max().unwrap_or(10);

    let per_cell: Result<Vec<Vec<MetricsRow>>> = cells
        .par_iter()
        .enumerate()
        .map(|(ci, cell)| {
            let mut acc: Vec<(f64, f64)> = vec![(0.0, 0.0); task.r_grid.len()];
            for &seed in seeds {
                let root = RngStream::from_seed(seed).derive2(stream_labels::BENCH, ci as u64);
                let spec_seed = crate::core::mix_seed(seed, ci as u64);
                let (db_sk, q_sk) =
                    sketch_all(cell, &db_rows, &query_rows, p, spec_seed, &root)?;
                let per_query: Vec<Vec<(f64, f64)>> = (0..query_rows.len())
                    .into_par_iter()
                    .map(|qi| {
                        let retrieved = rank(&db_sk, qi, &q_sk, r_max);
                        task.r_grid
                            .iter()
                            .map(|&r| precision_recall_at(&retrieved, &task.gold[qi], r))
                            .collect()
                    })
                    .collect();
                for row in per_query {
                    for (slot, (pr, rc)) in acc.iter_mut().zip(row) {
                        slot.0 += pr;
                        slot.1 += rc;
                    }
                }
            }
            let denom = (seeds.len() * query_rows.len()) as f64;
            Ok(task
                .r_grid
                .iter()
                .zip(acc)
                .map(|(&r, (pr, rc))| MetricsRow {
                    mechanism: cell.mechanism.label(),
                    epsilon: if cell.mechanism.is_private() {
                        cell.epsilon
                    } else {
                        f64::INFINITY
                    },
                    k: cell.mechanism.k(p),
                    r,
                    precision: pr / denom,
                    recall: rc / denom,
                    seeds: seeds.len(),
                })
                .collect())
        })
        .collect();
    Ok(per_cell?.into_iter().flatten().collect())
}

/// k-NN majority-vote classification of query sketches against labeled
/// database sketches (ties toward the lexicographically smaller label).
/// Returns per-query predicted labels.
pub fn knn_classify(
    task: &RetrievalTask,
    cell: &BenchCell,
    labels: &[String],
    votes: usize,
    seed: u64,
) -> Result<Vec<String>> {
    if labels.len() != task.database.n_rows() {
        return Err(Error::Validation(format!(
            "label count {} does not match database rows {}",
            labels.len(),
            task.database.n_rows()
        )));
    }
    if votes == 0 {
        return Err(Error::Validation("votes must be >= 1".into()));
    }
    let db_rows = rows_of(&task.database)?;
    let query_rows = rows_of(&task.queries)?;
    let p = task.database.dim();
    let root = RngStream::from_seed(seed).derive(stream_labels::BENCH);
    let spec_seed = crate::core::mix_seed(seed, 0);
    let (db_sk, q_sk) = sketch_all(cell, &db_rows, &query_rows, p, spec_seed, &root)?;
    Ok((0..query_rows.len())
        .into_par_iter()
        .map(|qi| {
            let top = rank(&db_sk, qi, &q_sk, votes);
            let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
            for i in top {
                *counts.entry(labels[i].as_str()).or_default() += 1;
            }
            counts
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(a.0)))
                .map(|(l, _)| l.to_string())
                .unwrap_or_default()
        })
        .collect())
}

/// Fraction of predictions equal to the reference labels.
pub fn accuracy(predicted: &[String], truth: &[String]) -> f64 {
    if predicted.is_empty() {
        return 0.0;
    }
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / predicted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalbench::synth::sphere_dataset;

    fn tiny_task() -> RetrievalTask {
        let stream = RngStream::from_seed(11);
        let db = sphere_dataset(32, 40, &[1.0, 5.0], &stream.derive(1)).unwrap();
        let queries = sphere_dataset(32, 6, &[1.0, 5.0], &stream.derive(2)).unwrap();
        RetrievalTask::new(db, queries, 5, vec![1, 5, 10]).unwrap()
    }

    #[test]
    fn gold_standard_basics() {
        // A query equal to a database row ranks that row first.
        let db = Dataset::new(
            vec![vec![1.0, 0.0], vec![0.6, 0.8], vec![0.0, 1.0]],
            1.0,
        )
        .unwrap();
        let queries = Dataset::new(vec![vec![0.6, 0.8]], 1.0).unwrap();
        let gold = build_gold_standard(&db, &queries, 2).unwrap();
        assert_eq!(gold[0][0], 1);
        // g = database size returns everything.
        let gold = build_gold_standard(&db, &queries, 3).unwrap();
        assert_eq!(gold[0].len(), 3);
        // Hand-computed cosine ordering: q.(1,0) = 0.6, q.(0,1) = 0.8.
        assert_eq!(gold[0], vec![1, 2, 0]);
    }

    #[test]
    fn precision_recall_definitions() {
        let (p, r) = precision_recall_at(&[7, 3, 9], &[7, 3, 1], 2);
        assert_eq!(p, 1.0);
        assert!((r - 2.0 / 3.0).abs() < 1e-12);
        let (p, r) = precision_recall_at(&[5, 6], &[1, 2], 2);
        assert_eq!((p, r), (0.0, 0.0));
        let (p, r) = precision_recall_at(&[1, 2, 3], &[1, 2], 3);
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn identical_seeds_reproduce_tables() {
        let task = tiny_task();
        let cells = vec![BenchCell {
            mechanism: BenchMechanism::RpGOptB { k: 8 },
            epsilon: 5.0,
            delta: 1e-6,
            beta: 1.0,
        }];
        let a = run_retrieval(&task, &cells, &[1, 2]).unwrap();
        let b = run_retrieval(&task, &cells, &[1, 2]).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.precision, y.precision);
            assert_eq!(x.recall, y.recall);
        }
    }

    #[test]
    fn vanishing_noise_approaches_non_private_baseline() {
        // Run each mechanism as cell 0 so both see the same projection
        // matrix; at eps = 1e6 the noisy rankings coincide with the clean
        // ones exactly.
        let task = tiny_task();
        let baseline_cell = vec![BenchCell {
            mechanism: BenchMechanism::NonPrivateRp { k: 32 },
            epsilon: 1.0,
            delta: 1e-6,
            beta: 1.0,
        }];
        let private_cell = vec![BenchCell {
            mechanism: BenchMechanism::RpGOptB { k: 32 },
            epsilon: 1e6,
            delta: 1e-6,
            beta: 1.0,
        }];
        let baseline = run_retrieval(&task, &baseline_cell, &[3]).unwrap();
        let huge_eps = run_retrieval(&task, &private_cell, &[3]).unwrap();
        for (b, h) in baseline.iter().zip(&huge_eps) {
            assert!(
                (b.precision - h.precision).abs() < 1e-9,
                "{} vs {} at R = {}",
                b.precision,
                h.precision,
                b.r
            );
        }
    }

    #[test]
    fn sign_mechanisms_produce_tables() {
        let task = tiny_task();
        let cells = vec![
            BenchCell {
                mechanism: BenchMechanism::SignOporpRrSmooth { k: 16, t: 2 },
                epsilon: 5.0,
                delta: 0.0,
                beta: 1.0,
            },
            BenchCell {
                mechanism: BenchMechanism::IdpSignRpRr { k: 16 },
                epsilon: 0.5,
                delta: 0.0,
                beta: 1.0,
            },
        ];
        let rows = run_retrieval(&task, &cells, &[5]).unwrap();
        assert_eq!(rows.len(), 2 * task.r_grid.len());
        for row in rows {
            assert!(row.precision >= 0.0 && row.precision <= 1.0);
            assert!(row.recall >= 0.0 && row.recall <= 1.0);
        }
    }

    #[test]
    fn knn_majority_vote() {
        let task = tiny_task();
        let labels: Vec<String> = (0..task.database.n_rows())
            .map(|i| if i % 2 == 0 { "even".into() } else { "odd".into() })
            .collect();
        let cell = BenchCell {
            mechanism: BenchMechanism::NonPrivateSignRp { k: 32 },
            epsilon: 1.0,
            delta: 1e-6,
            beta: 1.0,
        };
        let preds = knn_classify(&task, &cell, &labels, 5, 7).unwrap();
        assert_eq!(preds.len(), task.queries.n_rows());
        for p in &preds {
            assert!(p == "even" || p == "odd");
        }
        let again = knn_classify(&task, &cell, &labels, 5, 7).unwrap();
        assert_eq!(preds, again);
    }
}
