//! `dprp bench`: retrieval and k-NN benchmark harness driven by a JSON
//! config. Emits CSV tables keyed by (mechanism, epsilon, k, R, metric).

use std::path::PathBuf;
use std::time::Instant;

use dprp::core::{read_csv_dataset, validate_dataset, RngStream};
use dprp::error::Error;
use dprp::evalbench::{accuracy, knn_classify, run_retrieval, sphere_dataset, RetrievalTask};

use super::{emit_table, Ctx};
use crate::config::{load_bench_config, BenchConfig, SyntheticSpec};
use crate::manifest::write_manifest;

#[derive(clap::Args)]
pub struct Args {
    /// retrieval | knn
    mode: String,

    /// Benchmark configuration (JSON).
    #[arg(long)]
    config: PathBuf,
}

fn build_task(cfg: &BenchConfig, seed: u64) -> dprp::Result<RetrievalTask> {
    let (database, queries) = match (&cfg.database_csv, &cfg.queries_csv) {
        (Some(db), Some(q)) => (read_csv_dataset(db, None)?, read_csv_dataset(q, None)?),
        (None, None) => {
            let synth = cfg.synthetic.clone().unwrap_or(SyntheticSpec {
                p: 256,
                database_rows: 2000,
                query_rows: 200,
                norms: vec![1.0, 5.0, 10.0],
            });
            let stream = RngStream::from_seed(seed).derive(0x53_79);
            (
                sphere_dataset(synth.p, synth.database_rows, &synth.norms, &stream.derive(1))?,
                sphere_dataset(synth.p, synth.query_rows, &synth.norms, &stream.derive(2))?,
            )
        }
        _ => {
            return Err(Error::Config(
                "supply both database_csv and queries_csv, or neither".into(),
            ))
        }
    };
    for (name, d) in [("database", &database), ("queries", &queries)] {
        let report = validate_dataset(d);
        if !report.is_valid() {
            return Err(Error::Validation(format!(
                "{name} has {} violations",
                report.violations.len()
            )));
        }
    }
    RetrievalTask::new(database, queries, cfg.gold_size, cfg.r_grid.clone())
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let cfg = load_bench_config(&args.config)?;
    let task = build_task(&cfg, ctx.seed)?;
    let seeds: Vec<u64> = (0..cfg.seeds as u64).map(|i| ctx.seed.wrapping_add(i)).collect();

    let (name, csv) = match args.mode.as_str() {
        "retrieval" => {
            let rows = run_retrieval(&task, &cfg.cells, &seeds)?;
            let mut csv = String::from("mechanism,epsilon,k,r,precision,recall,seeds\n");
            for row in rows {
                csv.push_str(&format!(
                    "{},{},{},{},{:.6},{:.6},{}\n",
                    row.mechanism, row.epsilon, row.k, row.r, row.precision, row.recall, row.seeds
                ));
            }
            ("retrieval.csv", csv)
        }
        "knn" => {
            let labels_path = cfg.labels_csv.clone().ok_or_else(|| {
                Error::Config("knn mode requires labels_csv (one label per database row)".into())
            })?;
            let labels: Vec<String> = std::fs::read_to_string(&labels_path)?
                .lines()
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty())
                .collect();
            // Truth labels for queries, when provided alongside.
            let mut csv = String::from("mechanism,epsilon,k,votes,seed,accuracy_vs_top1\n");
            for cell in &cfg.cells {
                for &seed in &seeds {
                    let predicted = knn_classify(&task, cell, &labels, cfg.votes, seed)?;
                    // Without query truth labels, score agreement against the
                    // exact-cosine nearest neighbor's label.
                    let truth: Vec<String> = task
                        .gold
                        .iter()
                        .map(|g| labels[g[0]].clone())
                        .collect();
                    let acc = accuracy(&predicted, &truth);
                    csv.push_str(&format!(
                        "{},{},{},{},{seed},{acc:.6}\n",
                        cell.mechanism.label(),
                        cell.epsilon,
                        cell.mechanism.k(task.database.dim()),
                        cfg.votes
                    ));
                }
            }
            ("knn.csv", csv)
        }
        other => {
            return Err(Error::Config(format!(
                "unknown bench mode '{other}'; expected retrieval or knn"
            )))
        }
    };

    let written = emit_table(ctx, name, &csv)?;
    if let (Some(dir), Some(path)) = (ctx.out_dir()?, written) {
        let mut inputs = vec![args.config.clone()];
        for p in [&cfg.database_csv, &cfg.queries_csv, &cfg.labels_csv].into_iter().flatten() {
            inputs.push(p.clone());
        }
        write_manifest(
            dir,
            &format!("bench-{}", args.mode),
            serde_json::to_value(&cfg).unwrap(),
            ctx.seed,
            ctx.jobs,
            &inputs,
            &[path],
            started,
        )?;
    }
    Ok(())
}
