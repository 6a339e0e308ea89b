//! `dprp privatize`: read a dataset, privatize every row, write sketches
//! plus a JSON provenance sidecar.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;

use dprp::core::{
    max_normalize, read_csv_dataset, read_matrix, stream_labels, validate_dataset, DataVector,
    Dataset, RngStream,
};
use dprp::dp_rp;
use dprp::dp_sign;
use dprp::error::Error;
use dprp::idp_sign;
use dprp::projections::{materialize, Payload, Sketch};

use super::Ctx;
use crate::config::{load_config, Mechanism, PrivatizeConfig, SignVariant};
use crate::manifest::write_manifest;

#[derive(clap::Args)]
pub struct Args {
    /// Input dataset: CSV (one row per vector) or a binary matrix file.
    #[arg(long)]
    input: PathBuf,

    /// JSON configuration file; inline flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Mechanism variant (see README for the list per mode).
    #[arg(long)]
    variant: Option<String>,

    #[arg(long = "eps")]
    epsilon: Option<f64>,

    #[arg(long)]
    delta: Option<f64>,

    #[arg(long)]
    beta: Option<f64>,

    /// Projection count.
    #[arg(long)]
    k: Option<usize>,

    /// Repetitions for DP-SignOPORP.
    #[arg(long)]
    t: Option<u32>,

    /// Norm lower bound for the randomized-response sign mechanism.
    #[arg(long)]
    m: Option<f64>,

    /// Sign-output mechanisms (randomized response family).
    #[arg(long)]
    sign: bool,

    /// Individual-DP sign mechanisms.
    #[arg(long)]
    idp: bool,

    /// exact-from-matrix | analytic-bound
    #[arg(long = "sensitivity-mode")]
    sensitivity_mode: Option<String>,

    /// Entry bound of the input data (defaults to max(1, max |entry|)).
    #[arg(long)]
    bound: Option<f64>,

    /// Max-normalize columns to [-1, 1] before privatizing.
    #[arg(long = "max-normalize")]
    max_normalize: bool,

    /// Write real sketches at 32-bit precision (lossy).
    #[arg(long = "f32")]
    f32_output: bool,
}

fn merged_config(args: &Args) -> dprp::Result<PrivatizeConfig> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => PrivatizeConfig {
            variant: args
                .variant
                .clone()
                .ok_or_else(|| Error::Config("--variant (or --config) is required".into()))?,
            epsilon: args
                .epsilon
                .ok_or_else(|| Error::Config("--eps (or --config) is required".into()))?,
            delta: None,
            beta: None,
            t: None,
            k: None,
            m: None,
            sign: false,
            idp: false,
            sensitivity_mode: None,
            f32_output: false,
        },
    };
    if let Some(v) = &args.variant {
        cfg.variant = v.clone();
    }
    if let Some(e) = args.epsilon {
        cfg.epsilon = e;
    }
    if args.delta.is_some() {
        cfg.delta = args.delta;
    }
    if args.beta.is_some() {
        cfg.beta = args.beta;
    }
    if args.k.is_some() {
        cfg.k = args.k;
    }
    if args.t.is_some() {
        cfg.t = args.t;
    }
    if args.m.is_some() {
        cfg.m = args.m;
    }
    cfg.sign |= args.sign;
    cfg.idp |= args.idp;
    if args.sensitivity_mode.is_some() {
        cfg.sensitivity_mode = args.sensitivity_mode.clone();
    }
    cfg.f32_output |= args.f32_output;
    Ok(cfg)
}

fn load_dataset(args: &Args) -> dprp::Result<Dataset> {
    let is_binary = args
        .input
        .extension()
        .is_some_and(|e| e == "bin" || e == "mat");
    let dataset = if is_binary {
        let rows = read_matrix(&args.input)?;
        let max_abs = rows
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |m, &v| m.max(v.abs()));
        Dataset::new(rows, args.bound.unwrap_or_else(|| max_abs.max(1.0)))?
    } else {
        read_csv_dataset(&args.input, args.bound)?
    };
    Ok(dataset)
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let out = ctx
        .out_dir()?
        .ok_or_else(|| Error::Config("privatize requires --out".into()))?
        .to_path_buf();
    let cfg = merged_config(&args)?;

    let mut dataset = load_dataset(&args)?;
    if args.max_normalize {
        dataset = max_normalize(&dataset)?;
    }
    let report = validate_dataset(&dataset);
    if !report.is_valid() {
        let first: Vec<String> = report
            .violations
            .iter()
            .take(5)
            .map(|v| format!("{v:?}"))
            .collect();
        return Err(Error::Validation(format!(
            "dataset has {} violations, e.g. {}",
            report.violations.len(),
            first.join("; ")
        )));
    }
    log::info!(
        "privatizing {} rows of dimension {} with variant {}",
        dataset.n_rows(),
        dataset.dim(),
        cfg.variant
    );

    let (mechanism, f32_out) = cfg.resolve(dataset.dim(), ctx.seed)?;
    let rows: dprp::Result<Vec<DataVector>> =
        (0..dataset.n_rows()).map(|i| dataset.row_vector(i)).collect();
    let rows = rows?;
    let base = RngStream::from_seed(ctx.seed);

    let sketches: Vec<Sketch> = match &mechanism {
        Mechanism::Full(dp_cfg) => dp_rp::privatize_dataset(dp_cfg, &rows, &base)?,
        Mechanism::Sign { spec, budget, variant } => {
            let op = materialize(spec)?;
            let run_ops = match variant {
                SignVariant::Oporp(_) => dp_sign::signoporp_run_specs(spec, budget.repetitions)?
                    .iter()
                    .map(materialize)
                    .collect::<dprp::Result<Vec<_>>>()?,
                _ => Vec::new(),
            };
            rows.par_iter()
                .enumerate()
                .map(|(i, u)| {
                    let stream = base.derive2(stream_labels::NOISE, i as u64);
                    match variant {
                        SignVariant::Rr { m } => {
                            dp_sign::signrp_rr_with_op(&op, u, budget, *m, &stream)
                        }
                        SignVariant::RrSmooth => {
                            dp_sign::signrp_rr_smooth_with_op(&op, u, budget, &stream)
                        }
                        SignVariant::Oporp(v) => {
                            dp_sign::signoporp_with_ops(&run_ops, spec, u, budget, *v, &stream)
                        }
                    }
                })
                .collect::<dprp::Result<Vec<_>>>()?
        }
        Mechanism::Idp { spec, budget, gaussian } => rows
            .par_iter()
            .enumerate()
            .map(|(i, u)| {
                let stream = base.derive2(stream_labels::NOISE, i as u64);
                if *gaussian {
                    idp_sign::idp_signrp_g(spec, u, budget, &stream)
                } else {
                    idp_sign::idp_signrp_rr(spec, u, budget, &stream)
                }
            })
            .collect::<dprp::Result<Vec<_>>>()?,
    };

    // Payload file.
    let mut outputs = Vec::new();
    let sketch_path = match &sketches[0].payload {
        Payload::Real(_) => {
            let rows: Vec<Vec<f64>> = sketches
                .iter()
                .map(|s| s.payload.real().map(|v| v.to_vec()))
                .collect::<dprp::Result<_>>()?;
            let path = out.join("sketches.bin");
            if f32_out {
                dprp::core::write_matrix_f32(&path, &rows)?;
            } else {
                dprp::core::write_matrix_f64(&path, &rows)?;
            }
            path
        }
        Payload::Signs(_) => {
            let rows: Vec<Vec<i8>> = sketches
                .iter()
                .map(|s| s.payload.signs().map(|v| v.to_vec()))
                .collect::<dprp::Result<_>>()?;
            let path = out.join("sketches.sgn");
            dprp::core::write_signs(&path, &rows)?;
            path
        }
    };
    outputs.push(sketch_path);

    // Provenance sidecar: one record per row (per-row fields differ for the
    // sign mechanisms), plus the seed that reproduces the run.
    let provenance: Vec<&dprp::projections::Provenance> =
        sketches.iter().map(|s| &s.provenance).collect();
    let sidecar = serde_json::json!({
        "seed": ctx.seed,
        "rows": sketches.len(),
        "provenance": provenance,
    });
    let prov_path = out.join("provenance.json");
    std::fs::write(&prov_path, serde_json::to_string_pretty(&sidecar).unwrap())?;
    outputs.push(prov_path);

    write_manifest(
        &out,
        "privatize",
        serde_json::to_value(&cfg).unwrap(),
        ctx.seed,
        ctx.jobs,
        std::slice::from_ref(&args.input),
        &outputs,
        started,
    )?;
    Ok(())
}
