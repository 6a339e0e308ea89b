//! `dprp estimate`: pairwise similarity estimates between two privatized
//! sketch directories (as written by `dprp privatize`), CSV output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use dprp::core::{read_matrix, read_signs};
use dprp::error::Error;
use dprp::estimators;
use dprp::projections::{Payload, Provenance, Sketch};

use super::{emit_table, Ctx};
use crate::manifest::write_manifest;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    /// Directory with sketches + provenance from `dprp privatize`.
    #[arg(long)]
    a: PathBuf,

    /// Second directory; pairs within `--a` when omitted.
    #[arg(long)]
    b: Option<PathBuf>,

    /// inner-product | cosine | angle | angle-rr | hamming
    #[arg(long, default_value = "inner-product")]
    estimator: String,

    /// Cap on the number of rows used from each side.
    #[arg(long)]
    limit: Option<usize>,
}

fn load_sketches(dir: &Path, limit: Option<usize>) -> dprp::Result<Vec<Sketch>> {
    let sidecar_path = dir.join("provenance.json");
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&sidecar_path)?)
            .map_err(|e| Error::Format(format!("{}: {e}", sidecar_path.display())))?;
    let provenance: Vec<Provenance> =
        serde_json::from_value(sidecar["provenance"].clone())
            .map_err(|e| Error::Format(format!("provenance records: {e}")))?;

    let sign_path = dir.join("sketches.sgn");
    let payloads: Vec<Payload> = if sign_path.exists() {
        read_signs(&sign_path)?.into_iter().map(Payload::Signs).collect()
    } else {
        read_matrix(dir.join("sketches.bin"))?
            .into_iter()
            .map(Payload::Real)
            .collect()
    };
    if payloads.len() != provenance.len() {
        return Err(Error::Format(format!(
            "{} payload rows but {} provenance records",
            payloads.len(),
            provenance.len()
        )));
    }
    let n = limit.unwrap_or(payloads.len()).min(payloads.len());
    Ok(payloads
        .into_iter()
        .zip(provenance)
        .take(n)
        .map(|(payload, provenance)| Sketch { payload, provenance })
        .collect())
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let a = load_sketches(&args.a, args.limit)?;
    let within = args.b.is_none();
    let b = match &args.b {
        Some(dir) => load_sketches(dir, args.limit)?,
        None => a.clone(),
    };

    let mut csv = String::from("i,j,estimate,theoretical_variance,flags\n");
    for (i, sa) in a.iter().enumerate() {
        let start_j = if within { i + 1 } else { 0 };
        for (j, sb) in b.iter().enumerate().skip(start_j) {
            let (estimate, variance, flags) = match args.estimator.as_str() {
                "inner-product" => {
                    let r = estimators::inner_product(sa, sb)?;
                    (r.estimate, r.theoretical_variance, r.flags)
                }
                "cosine" => {
                    let r = estimators::cosine_normalized(sa, sb)?;
                    (r.estimate, r.theoretical_variance, r.flags)
                }
                "angle" => {
                    let r = estimators::angle_from_signs(sa, sb)?;
                    (r.estimate, r.theoretical_variance, r.flags)
                }
                "angle-rr" => {
                    let eps = sa.provenance.eps_prime.ok_or_else(|| {
                        Error::Provenance("sketches carry no eps_prime".into())
                    })?;
                    let r = estimators::angle_from_rr_signs(sa, sb, eps)?;
                    (r.estimate, r.theoretical_variance, r.flags)
                }
                "hamming" => {
                    let d = estimators::hamming_distance(sa, sb)?;
                    (d as f64, None, Vec::new())
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown estimator '{other}'; expected one of: inner-product, cosine, angle, angle-rr, hamming"
                    )))
                }
            };
            csv.push_str(&format!(
                "{i},{j},{estimate:.12e},{},{}\n",
                variance.map_or(String::from(""), |v| format!("{v:.12e}")),
                flags.join("|")
            ));
        }
    }
    let written = emit_table(ctx, "estimates.csv", &csv)?;
    if let (Some(dir), Some(path)) = (ctx.out_dir()?, written) {
        let mut inputs = vec![args.a.join("provenance.json")];
        if let Some(b) = &args.b {
            inputs.push(b.join("provenance.json"));
        }
        write_manifest(
            dir,
            "estimate",
            serde_json::to_value(&args).unwrap(),
            ctx.seed,
            ctx.jobs,
            &inputs,
            &[path],
            started,
        )?;
    }
    Ok(())
}
