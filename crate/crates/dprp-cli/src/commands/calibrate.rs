//! `dprp calibrate`: noise scales over (epsilon, delta, sensitivity) grids.

use std::time::Instant;

use dprp::mechanisms::{
    analytic_rp_gaussian_sigma, classic_gaussian_sigma, laplace_lambda, optimal_gaussian_sigma,
};

use super::{emit_table, Ctx};
use crate::manifest::write_manifest;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    /// Epsilon grid.
    #[arg(long = "eps", value_delimiter = ',', required = true)]
    epsilon: Vec<f64>,

    /// Delta grid (ignored by the laplace mechanism).
    #[arg(long, value_delimiter = ',', default_value = "1e-6")]
    delta: Vec<f64>,

    /// Sensitivity grid (l2 for Gaussian mechanisms, l1 for Laplace).
    #[arg(long, value_delimiter = ',', default_value = "1")]
    delta2: Vec<f64>,

    /// optimal | classic | laplace | analytic-rp
    #[arg(long, default_value = "optimal")]
    mechanism: String,

    /// Data dimension (analytic-rp only).
    #[arg(long)]
    p: Option<usize>,

    /// Projection count (analytic-rp only).
    #[arg(long)]
    k: Option<usize>,
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let mut csv = String::from("mechanism,epsilon,delta,sensitivity,scale\n");
    for &eps in &args.epsilon {
        for &delta in &args.delta {
            for &d2 in &args.delta2 {
                let scale = match args.mechanism.as_str() {
                    "optimal" => optimal_gaussian_sigma(d2, eps, delta)?,
                    "classic" => classic_gaussian_sigma(d2, eps, delta)?,
                    "laplace" => laplace_lambda(d2, eps)?,
                    "analytic-rp" => {
                        let p = args.p.ok_or_else(|| {
                            dprp::Error::Config("analytic-rp requires --p".into())
                        })?;
                        let k = args.k.ok_or_else(|| {
                            dprp::Error::Config("analytic-rp requires --k".into())
                        })?;
                        analytic_rp_gaussian_sigma(p, k, d2, eps, delta)?
                    }
                    other => {
                        return Err(dprp::Error::Config(format!(
                            "unknown mechanism '{other}'; expected one of: optimal, classic, laplace, analytic-rp"
                        )))
                    }
                };
                csv.push_str(&format!(
                    "{},{eps},{delta},{d2},{scale:.12e}\n",
                    args.mechanism
                ));
            }
        }
    }
    let written = emit_table(ctx, "calibration.csv", &csv)?;
    if let (Some(dir), Some(path)) = (ctx.out_dir()?, written) {
        write_manifest(
            dir,
            "calibrate",
            serde_json::to_value(&args).unwrap(),
            ctx.seed,
            ctx.jobs,
            &[],
            &[path],
            started,
        )?;
    }
    Ok(())
}
