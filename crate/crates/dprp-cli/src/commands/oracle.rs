//! `dprp oracle`: seeded Monte Carlo estimates with standard errors, the
//! brute-force side of every closed-form claim.

use std::time::Instant;

use dprp::analytic::EstimatorKind;
use dprp::core::RngStream;
use dprp::error::Error;
use dprp::evalbench::oracle;

use super::{emit_table, Ctx};
use crate::manifest::write_manifest;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    /// collision | p-plus-gaussian | p-plus-rademacher | estimator-moments |
    /// angle-moments | rr-angle-moments | n-plus-exceed
    #[arg(long)]
    target: String,

    /// Sample count (>= 100).
    #[arg(long, default_value_t = 1_000_000)]
    n: u64,

    #[arg(long)]
    theta: Option<f64>,

    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,

    #[arg(long)]
    p: Option<usize>,

    #[arg(long)]
    k: Option<usize>,

    #[arg(long)]
    sigma: Option<f64>,

    /// raw | rp | oporp (estimator-moments).
    #[arg(long)]
    kind: Option<String>,

    #[arg(long = "eps-prime")]
    eps_prime: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    #[arg(long)]
    norm: Option<f64>,

    #[arg(long)]
    delta: Option<f64>,

    /// Target correlation of the generated test pair (estimator-moments).
    #[arg(long, default_value_t = 0.5)]
    rho: f64,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> dprp::Result<T> {
    v.ok_or_else(|| Error::Config(format!("--{name} is required for this target")))
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let stream = RngStream::from_seed(ctx.seed).derive(dprp::core::stream_labels::ORACLE);
    let mut csv = String::new();
    match args.target.as_str() {
        "collision" => {
            let theta = need(args.theta, "theta")?;
            let est = oracle::collision_probability(theta, args.n, &stream)?;
            csv.push_str("theta,estimate,std_error,n\n");
            csv.push_str(&format!(
                "{theta},{:.8e},{:.3e},{}\n",
                est.estimate, est.std_error, est.n
            ));
        }
        "p-plus-gaussian" => {
            let p = need(args.p, "p")?;
            if args.r.is_empty() {
                return Err(Error::Config("--r is required for this target".into()));
            }
            let ests = oracle::p_plus_gaussian_mc(&args.r, p, args.n, &stream)?;
            csv.push_str("r,p,estimate,std_error,n\n");
            for (&r, est) in args.r.iter().zip(ests) {
                csv.push_str(&format!(
                    "{r},{p},{:.8e},{:.3e},{}\n",
                    est.estimate, est.std_error, est.n
                ));
            }
        }
        "p-plus-rademacher" => {
            let p = need(args.p, "p")?;
            let u = dprp::evalbench::uniform_values(p, 1.0, &stream.derive(1));
            let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let est = oracle::p_plus_rademacher_mc(&u, args.beta, args.n, &stream.derive(2))?;
            csv.push_str("p,beta,data_norm,estimate,std_error,n\n");
            csv.push_str(&format!(
                "{p},{},{norm:.6},{:.8e},{:.3e},{}\n",
                args.beta, est.estimate, est.std_error, est.n
            ));
        }
        "estimator-moments" => {
            let p = need(args.p, "p")?;
            let k = need(args.k, "k")?;
            let sigma = need(args.sigma, "sigma")?;
            let kind = match need(args.kind.as_deref(), "kind")? {
                "raw" => EstimatorKind::Raw,
                "rp" => EstimatorKind::Rp,
                "oporp" => EstimatorKind::Oporp,
                other => {
                    return Err(Error::Config(format!(
                        "unknown kind '{other}'; expected raw, rp, or oporp"
                    )))
                }
            };
            let (u, v) = dprp::evalbench::unit_pair_with_cosine(p, args.rho, &stream.derive(1));
            let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            let m = oracle::estimator_moments(kind, &u, &v, k, sigma, args.n, &stream.derive(2))?;
            csv.push_str("kind,p,k,sigma,true_dot,mean,variance,std_error_mean,n\n");
            csv.push_str(&format!(
                "{},{p},{k},{sigma},{dot:.8e},{:.8e},{:.8e},{:.3e},{}\n",
                args.kind.as_deref().unwrap(),
                m.mean,
                m.variance,
                m.std_error_mean,
                m.n
            ));
        }
        "angle-moments" => {
            let theta = need(args.theta, "theta")?;
            let k = need(args.k, "k")?;
            let m = oracle::angle_estimator_moments(theta, k, args.n, &stream)?;
            csv.push_str("theta,k,mean,variance,std_error_mean,reps\n");
            csv.push_str(&format!(
                "{theta},{k},{:.8e},{:.8e},{:.3e},{}\n",
                m.mean, m.variance, m.std_error_mean, m.n
            ));
        }
        "rr-angle-moments" => {
            let theta = need(args.theta, "theta")?;
            let k = need(args.k, "k")?;
            let eps_prime = need(args.eps_prime, "eps-prime")?;
            let m = oracle::rr_angle_estimator_moments(theta, k, eps_prime, args.n, &stream)?;
            csv.push_str("theta,k,eps_prime,mean,variance,std_error_mean,reps\n");
            csv.push_str(&format!(
                "{theta},{k},{eps_prime},{:.8e},{:.8e},{:.3e},{}\n",
                m.mean, m.variance, m.std_error_mean, m.n
            ));
        }
        "n-plus-exceed" => {
            let p = need(args.p, "p")?;
            let k = need(args.k, "k")?;
            let norm = need(args.norm, "norm")?;
            let delta = need(args.delta, "delta")?;
            let bound = dprp::analytic::n_plus_bound(
                norm,
                args.beta,
                delta,
                k,
                p,
                dprp::analytic::PPlusFlavor::Gaussian,
            )?;
            let est =
                oracle::n_plus_exceed_mc(p, k, args.beta, norm, bound, args.n, &stream)?;
            csv.push_str("p,k,beta,norm,delta,bound,exceed_rate,std_error,trials\n");
            csv.push_str(&format!(
                "{p},{k},{},{norm},{delta},{bound},{:.8e},{:.3e},{}\n",
                args.beta, est.estimate, est.std_error, est.n
            ));
        }
        other => {
            return Err(Error::Config(format!(
                "unknown target '{other}'; see `dprp oracle --help` for the list"
            )))
        }
    }
    let written = emit_table(ctx, &format!("oracle-{}.csv", args.target), &csv)?;
    if let (Some(dir), Some(path)) = (ctx.out_dir()?, written) {
        write_manifest(
            dir,
            "oracle",
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
