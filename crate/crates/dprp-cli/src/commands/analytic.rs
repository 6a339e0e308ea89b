//! `dprp analytic`: closed-form quantities as CSV over flag grids.

use std::time::Instant;

use dprp::analytic as an;
use dprp::analytic::PPlusFlavor;

use super::{emit_table, Ctx};
use crate::manifest::write_manifest;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    /// chi-square-tail | half-normal-tail | binomial-tail | abs-exceed |
    /// conditional-expectation | conditional-tail | p-plus-gaussian |
    /// p-plus-rademacher | n-plus | signrp-angle-variance |
    /// rr-angle-variance | variance-ratio | optimal-k-star
    function: String,

    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    rho: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    k: Vec<u64>,
    #[arg(long, value_delimiter = ',')]
    n: Vec<u64>,
    /// Tail parameter / threshold argument.
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Success probability for the binomial tail.
    #[arg(long, value_delimiter = ',')]
    prob: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    eta: Vec<f64>,
    #[arg(long = "sigma-x", value_delimiter = ',')]
    sigma_x: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    theta: Vec<f64>,
    #[arg(long = "eps-prime", value_delimiter = ',')]
    eps_prime: Vec<f64>,
    #[arg(long = "eps", value_delimiter = ',')]
    epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    norm: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    delta: Vec<f64>,
    #[arg(long = "f-plus", value_delimiter = ',')]
    f_plus: Vec<f64>,
    /// gaussian | rademacher (n-plus only).
    #[arg(long, default_value = "gaussian")]
    flavor: String,
}

fn need<'a, T>(v: &'a [T], name: &str) -> dprp::Result<&'a [T]> {
    if v.is_empty() {
        Err(dprp::Error::Config(format!("--{name} is required for this function")))
    } else {
        Ok(v)
    }
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let mut csv = String::new();
    match args.function.as_str() {
        "chi-square-tail" | "half-normal-tail" => {
            csv.push_str("function,n,t,threshold,bound\n");
            for &n in need(&args.n, "n")? {
                for &t in need(&args.t, "t")? {
                    let b = if args.function.starts_with("chi") {
                        an::chi_square_tail(n, t)?
                    } else {
                        an::half_normal_tail(n, t)?
                    };
                    csv.push_str(&format!(
                        "{},{n},{t},{:.12e},{:.12e}\n",
                        args.function, b.threshold, b.bound
                    ));
                }
            }
        }
        "binomial-tail" => {
            csv.push_str("n,prob,eta,threshold,bound\n");
            for &n in need(&args.n, "n")? {
                for &prob in need(&args.prob, "prob")? {
                    for &eta in need(&args.eta, "eta")? {
                        let b = an::binomial_tail(n, prob, eta)?;
                        csv.push_str(&format!(
                            "{n},{prob},{eta},{:.12e},{:.12e}\n",
                            b.threshold, b.bound
                        ));
                    }
                }
            }
        }
        "abs-exceed" => {
            csv.push_str("r,rho,probability\n");
            for &r in need(&args.r, "r")? {
                for &rho in need(&args.rho, "rho")? {
                    csv.push_str(&format!("{r},{rho},{:.12e}\n", an::abs_exceed_prob(r, rho)?));
                }
            }
        }
        "conditional-expectation" => {
            csv.push_str("r,rho,sigma_x,expectation\n");
            for &r in need(&args.r, "r")? {
                for &rho in need(&args.rho, "rho")? {
                    for &sx in need(&args.sigma_x, "sigma-x")? {
                        csv.push_str(&format!(
                            "{r},{rho},{sx},{:.12e}\n",
                            an::conditional_abs_expectation(r, rho, sx)?
                        ));
                    }
                }
            }
        }
        "conditional-tail" => {
            csv.push_str("t,sigma_x,bound\n");
            for &t in need(&args.t, "t")? {
                for &sx in need(&args.sigma_x, "sigma-x")? {
                    csv.push_str(&format!(
                        "{t},{sx},{:.12e}\n",
                        an::conditional_tail_bound(t, sx)?
                    ));
                }
            }
        }
        "p-plus-gaussian" => {
            csv.push_str("r,p,probability\n");
            for &r in need(&args.r, "r")? {
                for &p in need(&args.p, "p")? {
                    csv.push_str(&format!("{r},{p},{:.12e}\n", an::p_plus_gaussian(r, p)?));
                }
            }
        }
        "p-plus-rademacher" => {
            csv.push_str("r,p,probability,small_p\n");
            for &r in need(&args.r, "r")? {
                for &p in need(&args.p, "p")? {
                    let a = an::p_plus_rademacher(r, p)?;
                    csv.push_str(&format!("{r},{p},{:.12e},{}\n", a.value, a.small_p));
                }
            }
        }
        "n-plus" => {
            let flavor = match args.flavor.as_str() {
                "gaussian" => PPlusFlavor::Gaussian,
                "rademacher" => PPlusFlavor::Rademacher,
                other => {
                    return Err(dprp::Error::Config(format!(
                        "unknown flavor '{other}'; expected gaussian or rademacher"
                    )))
                }
            };
            csv.push_str("norm,beta,delta,k,p,flavor,bound\n");
            for &norm in need(&args.norm, "norm")? {
                for &beta in need(&args.beta, "beta")? {
                    for &delta in need(&args.delta, "delta")? {
                        for &k in need(&args.k, "k")? {
                            for &p in need(&args.p, "p")? {
                                let b = an::n_plus_bound(
                                    norm,
                                    beta,
                                    delta,
                                    k as usize,
                                    p as usize,
                                    flavor,
                                )?;
                                csv.push_str(&format!(
                                    "{norm},{beta},{delta},{k},{p},{},{b}\n",
                                    args.flavor
                                ));
                            }
                        }
                    }
                }
            }
        }
        "signrp-angle-variance" => {
            csv.push_str("theta,k,variance\n");
            for &theta in need(&args.theta, "theta")? {
                for &k in need(&args.k, "k")? {
                    csv.push_str(&format!(
                        "{theta},{k},{:.12e}\n",
                        an::signrp_angle_variance(theta, k as usize)
                    ));
                }
            }
        }
        "rr-angle-variance" => {
            csv.push_str("theta,k,eps_prime,variance\n");
            for &theta in need(&args.theta, "theta")? {
                for &k in need(&args.k, "k")? {
                    for &e in need(&args.eps_prime, "eps-prime")? {
                        csv.push_str(&format!(
                            "{theta},{k},{e},{:.12e}\n",
                            an::rr_angle_variance(theta, k as usize, e)
                        ));
                    }
                }
            }
        }
        "variance-ratio" => {
            csv.push_str("p,k,sigma,ratio\n");
            for &p in need(&args.p, "p")? {
                for &k in need(&args.k, "k")? {
                    for &sigma in need(&args.sigma, "sigma")? {
                        csv.push_str(&format!(
                            "{p},{k},{sigma},{:.12e}\n",
                            an::variance_ratio(p as usize, k as usize, sigma)
                        ));
                    }
                }
            }
        }
        "optimal-k-star" => {
            csv.push_str("theta,epsilon,f_plus,k_star\n");
            for &theta in need(&args.theta, "theta")? {
                for &eps in need(&args.epsilon, "eps")? {
                    for &f in need(&args.f_plus, "f-plus")? {
                        csv.push_str(&format!(
                            "{theta},{eps},{f},{:.12e}\n",
                            an::optimal_k_star(theta, eps, f)?
                        ));
                    }
                }
            }
        }
        other => {
            return Err(dprp::Error::Config(format!(
                "unknown function '{other}'; see `dprp analytic --help` for the list"
            )))
        }
    }
    let written = emit_table(ctx, &format!("{}.csv", args.function), &csv)?;
    if let (Some(dir), Some(path)) = (ctx.out_dir()?, written) {
        write_manifest(
            dir,
            "analytic",
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
