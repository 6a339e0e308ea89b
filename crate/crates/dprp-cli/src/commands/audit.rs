//! `dprp audit`: exact privacy audit of one mechanism configuration on a
//! grid of single-coordinate neighbors. Exits nonzero when the audit fails.

use std::path::PathBuf;
use std::time::Instant;

use dprp::core::{read_csv_dataset, DataVector, PrivacyBudget, RngStream};
use dprp::dp_rp::{DpRpConfig, DpRpVariant};
use dprp::dp_sign::SignOporpVariant;
use dprp::error::Error;
use dprp::evalbench::{audit_privacy, AuditCase, AuditMechanism, Mutation};
use dprp::projections::ProjectionSpec;

use super::Ctx;
use crate::manifest::write_manifest;

#[derive(clap::Args, serde::Serialize)]
pub struct Args {
    /// signrp-rr-pure | signrp-rr-smooth | signoporp-rr | signoporp-rr-smooth |
    /// idp-signrp-rr | idp-signrp-g | raw-g-opt | rp-g | rp-g-opt |
    /// rp-g-opt-b | rp-l | oporp
    #[arg(long)]
    mechanism: String,

    #[arg(long = "eps")]
    epsilon: f64,

    #[arg(long, default_value_t = 0.0)]
    delta: f64,

    #[arg(long, default_value_t = 1.0)]
    beta: f64,

    /// Data dimension of the audited instance (small; the audit is exact).
    #[arg(long, default_value_t = 4)]
    p: usize,

    #[arg(long, default_value_t = 8)]
    k: usize,

    /// Repetitions for the OPORP sign mechanisms.
    #[arg(long, default_value_t = 1)]
    t: u32,

    /// Grid points per coordinate (endpoints included).
    #[arg(long, default_value_t = 21)]
    grid: usize,

    /// gaussian | rademacher projection for the dense sign mechanisms.
    #[arg(long, default_value = "gaussian")]
    projection: String,

    /// Optional deliberate defect: halved-flip | dropped-coin
    #[arg(long)]
    mutation: Option<String>,

    /// Base vector (first CSV row); a seeded vector is generated when
    /// omitted.
    #[arg(long = "base-csv")]
    base_csv: Option<PathBuf>,
}

fn base_vector(args: &Args, seed: u64) -> dprp::Result<DataVector> {
    if let Some(path) = &args.base_csv {
        let d = read_csv_dataset(path, None)?;
        return d.row_vector(0);
    }
    // Entries inside (-0.6, 0.6) keep most grid neighbors within bounds; one
    // exact zero exercises the empty-bin path of the OPORP mechanisms.
    let stream = RngStream::from_seed(seed).derive(0xba5e);
    let mut values = dprp::evalbench::uniform_values(args.p, 0.6, &stream);
    if args.p > 1 {
        values[args.p / 2] = 0.0;
    }
    DataVector::new(values, 1.0)
}

pub fn run(ctx: &Ctx, args: Args) -> dprp::Result<()> {
    let started = Instant::now();
    let base = base_vector(&args, ctx.seed)?;
    let p = base.dim();
    let k = args.k;
    let seed = ctx.seed;
    let budget = PrivacyBudget::new(args.epsilon, args.delta)?
        .with_beta(args.beta)?
        .with_repetitions(args.t)?;

    let dense_spec = match args.projection.as_str() {
        "gaussian" => ProjectionSpec::gaussian(p, k, seed),
        "rademacher" => ProjectionSpec::rademacher(p, k, seed),
        other => {
            return Err(Error::Config(format!(
                "unknown projection '{other}'; expected gaussian or rademacher"
            )))
        }
    };
    let mechanism = match args.mechanism.as_str() {
        "signrp-rr-pure" => AuditMechanism::SignRpRrPure { spec: dense_spec },
        "signrp-rr-smooth" => AuditMechanism::SignRpRrSmooth { spec: dense_spec },
        "signoporp-rr" => AuditMechanism::SignOporp {
            spec: ProjectionSpec::oporp(p, k, seed),
            variant: SignOporpVariant::Rr,
        },
        "signoporp-rr-smooth" => AuditMechanism::SignOporp {
            spec: ProjectionSpec::oporp(p, k, seed),
            variant: SignOporpVariant::RrSmooth,
        },
        "idp-signrp-rr" => AuditMechanism::IdpSignRpRr {
            spec: ProjectionSpec::rademacher(p, k, seed),
        },
        "idp-signrp-g" => AuditMechanism::IdpSignRpG {
            spec: ProjectionSpec::rademacher(p, k, seed),
        },
        full @ ("raw-g-opt" | "rp-g" | "rp-g-opt" | "rp-g-opt-b" | "rp-l" | "oporp") => {
            let (variant, spec) = match full {
                "raw-g-opt" => (DpRpVariant::RawGOpt, None),
                "rp-g" => (DpRpVariant::RpG, Some(dense_spec)),
                "rp-g-opt" => (DpRpVariant::RpGOpt, Some(dense_spec)),
                "rp-g-opt-b" => (DpRpVariant::RpGOptB, Some(ProjectionSpec::rademacher(p, k, seed))),
                "rp-l" => (DpRpVariant::RpL, Some(dense_spec)),
                _ => (DpRpVariant::Oporp, Some(ProjectionSpec::oporp(p, k, seed))),
            };
            AuditMechanism::DpRp {
                config: DpRpConfig::new(variant, spec, budget),
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown mechanism '{other}'; see `dprp audit --help` for the list"
            )))
        }
    };

    let mut case = AuditCase::new(mechanism, base, budget).with_grid_points(args.grid);
    if let Some(m) = &args.mutation {
        case = case.with_mutation(match m.as_str() {
            "halved-flip" => Mutation::HalvedFlipProbability,
            "dropped-coin" => Mutation::DroppedZeroCoin,
            other => {
                return Err(Error::Config(format!(
                    "unknown mutation '{other}'; expected halved-flip or dropped-coin"
                )))
            }
        });
    }

    let report = audit_privacy(&case)?;
    let rendered = serde_json::to_string_pretty(&report).unwrap();
    println!("{rendered}");
    if let Some(dir) = ctx.out_dir()? {
        let path = dir.join("audit.json");
        std::fs::write(&path, &rendered)?;
        write_manifest(
            dir,
            "audit",
            serde_json::to_value(&args).unwrap(),
            ctx.seed,
            ctx.jobs,
            &[],
            &[path],
            started,
        )?;
    }
    if !report.pass {
        return Err(Error::Validation(format!(
            "privacy audit FAILED with margin {:.3e} against {}",
            report.margin, report.bound
        )));
    }
    Ok(())
}
