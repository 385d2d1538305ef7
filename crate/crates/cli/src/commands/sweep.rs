use std::path::PathBuf;

use clap::Args;
use ptsl::bloch::{sweep, SweepAxis, SweepOptions, ThresholdOptions};
use serde::{Deserialize, Serialize};

use crate::output::{parse_range, require, Csv};
use crate::usage;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SweepArgs {
    /// Vary q over an inclusive range `a:b` with --p fixed.
    #[arg(long, value_parser = parse_range, conflicts_with = "p_range", required_unless_present = "p_range")]
    pub q_range: Option<(u32, u32)>,
    /// Vary p over an inclusive range `a:b` with --q fixed.
    #[arg(long, value_parser = parse_range)]
    pub p_range: Option<(u32, u32)>,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    /// λ at which the growth rate σ is evaluated; defaults to δ.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// k-points for σ.
    #[arg(long, default_value_t = 256)]
    pub kpoints: usize,
    /// Sweep CSV (`param,lambda_c,sigma`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SweepArgs) -> anyhow::Result<Vec<PathBuf>> {
    require(args.lambda_max > 0.0 && args.lambda_max.is_finite(), || {
        format!("--lambda-max {} must be positive", args.lambda_max)
    })?;
    require(args.tol > 0.0, || format!("--tol {} must be positive", args.tol))?;
    require(args.kpoints >= 2, || format!("--kpoints {} must be at least 2", args.kpoints))?;
    let axis = match (args.q_range, args.p_range) {
        (Some((from, to)), _) => SweepAxis::Q { p: args.p, from, to },
        (None, Some((from, to))) => {
            let q = args.q.ok_or_else(|| usage("--p-range needs --q"))?;
            SweepAxis::P { q, from, to }
        }
        (None, None) => return Err(usage("one of --q-range or --p-range is required")),
    };
    let lambda_sigma = args.lambda.unwrap_or(args.delta);
    let options = SweepOptions {
        delta: args.delta,
        lambda_sigma,
        lambda_max: args.lambda_max,
        threshold: ThresholdOptions { tol_lambda: args.tol, ..Default::default() },
        num_k: args.kpoints,
    };
    let rows = sweep(axis, options)?;

    println!("δ = {}, σ evaluated at λ = {lambda_sigma}", args.delta);
    println!("param  lambda_c  sigma");
    let mut csv = Csv::new(&["param", "lambda_c", "sigma"]);
    for r in &rows {
        println!("{:>5}  {:.4}    {:.4e}", r.param, r.lambda_c, r.sigma);
        csv.row(&[&r.param, &r.lambda_c, &r.sigma]);
    }
    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        csv.write(out)?;
        outputs.push(out.clone());
    }
    Ok(outputs)
}
