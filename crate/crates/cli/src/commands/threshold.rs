use std::path::PathBuf;

use clap::Args;
use ptsl::bloch::{breaking_threshold_with, ThresholdOptions, REALITY_TOL};
use ptsl::lattice::gcd;
use ptsl::ParametricLattice;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{parse_range, require, Csv};
use crate::usage;

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdArgs {
    #[arg(long, default_value_t = 0.3)]
    pub delta: f64,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    /// Required unless --q-range or --p-range is given.
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub n0: i64,
    /// Upper end of the λ scan.
    #[arg(long, default_value_t = 1.0)]
    pub lambda_max: f64,
    /// Final bisection bracket width.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    /// Coarse samples before bisection.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    /// Sweep q over an inclusive range `a:b` (p fixed).
    #[arg(long, value_parser = parse_range, conflicts_with = "p_range")]
    pub q_range: Option<(u32, u32)>,
    /// Sweep p over an inclusive range `a:b` (q fixed).
    #[arg(long, value_parser = parse_range)]
    pub p_range: Option<(u32, u32)>,
    /// Sweep CSV (`param,lambda_c,never_broken`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &ThresholdArgs) -> anyhow::Result<Vec<PathBuf>> {
    require(args.lambda_max > 0.0 && args.lambda_max.is_finite(), || {
        format!("--lambda-max {} must be positive", args.lambda_max)
    })?;
    require(args.tol > 0.0, || format!("--tol {} must be positive", args.tol))?;
    let options = ThresholdOptions { samples: args.samples, tol_lambda: args.tol, reality_tol: REALITY_TOL };
    let threshold = |p: u32, q: u32| -> anyhow::Result<_> {
        let family = ParametricLattice::harper(args.delta, p, q, args.n0)?;
        Ok(breaking_threshold_with(&family, args.lambda_max, options)?)
    };

    let points: Vec<(u32, u32, u32)> = match (args.q_range, args.p_range) {
        (Some((a, b)), _) => (a..=b).map(|q| (q, args.p, q)).collect(),
        (None, Some((a, b))) => {
            let q = args.q.ok_or_else(|| usage("--p-range needs --q"))?;
            (a..=b).map(|p| (p, p, q)).collect()
        }
        (None, None) => {
            let q = args.q.ok_or_else(|| usage("--q is required without --q-range or --p-range"))?;
            let r = threshold(args.p, q)?;
            println!("Harper δ = {}, p = {}, q = {q}, n0 = {}", args.delta, args.p, args.n0);
            if r.never_broken {
                println!("no symmetry breaking up to λ = {}", args.lambda_max);
            } else {
                println!("λ_c = {:.6} (bracket [{:.6}, {:.6}])", r.lambda_c, r.bracket.0, r.bracket.1);
            }
            if r.multiple_transitions {
                println!("note: the phase becomes unbroken again above λ_c");
            }
            let mut outputs = Vec::new();
            if let Some(out) = &args.out {
                let mut csv = Csv::new(&["param", "lambda_c", "never_broken"]);
                csv.row(&[&q, &r.lambda_c, &r.never_broken]);
                csv.write(out)?;
                outputs.push(out.clone());
            }
            return Ok(outputs);
        }
    };

    let points: Vec<_> = points.into_iter().filter(|&(_, p, q)| q >= 1 && gcd(p, q) == 1).collect();
    let rows = points
        .par_iter()
        .map(|&(param, p, q)| threshold(p, q).map(|r| (param, r)))
        .collect::<anyhow::Result<Vec<_>>>()?;
    println!("param  lambda_c");
    let mut csv = Csv::new(&["param", "lambda_c", "never_broken"]);
    for (param, r) in &rows {
        let mark = if r.never_broken { " (no breaking up to lambda-max)" } else { "" };
        println!("{param:>5}  {:.4}{mark}", r.lambda_c);
        csv.row(&[param, &r.lambda_c, &r.never_broken]);
    }
    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        csv.write(out)?;
        outputs.push(out.clone());
    }
    Ok(outputs)
}
