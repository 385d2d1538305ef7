use std::path::PathBuf;

use clap::Args;
use ptsl::bloch::{band_structure, theorem1_is_unbroken, REALITY_TOL};
use serde::{Deserialize, Serialize};

use super::describe;
use crate::lattice_args::LatticeArgs;
use crate::output::{require, Csv};

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct BandsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Number of k-points over [-π/q, π/q).
    #[arg(long, default_value_t = 512)]
    pub kpoints: usize,
    /// Gaps narrower than this are not reported.
    #[arg(long, default_value_t = 1e-6)]
    pub min_gap: f64,
    /// Band CSV (`k,band_index,re_E,im_E`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &BandsArgs) -> anyhow::Result<Vec<PathBuf>> {
    require(args.kpoints >= 2, || format!("--kpoints {} must be at least 2", args.kpoints))?;
    let spec = args.lattice.resolve()?;
    let bands = band_structure(&spec, args.kpoints)?;
    let phase = theorem1_is_unbroken(&spec, REALITY_TOL)?;

    println!("{}", describe(&spec));
    println!("bands: {}, max|Im E| = {:.3e}", spec.period(), bands.max_abs_imag());
    for (b, (lo, hi)) in bands.band_ranges().iter().enumerate() {
        println!("  band {b}: [{lo:.4}, {hi:.4}]");
    }
    let gaps = bands.gaps(args.min_gap);
    println!("gaps: {}", gaps.len());
    for g in &gaps {
        println!(
            "  gap above band {}: [{:.4}, {:.4}], width {:.4}",
            g.lower_band,
            g.lower_edge,
            g.upper_edge,
            g.width()
        );
    }
    println!(
        "PT phase: {} (max|Im E| at k = 0, -π/q: {:.3e})",
        if phase.unbroken { "unbroken" } else { "broken" },
        phase.max_abs_imag
    );

    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        let mut csv = Csv::new(&["k", "band_index", "re_E", "im_E"]);
        for (k, b, e) in bands.rows() {
            csv.row(&[&k, &b, &e.re, &e.im]);
        }
        csv.write(out)?;
        outputs.push(out.clone());
    }
    Ok(outputs)
}
