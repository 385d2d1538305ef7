use std::path::PathBuf;

use clap::Args;
use ptsl::edge::{edge_spectrum, theorem2_is_real, Classification, EdgeStateRecord};
use serde::{Deserialize, Serialize};

use super::describe;
use crate::lattice_args::LatticeArgs;
use crate::output::{write_text, Csv};

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EdgesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub lattice: LatticeArgs,
    /// Tolerance on |Im E| for the real/complex verdict.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Edge report; `.json` writes JSON, anything else CSV
    /// (`re_E,im_E,abs_S11,class,loc_length`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EdgeReport<'a> {
    spectrum: &'static str,
    infinite_lattice_unbroken: bool,
    states: &'a [EdgeStateRecord],
}

fn format_energy(e: ptsl::Complex64) -> String {
    if e.im == 0.0 {
        format!("{:.4}", e.re)
    } else {
        let sign = if e.im < 0.0 { '-' } else { '+' };
        format!("{:.4} {sign} {:.4}i", e.re, e.im.abs())
    }
}

pub fn run(args: &EdgesArgs) -> anyhow::Result<Vec<PathBuf>> {
    let spec = args.lattice.resolve()?;
    let records = edge_spectrum(&spec)?;
    let verdict = theorem2_is_real(&spec, args.tol)?;
    let spectrum = if verdict.real { "real" } else { "complex" };

    println!("{}", describe(&spec));
    println!("infinite lattice: {}", if verdict.infinite_lattice.unbroken { "unbroken" } else { "broken" });
    println!("{:<22} {:>8}  {:<16} {:>8}", "energy", "|S11|", "class", "L");
    for r in &records {
        let l = r.localization_length.map_or_else(|| "-".to_string(), |l| format!("{l:.4}"));
        println!("{:<22} {:>8.4}  {:<16} {:>8}", format_energy(r.energy), r.s11_abs, r.classification, l);
    }
    let edges = records.iter().filter(|r| r.classification == Classification::Edge).count();
    println!("edge states: {edges}");
    println!("spectrum: {spectrum}");

    let mut outputs = Vec::new();
    if let Some(out) = &args.out {
        if out.extension().is_some_and(|e| e == "json") {
            let report = EdgeReport {
                spectrum,
                infinite_lattice_unbroken: verdict.infinite_lattice.unbroken,
                states: &records,
            };
            write_text(out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
        } else {
            let mut csv = Csv::new(&["re_E", "im_E", "abs_S11", "class", "loc_length"]);
            for r in &records {
                let l = r.localization_length.map_or_else(String::new, |l| format!("{l:?}"));
                csv.row(&[&r.energy.re, &r.energy.im, &r.s11_abs, &r.classification, &l]);
            }
            csv.write(out)?;
        }
        outputs.push(out.clone());
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ptsl::Complex64;

    #[test]
    fn energies_print_like_the_table() {
        assert_eq!(format_energy(Complex64::new(1.70581, 0.07121)), "1.7058 + 0.0712i");
        assert_eq!(format_energy(Complex64::new(-0.0034, -0.0001)), "-0.0034 - 0.0001i");
        assert_eq!(format_energy(Complex64::new(-1.885, 0.0)), "-1.8850");
    }
}
