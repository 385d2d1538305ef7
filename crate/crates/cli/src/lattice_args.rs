use std::path::PathBuf;

use anyhow::Context;
use clap::Args;
use ptsl::lattice::build_harper;
use ptsl::{HarperParams, SuperlatticeSpec};
use serde::{Deserialize, Serialize};

use crate::usage;

/// Either `--lattice FILE` or `--harper` with its parameters.
#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct LatticeArgs {
    /// Lattice JSON: `{"q", "onsite": [[re, im], ...], "hopping"}` or `{"harper": {...}}`.
    #[arg(long, value_name = "FILE", conflicts_with = "harper")]
    pub lattice: Option<PathBuf>,
    /// Use the Harper superlattice given by --delta --lambda --p --q --n0.
    #[arg(long)]
    pub harper: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub p: u32,
    #[arg(long)]
    pub q: Option<u32>,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub n0: i64,
}

impl LatticeArgs {
    pub fn resolve(&self) -> anyhow::Result<SuperlatticeSpec> {
        if let Some(path) = &self.lattice {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("cannot read lattice file {}: {e}", path.display())))?;
            return parse_lattice_json(&text).with_context(|| format!("lattice file {}", path.display()));
        }
        if !self.harper {
            return Err(usage("a lattice is required: pass --lattice FILE or --harper"));
        }
        let (Some(delta), Some(lambda), Some(q)) = (self.delta, self.lambda, self.q) else {
            return Err(usage("--harper needs --delta, --lambda and --q"));
        };
        Ok(build_harper(HarperParams::new(delta, lambda, self.p, q, self.n0))?)
    }
}

#[derive(Deserialize)]
struct HarperFile {
    harper: HarperParams,
}

pub fn parse_lattice_json(text: &str) -> anyhow::Result<SuperlatticeSpec> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| usage(format!("invalid JSON: {e}")))?;
    if value.get("harper").is_some() {
        let file: HarperFile =
            serde_json::from_value(value).map_err(|e| usage(format!("invalid Harper lattice: {e}")))?;
        return Ok(build_harper(file.harper)?);
    }
    serde_json::from_value(value).map_err(|e| usage(format!("invalid lattice: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_and_harper_json() {
        let spec = parse_lattice_json(r#"{"q": 2, "onsite": [[0, 1], [0, -1]], "hopping": [1, 1]}"#).unwrap();
        assert_eq!(spec.period(), 2);
        let h = parse_lattice_json(r#"{"harper": {"delta": 0.3, "lambda": 0.1, "p": 1, "q": 6}}"#).unwrap();
        assert_eq!(h, build_harper(HarperParams::new(0.3, 0.1, 1, 6, 0)).unwrap());
    }

    #[test]
    fn rejects_bad_lattices() {
        assert!(parse_lattice_json("{").is_err());
        assert!(parse_lattice_json(r#"{"q": 2, "onsite": [[0, 0]], "hopping": [1, 1]}"#).is_err());
        assert!(parse_lattice_json(r#"{"harper": {"delta": 0.3, "lambda": 0.1, "p": 2, "q": 6}}"#).is_err());
        let args = LatticeArgs { harper: true, delta: Some(0.3), ..Default::default() };
        assert!(args.resolve().is_err());
        assert!(LatticeArgs::default().resolve().is_err());
    }
}
