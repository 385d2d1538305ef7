pub mod bands;
pub mod edges;
pub mod evolve;
pub mod sweep;
pub mod threshold;

use ptsl::lattice::check_pt_symmetry;
use ptsl::SuperlatticeSpec;

/// One-line lattice description for the human-readable report.
pub fn describe(spec: &SuperlatticeSpec) -> String {
    let pt = check_pt_symmetry(spec);
    let symmetry = match pt.center {
        Some(c) => format!("PT-symmetric about n = {c}"),
        None => "not PT-symmetric".to_string(),
    };
    let kind = if spec.is_hermitian() { "Hermitian" } else { "non-Hermitian" };
    format!("lattice: q = {}, {kind}, {symmetry}", spec.period())
}
