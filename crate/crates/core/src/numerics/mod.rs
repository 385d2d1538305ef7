//! Dense numerical kernels shared by the lattice analyses.

mod eigen;
mod matrix;
mod ode;
mod poly;

pub use eigen::eig_complex;
pub use matrix::ComplexMatrix;
pub use ode::{integrate_ode, OdeOptions, Trajectory};
pub use poly::{cluster_roots, ComplexPolynomial, RootCluster};

use num_complex::Complex64;

/// Largest distance in a greedy nearest-neighbour pairing of two multisets, or
/// `f64::INFINITY` when the sizes differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|l, r| l.1.total_cmp(&r.1))
            .expect("sizes match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Sort by real part, then imaginary part.
pub fn sort_by_real(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}
