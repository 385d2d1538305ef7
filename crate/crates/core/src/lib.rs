//! Spectral analysis of PT-symmetric tight-binding superlattices.
//!
//! The crate covers four views of the same lattice Hamiltonian
//!
//! ```text
//! H_{n,m} = -κ_{n-1} δ_{n,m+1} - κ_n δ_{n,m-1} + V_n δ_{n,m},   V_{n+q} = V_n, κ_{n+q} = κ_n
//! ```
//!
//! * [`bloch`]: the infinitely extended lattice (Bloch matrices, bands, PT-phase
//!   diagnosis and symmetry-breaking thresholds),
//! * [`transfer`]: one-period transfer matrices and their closed-form powers,
//! * [`edge`]: the lattice truncated at site `n = 1` and its edge states,
//! * [`dynamics`]: time-domain propagation on a finite truncated array.
//!
//! [`numerics`] holds the dense kernels they share (polynomials, eigenvalues,
//! an adaptive Runge-Kutta integrator).

pub mod bloch;
pub mod dynamics;
pub mod edge;
mod error;
pub mod lattice;
pub mod numerics;
pub mod transfer;

pub use error::{Error, Result};
pub use lattice::{HarperParams, ParametricLattice, PtReport, SuperlatticeSpec};
pub use num_complex::Complex64;
