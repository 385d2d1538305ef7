//! Lattice truncated at site `n = 1` (`ψ_0 = 0`).
//!
//! Besides the bands of the infinite lattice, the truncated lattice can carry
//! up to `q - 1` extra states at the zeros `E_l` of `S₂₁(E)`. Then
//! `ψ_{Mq} = 0` and `ψ_{Mq+1} = S₁₁(E_l)^M`, so `|S₁₁(E_l)|` decides:
//!
//! | `|S₁₁|` | state |
//! |---|---|
//! | `< 1` | edge state, localization length `L = -q / ln|S₁₁|²` |
//! | `= 1` | extended (scattering) state |
//! | `> 1` | not in the spectrum |
//!
//! The `E_l` are also the eigenvalues of the `(q-1)×(q-1)` matrix `Q` (the
//! cell with hard walls at sites 0 and q); both routes are computed and
//! cross-checked.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bloch::{theorem1_is_unbroken, PhaseDiagnosis};
use crate::lattice::SuperlatticeSpec;
use crate::numerics::{eig_complex, multiset_distance, sort_by_real, ComplexMatrix};
use crate::transfer::{build_s, symbolic_s};
use crate::{Error, Result};

/// Half-width of the band around `|S₁₁| = 1` classified as extended.
pub const CLASSIFICATION_EPS: f64 = 1e-6;

/// Maximum allowed disagreement between the `Q` and `S₂₁` routes.
pub const ROUTE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Edge,
    Extended,
    NotInSpectrum,
}

impl Classification {
    pub fn from_s11_abs(s11_abs: f64, eps: f64) -> Self {
        if s11_abs < 1.0 - eps {
            Self::Edge
        } else if s11_abs <= 1.0 + eps {
            Self::Extended
        } else {
            Self::NotInSpectrum
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Edge => "edge",
            Self::Extended => "extended",
            Self::NotInSpectrum => "not_in_spectrum",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeStateRecord {
    pub energy: Complex64,
    pub s11_abs: f64,
    pub classification: Classification,
    /// Present iff the record is an edge state.
    pub localization_length: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeOptions {
    pub classification_eps: f64,
    pub route_tol: f64,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        Self { classification_eps: CLASSIFICATION_EPS, route_tol: ROUTE_TOL }
    }
}

/// The tridiagonal `Q` matrix (`V_1..V_{q-1}` on the diagonal, `-κ_1..-κ_{q-2}`
/// off it). Empty for `q = 1`.
pub fn build_q(spec: &SuperlatticeSpec) -> ComplexMatrix {
    let d = spec.period() - 1;
    let mut m = ComplexMatrix::zeros(d);
    for i in 0..d {
        m[(i, i)] = spec.onsite()[i];
        if i + 1 < d {
            let k = Complex64::new(-spec.hopping()[i], 0.0);
            m[(i, i + 1)] = k;
            m[(i + 1, i)] = k;
        }
    }
    m
}

/// Candidate energies from the `Q` route, sorted by real part.
pub fn candidate_energies(spec: &SuperlatticeSpec) -> Result<Vec<Complex64>> {
    let mut e = eig_complex(&build_q(spec))?;
    sort_by_real(&mut e);
    Ok(e)
}

/// Zeros of the polynomial `S₂₁(E)`, sorted by real part.
pub fn s21_roots(spec: &SuperlatticeSpec) -> Result<Vec<Complex64>> {
    if spec.period() < 2 {
        return Ok(Vec::new());
    }
    let mut r = symbolic_s(spec).s21.roots()?;
    sort_by_real(&mut r);
    Ok(r)
}

pub fn edge_spectrum(spec: &SuperlatticeSpec) -> Result<Vec<EdgeStateRecord>> {
    edge_spectrum_with(spec, EdgeOptions::default())
}

/// Classify each of the `q - 1` zeros of `S₂₁`.
pub fn edge_spectrum_with(spec: &SuperlatticeSpec, options: EdgeOptions) -> Result<Vec<EdgeStateRecord>> {
    let q = spec.period();
    if q < 2 {
        return Ok(Vec::new());
    }
    let from_q = candidate_energies(spec)?;
    let from_s21 = s21_roots(spec)?;
    let deviation = multiset_distance(&from_q, &from_s21);
    if !(deviation <= options.route_tol) {
        return Err(Error::RouteMismatch { deviation, from_q, from_s21 });
    }
    Ok(from_q
        .into_iter()
        .map(|energy| {
            let s11_abs = build_s(spec, energy).s11().norm();
            let classification = Classification::from_s11_abs(s11_abs, options.classification_eps);
            let localization_length =
                (classification == Classification::Edge).then(|| length_from_s11(s11_abs, q));
            EdgeStateRecord { energy, s11_abs, classification, localization_length }
        })
        .collect())
}

fn length_from_s11(s11_abs: f64, q: usize) -> f64 {
    -(q as f64) / (s11_abs * s11_abs).ln()
}

/// `L = -q / ln|S₁₁|²` for an edge-state record of a period-`q` lattice.
pub fn localization_length(record: &EdgeStateRecord, q: usize) -> Result<f64> {
    if record.classification != Classification::Edge {
        return Err(Error::NotEdgeState);
    }
    let l = length_from_s11(record.s11_abs, q);
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::NotEdgeState);
    }
    Ok(l)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Diagnosis {
    pub real: bool,
    pub infinite_lattice: PhaseDiagnosis,
    /// Edge-state energies with `|Im E| > tol`.
    pub offending: Vec<Complex64>,
}

/// The truncated lattice has a real spectrum iff the infinite lattice does and
/// every edge-state energy is real.
pub fn theorem2_is_real(spec: &SuperlatticeSpec, tol: f64) -> Result<Theorem2Diagnosis> {
    let infinite_lattice = theorem1_is_unbroken(spec, tol)?;
    let offending: Vec<Complex64> = edge_spectrum(spec)?
        .into_iter()
        .filter(|r| r.classification == Classification::Edge && r.energy.im.abs() > tol)
        .map(|r| r.energy)
        .collect();
    Ok(Theorem2Diagnosis { real: infinite_lattice.unbroken && offending.is_empty(), infinite_lattice, offending })
}

/// `ψ_0, ψ_1, …, ψ_len` from the recurrence at energy `E` with `ψ_0 = 0`,
/// `ψ_1 = 1`.
pub fn psi_sequence(spec: &SuperlatticeSpec, energy: Complex64, len: usize) -> Vec<Complex64> {
    let mut psi = Vec::with_capacity(len + 1);
    psi.push(Complex64::new(0.0, 0.0));
    if len == 0 {
        return psi;
    }
    psi.push(Complex64::new(1.0, 0.0));
    for n in 1..len {
        let ni = n as i64;
        let next = ((spec.v(ni) - energy) * psi[n] - spec.kappa(ni - 1) * psi[n - 1]) / spec.kappa(ni);
        psi.push(next);
    }
    psi
}
