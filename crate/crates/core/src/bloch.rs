//! Infinite-lattice spectrum.
//!
//! Bloch waves `ψ_{n+q} = e^{ikq} ψ_n` reduce the eigenproblem to the `q×q`
//! matrix `R(k)`; the bands are its eigenvalues for `k ∈ [-π/q, π/q)`. The
//! spectrum is entirely real iff `R(0)` and `R(-π/q)` have real spectra, which is
//! what [`theorem1_is_unbroken`] checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lattice::{gcd, ParametricLattice, SuperlatticeSpec};
use crate::numerics::{eig_complex, sort_by_real, ComplexMatrix};
use crate::{Error, Result};

/// Default absolute tolerance on `|Im E|` for calling a spectrum real.
pub const REALITY_TOL: f64 = 1e-9;

/// Default number of k-points in the guard scan.
pub const GUARD_KPOINTS: usize = 128;

/// Bloch matrix `R(k)`.
pub fn build_r(spec: &SuperlatticeSpec, k: f64) -> ComplexMatrix {
    let q = spec.period();
    let phase = Complex64::from_polar(1.0, k * q as f64);
    let mut r = ComplexMatrix::zeros(q);
    for i in 0..q {
        r[(i, i)] = spec.onsite()[i];
    }
    for i in 0..q.saturating_sub(1) {
        let kappa = Complex64::new(-spec.hopping()[i], 0.0);
        r[(i, i + 1)] += kappa;
        r[(i + 1, i)] += kappa;
    }
    // Corner couplings through the cell boundary; for q = 1 both land on the
    // diagonal and for q = 2 they add onto the nearest-neighbour entries.
    let kq = spec.hopping()[q - 1];
    r[(0, q - 1)] += -kq * phase.conj();
    r[(q - 1, 0)] += -kq * phase;
    r
}

/// Eigenvalues of `R(k)`, sorted by real part then imaginary part.
pub fn bloch_energies(spec: &SuperlatticeSpec, k: f64) -> Result<Vec<Complex64>> {
    let mut e = eig_complex(&build_r(spec, k))?;
    sort_by_real(&mut e);
    Ok(e)
}

/// Uniform grid of `num_k` Bloch numbers covering `[-π/q, π/q)`.
pub fn k_grid(q: usize, num_k: usize) -> Vec<f64> {
    let width = 2.0 * PI / q as f64;
    (0..num_k).map(|j| -PI / q as f64 + width * j as f64 / num_k as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStructure {
    pub q: usize,
    pub k_values: Vec<f64>,
    /// `energies[j]` holds the `q` energies at `k_values[j]`.
    pub energies: Vec<Vec<Complex64>>,
}

/// A spectral gap between consecutive (real-part sorted) bands.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    /// Index of the band below the gap (0-based).
    pub lower_band: usize,
    pub lower_edge: f64,
    pub upper_edge: f64,
}

impl Gap {
    pub fn width(&self) -> f64 {
        self.upper_edge - self.lower_edge
    }
}

impl BandStructure {
    pub fn max_abs_imag(&self) -> f64 {
        self.energies.iter().flatten().fold(0.0, |m, e| m.max(e.im.abs()))
    }

    /// `(min Re E, max Re E)` of each band.
    pub fn band_ranges(&self) -> Vec<(f64, f64)> {
        (0..self.q)
            .map(|b| {
                self.energies.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), row| {
                    (lo.min(row[b].re), hi.max(row[b].re))
                })
            })
            .collect()
    }

    /// Gaps wider than `min_width` between neighbouring bands.
    pub fn gaps(&self, min_width: f64) -> Vec<Gap> {
        self.band_ranges()
            .windows(2)
            .enumerate()
            .filter_map(|(b, w)| {
                let gap = Gap { lower_band: b, lower_edge: w[0].1, upper_edge: w[1].0 };
                (gap.width() > min_width).then_some(gap)
            })
            .collect()
    }

    /// Rows `(k, band_index, E)` in output order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, Complex64)> + '_ {
        self.k_values
            .iter()
            .zip(&self.energies)
            .flat_map(|(&k, es)| es.iter().enumerate().map(move |(b, &e)| (k, b, e)))
    }
}

/// Sample the `q` bands on a uniform `num_k` grid.
pub fn band_structure(spec: &SuperlatticeSpec, num_k: usize) -> Result<BandStructure> {
    if num_k < 2 {
        return Err(Error::InvalidArgument(format!("num_k = {num_k} must be at least 2")));
    }
    let k_values = k_grid(spec.period(), num_k);
    let energies = k_values
        .par_iter()
        .map(|&k| bloch_energies(spec, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(BandStructure { q: spec.period(), k_values, energies })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagnosis {
    pub unbroken: bool,
    pub max_abs_imag: f64,
    pub witness_k: f64,
}

fn diagnose(spec: &SuperlatticeSpec, ks: &[f64], tol: f64) -> Result<PhaseDiagnosis> {
    let mut worst = (0.0f64, ks[0]);
    for &k in ks {
        let m = eig_complex(&build_r(spec, k))?.iter().fold(0.0f64, |m, e| m.max(e.im.abs()));
        if m > worst.0 {
            worst = (m, k);
        }
    }
    Ok(PhaseDiagnosis { unbroken: worst.0 <= tol, max_abs_imag: worst.0, witness_k: worst.1 })
}

/// The spectrum of the infinite lattice is real iff the `2q` eigenvalues of
/// `R(0)` and `R(-π/q)` are real (to within `tol`).
pub fn theorem1_is_unbroken(spec: &SuperlatticeSpec, tol: f64) -> Result<PhaseDiagnosis> {
    let q = spec.period() as f64;
    diagnose(spec, &[0.0, -PI / q], tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuardReport {
    pub endpoints: PhaseDiagnosis,
    pub grid: PhaseDiagnosis,
    /// Endpoints pass but some interior k has complex energies.
    pub interior_violation: bool,
}

/// Endpoint criterion plus a full scan over `num_k` grid points.
pub fn phase_guard(spec: &SuperlatticeSpec, tol: f64, num_k: usize) -> Result<GuardReport> {
    let endpoints = theorem1_is_unbroken(spec, tol)?;
    let ks = k_grid(spec.period(), num_k.max(2));
    let chunks: Vec<PhaseDiagnosis> =
        ks.par_chunks(16).map(|c| diagnose(spec, c, tol)).collect::<Result<_>>()?;
    let grid = chunks
        .into_iter()
        .reduce(|a, b| if b.max_abs_imag > a.max_abs_imag { b } else { a })
        .expect("non-empty grid");
    Ok(GuardReport { endpoints, grid, interior_violation: endpoints.unbroken && !grid.unbroken })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    /// Coarse samples over `(0, lambda_max]`.
    pub samples: usize,
    /// Final bracket width.
    pub tol_lambda: f64,
    /// Reality tolerance on `|Im E|`.
    pub reality_tol: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { samples: 64, tol_lambda: 1e-4, reality_tol: REALITY_TOL }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub lambda_c: f64,
    /// Final bisection bracket `[unbroken, broken]`.
    pub bracket: (f64, f64),
    /// No breaking found up to `lambda_max`; `lambda_c` is then `lambda_max`.
    pub never_broken: bool,
    /// The coarse scan saw the phase return to unbroken after the first
    /// transition; the first transition is reported.
    pub multiple_transitions: bool,
}

/// Symmetry-breaking threshold `λ_c` of a parametric family.
pub fn breaking_threshold(
    family: &ParametricLattice,
    lambda_max: f64,
    tol_lambda: f64,
) -> Result<ThresholdResult> {
    breaking_threshold_with(family, lambda_max, ThresholdOptions { tol_lambda, ..Default::default() })
}

pub fn breaking_threshold_with(
    family: &ParametricLattice,
    lambda_max: f64,
    options: ThresholdOptions,
) -> Result<ThresholdResult> {
    if !(lambda_max > 0.0) || !lambda_max.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda_max = {lambda_max} must be positive")));
    }
    if !(options.tol_lambda > 0.0) || options.samples == 0 {
        return Err(Error::InvalidArgument("tol_lambda and samples must be positive".into()));
    }
    let unbroken = |lambda: f64| -> Result<bool> {
        Ok(theorem1_is_unbroken(&family.at(lambda)?, options.reality_tol)?.unbroken)
    };
    let at_zero = theorem1_is_unbroken(&family.at(0.0)?, options.reality_tol)?;
    if !at_zero.unbroken {
        return Err(Error::BrokenAtZero { max_abs_imag: at_zero.max_abs_imag });
    }

    let grid: Vec<f64> =
        (1..=options.samples).map(|i| lambda_max * i as f64 / options.samples as f64).collect();
    let phases: Vec<bool> = grid.par_iter().map(|&l| unbroken(l)).collect::<Result<_>>()?;
    let Some(first) = phases.iter().position(|&u| !u) else {
        return Ok(ThresholdResult {
            lambda_c: lambda_max,
            bracket: (lambda_max, lambda_max),
            never_broken: true,
            multiple_transitions: false,
        });
    };
    let multiple_transitions = phases[first..].iter().any(|&u| u);

    let mut lo = if first == 0 { 0.0 } else { grid[first - 1] };
    let mut hi = grid[first];
    while hi - lo > options.tol_lambda {
        let mid = 0.5 * (lo + hi);
        if unbroken(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda_c = if lo == 0.0 { 0.0 } else { 0.5 * (lo + hi) };
    Ok(ThresholdResult { lambda_c, bracket: (lo, hi), never_broken: false, multiple_transitions })
}

/// `σ = max_k max Im E(k)`, clamped to zero when it does not exceed `tol`.
pub fn max_growth_rate(spec: &SuperlatticeSpec, num_k: usize, tol: f64) -> Result<f64> {
    if num_k < 2 {
        return Err(Error::InvalidArgument(format!("num_k = {num_k} must be at least 2")));
    }
    let sigma = k_grid(spec.period(), num_k)
        .par_iter()
        .map(|&k| Ok(eig_complex(&build_r(spec, k))?.iter().fold(f64::NEG_INFINITY, |m, e| m.max(e.im))))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(if sigma <= tol { 0.0 } else { sigma })
}

/// Which Harper parameter a sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Vary `q` over the inclusive range with `p` fixed.
    Q { p: u32, from: u32, to: u32 },
    /// Vary `p` over the inclusive range with `q` fixed.
    P { q: u32, from: u32, to: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: u32,
    pub lambda_c: f64,
    pub never_broken: bool,
    pub sigma: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub delta: f64,
    /// Non-Hermiticity at which `σ` is evaluated.
    pub lambda_sigma: f64,
    pub lambda_max: f64,
    pub threshold: ThresholdOptions,
    pub num_k: usize,
}

/// `(param, λ_c, σ)` for the Harper family along one axis. Pairs with
/// `gcd(p, q) != 1` are skipped; rows come back in parameter order.
pub fn sweep(axis: SweepAxis, options: SweepOptions) -> Result<Vec<SweepRow>> {
    let points: Vec<(u32, u32, u32)> = match axis {
        SweepAxis::Q { p, from, to } => (from..=to).map(|q| (q, p, q)).collect(),
        SweepAxis::P { q, from, to } => (from..=to).map(|p| (p, p, q)).collect(),
    };
    let points: Vec<_> = points.into_iter().filter(|&(_, p, q)| q >= 1 && gcd(p, q) == 1).collect();
    points
        .par_iter()
        .map(|&(param, p, q)| {
            let family = ParametricLattice::harper(options.delta, p, q, 0)?;
            let thr = breaking_threshold_with(&family, options.lambda_max, options.threshold)?;
            let sigma = max_growth_rate(&family.at(options.lambda_sigma)?, options.num_k, options.threshold.reality_tol)?;
            Ok(SweepRow { param, lambda_c: thr.lambda_c, never_broken: thr.never_broken, sigma })
        })
        .collect()
}
