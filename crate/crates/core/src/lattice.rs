//! Superlattice definitions, the PT-symmetric Harper family, and PT checks.
//!
//! Site indices follow the physics convention: sites are labelled by integers,
//! `V_n` and `κ_n` for `n = 1..=q` are stored, and every other index is resolved
//! through the periodic extension `V_{n+q} = V_n`, `κ_{n+q} = κ_n`. The hopping
//! `κ_n` couples sites `n` and `n + 1`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance used when comparing energies in the PT check.
pub const PT_TOL: f64 = 1e-12;

/// One period of a tight-binding superlattice with complex on-site energies and
/// real, non-vanishing hoppings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct SuperlatticeSpec {
    onsite: Vec<Complex64>,
    hopping: Vec<f64>,
}

impl SuperlatticeSpec {
    pub fn new(onsite: Vec<Complex64>, hopping: Vec<f64>) -> Result<Self> {
        if onsite.is_empty() {
            return Err(Error::InvalidLattice("period q must be at least 1".into()));
        }
        if onsite.len() != hopping.len() {
            return Err(Error::InvalidLattice(format!(
                "{} on-site energies but {} hoppings",
                onsite.len(),
                hopping.len()
            )));
        }
        if let Some(v) = onsite.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidLattice(format!("non-finite on-site energy {v}")));
        }
        for (i, &k) in hopping.iter().enumerate() {
            if !k.is_finite() || k == 0.0 {
                return Err(Error::InvalidLattice(format!(
                    "hopping kappa_{} = {k} must be finite and nonzero",
                    i + 1
                )));
            }
        }
        Ok(Self { onsite, hopping })
    }

    /// Uniform lattice: `V_n = v`, `κ_n = kappa` with period one.
    pub fn uniform(v: Complex64, kappa: f64) -> Result<Self> {
        Self::new(vec![v], vec![kappa])
    }

    pub fn period(&self) -> usize {
        self.onsite.len()
    }

    pub fn onsite(&self) -> &[Complex64] {
        &self.onsite
    }

    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    fn wrap(&self, n: i64) -> usize {
        (n - 1).rem_euclid(self.period() as i64) as usize
    }

    /// `V_n` for any integer `n`.
    pub fn v(&self, n: i64) -> Complex64 {
        self.onsite[self.wrap(n)]
    }

    /// `κ_n` for any integer `n`; `κ_0 = κ_q`.
    pub fn kappa(&self, n: i64) -> f64 {
        self.hopping[self.wrap(n)]
    }

    pub fn max_abs_hopping(&self) -> f64 {
        self.hopping.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// True when every on-site energy is real, i.e. the Hamiltonian is Hermitian.
    pub fn is_hermitian(&self) -> bool {
        self.onsite.iter().all(|v| v.im == 0.0)
    }

    /// The same lattice with the unit cell shifted so that old site `shift + 1`
    /// becomes the new site 1.
    pub fn rotated(&self, shift: i64) -> Self {
        let q = self.period() as i64;
        let onsite = (1..=q).map(|n| self.v(n + shift)).collect();
        let hopping = (1..=q).map(|n| self.kappa(n + shift)).collect();
        Self { onsite, hopping }
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    q: usize,
    onsite: Vec<[f64; 2]>,
    hopping: Vec<f64>,
}

impl TryFrom<RawSpec> for SuperlatticeSpec {
    type Error = Error;

    fn try_from(raw: RawSpec) -> Result<Self> {
        if raw.onsite.len() != raw.q {
            return Err(Error::InvalidLattice(format!(
                "q = {} but {} on-site energies given",
                raw.q,
                raw.onsite.len()
            )));
        }
        let onsite = raw.onsite.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        Self::new(onsite, raw.hopping)
    }
}

impl From<SuperlatticeSpec> for RawSpec {
    fn from(spec: SuperlatticeSpec) -> Self {
        RawSpec {
            q: spec.period(),
            onsite: spec.onsite.iter().map(|v| [v.re, v.im]).collect(),
            hopping: spec.hopping,
        }
    }
}

/// A one-parameter family `V_n = V_n^(R) + iλ V_n^(I)` with fixed hoppings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParametricLattice {
    onsite_real: Vec<f64>,
    onsite_imag: Vec<f64>,
    hopping: Vec<f64>,
}

impl ParametricLattice {
    pub fn new(onsite_real: Vec<f64>, onsite_imag: Vec<f64>, hopping: Vec<f64>) -> Result<Self> {
        if onsite_real.len() != onsite_imag.len() {
            return Err(Error::InvalidLattice(format!(
                "{} real parts but {} imaginary profiles",
                onsite_real.len(),
                onsite_imag.len()
            )));
        }
        // Validate the shape once at lambda = 1.
        let fam = Self { onsite_real, onsite_imag, hopping };
        fam.at(1.0)?;
        Ok(fam)
    }

    /// Harper family `V_n = δ cos[2πα(n−n₀)] + iλ sin[2πα(n−n₀)]`, `κ_n = 1`.
    pub fn harper(delta: f64, p: u32, q: u32, n0: i64) -> Result<Self> {
        validate_pq(p, q)?;
        let (re, im): (Vec<f64>, Vec<f64>) = (1..=q as i64)
            .map(|n| {
                let phase = harper_phase(p, q, n - n0);
                (delta * phase.cos(), phase.sin())
            })
            .unzip();
        Ok(Self { onsite_real: re, onsite_imag: im, hopping: vec![1.0; q as usize] })
    }

    pub fn period(&self) -> usize {
        self.onsite_real.len()
    }

    pub fn onsite_real(&self) -> &[f64] {
        &self.onsite_real
    }

    pub fn onsite_imag(&self) -> &[f64] {
        &self.onsite_imag
    }

    pub fn hopping(&self) -> &[f64] {
        &self.hopping
    }

    /// Instantiate the lattice at non-Hermiticity `lambda`.
    pub fn at(&self, lambda: f64) -> Result<SuperlatticeSpec> {
        let onsite = self
            .onsite_real
            .iter()
            .zip(&self.onsite_imag)
            .map(|(&r, &i)| Complex64::new(r, lambda * i))
            .collect();
        SuperlatticeSpec::new(onsite, self.hopping.clone())
    }

    /// The family with the gain/loss profile reversed.
    pub fn conjugate(&self) -> Self {
        Self {
            onsite_real: self.onsite_real.clone(),
            onsite_imag: self.onsite_imag.iter().map(|x| -x).collect(),
            hopping: self.hopping.clone(),
        }
    }
}

/// Parameters of the PT-symmetric Harper superlattice with `α = p/q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarperParams {
    pub delta: f64,
    pub lambda: f64,
    pub p: u32,
    pub q: u32,
    #[serde(default)]
    pub n0: i64,
}

impl HarperParams {
    pub fn new(delta: f64, lambda: f64, p: u32, q: u32, n0: i64) -> Self {
        Self { delta, lambda, p, q, n0 }
    }
}

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn validate_pq(p: u32, q: u32) -> Result<()> {
    if q < 1 {
        return Err(Error::InvalidLattice("Harper period q must be at least 1".into()));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidLattice(format!("p = {p} and q = {q} are not coprime")));
    }
    Ok(())
}

// 2π p m / q with p m reduced mod q first, so that the periodic extension is exact.
fn harper_phase(p: u32, q: u32, m: i64) -> f64 {
    let r = (p as i64 * m).rem_euclid(q as i64);
    2.0 * PI * r as f64 / q as f64
}

/// Build the Harper superlattice with uniform hopping `κ = 1`.
pub fn build_harper(params: HarperParams) -> Result<SuperlatticeSpec> {
    let HarperParams { delta, lambda, p, q, n0 } = params;
    if !delta.is_finite() || !lambda.is_finite() {
        return Err(Error::InvalidLattice("Harper amplitudes must be finite".into()));
    }
    if lambda < 0.0 {
        return Err(Error::InvalidLattice(format!("lambda = {lambda} must be non-negative")));
    }
    ParametricLattice::harper(delta, p, q, n0)?.at(lambda)
}

/// Outcome of the PT-symmetry scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PtReport {
    pub symmetric: bool,
    /// Smallest parity centre in `{0, 1/2, ..., q - 1/2}`; integer centres are
    /// site-centred, half-integer ones bond-centred.
    pub center: Option<f64>,
}

/// Find a parity centre `c` such that `V_{2c-n} = V_n*` and `κ_{2c-n-1} = κ_n`.
pub fn check_pt_symmetry(spec: &SuperlatticeSpec) -> PtReport {
    let q = spec.period() as i64;
    let center2 = (0..2 * q).find(|&c2| {
        (1..=q).all(|n| {
            (spec.v(c2 - n) - spec.v(n).conj()).norm() <= PT_TOL
                && (spec.kappa(c2 - n - 1) - spec.kappa(n)).abs() <= PT_TOL
        })
    });
    PtReport { symmetric: center2.is_some(), center: center2.map(|c2| c2 as f64 / 2.0) }
}
