//! Transfer matrices of the truncated superlattice.
//!
//! With `E ψ_n = -κ_{n-1} ψ_{n-1} - κ_n ψ_{n+1} + V_n ψ_n`, the pair
//! `(ψ_{n+1}, ψ_n)` follows from `(ψ_n, ψ_{n-1})` through
//!
//! ```text
//! M_n(E) = [ (V_n - E)/κ_n   -κ_{n-1}/κ_n ]
//!          [       1               0      ]
//! ```
//!
//! and one period is `S(E) = M_q ⋯ M_1`, a unimodular matrix whose entries are
//! polynomials in `E` of degree `q, q-1, q-1, q-2`.

use std::ops::Mul;

use num_complex::Complex64;

use crate::lattice::SuperlatticeSpec;
use crate::numerics::ComplexPolynomial;
use crate::{Error, Result};

/// Below this `|sin θ|` the closed-form power is replaced by repeated squaring.
pub const SIN_THETA_DEGENERACY: f64 = 1e-8;

/// Relative tolerance on `|det S - 1|` (relative to `max(1, ‖S‖²)`) accepted by
/// [`s_power`].
pub const UNIMODULAR_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> Complex64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let [[a, b], [c, d]] = self.0;
        Mat2([[a * s, b * s], [c * s, d * s]])
    }

    pub fn sub(&self, other: &Mat2) -> Self {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= other.0[i][j];
            }
        }
        out
    }

    /// `self^m` by binary powering.
    pub fn pow(&self, mut m: u32) -> Self {
        let mut base = *self;
        let mut acc = Mat2::IDENTITY;
        while m > 0 {
            if m & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            m >>= 1;
        }
        acc
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let [[a, b], [c, d]] = self.0;
        [a * v[0] + b * v[1], c * v[0] + d * v[1]]
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        let [[e, f], [g, h]] = rhs.0;
        Mat2([[a * e + b * g, a * f + b * h], [c * e + d * g, c * f + d * h]])
    }
}

/// One-period transfer matrix `S(E)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub matrix: Mat2,
    pub energy: Complex64,
}

impl TransferMatrix {
    pub fn s11(&self) -> Complex64 {
        self.matrix.0[0][0]
    }

    pub fn s12(&self) -> Complex64 {
        self.matrix.0[0][1]
    }

    pub fn s21(&self) -> Complex64 {
        self.matrix.0[1][0]
    }

    pub fn s22(&self) -> Complex64 {
        self.matrix.0[1][1]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn det(&self) -> Complex64 {
        self.matrix.det()
    }

    /// Principal `θ = arccos((S₁₁ + S₂₂)/2)`; eigenvalues of `S` are `e^{±iθ}`.
    pub fn theta(&self) -> Complex64 {
        (self.trace() * 0.5).acos()
    }
}

/// Single-site transfer matrix `M_n(E)`; `n` is reduced through the periodic
/// extension, so `κ_0` resolves to `κ_q`.
pub fn build_m(spec: &SuperlatticeSpec, n: i64, energy: Complex64) -> Mat2 {
    let kn = spec.kappa(n);
    let kprev = spec.kappa(n - 1);
    Mat2::new((spec.v(n) - energy) / kn, Complex64::new(-kprev / kn, 0.0), ONE, ZERO)
}

/// `S(E) = M_q(E) ⋯ M_1(E)`.
pub fn build_s(spec: &SuperlatticeSpec, energy: Complex64) -> TransferMatrix {
    let q = spec.period() as i64;
    let matrix = (1..=q).fold(Mat2::IDENTITY, |acc, n| build_m(spec, n, energy) * acc);
    TransferMatrix { matrix, energy }
}

/// `S^m` from the Chebyshev closed form
///
/// ```text
/// S^m = [sin(mθ) S - sin((m-1)θ) I] / sin θ,   cos θ = (S₁₁ + S₂₂)/2,
/// ```
///
/// falling back to repeated squaring when `|sin θ| < 1e-8` (band edges, where
/// the closed form is 0/0).
pub fn s_power(s: &Mat2, m: u32) -> Result<Mat2> {
    let det = s.det();
    if (det - ONE).norm() > UNIMODULAR_TOL * s.max_abs().powi(2).max(1.0) {
        return Err(Error::NotUnimodular { det });
    }
    match m {
        0 => return Ok(Mat2::IDENTITY),
        1 => return Ok(*s),
        _ => {}
    }
    // S^m = (-1)^m (-S)^m keeps θ near 0, where acos is accurate; near π the
    // rounding of θ itself is amplified by 1/sin θ.
    let flip = s.trace().re < 0.0;
    let base = if flip { s.scale(-ONE) } else { *s };
    let theta = (base.trace() * 0.5).acos();
    let power = if theta.sin().norm() < SIN_THETA_DEGENERACY {
        base.pow(m)
    } else {
        chebyshev_power(&base, theta, m)
    };
    Ok(if flip && m % 2 == 1 { power.scale(-ONE) } else { power })
}

fn chebyshev_power(s: &Mat2, theta: Complex64, m: u32) -> Mat2 {
    let sin_theta = theta.sin();
    let a = (theta * m as f64).sin() / sin_theta;
    let b = (theta * (m as f64 - 1.0)).sin() / sin_theta;
    s.scale(a).sub(&Mat2::IDENTITY.scale(b))
}

/// Whether `E` lies in the continuous (band) spectrum: `S₁₁ + S₂₂` real and
/// `|S₁₁ + S₂₂| <= 2`, both up to `tol`.
pub fn in_continuous_spectrum(spec: &SuperlatticeSpec, energy: Complex64, tol: f64) -> bool {
    let tr = build_s(spec, energy).trace();
    tr.im.abs() <= tol && tr.re.abs() <= 2.0 + tol
}

/// Entries of `S(E)` as polynomials in `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicTransfer {
    pub s11: ComplexPolynomial,
    pub s12: ComplexPolynomial,
    pub s21: ComplexPolynomial,
    pub s22: ComplexPolynomial,
}

impl SymbolicTransfer {
    pub fn eval(&self, energy: Complex64) -> Mat2 {
        Mat2::new(
            self.s11.eval(energy),
            self.s12.eval(energy),
            self.s21.eval(energy),
            self.s22.eval(energy),
        )
    }

    /// `S₁₁S₂₂ - S₁₂S₂₁` as a polynomial (identically one).
    pub fn determinant(&self) -> ComplexPolynomial {
        &(&self.s11 * &self.s22) - &(&self.s12 * &self.s21)
    }
}

/// Exact polynomial product of the `q` single-site factors, right to left.
pub fn symbolic_s(spec: &SuperlatticeSpec) -> SymbolicTransfer {
    let q = spec.period() as i64;
    let one = ComplexPolynomial::constant(ONE);
    let zero = ComplexPolynomial::zero();
    let mut acc = [[one.clone(), zero.clone()], [zero.clone(), one]];
    for n in 1..=q {
        let kn = spec.kappa(n);
        let diag = ComplexPolynomial::linear(spec.v(n) / kn, Complex64::new(-1.0 / kn, 0.0));
        let off = Complex64::new(-spec.kappa(n - 1) / kn, 0.0);
        // [diag off; 1 0] · [[a b]; [c d]] = [[diag a + off c, diag b + off d]; [a, b]]
        let [[a, b], [c, d]] = acc;
        let top0 = &(&diag * &a) + &c.scale(off);
        let top1 = &(&diag * &b) + &d.scale(off);
        acc = [[top0, top1], [a, b]];
    }
    let [[s11, s12], [s21, s22]] = acc;
    SymbolicTransfer { s11, s12, s21, s22 }
}
