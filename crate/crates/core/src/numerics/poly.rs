use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const MAX_ABERTH_ITERATIONS: usize = 1000;

/// Polynomial with complex coefficients in ascending degree order.
///
/// Trailing exact zeros are trimmed on construction; the zero polynomial is
/// stored as a single zero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
}

impl ComplexPolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Self { coeffs }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    /// `a + b E`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Self::new(vec![a, b])
    }

    /// `Π (E - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(Complex64::new(1.0, 0.0)), |acc, &r| {
            &acc * &Self::linear(-r, Complex64::new(1.0, 0.0))
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Complex64::new(0.0, 0.0)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    /// Drop trailing coefficients with modulus below `rel_tol · max|coefficient|`.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs_coefficient();
        let mut coeffs = self.coeffs.clone();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        if coeffs.len() == 1 && coeffs[0].norm() <= cut {
            coeffs[0] = Complex64::new(0.0, 0.0);
        }
        Self::new(coeffs)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    /// Value and first derivative in one Horner pass.
    fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// All `degree` roots, repeated according to multiplicity.
    ///
    /// Aberth-Ehrlich simultaneous iteration started from a deterministic circle
    /// of guesses; every returned root satisfies
    /// `|p(r)| <= 1e-9 · max|a_k| · max(1, |r|)^degree`.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        if let Some(c) = self.coeffs.iter().find(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("polynomial coefficient {c}")));
        }
        let n = self.degree();
        if n == 0 {
            return Err(Error::ConstantPolynomial);
        }
        // Monic copy keeps the iteration scale-free.
        let monic = self.scale(self.leading().inv());
        if n == 1 {
            return Ok(vec![-monic.coeffs[0]]);
        }
        let dmonic = monic.derivative();

        let mut z = initial_guesses(&monic);
        let mut done = vec![false; n];
        let mut converged = false;
        for _ in 0..MAX_ABERTH_ITERATIONS {
            let mut all_done = true;
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let p = monic.eval(z[k]);
                if p == Complex64::new(0.0, 0.0) {
                    done[k] = true;
                    continue;
                }
                let ratio = p / dmonic.eval(z[k]);
                let repulsion: Complex64 = (0..n)
                    .filter(|&j| j != k)
                    .map(|j| {
                        let d = z[k] - z[j];
                        if d == Complex64::new(0.0, 0.0) {
                            Complex64::new(0.0, 0.0)
                        } else {
                            d.inv()
                        }
                    })
                    .sum();
                let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
                let step = if denom.norm() > 0.0 && denom.is_finite() { ratio / denom } else { ratio };
                if !step.is_finite() {
                    // p'(z) vanished; nudge off the critical point.
                    let bump = Complex64::new(1e-8, 1e-8) * (1.0 + z[k].norm());
                    z[k] += bump;
                    all_done = false;
                    continue;
                }
                z[k] -= step;
                if step.norm() <= 4.0 * f64::EPSILON * z[k].norm().max(f64::MIN_POSITIVE) {
                    done[k] = true;
                } else {
                    all_done = false;
                }
            }
            if all_done {
                converged = true;
                break;
            }
        }

        // A few Newton polishing steps are harmless for simple roots and help
        // roots that stalled on the iteration cap.
        for zk in z.iter_mut() {
            for _ in 0..3 {
                let (p, dp) = monic.eval_with_derivative(*zk);
                if dp.norm() == 0.0 || p.norm() == 0.0 {
                    break;
                }
                let next = *zk - p / dp;
                if !next.is_finite() || monic.eval(next).norm() >= p.norm() {
                    break;
                }
                *zk = next;
            }
        }

        let scale = self.max_abs_coefficient();
        let ok = z.iter().all(|&r| {
            self.eval(r).norm() <= 1e-9 * scale * r.norm().max(1.0).powi(n as i32)
        });
        if !ok {
            let iterations = if converged { 0 } else { MAX_ABERTH_ITERATIONS };
            return Err(Error::NoConvergence { what: "Aberth root iteration", iterations });
        }
        Ok(z)
    }
}

// Guesses on a circle around the root centroid, with a radius from the
// geometric mean of the root moduli and an irrational angular offset.
fn initial_guesses(monic: &ComplexPolynomial) -> Vec<Complex64> {
    let n = monic.degree();
    let centroid = -monic.coeffs[n - 1] / n as f64;
    // Shift p(x + centroid) to estimate the spread about the centroid.
    let shifted_const = monic.eval(centroid);
    let mut radius = shifted_const.norm().powf(1.0 / n as f64);
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0 + monic.coeffs[..n].iter().fold(0.0f64, |m, c| m.max(c.norm()));
    }
    (0..n)
        .map(|k| {
            let angle = 2.0 * PI * k as f64 / n as f64 + 0.4;
            centroid + Complex64::from_polar(radius, angle)
        })
        .collect()
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn add(self, rhs: Self) -> ComplexPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        ComplexPolynomial::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + rhs.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn neg(self) -> ComplexPolynomial {
        ComplexPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;

    fn mul(self, rhs: Self) -> ComplexPolynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

/// A group of roots closer than the clustering radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
}

/// Single-linkage clustering of roots: roots within `radius` of any member of
/// a cluster join it. Cluster centres are member means.
pub fn cluster_roots(roots: &[Complex64], radius: f64) -> Vec<RootCluster> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: Vec<(usize, Complex64, usize)> = Vec::new();
    for (i, &z) in roots.iter().enumerate() {
        let root = find(&mut label, i);
        match clusters.iter_mut().find(|c| c.0 == root) {
            Some(c) => {
                c.1 += z;
                c.2 += 1;
            }
            None => clusters.push((root, z, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(_, sum, m)| RootCluster { center: sum / m as f64, multiplicity: m })
        .collect()
}
