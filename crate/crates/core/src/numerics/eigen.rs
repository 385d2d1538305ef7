//! Eigenvalues of dense, non-Hermitian complex matrices.
//!
//! Balancing, Householder reduction to upper Hessenberg form, then implicit
//! deflation with explicitly shifted single-shift QR sweeps (Wilkinson shifts,
//! Givens rotations). Only eigenvalues are produced, so each sweep touches the
//! active diagonal block alone.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of `m`, in no particular order.
pub fn eig_complex(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix entry".into()));
    }
    let n = m.dim();
    match n {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![m[(0, 0)]]),
        _ => {}
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hessenberg_qr(&mut h)
}

// Parlett-Reinsch scaling by powers of two; similarity transform, exact in
// floating point.
fn balance(a: &mut ComplexMatrix) {
    let n = a.dim();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.dim();
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + phase·‖x‖ e1 avoids cancellation.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] += phase * norm;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // A <- (I - 2vv^H) A
        for j in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * a[(k + 1 + t, j)]).sum();
            for (t, vi) in v.iter().enumerate() {
                a[(k + 1 + t, j)] -= 2.0 * vi * dot;
            }
        }
        // A <- A (I - 2vv^H)
        for i in 0..n {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| a[(i, k + 1 + t)] * vi).sum();
            for (t, vi) in v.iter().enumerate() {
                a[(i, k + 1 + t)] -= 2.0 * dot * vi.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G·[x, y]ᵀ = [r, 0]ᵀ`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let r = x.norm().hypot(y.norm());
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if ax == 0.0 {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    (ax / r, (x / ax) * y.conj() / r)
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let mu1 = mean + disc;
    let mu2 = mean - disc;
    if (mu1 - d).norm() <= (mu2 - d).norm() {
        mu1
    } else {
        mu2
    }
}

fn hessenberg_qr(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    let norm = h.norm_inf().max(f64::MIN_POSITIVE);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut sweeps = 0usize;
    let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(n);

    loop {
        if hi == 0 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Locate the top of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= f64::EPSILON * diag {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs.push(h[(hi, hi)]);
            hi -= 1;
            sweeps = 0;
            continue;
        }
        sweeps += 1;
        if sweeps > MAX_SWEEPS_PER_EIGENVALUE {
            return Err(Error::NoConvergence { what: "shifted QR", iterations: sweeps });
        }

        let mu = if sweeps.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75, 0.5) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        rotations.clear();
        // H - μI = QR: zero the subdiagonal from the left.
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            rotations.push((c, s));
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + c * y;
            }
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
        }
        // RQ: apply the adjoint rotations from the right.
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 1).min(hi) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = c * x + s.conj() * y;
                h[(i, k + 1)] = -s * x + c * y;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    Ok(eigs)
}
