//! Adaptive Dormand-Prince 5(4) integrator for complex-valued linear and
//! nonlinear systems `dy/dt = f(t, y)`.
//!
//! The step is accepted when the embedded error estimate satisfies
//! `‖err‖₂ <= (abs_tol + rel_tol · max(‖y_n‖, ‖y_{n+1}‖)) / 4`; the fifth-order
//! solution is propagated. Requested sample times are hit exactly by
//! shortening the step that would cross them.

use num_complex::Complex64;

use crate::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const SAFETY: f64 = 0.9;

// Steps are accepted against a quarter of the requested tolerance so that the
// accumulated drift over O(100) time units stays within ~10 rel_tol.
const TOL_FRACTION: f64 = 0.25;

// Fifth-order weights minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; chosen automatically when `None`.
    pub initial_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-9, abs_tol: 1e-14, initial_step: None, max_steps: 10_000_000 }
    }
}

impl OdeOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self { rel_tol, ..Self::default() }
    }
}

/// States recorded at the requested sample times.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<Complex64>>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy_into(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, k) in terms {
            acc += k[i] * a;
        }
        *o = y[i] + acc * h;
    }
}

/// Integrate `dy/dt = rhs(t, y)` from `t = 0` and return the state at each of
/// `sample_times` (non-decreasing, within `[0, t_end]`).
///
/// `rhs(t, y, dy)` writes the derivative into `dy`.
pub fn integrate_ode<F>(
    mut rhs: F,
    y0: &[Complex64],
    t_end: f64,
    sample_times: &[f64],
    options: OdeOptions,
) -> Result<Trajectory>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let OdeOptions { rel_tol, abs_tol, initial_step, max_steps } = options;
    if !(1e-13..=1e-3).contains(&rel_tol) {
        return Err(Error::InvalidArgument(format!("rel_tol = {rel_tol} outside [1e-13, 1e-3]")));
    }
    if !(abs_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("abs_tol = {abs_tol} must be non-negative")));
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(Error::InvalidArgument(format!("t_end = {t_end} must be finite and >= 0")));
    }
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&t| !(0.0..=t_end).contains(&t))
    {
        return Err(Error::InvalidArgument("sample times must be sorted within [0, t_end]".into()));
    }
    if y0.iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite("initial state".into()));
    }

    let n = y0.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut y_new = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![zero; n]);

    let mut out = Trajectory {
        times: Vec::with_capacity(sample_times.len()),
        states: Vec::with_capacity(sample_times.len()),
        accepted_steps: 0,
        rejected_steps: 0,
    };
    let mut next_sample = 0;
    let mut t = 0.0;
    let record = |t: f64, y: &[Complex64], out: &mut Trajectory, next: &mut usize| {
        while *next < sample_times.len() && sample_times[*next] <= t {
            out.times.push(sample_times[*next]);
            out.states.push(y.to_vec());
            *next += 1;
        }
    };
    record(t, &y, &mut out, &mut next_sample);

    rhs(t, &y, &mut k[0]);
    if k[0].iter().any(|z| !z.is_finite()) {
        return Err(Error::NonFinite(format!("right-hand side at t = {t}")));
    }

    let mut h = initial_step.unwrap_or_else(|| {
        let d0 = norm(&y).max(1e-10);
        let d1 = norm(&k[0]).max(1e-10);
        (0.01 * d0 / d1).min(t_end.max(1e-6))
    });
    let mut steps = 0usize;

    while t < t_end {
        steps += 1;
        if steps > max_steps {
            return Err(Error::NoConvergence { what: "ODE integration", iterations: max_steps });
        }
        let target = sample_times.get(next_sample).copied().unwrap_or(t_end).min(t_end);
        let mut hit = false;
        if t + h >= target {
            h = target - t;
            hit = true;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            if hit && h >= 0.0 {
                // Sample coincides with the current time up to rounding.
                t = target;
                record(t, &y, &mut out, &mut next_sample);
                continue;
            }
            return Err(Error::StepUnderflow { t });
        }

        let (k1, rest) = k.split_first_mut().unwrap();
        let [k2, k3, k4, k5, k6, k7] = rest else { unreachable!() };

        axpy_into(&mut tmp, &y, h, &[(A21, k1)]);
        rhs(t + C2 * h, &tmp, k2);
        axpy_into(&mut tmp, &y, h, &[(A31, k1), (A32, k2)]);
        rhs(t + C3 * h, &tmp, k3);
        axpy_into(&mut tmp, &y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        rhs(t + C4 * h, &tmp, k4);
        axpy_into(&mut tmp, &y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        rhs(t + C5 * h, &tmp, k5);
        axpy_into(&mut tmp, &y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        rhs(t + h, &tmp, k6);
        axpy_into(&mut y_new, &y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
        rhs(t + h, &y_new, k7);

        if y_new.iter().chain(k7.iter()).any(|z| !z.is_finite()) {
            return Err(Error::NonFinite(format!("right-hand side near t = {t}")));
        }

        let err = (0..n)
            .map(|i| {
                let e = k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7;
                (e * h).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        let tol = TOL_FRACTION * (abs_tol + rel_tol * norm(&y).max(norm(&y_new)));
        let ratio = if tol > 0.0 { err / tol } else { f64::INFINITY };

        if ratio <= 1.0 {
            t = if hit { target } else { t + h };
            std::mem::swap(&mut y, &mut y_new);
            // FSAL: the last stage is the first stage of the next step.
            k.swap(0, 6);
            out.accepted_steps += 1;
            record(t, &y, &mut out, &mut next_sample);
            let factor = if ratio == 0.0 { 5.0 } else { (SAFETY * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if !hit {
                h *= factor;
            } else {
                // Keep the step the controller would have used before clipping.
                h = h.max(h * factor);
            }
        } else {
            out.rejected_steps += 1;
            h *= (SAFETY * ratio.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    record(t, &y, &mut out, &mut next_sample);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn pure_phase_rotation() {
        let traj = integrate_ode(
            |_, y, dy| dy[0] = c(0.0, -0.3) * y[0],
            &[c(1., 0.)],
            10.0,
            &[10.0],
            OdeOptions::default(),
        )
        .unwrap();
        let y = traj.states[0][0];
        assert!((y - Complex64::from_polar(1.0, -3.0)).norm() < 1e-8);
        assert!((y.norm() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_gain() {
        let traj = integrate_ode(|_, y, dy| dy[0] = y[0] * 0.134, &[c(1., 0.)], 5.0, &[5.0], OdeOptions::default())
            .unwrap();
        let expect = 0.67f64.exp();
        assert!((traj.states[0][0].re - expect).abs() / expect < 1e-7);
    }

    #[test]
    fn rabi_oscillation() {
        let samples: Vec<f64> = (0..=40).map(|j| j as f64 * 0.25).collect();
        let traj = integrate_ode(
            |_, y, dy| {
                dy[0] = c(0., 1.) * y[1];
                dy[1] = c(0., 1.) * y[0];
            },
            &[c(1., 0.), c(0., 0.)],
            10.0,
            &samples,
            OdeOptions::default(),
        )
        .unwrap();
        assert_eq!(traj.times, samples);
        for (t, y) in traj.times.iter().zip(&traj.states) {
            assert!((y[0].norm_sqr() - t.cos().powi(2)).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn norm_conserved_long_time() {
        let rel_tol = 1e-9;
        let traj = integrate_ode(
            |_, y, dy| {
                dy[0] = c(0., 1.) * y[1] + c(0., -0.4) * y[0];
                dy[1] = c(0., 1.) * y[0] + c(0., 1.) * y[2];
                dy[2] = c(0., 1.) * y[1] + c(0., 0.7) * y[2];
            },
            &[c(1., 0.), c(0., 0.), c(0., 0.)],
            100.0,
            &[25.0, 50.0, 100.0],
            OdeOptions::with_rel_tol(rel_tol),
        )
        .unwrap();
        for y in &traj.states {
            let drift = (norm(y) - 1.0).abs();
            assert!(drift <= 10.0 * rel_tol, "drift {drift:e}, steps {} rej {}", traj.accepted_steps, traj.rejected_steps);
        }
    }

    #[test]
    fn nan_rhs_is_error() {
        let r = integrate_ode(|_, _, dy| dy[0] = c(f64::NAN, 0.), &[c(1., 0.)], 1.0, &[1.0], OdeOptions::default());
        assert!(matches!(r, Err(Error::NonFinite(_))));
    }

    #[test]
    fn bad_tolerance_rejected() {
        let r = integrate_ode(|_, y, dy| dy[0] = y[0], &[c(1., 0.)], 1.0, &[1.0], OdeOptions::with_rel_tol(1e-2));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn blow_up_underflows_or_fails() {
        // y' = y^2 blows up at t = 1.
        let r = integrate_ode(|_, y, dy| dy[0] = y[0] * y[0], &[c(1., 0.)], 2.0, &[2.0], OdeOptions::default());
        assert!(r.is_err());
    }
}
