//! Propagation of `i dψ_n/dt = Σ_m H_{n,m} ψ_m` on sites `1..=N` with open
//! boundaries (`ψ_0 = ψ_{N+1} = 0`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lattice::SuperlatticeSpec;
use crate::numerics::{integrate_ode, OdeOptions};
use crate::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_NUM_SAMPLES: usize = 200;

/// Fraction of the total intensity allowed in the last `q` sites before
/// `boundary_reach_flag` is raised.
pub const BOUNDARY_FRACTION: f64 = 1e-6;

/// Sign of the off-diagonal entries. `Negative` is `H_{n,n±1} = -κ`; the two
/// choices are related by `ψ_n -> (-1)^n ψ_n` and give identical intensities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HoppingSign {
    #[default]
    Negative,
    Positive,
}

/// Finite tridiagonal Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain {
    diagonal: Vec<Complex64>,
    /// `off_diagonal[i]` couples sites `i` and `i + 1` (0-based).
    off_diagonal: Vec<f64>,
}

impl Chain {
    pub fn new(diagonal: Vec<Complex64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(format!(
                "chain needs N >= 1 diagonal and N - 1 off-diagonal entries, got {} and {}",
                diagonal.len(),
                off_diagonal.len()
            )));
        }
        if diagonal.iter().any(|z| !z.is_finite()) || off_diagonal.iter().any(|k| !k.is_finite()) {
            return Err(Error::NonFinite("chain entries".into()));
        }
        Ok(Self { diagonal, off_diagonal })
    }

    /// The first `n_sites` sites of the lattice, starting at site 1.
    pub fn truncate(spec: &SuperlatticeSpec, n_sites: usize, sign: HoppingSign) -> Result<Self> {
        let s = match sign {
            HoppingSign::Negative => -1.0,
            HoppingSign::Positive => 1.0,
        };
        let diagonal = (1..=n_sites as i64).map(|n| spec.v(n)).collect();
        let off_diagonal = (1..n_sites as i64).map(|n| s * spec.kappa(n)).collect();
        Self::new(diagonal, off_diagonal)
    }

    pub fn len(&self) -> usize {
        self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagonal.is_empty()
    }

    pub fn max_abs_coupling(&self) -> f64 {
        self.off_diagonal.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// `out = -i H psi`.
    fn apply_minus_i(&self, psi: &[Complex64], out: &mut [Complex64]) {
        let n = self.diagonal.len();
        for j in 0..n {
            let mut h = self.diagonal[j] * psi[j];
            if j > 0 {
                h += self.off_diagonal[j - 1] * psi[j - 1];
            }
            if j + 1 < n {
                h += self.off_diagonal[j] * psi[j + 1];
            }
            out[j] = Complex64::new(h.im, -h.re);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationOptions {
    pub rel_tol: f64,
    pub num_samples: usize,
    pub hopping_sign: HoppingSign,
    /// Width of the right-edge strip watched by `boundary_reach_flag`.
    pub boundary_width: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            num_samples: DEFAULT_NUM_SAMPLES,
            hopping_sign: HoppingSign::Negative,
            boundary_width: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult {
    pub sample_times: Vec<f64>,
    /// `intensities[i][n - 1] = |ψ_n(sample_times[i])|²`.
    pub intensities: Vec<Vec<f64>>,
    pub total_norm: Vec<f64>,
    pub boundary_reach_flag: bool,
}

impl PropagationResult {
    pub fn n_sites(&self) -> usize {
        self.intensities.first().map_or(0, Vec::len)
    }

    /// Rows `(t, site, intensity)` with 1-based sites, in time-major order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, f64)> + '_ {
        self.sample_times
            .iter()
            .zip(&self.intensities)
            .flat_map(|(&t, row)| row.iter().enumerate().map(move |(n, &i)| (t, n + 1, i)))
    }
}

/// `ceil(2 max κ t_max) + 4q`: beyond the ballistic front at `t_max`.
pub fn default_site_count(spec: &SuperlatticeSpec, t_max: f64) -> usize {
    (2.0 * spec.max_abs_hopping() * t_max).ceil() as usize + 4 * spec.period()
}

/// `ψ_0 = δ_{n,site}` on `n_sites` sites (1-based `site`).
pub fn single_site_excitation(n_sites: usize, site: usize) -> Result<Vec<Complex64>> {
    if site == 0 || site > n_sites {
        return Err(Error::InvalidArgument(format!("excited site {site} outside 1..={n_sites}")));
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); n_sites];
    psi[site - 1] = Complex64::new(1.0, 0.0);
    Ok(psi)
}

/// `num_samples` uniform times on `[0, t_max]`.
pub fn sample_grid(t_max: f64, num_samples: usize) -> Vec<f64> {
    if num_samples == 1 {
        return vec![t_max];
    }
    let dt = t_max / (num_samples - 1) as f64;
    let mut t: Vec<f64> = (0..num_samples).map(|i| i as f64 * dt).collect();
    t[num_samples - 1] = t_max;
    t
}

pub fn propagate(
    spec: &SuperlatticeSpec,
    n_sites: usize,
    psi0: &[Complex64],
    t_max: f64,
    rel_tol: f64,
    num_samples: usize,
) -> Result<PropagationResult> {
    let options = PropagationOptions { rel_tol, num_samples, ..Default::default() };
    propagate_with(spec, n_sites, psi0, t_max, options)
}

/// The flag watches the last `q` sites.
pub fn propagate_with(
    spec: &SuperlatticeSpec,
    n_sites: usize,
    psi0: &[Complex64],
    t_max: f64,
    options: PropagationOptions,
) -> Result<PropagationResult> {
    let q = spec.period();
    if n_sites < 2 * q {
        return Err(Error::InvalidArgument(format!("n_sites = {n_sites} must be at least 2q = {}", 2 * q)));
    }
    let chain = Chain::truncate(spec, n_sites, options.hopping_sign)?;
    propagate_chain(&chain, psi0, t_max, PropagationOptions { boundary_width: q, ..options })
}

pub fn propagate_chain(
    chain: &Chain,
    psi0: &[Complex64],
    t_max: f64,
    options: PropagationOptions,
) -> Result<PropagationResult> {
    let n = chain.len();
    if psi0.len() != n {
        return Err(Error::InvalidArgument(format!("psi0 has {} entries for {n} sites", psi0.len())));
    }
    if !(psi0.iter().map(|z| z.norm_sqr()).sum::<f64>() > 0.0) {
        return Err(Error::InvalidArgument("psi0 must have positive norm".into()));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} must be positive")));
    }
    if options.num_samples < 2 {
        return Err(Error::InvalidArgument("num_samples must be at least 2".into()));
    }
    let times = sample_grid(t_max, options.num_samples);
    let traj = integrate_ode(
        |_, psi, dpsi| chain.apply_minus_i(psi, dpsi),
        psi0,
        t_max,
        &times,
        OdeOptions::with_rel_tol(options.rel_tol),
    )?;

    let watch = options.boundary_width.clamp(1, n);
    let mut boundary_reach_flag = false;
    let mut intensities = Vec::with_capacity(times.len());
    let mut total_norm = Vec::with_capacity(times.len());
    for state in &traj.states {
        let row: Vec<f64> = state.iter().map(|z| z.norm_sqr()).collect();
        let total: f64 = row.iter().sum();
        let tail: f64 = row[n - watch..].iter().sum();
        if tail > BOUNDARY_FRACTION * total {
            boundary_reach_flag = true;
        }
        intensities.push(row);
        total_norm.push(total);
    }
    Ok(PropagationResult { sample_times: traj.times, intensities, total_norm, boundary_reach_flag })
}

/// Least-squares slope of `ln(total_norm)` over samples with `t1 <= t <= t2`.
pub fn growth_rate_estimate(result: &PropagationResult, fit_window: (f64, f64)) -> Result<f64> {
    log_slope(&result.sample_times, &result.total_norm, fit_window)
}

/// Least-squares slope of `ln Σ_{n ≤ width} |ψ_n|²`, the intensity in the
/// first `width` sites. Isolates a surface mode from the bulk wavepacket that
/// leaves the edge ballistically.
pub fn edge_growth_rate_estimate(result: &PropagationResult, fit_window: (f64, f64), width: usize) -> Result<f64> {
    if width == 0 || width > result.n_sites() {
        return Err(Error::InvalidArgument(format!("edge width {width} outside 1..={}", result.n_sites())));
    }
    let edge: Vec<f64> = result.intensities.iter().map(|row| row[..width].iter().sum()).collect();
    log_slope(&result.sample_times, &edge, fit_window)
}

fn log_slope(times: &[f64], values: &[f64], (t1, t2): (f64, f64)) -> Result<f64> {
    let (first, last) = match (times.first(), times.last()) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InvalidArgument("empty propagation result".into())),
    };
    if !(t2 > t1) || t1 < first || t2 > last {
        return Err(Error::InvalidArgument(format!(
            "fit window [{t1}, {t2}] not inside sampled range [{first}, {last}]"
        )));
    }
    let points: Vec<(f64, f64)> =
        times.iter().zip(values).filter(|(&t, _)| t >= t1 && t <= t2).map(|(&t, &v)| (t, v)).collect();
    if points.len() < 2 {
        return Err(Error::InvalidArgument("fit window holds fewer than two samples".into()));
    }
    if points.iter().any(|&(_, v)| !(v > 0.0)) {
        return Err(Error::InvalidArgument("intensity must be positive over the fit window".into()));
    }
    let m = points.len() as f64;
    let t_mean = points.iter().map(|p| p.0).sum::<f64>() / m;
    let y_mean = points.iter().map(|p| p.1.ln()).sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(t, v) in &points {
        sxy += (t - t_mean) * (v.ln() - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_harper, HarperParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_uniform_conserves_norm_and_spreads() {
        let spec = SuperlatticeSpec::uniform(c(0., 0.), 1.0).unwrap();
        let n = default_site_count(&spec, 10.0);
        assert_eq!(n, 24);
        let psi0 = single_site_excitation(n, 1).unwrap();
        let r = propagate(&spec, n, &psi0, 10.0, 1e-9, 50).unwrap();
        for norm in &r.total_norm {
            assert!((norm - 1.0).abs() < 1e-7);
        }
        let last = r.intensities.last().unwrap();
        assert!(last[0] < 0.1);
        assert!(last[5..].iter().sum::<f64>() > 0.5);
        assert!(growth_rate_estimate(&r, (2.0, 10.0)).unwrap().abs() < 1e-6);
    }

    #[test]
    fn decoupled_gain_site_rate() {
        let lambda = 0.07;
        let chain = Chain::new(vec![c(0., lambda)], vec![]).unwrap();
        let r = propagate_chain(&chain, &[c(1., 0.)], 20.0, PropagationOptions::default()).unwrap();
        let rate = growth_rate_estimate(&r, (0.0, 20.0)).unwrap();
        assert!((rate - 2.0 * lambda).abs() < 1e-8);
        assert!(((r.total_norm.last().unwrap()) - (2.0 * lambda * 20.0f64).exp()).abs() < 1e-6);
    }

    #[test]
    fn hopping_sign_is_a_gauge() {
        let spec = build_harper(HarperParams::new(0.3, 0.134, 1, 6, 1)).unwrap();
        let psi0 = single_site_excitation(40, 3).unwrap();
        let neg = PropagationOptions { num_samples: 21, ..Default::default() };
        let pos = PropagationOptions { hopping_sign: HoppingSign::Positive, ..neg };
        let a = propagate_with(&spec, 40, &psi0, 8.0, neg).unwrap();
        let b = propagate_with(&spec, 40, &psi0, 8.0, pos).unwrap();
        for (ra, rb) in a.intensities.iter().zip(&b.intensities) {
            for (x, y) in ra.iter().zip(rb) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn boundary_flag_on_short_chain() {
        let spec = SuperlatticeSpec::uniform(c(0., 0.), 1.0).unwrap();
        let psi0 = single_site_excitation(4, 1).unwrap();
        assert!(propagate(&spec, 4, &psi0, 5.0, 1e-8, 10).unwrap().boundary_reach_flag);
        let n = default_site_count(&spec, 5.0) + 20;
        let psi0 = single_site_excitation(n, 1).unwrap();
        assert!(!propagate(&spec, n, &psi0, 5.0, 1e-8, 10).unwrap().boundary_reach_flag);
    }

    #[test]
    fn rejects_bad_input() {
        let spec = build_harper(HarperParams::new(0.3, 0.0, 1, 6, 0)).unwrap();
        let psi0 = single_site_excitation(11, 1).unwrap();
        assert!(propagate(&spec, 11, &psi0, 1.0, 1e-9, 10).is_err());
        let zero = vec![c(0., 0.); 12];
        assert!(propagate(&spec, 12, &zero, 1.0, 1e-9, 10).is_err());
        let psi0 = single_site_excitation(12, 1).unwrap();
        assert!(propagate(&spec, 12, &psi0, 0.0, 1e-9, 10).is_err());
        assert!(propagate(&spec, 12, &psi0, 1.0, 1e-9, 1).is_err());
        assert!(single_site_excitation(12, 0).is_err());
        let r = propagate(&spec, 12, &psi0, 1.0, 1e-9, 10).unwrap();
        assert!(growth_rate_estimate(&r, (0.5, 2.0)).is_err());
        assert!(growth_rate_estimate(&r, (0.5, 0.5)).is_err());
        assert!(edge_growth_rate_estimate(&r, (0.2, 1.0), 0).is_err());
        assert!(edge_growth_rate_estimate(&r, (0.2, 1.0), 13).is_err());
    }

    #[test]
    fn edge_rate_of_amplified_surface_mode() {
        let spec = build_harper(HarperParams::new(0.3, 0.134, 1, 6, 1)).unwrap();
        let psi0 = single_site_excitation(200, 1).unwrap();
        let r = propagate(&spec, 200, &psi0, 30.0, 1e-9, 121).unwrap();
        let rate = edge_growth_rate_estimate(&r, (15.0, 30.0), 12).unwrap();
        assert!((rate - 2.0 * 0.0712).abs() < 0.05 * 2.0 * 0.0712, "{rate}");
        assert!(!r.boundary_reach_flag);
    }

    #[test]
    fn rows_are_time_major() {
        let spec = SuperlatticeSpec::uniform(c(0., 0.), 1.0).unwrap();
        let psi0 = single_site_excitation(3, 2).unwrap();
        let r = propagate(&spec, 3, &psi0, 1.0, 1e-9, 3).unwrap();
        let rows: Vec<_> = r.rows().collect();
        assert_eq!(rows.len(), 9);
        assert_eq!((rows[0].0, rows[0].1, rows[0].2), (0.0, 1, 0.0));
        assert_eq!((rows[1].1, rows[1].2), (2, 1.0));
        assert_eq!(rows[8].0, 1.0);
        assert_eq!(r.n_sites(), 3);
    }
}
