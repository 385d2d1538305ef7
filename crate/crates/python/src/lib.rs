//! Python bindings: the `ptsl` extension module.
//!
//! Errors from invalid input raise `ValueError`; numerical failures raise
//! `RuntimeError`. Long computations release the interpreter lock.

use ptsl::lattice::{build_harper, check_pt_symmetry};
use ptsl::{bloch, dynamics, edge, transfer, Complex64, HarperParams, ParametricLattice, SuperlatticeSpec};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(err: ptsl::Error) -> PyErr {
    match err {
        ptsl::Error::InvalidLattice(_) | ptsl::Error::InvalidArgument(_) => PyValueError::new_err(err.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

trait PyResultExt<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> PyResultExt<T> for ptsl::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

/// Periodic tight-binding lattice: on-site energies `V_1..V_q` and hoppings
/// `κ_1..κ_q` (`κ_n` couples sites `n` and `n + 1`).
#[pyclass(name = "Lattice", module = "ptsl", frozen, from_py_object)]
#[derive(Clone)]
pub struct Lattice {
    inner: SuperlatticeSpec,
}

#[pymethods]
impl Lattice {
    #[new]
    fn new(onsite: Vec<Complex64>, hopping: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: SuperlatticeSpec::new(onsite, hopping).py_err()? })
    }

    /// `V_n = δ cos(2π p (n - n0)/q) + iλ sin(2π p (n - n0)/q)`, `κ = 1`.
    #[staticmethod]
    #[pyo3(signature = (delta, lam, p, q, n0 = 0))]
    fn harper(delta: f64, lam: f64, p: u32, q: u32, n0: i64) -> PyResult<Self> {
        Ok(Self { inner: build_harper(HarperParams::new(delta, lam, p, q, n0)).py_err()? })
    }

    #[staticmethod]
    fn uniform(v: Complex64, kappa: f64) -> PyResult<Self> {
        Ok(Self { inner: SuperlatticeSpec::uniform(v, kappa).py_err()? })
    }

    /// Parse `{"q": int, "onsite": [[re, im], ...], "hopping": [...]}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(|inner| Self { inner }).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("lattice serializes")
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.period()
    }

    #[getter]
    fn onsite(&self) -> Vec<Complex64> {
        self.inner.onsite().to_vec()
    }

    #[getter]
    fn hopping(&self) -> Vec<f64> {
        self.inner.hopping().to_vec()
    }

    fn is_hermitian(&self) -> bool {
        self.inner.is_hermitian()
    }

    /// Smallest PT centre in `{0, 1/2, ..., q - 1/2}`, or `None`.
    fn pt_center(&self) -> Option<f64> {
        check_pt_symmetry(&self.inner).center
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Lattice(q={}, hermitian={})", self.inner.period(), self.inner.is_hermitian())
    }
}

#[pyclass(name = "PhaseDiagnosis", module = "ptsl", frozen, get_all)]
pub struct PhaseDiagnosis {
    unbroken: bool,
    max_abs_imag: f64,
    witness_k: f64,
}

#[pyclass(name = "Threshold", module = "ptsl", frozen, get_all)]
pub struct Threshold {
    lambda_c: f64,
    bracket: (f64, f64),
    never_broken: bool,
    multiple_transitions: bool,
}

#[pyclass(name = "EdgeState", module = "ptsl", frozen, get_all)]
pub struct EdgeState {
    energy: Complex64,
    s11_abs: f64,
    /// `"edge"`, `"extended"` or `"not_in_spectrum"`.
    classification: String,
    localization_length: Option<f64>,
}

#[pymethods]
impl EdgeState {
    fn __repr__(&self) -> String {
        format!("EdgeState(energy={}, s11_abs={:.4}, classification={:?})", self.energy, self.s11_abs, self.classification)
    }
}

#[pyclass(name = "Propagation", module = "ptsl", frozen)]
pub struct Propagation {
    inner: dynamics::PropagationResult,
}

#[pymethods]
impl Propagation {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.sample_times.clone()
    }

    /// `intensities[i][n - 1] = |ψ_n(times[i])|²`.
    #[getter]
    fn intensities(&self) -> Vec<Vec<f64>> {
        self.inner.intensities.clone()
    }

    #[getter]
    fn total_norm(&self) -> Vec<f64> {
        self.inner.total_norm.clone()
    }

    #[getter]
    fn boundary_reach_flag(&self) -> bool {
        self.inner.boundary_reach_flag
    }

    /// Least-squares slope of `ln(total_norm)` over `t1 <= t <= t2`.
    fn growth_rate(&self, t1: f64, t2: f64) -> PyResult<f64> {
        dynamics::growth_rate_estimate(&self.inner, (t1, t2)).py_err()
    }

    /// Same fit for the intensity in the first `width` sites.
    fn edge_growth_rate(&self, t1: f64, t2: f64, width: usize) -> PyResult<f64> {
        dynamics::edge_growth_rate_estimate(&self.inner, (t1, t2), width).py_err()
    }
}

type Mat = [[Complex64; 2]; 2];

#[pyfunction]
fn bloch_energies(lattice: &Lattice, k: f64) -> PyResult<Vec<Complex64>> {
    bloch::bloch_energies(&lattice.inner, k).py_err()
}

/// `(k_values, energies)` with `energies[j]` the `q` band energies at `k_values[j]`.
#[pyfunction]
#[pyo3(signature = (lattice, num_k = 512))]
fn band_structure(py: Python<'_>, lattice: &Lattice, num_k: usize) -> PyResult<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let spec = lattice.inner.clone();
    let bands = py.detach(move || bloch::band_structure(&spec, num_k)).py_err()?;
    Ok((bands.k_values, bands.energies))
}

/// Reality of the infinite-lattice spectrum from `R(0)` and `R(-π/q)`.
#[pyfunction]
#[pyo3(signature = (lattice, tol = bloch::REALITY_TOL))]
fn phase_diagnosis(lattice: &Lattice, tol: f64) -> PyResult<PhaseDiagnosis> {
    let d = bloch::theorem1_is_unbroken(&lattice.inner, tol).py_err()?;
    Ok(PhaseDiagnosis { unbroken: d.unbroken, max_abs_imag: d.max_abs_imag, witness_k: d.witness_k })
}

/// PT-breaking threshold `λ_c` of the Harper family.
#[pyfunction]
#[pyo3(signature = (delta, p, q, n0 = 0, lambda_max = 1.0, tol = 1e-4))]
fn breaking_threshold(
    py: Python<'_>,
    delta: f64,
    p: u32,
    q: u32,
    n0: i64,
    lambda_max: f64,
    tol: f64,
) -> PyResult<Threshold> {
    let family = ParametricLattice::harper(delta, p, q, n0).py_err()?;
    let r = py.detach(move || bloch::breaking_threshold(&family, lambda_max, tol)).py_err()?;
    Ok(Threshold {
        lambda_c: r.lambda_c,
        bracket: r.bracket,
        never_broken: r.never_broken,
        multiple_transitions: r.multiple_transitions,
    })
}

/// `σ = max Im E` over a `num_k` grid, zero when it does not exceed `tol`.
#[pyfunction]
#[pyo3(signature = (lattice, num_k = 256, tol = bloch::REALITY_TOL))]
fn max_growth_rate(py: Python<'_>, lattice: &Lattice, num_k: usize, tol: f64) -> PyResult<f64> {
    let spec = lattice.inner.clone();
    py.detach(move || bloch::max_growth_rate(&spec, num_k, tol)).py_err()
}

/// One-period transfer matrix `S(E)`.
#[pyfunction]
fn transfer_matrix(lattice: &Lattice, energy: Complex64) -> Mat {
    transfer::build_s(&lattice.inner, energy).matrix.0
}

/// `S(E)^m` from the closed form.
#[pyfunction]
fn transfer_power(lattice: &Lattice, energy: Complex64, m: u32) -> PyResult<Mat> {
    let s = transfer::build_s(&lattice.inner, energy);
    Ok(transfer::s_power(&s.matrix, m).py_err()?.0)
}

/// Zeros of `S₂₁` classified for the lattice truncated at site 1.
#[pyfunction]
fn edge_spectrum(lattice: &Lattice) -> PyResult<Vec<EdgeState>> {
    Ok(edge::edge_spectrum(&lattice.inner)
        .py_err()?
        .into_iter()
        .map(|r| EdgeState {
            energy: r.energy,
            s11_abs: r.s11_abs,
            classification: r.classification.to_string(),
            localization_length: r.localization_length,
        })
        .collect())
}

/// Whether the truncated lattice has an entirely real spectrum.
#[pyfunction]
#[pyo3(signature = (lattice, tol = bloch::REALITY_TOL))]
fn truncated_spectrum_is_real(lattice: &Lattice, tol: f64) -> PyResult<bool> {
    Ok(edge::theorem2_is_real(&lattice.inner, tol).py_err()?.real)
}

/// Propagate `ψ_n(0) = δ_{n,excite}` on the first `n_sites` sites.
#[pyfunction]
#[pyo3(signature = (lattice, t_max, n_sites = None, excite = 1, rel_tol = dynamics::DEFAULT_REL_TOL,
                    num_samples = dynamics::DEFAULT_NUM_SAMPLES))]
fn propagate(
    py: Python<'_>,
    lattice: &Lattice,
    t_max: f64,
    n_sites: Option<usize>,
    excite: usize,
    rel_tol: f64,
    num_samples: usize,
) -> PyResult<Propagation> {
    let spec = lattice.inner.clone();
    let n = n_sites.unwrap_or_else(|| dynamics::default_site_count(&spec, t_max.max(0.0)));
    let psi0 = dynamics::single_site_excitation(n, excite).py_err()?;
    let inner = py.detach(move || dynamics::propagate(&spec, n, &psi0, t_max, rel_tol, num_samples)).py_err()?;
    Ok(Propagation { inner })
}

/// Spectral analysis of PT-symmetric tight-binding superlattices.
#[pymodule(name = "ptsl")]
pub mod ptsl_python {
    #[pymodule_export]
    use super::{
        band_structure, bloch_energies, breaking_threshold, edge_spectrum, max_growth_rate, phase_diagnosis,
        propagate, transfer_matrix, transfer_power, truncated_spectrum_is_real, EdgeState, Lattice, PhaseDiagnosis,
        Propagation, Threshold,
    };
}
