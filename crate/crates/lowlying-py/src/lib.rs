//! Python bindings for the lowlying toolkit.
//!
//! One extension module, `lowlying_py`, exposing the test-function and
//! weight types plus the headline operations: Kloosterman sums and their
//! Gauss-sum expansion, the H+ Bessel transform, trace-formula mass and
//! one-level density reports, Mellin transforms, dyadic splitting sweeps,
//! the large-sieve and fourth-moment checks, and zero counting for
//! Dirichlet L-functions. Report structs cross the boundary as plain
//! dicts keyed like the JSON the CLI emits; long computations release
//! the GIL.

use num_complex::Complex64;
use pyo3::exceptions::{PyConnectionError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lowlying::dirpoly::{self, CoefKind, SplitSweepSummary};
use lowlying::error::Error;
use lowlying::kuznetsov;
use lowlying::ntcore::{self, KloostermanQuery};
use lowlying::specfun;
use lowlying::transforms::{self, hplus, mellin};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Budget(_) | Error::Usage(_) | Error::Schema(_) => {
            PyValueError::new_err(e.to_string())
        }
        Error::Network(_) => PyConnectionError::new_err(e.to_string()),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn find_character(modulus: u64, index: u64) -> PyResult<ntcore::DirichletCharacter> {
    let group = ntcore::character_group(modulus).map_err(py_err)?;
    group.into_iter().find(|chi| chi.index == index).ok_or_else(|| {
        PyValueError::new_err(format!(
            "no character of index {index} mod {modulus}; indices come from characters({modulus})"
        ))
    })
}

fn weight_of<'a>(w: Option<&'a PyRef<'_, WeightFunction>>) -> &'a transforms::WeightFunction {
    match w {
        Some(w) => &w.inner,
        None => transforms::gaussian_weight(),
    }
}

fn parse_coef_kind(kind: &str) -> PyResult<CoefKind> {
    match kind {
        "one" => Ok(CoefKind::One),
        "moebius" => Ok(CoefKind::Moebius),
        "log" => Ok(CoefKind::Log),
        other => Err(PyValueError::new_err(format!(
            "unknown coefficient kind {other:?}; expected \"one\", \"moebius\", or \"log\""
        ))),
    }
}

fn sweep_dict<'py>(py: Python<'py>, s: &SplitSweepSummary) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("tuples_checked", s.tuples_checked)?;
    d.set_item("case_a", s.case_a)?;
    d.set_item("case_b", s.case_b)?;
    d.set_item("failures", s.failures)?;
    Ok(d)
}

/// Even Schwartz-class test function whose Fourier transform is supported
/// in [-sigma, sigma]. Built by the `triangle` and `bump` constructors.
#[pyclass(frozen)]
#[derive(Clone)]
struct TestFunction {
    inner: transforms::TestFunction,
}

#[pymethods]
impl TestFunction {
    /// Fejer-kernel pair: phi_hat(u) = (1 - |u|/sigma)_+ up to scaling.
    #[staticmethod]
    fn triangle(sigma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: transforms::make_test_triangle(sigma).map_err(py_err)?,
        })
    }

    /// Smooth pair: phi_hat is a normalized C-infinity bump on (-sigma, sigma).
    #[staticmethod]
    fn bump(sigma: f64) -> PyResult<Self> {
        Ok(Self {
            inner: transforms::make_test_bump(sigma).map_err(py_err)?,
        })
    }

    /// Support radius of phi_hat.
    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    fn phi(&self, x: f64) -> f64 {
        self.inner.phi(x)
    }

    fn phi_hat(&self, u: f64) -> f64 {
        self.inner.phi_hat(u)
    }

    fn phi_complex(&self, z: Complex64) -> Complex64 {
        self.inner.phi_complex(z)
    }

    /// Orthogonal-symmetry prediction for the one-level density,
    /// phi_hat(0) + phi(0)/2.
    fn katz_sarnak(&self) -> f64 {
        transforms::katz_sarnak_functional(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("TestFunction(sigma={})", self.inner.sigma)
    }
}

/// Even spectral weight h(t), holomorphic on a strip and fast-decaying.
/// Only the Gaussian e^{-t^2} is constructible from Python; operations
/// that take an optional weight default to it.
#[pyclass(frozen)]
#[derive(Clone)]
struct WeightFunction {
    inner: transforms::WeightFunction,
}

#[pymethods]
impl WeightFunction {
    #[staticmethod]
    fn gaussian() -> Self {
        Self {
            inner: transforms::make_weight_gaussian(),
        }
    }

    fn eval(&self, t: f64) -> f64 {
        self.inner.eval_real(t)
    }

    fn eval_complex(&self, s: Complex64) -> Complex64 {
        self.inner.eval(s)
    }

    /// H+ transform by direct quadrature.
    fn hplus(&self, x: f64) -> PyResult<f64> {
        self.inner.hplus(x).map_err(py_err)
    }

    /// (1/pi^2) integral of h(t) t tanh(pi t) dt, the spectral total mass.
    fn spectral_mass(&self) -> f64 {
        kuznetsov::spectral_mass_integral(&self.inner)
    }

    fn __repr__(&self) -> String {
        "WeightFunction(gaussian)".to_string()
    }
}

/// Kloosterman sum S(m, n; c) over units mod c, by CRT factorization.
#[pyfunction]
fn kloosterman(m: i64, n: i64, c: u64) -> PyResult<f64> {
    ntcore::kloosterman(&KloostermanQuery { m, n, c }).map_err(py_err)
}

/// S(n, 1; c) reassembled from squared Gauss sums over all characters
/// mod c; requires gcd(n, c) = 1 and c >= 2.
#[pyfunction]
fn kloosterman_char_expansion(n: u64, c: u64) -> PyResult<f64> {
    ntcore::kloosterman_char_expansion(n, c).map_err(py_err)
}

#[pyfunction]
fn gcd(a: u64, b: u64) -> u64 {
    ntcore::gcd_u64(a, b)
}

#[pyfunction]
fn is_prime(n: u64) -> bool {
    ntcore::is_prime(n)
}

#[pyfunction]
fn divisors(n: u64) -> Vec<u64> {
    ntcore::divisors(n)
}

/// Prime factorization as a list of (prime, exponent) pairs.
#[pyfunction]
fn factorize(n: u64) -> Vec<(u64, u32)> {
    ntcore::factorize(n)
}

/// Gauss sum of the character of the given index mod modulus.
#[pyfunction]
fn gauss_sum(modulus: u64, index: u64) -> PyResult<Complex64> {
    let chi = find_character(modulus, index)?;
    ntcore::gauss_sum(&chi).map_err(py_err)
}

/// All Dirichlet characters mod modulus, one dict per character with keys
/// modulus, index, conductor, is_primitive, is_principal, parity.
#[pyfunction]
fn characters(py: Python<'_>, modulus: u64) -> PyResult<Vec<Bound<'_, PyDict>>> {
    let group = ntcore::character_group(modulus).map_err(py_err)?;
    group
        .iter()
        .map(|chi| {
            let d = PyDict::new(py);
            d.set_item("modulus", chi.modulus)?;
            d.set_item("index", chi.index)?;
            d.set_item("conductor", chi.conductor)?;
            d.set_item("is_primitive", chi.is_primitive)?;
            d.set_item("is_principal", chi.is_principal)?;
            d.set_item("parity", chi.parity())?;
            Ok(d)
        })
        .collect()
}

/// H+ transform of the weight at x by contour quadrature. Defaults to the
/// Gaussian weight.
#[pyfunction]
#[pyo3(signature = (x, weight=None))]
fn hplus_integral(py: Python<'_>, x: f64, weight: Option<PyRef<'_, WeightFunction>>) -> PyResult<f64> {
    let h = weight_of(weight.as_ref()).clone();
    py.allow_threads(move || hplus::hplus_integral(&h, x)).map_err(py_err)
}

/// H+ transform by the fixed-length power series in x. Asymptotic: the
/// series and the integral agree only for small x.
#[pyfunction]
#[pyo3(signature = (x, weight=None))]
fn hplus_series(x: f64, weight: Option<PyRef<'_, WeightFunction>>) -> PyResult<f64> {
    hplus::hplus_series(weight_of(weight.as_ref()), x).map_err(py_err)
}

/// Mellin transform Psi(s) of the spectral kernel against phi_hat, with
/// family parameter `scale` and modulus `c`. Defaults to the Gaussian
/// weight.
#[pyfunction]
#[pyo3(signature = (s, scale, c, phi, weight=None))]
fn mellin_psi(
    py: Python<'_>,
    s: Complex64,
    scale: f64,
    c: f64,
    phi: PyRef<'_, TestFunction>,
    weight: Option<PyRef<'_, WeightFunction>>,
) -> PyResult<Complex64> {
    let q = mellin::MellinQuery {
        s,
        scale,
        c,
        kind: mellin::MellinKind::Maass,
    };
    let h = weight_of(weight.as_ref()).clone();
    let phi = phi.inner.clone();
    py.allow_threads(move || mellin::mellin_psi(&q, &phi, &h)).map_err(py_err)
}

/// Holomorphic counterpart Psi-flat(s), with J_{k-1} in place of H+.
#[pyfunction]
fn mellin_psi_flat(
    py: Python<'_>,
    s: Complex64,
    scale: f64,
    c: f64,
    holo_weight: u32,
    phi: PyRef<'_, TestFunction>,
) -> PyResult<Complex64> {
    let q = mellin::MellinQuery {
        s,
        scale,
        c,
        kind: mellin::MellinKind::Holomorphic { weight: holo_weight },
    };
    let phi = phi.inner.clone();
    py.allow_threads(move || mellin::mellin_psi_flat(&q, &phi)).map_err(py_err)
}

/// Total spectral mass Omega* at the given level: geometric evaluation,
/// integral comparison, their difference, and the truncation tail bound.
#[pyfunction]
#[pyo3(signature = (level, c_max, weight=None))]
fn omega_star(
    py: Python<'_>,
    level: u64,
    c_max: u64,
    weight: Option<PyRef<'_, WeightFunction>>,
) -> PyResult<Bound<'_, PyDict>> {
    let h = weight_of(weight.as_ref()).clone();
    let r = py
        .allow_threads(move || kuznetsov::omega_star(&h, level, c_max))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("level", r.level)?;
    d.set_item("c_max", r.c_max)?;
    d.set_item("geometric", r.geometric)?;
    d.set_item("integral", r.integral)?;
    d.set_item("difference", r.difference)?;
    d.set_item("tail_bound", r.tail_bound)?;
    Ok(d)
}

/// Averaged one-level density at prime level from the geometric side,
/// with the orthogonal-symmetry prediction and the deviation from it.
#[pyfunction]
#[pyo3(signature = (phi, level, c_max, weight=None))]
fn density(
    py: Python<'_>,
    phi: PyRef<'_, TestFunction>,
    level: u64,
    c_max: u64,
    weight: Option<PyRef<'_, WeightFunction>>,
) -> PyResult<Bound<'_, PyDict>> {
    let h = weight_of(weight.as_ref()).clone();
    let phi = phi.inner.clone();
    let r = py
        .allow_threads(move || kuznetsov::density_geometric(&h, &phi, level, c_max))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("N", r.level)?;
    d.set_item("sigma", r.sigma)?;
    d.set_item("c_max", r.c_max)?;
    d.set_item("main_terms", r.main_terms)?;
    d.set_item("kloosterman_term", r.kloosterman_term)?;
    d.set_item("eisenstein_term", r.eisenstein_term)?;
    d.set_item("omega_star", r.omega_star)?;
    d.set_item("density_value", r.density_value)?;
    d.set_item("ks_prediction", r.ks_prediction)?;
    d.set_item("deviation", r.deviation)?;
    d.set_item("tail_bound", r.tail_bound)?;
    Ok(d)
}

/// Exponent theta_k of the best known progression bound for the k-th
/// moment coefficients.
#[pyfunction]
fn theta_k(k: u32) -> PyResult<f64> {
    dirpoly::theta_k(k).map_err(py_err)
}

/// Largest residual of the divisor-switching identity over all n <= n_max
/// at parameters (z, k). Exactness means a residual at rounding level.
#[pyfunction]
fn heath_brown_check(py: Python<'_>, n_max: usize, z: u64, k: u32) -> PyResult<f64> {
    py.allow_threads(move || dirpoly::heath_brown_check(n_max, z, k)).map_err(py_err)
}

/// Large-sieve pair (lhs, rhs) for coefficients a over characters mod d:
/// lhs is the primitive-character square sum, rhs the unit-constant
/// envelope (d + X^2 - 1) * sum |a_n|^2.
#[pyfunction]
fn large_sieve_check(py: Python<'_>, d: u64, x: usize, a: Vec<Complex64>) -> PyResult<(f64, f64)> {
    py.allow_threads(move || dirpoly::large_sieve_check(d, x, &a)).map_err(py_err)
}

/// Splitting window (lo, hi, case_b_threshold) for the dichotomy at the
/// given epsilon, holomorphic when a weight is passed.
#[pyfunction]
#[pyo3(signature = (epsilon, holo_weight=None))]
fn split_window(epsilon: f64, holo_weight: Option<u32>) -> PyResult<(f64, f64, f64)> {
    dirpoly::split_window(epsilon, holo_weight).map_err(py_err)
}

/// Witness search over seeded random admissible dyadic tuples. Returns a
/// dict with tuples_checked, case_a, case_b, failures; failures must be
/// zero on admissible input.
#[pyfunction]
#[pyo3(signature = (count, seed, epsilon, scale, holo_weight=None))]
fn random_split_sweep(
    py: Python<'_>,
    count: u64,
    seed: u64,
    epsilon: f64,
    scale: f64,
    holo_weight: Option<u32>,
) -> PyResult<Bound<'_, PyDict>> {
    let s = py
        .allow_threads(move || dirpoly::random_split_sweep(count, seed, epsilon, holo_weight, scale))
        .map_err(py_err)?;
    sweep_dict(py, &s)
}

/// Witness search over every admissible tuple on the 1/grid exponent
/// lattice with at most max_active active slots.
#[pyfunction]
#[pyo3(signature = (grid, epsilon, scale, max_active=5, holo_weight=None))]
fn grid_split_sweep(
    py: Python<'_>,
    grid: u32,
    epsilon: f64,
    scale: f64,
    max_active: usize,
    holo_weight: Option<u32>,
) -> PyResult<Bound<'_, PyDict>> {
    let s = py
        .allow_threads(move || dirpoly::grid_split_sweep(grid, epsilon, holo_weight, max_active, scale))
        .map_err(py_err)?;
    sweep_dict(py, &s)
}

/// Truncated fourth-moment integral over primitive characters mod d with
/// coefficients a(n) given by `kind` ("one", "moebius", or "log").
#[pyfunction]
fn fourth_moment_integral(
    py: Python<'_>,
    d: u64,
    x: usize,
    kind: &str,
    t_max: f64,
    log_power: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let kind = parse_coef_kind(kind)?;
    let r = py
        .allow_threads(move || dirpoly::fourth_moment_integral(d, x, kind, t_max, log_power))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("d", r.d)?;
    d.set_item("x", r.x)?;
    d.set_item(
        "kind",
        match r.kind {
            CoefKind::One => "one",
            CoefKind::Moebius => "moebius",
            CoefKind::Log => "log",
        },
    )?;
    d.set_item("t_max", r.t_max)?;
    d.set_item("log_power", r.log_power)?;
    d.set_item("lhs", r.lhs)?;
    d.set_item("ratio", r.ratio)?;
    d.set_item("tail_bound", r.tail_bound)?;
    d.set_item("primitive_count", r.primitive_count)?;
    Ok(d)
}

/// Family zero count in Re(s) >= beta, |Im(s)| <= t_max over moduli
/// q <= q_max and k-fold character products, against the density
/// envelope rhs = (q_max^k T)^{c(1-beta)} log^log_power.
#[pyfunction]
fn grand_density_ratio(
    py: Python<'_>,
    q_max: u64,
    k: u64,
    t_max: f64,
    beta: f64,
    log_power: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let r = py
        .allow_threads(move || dirpoly::grand_density_ratio(q_max, k, t_max, beta, log_power))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("q_max", r.q_max)?;
    d.set_item("k", r.k)?;
    d.set_item("t_max", r.t_max)?;
    d.set_item("beta", r.beta)?;
    d.set_item("log_power", r.log_power)?;
    d.set_item("lhs", r.lhs)?;
    d.set_item("rhs", r.rhs)?;
    d.set_item("characters_counted", r.characters_counted)?;
    Ok(d)
}

/// Residual of the completed functional equation at s for the primitive
/// character of the given index mod modulus. Zero up to quadrature noise.
#[pyfunction]
fn functional_equation_residual(
    py: Python<'_>,
    modulus: u64,
    index: u64,
    s: Complex64,
) -> PyResult<f64> {
    let chi = find_character(modulus, index)?;
    py.allow_threads(move || specfun::functional_equation_residual(s, &chi)).map_err(py_err)
}

/// Count zeros of L(s, chi) with Re(s) >= beta, |Im(s)| <= t_max by a box
/// contour. At beta = 1/2 the count is cross-checked against a critical-
/// line scan; the dict carries count, line_scan_count, scan_disagrees.
#[pyfunction]
fn zero_count(
    py: Python<'_>,
    modulus: u64,
    index: u64,
    beta: f64,
    t_max: f64,
) -> PyResult<Bound<'_, PyDict>> {
    let character = find_character(modulus, index)?;
    let query = specfun::ZeroCountQuery {
        beta,
        t_max,
        character,
    };
    let r = py.allow_threads(move || specfun::zero_count(&query)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("count", r.count)?;
    d.set_item("line_scan_count", r.line_scan_count)?;
    d.set_item("scan_disagrees", r.scan_disagrees)?;
    Ok(d)
}

/// Sign-change count of the rotated completed L-function on the critical
/// line up to t_max.
#[pyfunction]
fn critical_line_scan(py: Python<'_>, modulus: u64, index: u64, t_max: f64) -> PyResult<i64> {
    let chi = find_character(modulus, index)?;
    py.allow_threads(move || specfun::critical_line_scan(&chi, t_max)).map_err(py_err)
}

#[pymodule]
fn lowlying_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<TestFunction>()?;
    m.add_class::<WeightFunction>()?;
    m.add_function(wrap_pyfunction!(kloosterman, m)?)?;
    m.add_function(wrap_pyfunction!(kloosterman_char_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(gcd, m)?)?;
    m.add_function(wrap_pyfunction!(is_prime, m)?)?;
    m.add_function(wrap_pyfunction!(divisors, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(gauss_sum, m)?)?;
    m.add_function(wrap_pyfunction!(characters, m)?)?;
    m.add_function(wrap_pyfunction!(hplus_integral, m)?)?;
    m.add_function(wrap_pyfunction!(hplus_series, m)?)?;
    m.add_function(wrap_pyfunction!(mellin_psi, m)?)?;
    m.add_function(wrap_pyfunction!(mellin_psi_flat, m)?)?;
    m.add_function(wrap_pyfunction!(omega_star, m)?)?;
    m.add_function(wrap_pyfunction!(density, m)?)?;
    m.add_function(wrap_pyfunction!(theta_k, m)?)?;
    m.add_function(wrap_pyfunction!(heath_brown_check, m)?)?;
    m.add_function(wrap_pyfunction!(large_sieve_check, m)?)?;
    m.add_function(wrap_pyfunction!(split_window, m)?)?;
    m.add_function(wrap_pyfunction!(random_split_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(grid_split_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(fourth_moment_integral, m)?)?;
    m.add_function(wrap_pyfunction!(grand_density_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(functional_equation_residual, m)?)?;
    m.add_function(wrap_pyfunction!(zero_count, m)?)?;
    m.add_function(wrap_pyfunction!(critical_line_scan, m)?)?;
    Ok(())
}
