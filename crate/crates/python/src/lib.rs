//! Python bindings: algebra, grids, fields, the integral operators, the Miura
//! solver and the GP pipeline. Reports come back as plain dicts.

use miura_core::diff::{self, FactorizationCase, ParabolicVariant, Sign};
use miura_core::gp::{self, GpConfig, PipelineBoundary};
use miura_core::integral::{self, KernelCache};
use miura_core::miura::{self as solver, BoundaryMode, MiuraConfig};
use miura_core::study::{self, StudyCase};
use miura_core::{field::FieldMeta, Algebra, CliffordField, Error, GridSpec, Involution, Multivector};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::NotConverged { .. } | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (s,))?.unbind())
}

fn from_py<T: DeserializeOwned>(py: Python<'_>, obj: Option<&Bound<'_, PyAny>>, default: T) -> PyResult<T> {
    let Some(obj) = obj else { return Ok(default) };
    let s: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&s).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyclass(name = "Algebra", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct PyAlgebra(Algebra);

#[pymethods]
impl PyAlgebra {
    #[new]
    #[pyo3(signature = (n, witt=false))]
    fn new(n: usize, witt: bool) -> PyResult<Self> {
        Algebra::new(n, witt).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn witt(&self) -> bool {
        self.0.witt_enabled()
    }

    fn __len__(&self) -> usize {
        self.0.basis_len()
    }

    /// Basis labels in coefficient order.
    fn blades(&self) -> Vec<String> {
        self.0.blades().map(|b| b.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        format!("Algebra({})", self.0)
    }
}

#[pyclass(name = "Multivector", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMultivector(Multivector);

fn involution(kind: &str) -> PyResult<Involution> {
    match kind {
        "principal" => Ok(Involution::Principal),
        "reversion" => Ok(Involution::Reversion),
        "conjugation" => Ok(Involution::Conjugation),
        _ => Err(PyValueError::new_err(format!("unknown involution {kind:?}"))),
    }
}

#[pymethods]
impl PyMultivector {
    #[new]
    fn new(alg: &PyAlgebra, coeffs: Vec<Complex64>) -> PyResult<Self> {
        Multivector::from_coeffs(alg.0, coeffs).map(Self).map_err(err)
    }

    #[staticmethod]
    fn scalar(alg: &PyAlgebra, c: Complex64) -> Self {
        Self(Multivector::scalar(alg.0, c))
    }

    #[staticmethod]
    fn generator(alg: &PyAlgebra, i: usize) -> PyResult<Self> {
        Multivector::generator(alg.0, i).map(Self).map_err(err)
    }

    #[staticmethod]
    fn vector(alg: &PyAlgebra, x: Vec<f64>) -> PyResult<Self> {
        Multivector::vector(alg.0, &x).map(Self).map_err(err)
    }

    #[staticmethod]
    fn witt_f(alg: &PyAlgebra) -> PyResult<Self> {
        Multivector::witt_f(alg.0).map(Self).map_err(err)
    }

    #[staticmethod]
    fn witt_f_plus(alg: &PyAlgebra) -> PyResult<Self> {
        Multivector::witt_f_plus(alg.0).map(Self).map_err(err)
    }

    #[getter]
    fn algebra(&self) -> PyAlgebra {
        PyAlgebra(self.0.algebra())
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.0.coeffs().to_vec()
    }

    fn involution(&self, kind: &str) -> PyResult<Self> {
        Ok(Self(self.0.involution(involution(kind)?)))
    }

    fn grade(&self, k: usize) -> Self {
        Self(self.0.grade_project(k))
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn vector_inverse(&self) -> PyResult<Self> {
        self.0.vector_inverse().map(Self).map_err(err)
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(m) = other.cast::<Self>() {
            return self.0.geometric_product(&m.get().0).map(Self).map_err(err);
        }
        let c: Complex64 = other.extract()?;
        Ok(Self(&self.0 * c))
    }

    fn __rmul__(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "GridSpec", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(origin: Vec<f64>, extents: Vec<f64>, counts: Vec<usize>) -> PyResult<Self> {
        GridSpec::new(origin, extents, counts).map(Self).map_err(err)
    }

    /// `[0, 1]^dim` with `count` nodes per axis.
    #[staticmethod]
    fn unit(dim: usize, count: usize) -> PyResult<Self> {
        GridSpec::unit(dim, count).map(Self).map_err(err)
    }

    #[staticmethod]
    fn cube(dim: usize, lo: f64, hi: f64, count: usize) -> PyResult<Self> {
        GridSpec::cube(dim, lo, hi, count).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[getter]
    fn counts(&self) -> Vec<usize> {
        self.0.counts().to_vec()
    }

    #[getter]
    fn h(&self) -> f64 {
        self.0.h()
    }

    fn __len__(&self) -> usize {
        self.0.node_count()
    }

    fn coords(&self, node: usize) -> PyResult<Vec<f64>> {
        if node >= self.0.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(self.0.coords(node)[..self.0.dim()].to_vec())
    }

    fn is_boundary(&self, node: usize) -> bool {
        self.0.is_boundary(node)
    }

    fn hash(&self) -> String {
        self.0.hash()
    }

    fn __repr__(&self) -> String {
        format!("GridSpec(counts={:?}, h={})", self.0.counts(), self.0.h())
    }
}

#[pyclass(name = "CliffordField", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyField(CliffordField);

fn sample<T>(grid: &GridSpec, values: &Bound<'_, PyAny>, extract: impl Fn(&Bound<'_, PyAny>) -> PyResult<T>) -> PyResult<Vec<T>> {
    let dim = grid.dim();
    if values.is_callable() {
        (0..grid.node_count()).map(|i| extract(&values.call1((grid.coords(i)[..dim].to_vec(),))?)).collect()
    } else {
        let out: Vec<T> = values.try_iter()?.map(|v| extract(&v?)).collect::<PyResult<_>>()?;
        if out.len() != grid.node_count() {
            return Err(PyValueError::new_err(format!("expected {} values, got {}", grid.node_count(), out.len())));
        }
        Ok(out)
    }
}

#[pymethods]
impl PyField {
    #[staticmethod]
    fn zeros(grid: &PyGrid, alg: &PyAlgebra) -> Self {
        Self(CliffordField::zeros(&grid.0, alg.0))
    }

    /// Real scalar field from a node-ordered sequence or a callable `f(x)`.
    #[staticmethod]
    fn scalar(grid: &PyGrid, alg: &PyAlgebra, values: &Bound<'_, PyAny>) -> PyResult<Self> {
        let v: Vec<f64> = sample(&grid.0, values, |o| o.extract())?;
        let mut f = CliffordField::zeros(&grid.0, alg.0);
        for (i, x) in v.into_iter().enumerate() {
            f.node_mut(i)[0] = x.into();
        }
        Ok(Self(f))
    }

    /// Grade-1 field; each value is a list of `n` components.
    #[staticmethod]
    fn vector(grid: &PyGrid, alg: &PyAlgebra, values: &Bound<'_, PyAny>) -> PyResult<Self> {
        let v: Vec<Vec<f64>> = sample(&grid.0, values, |o| o.extract())?;
        let mut f = CliffordField::zeros(&grid.0, alg.0);
        for (i, x) in v.iter().enumerate() {
            f.set(i, &Multivector::vector(alg.0, x).map_err(err)?).map_err(err)?;
        }
        Ok(Self(f))
    }

    #[staticmethod]
    fn read_csv(path: &str, grid: &PyGrid, alg: &PyAlgebra) -> PyResult<Self> {
        let meta = FieldMeta { grid: grid.0.clone(), n: alg.0.n(), witt: alg.0.witt_enabled() };
        let f = std::fs::File::open(path).map_err(|e| err(e.into()))?;
        CliffordField::read_csv(std::io::BufReader::new(f), &meta).map(Self).map_err(err)
    }

    fn write_csv(&self, path: &str) -> PyResult<()> {
        let f = std::fs::File::create(path).map_err(|e| err(e.into()))?;
        self.0.write_csv(std::io::BufWriter::new(f)).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }

    #[getter]
    fn algebra(&self) -> PyAlgebra {
        PyAlgebra(self.0.algebra())
    }

    fn __len__(&self) -> usize {
        self.0.node_count()
    }

    fn __getitem__(&self, node: usize) -> PyResult<PyMultivector> {
        if node >= self.0.node_count() {
            return Err(PyValueError::new_err(format!("node {node} out of range")));
        }
        Ok(PyMultivector(self.0.get(node)))
    }

    /// Flat node-major coefficient list.
    fn data(&self) -> Vec<Complex64> {
        self.0.data().to_vec()
    }

    fn scalar_values(&self) -> PyResult<Vec<f64>> {
        self.0.real_scalar_values().map_err(err)
    }

    /// Per-axis component lists of a real grade-1 field.
    fn vector_components(&self) -> PyResult<Vec<Vec<f64>>> {
        self.0.real_vector_components().map_err(err)
    }

    fn is_grade1(&self) -> bool {
        self.0.is_grade1()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn max_abs_diff(&self, other: &Self) -> PyResult<f64> {
        self.0.max_abs_diff(&other.0).map_err(err)
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        self.0.lp_norm(p).map_err(err)
    }

    fn w1p_norm(&self, p: f64) -> PyResult<f64> {
        self.0.w1p_norm(p).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __mul__(&self, other: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(f) = other.cast::<Self>() {
            return self.0.product(&f.get().0).map(Self).map_err(err);
        }
        let c: Complex64 = other.extract()?;
        Ok(Self(self.0.scale(c)))
    }

    fn __rmul__(&self, c: Complex64) -> Self {
        Self(self.0.scale(c))
    }

    fn __repr__(&self) -> String {
        format!("CliffordField({}, counts={:?})", self.0.algebra(), self.0.grid().counts())
    }
}

/// Precomputed cell integrals of the Cauchy kernel for one grid.
#[pyclass(name = "KernelCache", frozen)]
struct PyCache(KernelCache);

#[pymethods]
impl PyCache {
    #[new]
    fn new(py: Python<'_>, grid: &PyGrid) -> PyResult<Self> {
        let g = grid.0.clone();
        py.detach(|| KernelCache::build(&g)).map(Self).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(self.0.grid().clone())
    }
}

#[pyfunction]
fn dirac(f: &PyField) -> PyResult<PyField> {
    diff::dirac_apply(&f.0).map(PyField).map_err(err)
}

#[pyfunction]
fn laplacian(f: &PyField) -> PyResult<PyField> {
    diff::laplacian_apply(&f.0).map(PyField).map_err(err)
}

/// Interior RMS of a factorization identity. `case` is one of laplace,
/// cauchy_riemann, helmholtz (needs `k`), miura (needs `a`), or
/// schrodinger/heat with a `+`/`-` suffix.
#[pyfunction]
#[pyo3(signature = (case, u, k=None, a=None))]
fn factorization_residual(case: &str, u: &PyField, k: Option<Complex64>, a: Option<&PyField>) -> PyResult<f64> {
    let need = |what: &str| PyValueError::new_err(format!("case {case:?} needs `{what}`"));
    let parabolic = |sign, variant| Ok::<_, PyErr>(FactorizationCase::Parabolic { sign, variant });
    let v;
    let c = match case {
        "laplace" => FactorizationCase::Laplace,
        "cauchy_riemann" => FactorizationCase::CauchyRiemann,
        "helmholtz" => FactorizationCase::Helmholtz(k.ok_or_else(|| need("k"))?),
        "miura" => {
            let a = &a.ok_or_else(|| need("a"))?.0;
            v = diff::miura_potential(a).map_err(err)?;
            FactorizationCase::Miura { a, v: &v }
        }
        "schrodinger+" => parabolic(Sign::Plus, ParabolicVariant::Schrodinger)?,
        "schrodinger-" => parabolic(Sign::Minus, ParabolicVariant::Schrodinger)?,
        "heat+" => parabolic(Sign::Plus, ParabolicVariant::Heat)?,
        "heat-" => parabolic(Sign::Minus, ParabolicVariant::Heat)?,
        _ => return Err(PyValueError::new_err(format!("unknown factorization case {case:?}"))),
    };
    diff::factorization_residual(c, &u.0).map_err(err)
}

#[pyfunction]
fn teodorescu(py: Python<'_>, f: &PyField, cache: &PyCache) -> PyResult<PyField> {
    py.detach(|| integral::teodorescu_apply(&f.0, &cache.0)).map(PyField).map_err(err)
}

#[pyfunction]
fn right_inverse_residual(py: Python<'_>, f: &PyField, cache: &PyCache) -> PyResult<f64> {
    py.detach(|| integral::right_inverse_residual(&f.0, &cache.0)).map_err(err)
}

#[pyfunction]
fn borel_pompeiu_residual(py: Python<'_>, f: &PyField, cache: &PyCache) -> PyResult<f64> {
    py.detach(|| integral::borel_pompeiu_residual(&f.0, &cache.0)).map_err(err)
}

#[pyfunction]
fn im_q_residual(py: Python<'_>, f: &PyField, cache: &PyCache) -> PyResult<f64> {
    py.detach(|| integral::im_q_residual(&f.0, &cache.0)).map_err(err)
}

#[pyfunction]
fn cauchy_kernel(x: Vec<f64>) -> PyResult<Vec<f64>> {
    integral::cauchy_kernel_components(&x).map_err(err)
}

#[pyfunction]
fn schrodinger_kernel(x: Vec<f64>, t: f64) -> Complex64 {
    integral::schrodinger_kernel(&x, t)
}

#[pyfunction]
fn parabolic_kernel(x: Vec<f64>, t: f64) -> PyResult<PyMultivector> {
    integral::parabolic_kernel(&x, t).map(PyMultivector).map_err(err)
}

/// Solves `a = T(V + |a|²)` (or the trace variant when `trace` is given).
/// `config` takes the MiuraConfig keys (p, tol, max_iter, k1, C, trials, seed).
/// Returns `(a, report)`.
#[pyfunction]
#[pyo3(signature = (v, cache, config=None, a0=None, trace=None))]
fn miura_iterate(
    py: Python<'_>,
    v: &PyField,
    cache: &PyCache,
    config: Option<&Bound<'_, PyAny>>,
    a0: Option<&PyField>,
    trace: Option<&PyField>,
) -> PyResult<(PyField, Py<PyAny>)> {
    let dim = cache.0.grid().dim();
    let cfg: MiuraConfig = from_py(py, config, MiuraConfig::for_dimension(dim))?;
    let mode = trace.map_or(BoundaryMode::ImQ, |t| BoundaryMode::Trace(&t.0));
    let a0 = a0.map(|a| &a.0);
    let (a, rep) = py.detach(|| solver::miura_iterate_with_mode(&v.0, a0, &cfg, &cache.0, mode)).map_err(err)?;
    Ok((PyField(a), to_py(py, &rep)?))
}

/// `(fp_residual, strong_residual)` for a candidate solution.
#[pyfunction]
#[pyo3(signature = (a, v, cache, p=1.5))]
fn miura_residual(a: &PyField, v: &PyField, cache: &PyCache, p: f64) -> PyResult<(f64, f64)> {
    solver::miura_residual(&a.0, &v.0, &cache.0, p).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (norm_v, k1, k2))]
fn convergence_bounds(py: Python<'_>, norm_v: f64, k1: f64, k2: f64) -> PyResult<Py<PyAny>> {
    to_py(py, &solver::convergence_bounds(norm_v, k1, k2).map_err(err)?)
}

#[pyfunction]
fn log_derivative(phi: &PyField) -> PyResult<PyField> {
    solver::log_derivative(&phi.0).map(PyField).map_err(err)
}

#[pyfunction]
fn schrodinger_potential(phi: &PyField) -> PyResult<PyField> {
    solver::schrodinger_potential(&phi.0).map(PyField).map_err(err)
}

#[pyfunction]
fn proposition_check(phi: &PyField) -> PyResult<f64> {
    solver::proposition_check(&phi.0).map_err(err)
}

/// Mean-zero `s` with `Ds ≈ a`; returns `(s, residual)`.
#[pyfunction]
fn reconstruct_log_phi(a: &PyField) -> PyResult<(PyField, f64)> {
    let r = solver::reconstruct_log_phi(&a.0).map_err(err)?;
    Ok((PyField(r.s), r.residual))
}

/// Solves `(1 - α²Δ)F = |φ|²`; returns `(F, cg_iterations)`.
#[pyfunction]
fn helmholtz_solve_f(phi: &PyField, alpha: f64) -> PyResult<(PyField, usize)> {
    let (f, stats) = gp::helmholtz_solve_f(&phi.0, alpha).map_err(err)?;
    Ok((PyField(f), stats.iterations))
}

#[pyfunction]
fn bessel_k0(z: f64) -> PyResult<f64> {
    gp::bessel_k0(z).map_err(err)
}

#[pyfunction]
fn effective_potential_kernel(r: f64, alpha: f64, dim: usize) -> PyResult<f64> {
    gp::effective_potential_kernel(r, alpha, dim).map_err(err)
}

/// GP reduction for a positive state `phi`. `gp` takes the GpConfig keys
/// (hbar, mass, g, alpha, mu, trap); `boundary` is "im_q" or "trace".
/// Returns a dict with the report and the intermediate fields.
#[pyfunction]
#[pyo3(signature = (phi, cache, gp=None, miura=None, boundary="im_q"))]
fn gp_miura_pipeline<'py>(
    py: Python<'py>,
    phi: &PyField,
    cache: &PyCache,
    gp: Option<&Bound<'py, PyAny>>,
    miura: Option<&Bound<'py, PyAny>>,
    boundary: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let dim = cache.0.grid().dim();
    let cfg: GpConfig = from_py(py, gp, GpConfig::default())?;
    let mcfg: MiuraConfig = from_py(py, miura, MiuraConfig::for_dimension(dim))?;
    let boundary: PipelineBoundary = serde_json::from_value(boundary.into())
        .map_err(|_| PyValueError::new_err(format!("unknown boundary {boundary:?}")))?;
    let run = py.detach(|| gp::gp_miura_pipeline(&phi.0, &cfg, &mcfg, &cache.0, boundary)).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("report", to_py(py, &run.report)?)?;
    d.set_item("density", PyField(run.density))?;
    d.set_item("effective_potential", PyField(run.effective_potential))?;
    d.set_item("log_derivative", PyField(run.log_derivative))?;
    d.set_item("miura_solution", PyField(run.miura_solution))?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (alpha_s, hbar=1.0, mass=1.0))]
fn scattering_coupling(alpha_s: f64, hbar: f64, mass: f64) -> f64 {
    gp::scattering_coupling(alpha_s, &GpConfig { hbar, mass, ..GpConfig::default() })
}

/// Refinement table for a named residual (see `study_cases()`).
#[pyfunction]
fn convergence_study(py: Python<'_>, case: &str, levels: Vec<usize>) -> PyResult<Py<PyAny>> {
    let case: StudyCase = case.parse().map_err(err)?;
    let table = py.detach(|| study::convergence_study(case, &levels)).map_err(err)?;
    to_py(py, &table)
}

#[pyfunction]
fn study_cases() -> Vec<&'static str> {
    StudyCase::ALL.iter().map(|c| c.name()).collect()
}

#[pymodule]
fn miura(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", miura_core::VERSION)?;
    m.add_class::<PyAlgebra>()?;
    m.add_class::<PyMultivector>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyCache>()?;
    m.add_function(wrap_pyfunction!(dirac, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian, m)?)?;
    m.add_function(wrap_pyfunction!(factorization_residual, m)?)?;
    m.add_function(wrap_pyfunction!(teodorescu, m)?)?;
    m.add_function(wrap_pyfunction!(right_inverse_residual, m)?)?;
    m.add_function(wrap_pyfunction!(borel_pompeiu_residual, m)?)?;
    m.add_function(wrap_pyfunction!(im_q_residual, m)?)?;
    m.add_function(wrap_pyfunction!(cauchy_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(schrodinger_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(parabolic_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(miura_iterate, m)?)?;
    m.add_function(wrap_pyfunction!(miura_residual, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(log_derivative, m)?)?;
    m.add_function(wrap_pyfunction!(schrodinger_potential, m)?)?;
    m.add_function(wrap_pyfunction!(proposition_check, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_log_phi, m)?)?;
    m.add_function(wrap_pyfunction!(helmholtz_solve_f, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k0, m)?)?;
    m.add_function(wrap_pyfunction!(effective_potential_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(gp_miura_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(scattering_coupling, m)?)?;
    m.add_function(wrap_pyfunction!(convergence_study, m)?)?;
    m.add_function(wrap_pyfunction!(study_cases, m)?)?;
    Ok(())
}
