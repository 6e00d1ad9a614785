use neqcasimir::asymptotics::{self, AsymptoticError, AsymptoticForce};
use neqcasimir::cli::{self, CliError, Scenario, Target};
use neqcasimir::dilute::{self, DiluteForce};
use neqcasimir::engine::{self, Channels, EngineError, ForceBreakdown, QuadratureControls, System};
use neqcasimir::materials::{self, CylinderSpec, DielectricModel, MaterialError, MaterialFile};
use neqcasimir::tmatrix::ProviderKind;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::path::PathBuf;

fn engine_err(e: EngineError) -> PyErr {
    match e {
        EngineError::NonConvergence { .. } | EngineError::Kernel(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn material_err(e: MaterialError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn asym_err(e: AsymptoticError) -> PyErr {
    match e {
        AsymptoticError::NonConvergence(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn cli_err(e: CliError) -> PyErr {
    match e.exit_code() {
        3 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn provider_kind(name: &str) -> PyResult<ProviderKind> {
    match name {
        "thin" => Ok(ProviderKind::Thin),
        "full" => Ok(ProviderKind::Full),
        other => Err(PyValueError::new_err(format!("provider must be 'thin' or 'full', got '{other}'"))),
    }
}

/// Dielectric response model.
#[pyclass(name = "Material", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMaterial {
    inner: DielectricModel,
}

#[pymethods]
impl PyMaterial {
    #[staticmethod]
    fn sic() -> Self {
        PyMaterial { inner: DielectricModel::sic() }
    }

    #[staticmethod]
    fn tungsten_2400k() -> Self {
        PyMaterial { inner: DielectricModel::tungsten_2400k() }
    }

    #[staticmethod]
    fn vacuum() -> Self {
        PyMaterial { inner: DielectricModel::Vacuum }
    }

    #[staticmethod]
    fn constant(re: f64, im: f64) -> PyResult<Self> {
        let inner = DielectricModel::Constant { eps: Complex64::new(re, im) };
        inner.validate().map_err(material_err)?;
        Ok(PyMaterial { inner })
    }

    /// `eps0 + i lambda_in omega / c`, `lambda_in` in m.
    #[staticmethod]
    fn low_frequency(eps0: f64, lambda_in: f64) -> PyResult<Self> {
        let inner = DielectricModel::LowFreqExpansion { eps0, lambda_in };
        inner.validate().map_err(material_err)?;
        Ok(PyMaterial { inner })
    }

    /// Loads a `{name, model, parameters, units}` JSON material file.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        let file = MaterialFile::load(&path).map_err(material_err)?;
        Ok(PyMaterial { inner: file.to_model().map_err(material_err)? })
    }

    /// Complex permittivity at `omega` (rad/s).
    fn epsilon(&self, omega: f64) -> PyResult<Complex64> {
        materials::epsilon(&self.inner, omega).map_err(material_err)
    }

    fn __repr__(&self) -> String {
        format!("Material({:?})", self.inner)
    }
}

/// Cylinder radius (m), material and temperature (K).
#[pyclass(name = "Cylinder", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCylinder {
    inner: CylinderSpec,
}

#[pymethods]
impl PyCylinder {
    #[new]
    fn new(radius: f64, material: PyRef<'_, PyMaterial>, temperature: f64) -> PyResult<Self> {
        let inner = CylinderSpec::new(radius, material.inner.clone(), temperature).map_err(material_err)?;
        Ok(PyCylinder { inner })
    }

    #[getter]
    fn radius(&self) -> f64 {
        self.inner.radius
    }

    #[getter]
    fn temperature(&self) -> f64 {
        self.inner.temperature
    }

    fn __repr__(&self) -> String {
        format!("Cylinder(radius={:e}, temperature={})", self.inner.radius, self.inner.temperature)
    }
}

/// Quadrature and truncation settings.
#[pyclass(name = "Controls", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyControls {
    inner: QuadratureControls,
}

#[pymethods]
impl PyControls {
    #[new]
    #[pyo3(signature = (rel_tol=1e-4, x_max=40.0, n_max=None, series_tol=1e-6, quadratic=false))]
    fn new(rel_tol: f64, x_max: f64, n_max: Option<usize>, series_tol: f64, quadratic: bool) -> PyResult<Self> {
        let inner = QuadratureControls { rel_tol, x_max, n_max, series_tol, quadratic, ..Default::default() };
        inner.validate().map_err(engine_err)?;
        Ok(PyControls { inner })
    }

    #[getter]
    fn rel_tol(&self) -> f64 {
        self.inner.rel_tol
    }
}

fn controls_or_default(c: Option<PyRef<'_, PyControls>>) -> QuadratureControls {
    c.map(|c| c.inner).unwrap_or_default()
}

/// Force per unit length split into propagating and evanescent waves (N/m).
#[pyclass(name = "Channels", frozen, skip_from_py_object, get_all)]
#[derive(Clone, Copy)]
pub struct PyChannels {
    propagating: f64,
    evanescent: f64,
}

#[pymethods]
impl PyChannels {
    #[getter]
    fn total(&self) -> f64 {
        self.propagating + self.evanescent
    }

    fn __repr__(&self) -> String {
        format!("Channels(propagating={:e}, evanescent={:e})", self.propagating, self.evanescent)
    }
}

impl From<Channels> for PyChannels {
    fn from(c: Channels) -> Self {
        PyChannels { propagating: c.propagating, evanescent: c.evanescent }
    }
}

/// All force contributions at one separation; see the core `ForceBreakdown`.
#[pyclass(name = "ForceBreakdown", frozen, skip_from_py_object, get_all)]
#[derive(Clone)]
pub struct PyForceBreakdown {
    d: f64,
    int_21: PyChannels,
    int_12: PyChannels,
    pair_source_1: f64,
    pair_source_2: f64,
    self_1: PyChannels,
    self_2: PyChannels,
    env_1: PyChannels,
    env_2: PyChannels,
    eq: f64,
    total_1: f64,
    total_2: f64,
    error: f64,
}

#[pymethods]
impl PyForceBreakdown {
    fn __repr__(&self) -> String {
        format!("ForceBreakdown(d={:e}, total_1={:e}, total_2={:e})", self.d, self.total_1, self.total_2)
    }
}

impl From<ForceBreakdown> for PyForceBreakdown {
    fn from(b: ForceBreakdown) -> Self {
        PyForceBreakdown {
            d: b.d,
            int_21: b.int_21.into(),
            int_12: b.int_12.into(),
            pair_source_1: b.pair_source_1,
            pair_source_2: b.pair_source_2,
            self_1: b.self_1.into(),
            self_2: b.self_2.into(),
            env_1: b.env_1.into(),
            env_2: b.env_2.into(),
            eq: b.eq,
            total_1: b.total_1,
            total_2: b.total_2,
            error: b.error,
        }
    }
}

fn system(c1: &PyCylinder, c2: &PyCylinder, t_env: f64, provider: &str) -> PyResult<System> {
    Ok(System { cylinder1: c1.inner.clone(), cylinder2: c2.inner.clone(), t_env, provider: provider_kind(provider)? })
}

/// Force on `target` from sources in `source` at `t_source`.
#[pyfunction]
#[pyo3(signature = (source, target, t_source, d, provider="thin", controls=None))]
fn interaction_force(
    py: Python<'_>,
    source: PyRef<'_, PyCylinder>,
    target: PyRef<'_, PyCylinder>,
    t_source: f64,
    d: f64,
    provider: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<PyChannels> {
    let kind = provider_kind(provider)?;
    let (s, t, c) = (source.inner.clone(), target.inner.clone(), controls_or_default(controls));
    py.detach(|| engine::interaction_force(&s, &t, t_source, d, kind, &c))
        .map(Into::into)
        .map_err(engine_err)
}

/// Total force on both cylinders from sources in `source` at `t_source`.
#[pyfunction]
#[pyo3(signature = (source, other, t_source, d, provider="thin", controls=None))]
fn pair_source_force(
    py: Python<'_>,
    source: PyRef<'_, PyCylinder>,
    other: PyRef<'_, PyCylinder>,
    t_source: f64,
    d: f64,
    provider: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<f64> {
    let kind = provider_kind(provider)?;
    let (s, o, c) = (source.inner.clone(), other.inner.clone(), controls_or_default(controls));
    py.detach(|| engine::pair_source_force(&s, &o, t_source, d, kind, &c)).map_err(engine_err)
}

/// Self-force on cylinder `j` (1 or 2).
#[pyfunction]
#[pyo3(signature = (j, cylinder1, cylinder2, t_env, d, provider="thin", controls=None))]
#[allow(clippy::too_many_arguments)]
fn self_force(
    py: Python<'_>,
    j: usize,
    cylinder1: PyRef<'_, PyCylinder>,
    cylinder2: PyRef<'_, PyCylinder>,
    t_env: f64,
    d: f64,
    provider: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<PyChannels> {
    let sys = system(&cylinder1, &cylinder2, t_env, provider)?;
    let c = controls_or_default(controls);
    py.detach(|| engine::self_force(j, &sys, d, &c)).map(Into::into).map_err(engine_err)
}

/// Full force assembly at one separation.
#[pyfunction]
#[pyo3(signature = (cylinder1, cylinder2, t_env, d, f_eq=0.0, provider="thin", controls=None))]
#[allow(clippy::too_many_arguments)]
fn total_force(
    py: Python<'_>,
    cylinder1: PyRef<'_, PyCylinder>,
    cylinder2: PyRef<'_, PyCylinder>,
    t_env: f64,
    d: f64,
    f_eq: f64,
    provider: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<PyForceBreakdown> {
    let sys = system(&cylinder1, &cylinder2, t_env, provider)?;
    let c = controls_or_default(controls);
    py.detach(|| engine::total_force(&sys, d, f_eq, &c)).map(Into::into).map_err(engine_err)
}

/// [`total_force`] over a separation grid (no equilibrium force).
#[pyfunction]
#[pyo3(signature = (cylinder1, cylinder2, t_env, d_grid, provider="thin", controls=None))]
fn sweep(
    py: Python<'_>,
    cylinder1: PyRef<'_, PyCylinder>,
    cylinder2: PyRef<'_, PyCylinder>,
    t_env: f64,
    d_grid: Vec<f64>,
    provider: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<Vec<PyForceBreakdown>> {
    let sys = system(&cylinder1, &cylinder2, t_env, provider)?;
    let c = controls_or_default(controls);
    py.detach(|| engine::sweep(&sys, &d_grid, None, &c))
        .map(|v| v.into_iter().map(Into::into).collect())
        .map_err(engine_err)
}

fn asym_tuple(f: AsymptoticForce) -> (f64, String, Vec<String>) {
    (f.value, format!("{:?}", f.regime), f.warnings)
}

/// Thin-cylinder closed form for the interaction force on cylinder 1 from
/// sources in cylinder 2 at `t2`; `regime` is "near" or "far".
/// Returns `(value, regime, warnings)`.
#[pyfunction]
#[pyo3(signature = (r1, r2, material1, material2, t2, d, regime, controls=None))]
#[allow(clippy::too_many_arguments)]
fn interaction_asymptotic(
    py: Python<'_>,
    r1: f64,
    r2: f64,
    material1: PyRef<'_, PyMaterial>,
    material2: PyRef<'_, PyMaterial>,
    t2: f64,
    d: f64,
    regime: &str,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<(f64, String, Vec<String>)> {
    let (m1, m2, c) = (material1.inner.clone(), material2.inner.clone(), controls_or_default(controls));
    let out = match regime {
        "near" => py.detach(|| asymptotics::interaction_near(r1, r2, &m1, &m2, t2, d, &c)),
        "far" => py.detach(|| asymptotics::interaction_far(r1, r2, &m1, &m2, t2, d, &c)),
        other => return Err(PyValueError::new_err(format!("regime must be 'near' or 'far', got '{other}'"))),
    };
    out.map(asym_tuple).map_err(asym_err)
}

fn dilute_tuple(f: DiluteForce) -> (f64, f64, f64, f64, f64) {
    (f.total(), f.terms.p2, f.terms.p3, f.terms.p5, f.terms.p7)
}

/// Dilute-limit force per length on cylinder 1 by summing volume-element
/// pair forces. Returns `(total, p2, p3, p5, p7)`.
#[pyfunction]
#[pyo3(signature = (r1, r2, material1, material2, t2, d, controls=None))]
#[allow(clippy::too_many_arguments)]
fn dilute_summation(
    py: Python<'_>,
    r1: f64,
    r2: f64,
    material1: PyRef<'_, PyMaterial>,
    material2: PyRef<'_, PyMaterial>,
    t2: f64,
    d: f64,
    controls: Option<PyRef<'_, PyControls>>,
) -> PyResult<(f64, f64, f64, f64, f64)> {
    let (m1, m2, c) = (material1.inner.clone(), material2.inner.clone(), controls_or_default(controls));
    py.detach(|| dilute::cylinder_force_by_summation(r1, r2, &m1, &m2, t2, d, &c))
        .map(dilute_tuple)
        .map_err(asym_err)
}

/// `hbar c / (k_B T)` in m.
#[pyfunction]
fn thermal_wavelength(temperature: f64) -> PyResult<f64> {
    materials::thermal_wavelength(temperature).map_err(material_err)
}

/// Weight per unit length `rho pi R^2 g` (N/m).
#[pyfunction]
fn weight_per_length(density: f64, radius: f64) -> PyResult<f64> {
    cli::weight_per_length(density, radius).map_err(cli_err)
}

/// `mu0 I1 I2 / (2 pi d)` (N/m), positive (attractive) for parallel currents.
#[pyfunction]
fn ampere_force_per_length(i1: f64, i2: f64, d: f64) -> PyResult<f64> {
    cli::ampere_force_per_length(i1, i2, d).map_err(cli_err)
}

/// Runs a scenario file and returns the CSV text.
#[pyfunction]
#[pyo3(signature = (path, provider=None, rel_tol=None))]
fn run_scenario(py: Python<'_>, path: PathBuf, provider: Option<&str>, rel_tol: Option<f64>) -> PyResult<String> {
    let mut s = Scenario::load(&path).map_err(cli_err)?;
    if let Some(p) = provider {
        s = s.with_provider(provider_kind(p)?);
    }
    if let Some(t) = rel_tol {
        s = s.with_rel_tol(t).map_err(cli_err)?;
    }
    py.detach(|| cli::run(&s).and_then(|rows| cli::to_csv(&s, &rows))).map_err(cli_err)
}

/// Zero crossings in CSV text produced by [`run_scenario`], as
/// `(case, d, stability)` tuples for the net force on `cylinder` (1 or 2).
#[pyfunction]
#[pyo3(signature = (csv_text, cylinder=1))]
fn find_zeros(py: Python<'_>, csv_text: &str, cylinder: u8) -> PyResult<Vec<(String, f64, String)>> {
    let target = match cylinder {
        1 => Target::Cylinder1,
        2 => Target::Cylinder2,
        other => return Err(PyValueError::new_err(format!("cylinder must be 1 or 2, got {other}"))),
    };
    let (scenario, rows) = cli::parse_output(csv_text, "<csv>").map_err(cli_err)?;
    let zeros = py.detach(|| cli::find_zeros(&scenario, &rows, target)).map_err(cli_err)?;
    Ok(zeros
        .into_iter()
        .map(|z| {
            let s = match z.stability {
                cli::Stability::Stable => "stable",
                cli::Stability::Unstable => "unstable",
            };
            (z.case, z.d, s.to_string())
        })
        .collect())
}

#[pymodule]
fn neqcasimir_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaterial>()?;
    m.add_class::<PyCylinder>()?;
    m.add_class::<PyControls>()?;
    m.add_class::<PyChannels>()?;
    m.add_class::<PyForceBreakdown>()?;
    m.add_function(wrap_pyfunction!(interaction_force, m)?)?;
    m.add_function(wrap_pyfunction!(pair_source_force, m)?)?;
    m.add_function(wrap_pyfunction!(self_force, m)?)?;
    m.add_function(wrap_pyfunction!(total_force, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(dilute_summation, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_wavelength, m)?)?;
    m.add_function(wrap_pyfunction!(weight_per_length, m)?)?;
    m.add_function(wrap_pyfunction!(ampere_force_per_length, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(find_zeros, m)?)?;
    Ok(())
}
