//! Python bindings for the `pxstab` toolkit.

use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use pxstab::checks::{run_suite, Suite};
use pxstab::error::Error;
use pxstab::exponent::{
    build_exponent, log_holder_constant, make_schedule, Direction, ExponentField, ExponentSchedule,
};
use pxstab::mesh::{Domain, Mesh, ScalarField};
use pxstab::modular::{self as spaces, GapReport, ModularBranch, NormModularReport};
use pxstab::solver::{self, DirichletProblem, SolveResult, SolverOptions};
use pxstab::stability::{self, StabilityReport, StabilityRow, REPORT_HEADER};

create_exception!(pypxstab, NonConvergenceError, PyRuntimeError);

fn is_non_convergence(e: &Error) -> bool {
    match e {
        Error::NonConvergence { .. } => true,
        Error::Schedule { source, .. } => is_non_convergence(source),
        _ => false,
    }
}

fn to_py(e: Error) -> PyErr {
    if is_non_convergence(&e) {
        return NonConvergenceError::new_err(e.to_string());
    }
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn check_len(what: &str, got: usize, want: usize) -> PyResult<()> {
    if got == want {
        Ok(())
    } else {
        Err(PyValueError::new_err(format!(
            "{what} has length {got}, expected {want}"
        )))
    }
}

/// Nodal data given either as an expression in `x`, `y` or as values.
#[derive(FromPyObject)]
enum NodalInput {
    Expr(String),
    Values(Vec<f64>),
}

impl NodalInput {
    fn field(self, mesh: &Mesh, what: &str) -> PyResult<ScalarField> {
        match self {
            NodalInput::Expr(src) => {
                let expr = src.parse().map_err(to_py)?;
                mesh.interpolate(&expr).map_err(to_py)
            }
            NodalInput::Values(v) => {
                check_len(what, v.len(), mesh.num_vertices())?;
                Ok(ScalarField::new(v))
            }
        }
    }
}

#[derive(FromPyObject)]
enum ExponentInput<'py> {
    Field(PyRef<'py, PyExponentField>),
    Expr(String),
}

#[pyclass(name = "Mesh", module = "pypxstab", frozen)]
pub struct PyMesh {
    inner: Mesh,
}

#[pymethods]
impl PyMesh {
    /// Uniform mesh of `[a, b]` with `n` cells.
    #[staticmethod]
    fn interval(a: f64, b: f64, n: usize) -> PyResult<Self> {
        let inner = Mesh::new(Domain::Interval { a, b }, n).map_err(to_py)?;
        Ok(PyMesh { inner })
    }

    /// Structured triangulation of a rectangle, `n` squares per side, each
    /// split into two triangles.
    #[staticmethod]
    fn rectangle(ax: f64, ay: f64, bx: f64, by: f64, n: usize) -> PyResult<Self> {
        let inner = Mesh::new(Domain::Rectangle { ax, ay, bx, by }, n).map_err(to_py)?;
        Ok(PyMesh { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.num_vertices()
    }

    #[getter]
    fn num_cells(&self) -> usize {
        self.inner.num_cells()
    }

    #[getter]
    fn total_measure(&self) -> f64 {
        self.inner.total_measure()
    }

    #[getter]
    fn vertices(&self) -> Vec<(f64, f64)> {
        self.inner.vertices().iter().map(|v| (v[0], v[1])).collect()
    }

    #[getter]
    fn barycenters(&self) -> Vec<(f64, f64)> {
        self.inner
            .barycenters()
            .iter()
            .map(|v| (v[0], v[1]))
            .collect()
    }

    #[getter]
    fn measures(&self) -> Vec<f64> {
        self.inner.measures().to_vec()
    }

    #[getter]
    fn boundary(&self) -> Vec<bool> {
        self.inner.boundary_flags().to_vec()
    }

    fn cells(&self) -> Vec<Vec<usize>> {
        (0..self.inner.num_cells())
            .map(|t| self.inner.cell(t).to_vec())
            .collect()
    }

    /// Nodal interpolant of an expression.
    fn interpolate(&self, expr: &str) -> PyResult<Vec<f64>> {
        let expr = expr.parse().map_err(to_py)?;
        Ok(self.inner.interpolate(&expr).map_err(to_py)?.into_values())
    }

    /// An expression sampled at the cell barycenters.
    fn eval_cells(&self, expr: &str) -> PyResult<Vec<f64>> {
        let expr = expr.parse().map_err(to_py)?;
        self.inner.eval_cells(&expr).map_err(to_py)
    }

    /// Cell means of a nodal field.
    fn cell_values(&self, u: Vec<f64>) -> PyResult<Vec<f64>> {
        check_len("u", u.len(), self.inner.num_vertices())?;
        Ok(self.inner.cell_values(&ScalarField::new(u)))
    }

    /// Cellwise gradient of a nodal field, one row per cell.
    fn gradient(&self, u: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        check_len("u", u.len(), self.inner.num_vertices())?;
        let g = self.inner.gradient(&ScalarField::new(u));
        Ok(g.iter().map(|v| v.to_vec()).collect())
    }

    fn integrate(&self, cell_values: Vec<f64>) -> PyResult<f64> {
        check_len("cell_values", cell_values.len(), self.inner.num_cells())?;
        Ok(self.inner.integrate(&cell_values))
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh(dim={}, vertices={}, cells={})",
            self.inner.dim(),
            self.inner.num_vertices(),
            self.inner.num_cells()
        )
    }
}

#[pyclass(name = "ExponentField", module = "pypxstab", frozen)]
pub struct PyExponentField {
    inner: ExponentField,
}

#[pymethods]
impl PyExponentField {
    /// Samples `expr` at the cell barycenters of `mesh`.
    #[new]
    fn new(expr: &str, mesh: &PyMesh) -> PyResult<Self> {
        let inner = build_exponent(expr, &mesh.inner).map_err(to_py)?;
        Ok(PyExponentField { inner })
    }

    #[staticmethod]
    fn from_samples(samples: Vec<f64>) -> PyResult<Self> {
        let inner = ExponentField::new(samples).map_err(to_py)?;
        Ok(PyExponentField { inner })
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.inner.samples().to_vec()
    }

    #[getter]
    fn p_minus(&self) -> f64 {
        self.inner.p_minus()
    }

    #[getter]
    fn p_plus(&self) -> f64 {
        self.inner.p_plus()
    }

    #[getter]
    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    fn sup_distance(&self, other: &PyExponentField) -> PyResult<f64> {
        check_len("other", other.inner.len(), self.inner.len())?;
        Ok(self.inner.sup_distance(&other.inner))
    }

    /// Pointwise conjugate exponent `p / (p - 1)`.
    fn conjugate(&self) -> Self {
        PyExponentField {
            inner: spaces::conjugate(&self.inner),
        }
    }

    fn log_holder_constant(&self, mesh: &PyMesh) -> PyResult<f64> {
        check_len("exponent", self.inner.len(), mesh.inner.num_cells())?;
        Ok(log_holder_constant(&self.inner, &mesh.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ExponentField(len={}, p_minus={}, p_plus={})",
            self.inner.len(),
            self.inner.p_minus(),
            self.inner.p_plus()
        )
    }
}

#[pyclass(name = "ExponentSchedule", module = "pypxstab", frozen)]
pub struct PyExponentSchedule {
    inner: ExponentSchedule,
}

#[pymethods]
impl PyExponentSchedule {
    /// Schedule `p_i = base -/+ c1 / i`, `i = 1..count`. `direction` is
    /// `"increasing"` or `"decreasing"`.
    #[new]
    fn new(base: &PyExponentField, direction: &str, count: usize, c1: f64) -> PyResult<Self> {
        let direction: Direction = direction.parse().map_err(to_py)?;
        let inner = make_schedule(&base.inner, direction, count, c1).map_err(to_py)?;
        Ok(PyExponentSchedule { inner })
    }

    #[getter]
    fn direction(&self) -> String {
        self.inner.direction().to_string()
    }

    #[getter]
    fn offsets(&self) -> Vec<f64> {
        self.inner.offsets().to_vec()
    }

    #[getter]
    fn base(&self) -> PyExponentField {
        PyExponentField {
            inner: self.inner.base().clone(),
        }
    }

    /// Field at the 1-based index `i`.
    fn field(&self, i: usize) -> PyResult<PyExponentField> {
        if i == 0 || i > self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "index {i} outside 1..={}",
                self.inner.len()
            )));
        }
        Ok(PyExponentField {
            inner: self.inner.field(i).clone(),
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "GapReport", module = "pypxstab", frozen)]
#[derive(Clone, Copy)]
pub struct PyGapReport {
    #[pyo3(get)]
    lhs: f64,
    #[pyo3(get)]
    rhs: f64,
    #[pyo3(get)]
    satisfied: bool,
}

impl From<GapReport> for PyGapReport {
    fn from(r: GapReport) -> Self {
        PyGapReport {
            lhs: r.lhs,
            rhs: r.rhs,
            satisfied: r.satisfied,
        }
    }
}

#[pymethods]
impl PyGapReport {
    /// `rhs - lhs`
    #[getter]
    fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }

    fn __bool__(&self) -> bool {
        self.satisfied
    }

    fn __repr__(&self) -> String {
        format!(
            "GapReport(lhs={:e}, rhs={:e}, satisfied={})",
            self.lhs,
            self.rhs,
            if self.satisfied { "True" } else { "False" }
        )
    }
}

#[pyclass(name = "NormModularReport", module = "pypxstab", frozen)]
pub struct PyNormModularReport {
    #[pyo3(get)]
    gap: PyGapReport,
    /// `"unit_ball"` or `"outside"`.
    #[pyo3(get)]
    branch: &'static str,
    #[pyo3(get)]
    branch_gap: PyGapReport,
}

impl From<NormModularReport> for PyNormModularReport {
    fn from(r: NormModularReport) -> Self {
        PyNormModularReport {
            gap: r.gap.into(),
            branch: match r.branch {
                ModularBranch::UnitBall => "unit_ball",
                ModularBranch::Outside => "outside",
            },
            branch_gap: r.branch_gap.into(),
        }
    }
}

fn cells_aligned(f: &[f64], p: &PyExponentField, mesh: &PyMesh) -> PyResult<()> {
    check_len("cell values", f.len(), mesh.inner.num_cells())?;
    check_len("exponent", p.inner.len(), mesh.inner.num_cells())
}

fn nodes_aligned(u: &[f64], p: &PyExponentField, mesh: &PyMesh) -> PyResult<()> {
    check_len("nodal values", u.len(), mesh.inner.num_vertices())?;
    check_len("exponent", p.inner.len(), mesh.inner.num_cells())
}

/// `∫|f|^p` for cell values `f`.
#[pyfunction]
fn modular(f: Vec<f64>, p: &PyExponentField, mesh: &PyMesh) -> PyResult<f64> {
    cells_aligned(&f, p, mesh)?;
    Ok(spaces::modular(&f, &p.inner, &mesh.inner))
}

/// `∫ p^{-1}|f|^p` for cell values `f`.
#[pyfunction]
fn weighted_modular(f: Vec<f64>, p: &PyExponentField, mesh: &PyMesh) -> PyResult<f64> {
    cells_aligned(&f, p, mesh)?;
    Ok(spaces::weighted_modular(&f, &p.inner, &mesh.inner))
}

/// `∫|∇u|^p` for a nodal field `u`.
#[pyfunction]
fn gradient_modular(u: Vec<f64>, p: &PyExponentField, mesh: &PyMesh) -> PyResult<f64> {
    nodes_aligned(&u, p, mesh)?;
    Ok(spaces::gradient_modular(
        &ScalarField::new(u),
        &p.inner,
        &mesh.inner,
    ))
}

/// Luxemburg norm of cell values `f`.
#[pyfunction]
fn luxemburg_norm(f: Vec<f64>, p: &PyExponentField, mesh: &PyMesh) -> PyResult<f64> {
    cells_aligned(&f, p, mesh)?;
    Ok(spaces::luxemburg_norm(&f, &p.inner, &mesh.inner).value)
}

/// `‖u‖_p + ‖|∇u|‖_p` for a nodal field `u`, with `u` taken at the barycenters.
#[pyfunction]
fn sobolev_norm(u: Vec<f64>, p: &PyExponentField, mesh: &PyMesh) -> PyResult<f64> {
    nodes_aligned(&u, p, mesh)?;
    Ok(spaces::sobolev_norm(
        &ScalarField::new(u),
        &p.inner,
        &mesh.inner,
    ))
}

#[pyfunction]
fn holder_gap(
    u: Vec<f64>,
    v: Vec<f64>,
    p: &PyExponentField,
    mesh: &PyMesh,
) -> PyResult<PyGapReport> {
    cells_aligned(&u, p, mesh)?;
    cells_aligned(&v, p, mesh)?;
    Ok(spaces::holder_gap(&u, &v, &p.inner, &mesh.inner).into())
}

#[pyfunction]
#[pyo3(signature = (f, p, q, eps, mesh, weighted = false))]
fn epsilon_bound_gap(
    f: Vec<f64>,
    p: &PyExponentField,
    q: &PyExponentField,
    eps: f64,
    mesh: &PyMesh,
    weighted: bool,
) -> PyResult<PyGapReport> {
    cells_aligned(&f, p, mesh)?;
    cells_aligned(&f, q, mesh)?;
    spaces::epsilon_bound_gap(&f, &p.inner, &q.inner, eps, weighted, &mesh.inner)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn norm_modular_gap(
    u: Vec<f64>,
    p: &PyExponentField,
    mesh: &PyMesh,
) -> PyResult<PyNormModularReport> {
    cells_aligned(&u, p, mesh)?;
    Ok(spaces::norm_modular_gap(&u, &p.inner, &mesh.inner).into())
}

#[pyfunction]
fn embedding_constant(eps: f64, measure: f64) -> PyResult<f64> {
    spaces::embedding_constant(eps, measure).map_err(to_py)
}

#[pyfunction]
fn embedding_gap(
    g: Vec<f64>,
    p: &PyExponentField,
    q: &PyExponentField,
    eps: f64,
    mesh: &PyMesh,
) -> PyResult<PyGapReport> {
    cells_aligned(&g, p, mesh)?;
    cells_aligned(&g, q, mesh)?;
    spaces::embedding_gap(&g, &p.inner, &q.inner, eps, &mesh.inner)
        .map(Into::into)
        .map_err(to_py)
}

#[pyfunction]
fn convexity_gap(
    u: Vec<f64>,
    v: Vec<f64>,
    p: &PyExponentField,
    mesh: &PyMesh,
) -> PyResult<PyGapReport> {
    nodes_aligned(&u, p, mesh)?;
    nodes_aligned(&v, p, mesh)?;
    Ok(spaces::convexity_gap(
        &ScalarField::new(u),
        &ScalarField::new(v),
        &p.inner,
        &mesh.inner,
    )
    .into())
}

/// Runs a randomized inequality suite and returns
/// `(check_name, trial, GapReport)` rows.
#[pyfunction]
fn run_check(
    py: Python<'_>,
    suite: &str,
    trials: usize,
    seed: u64,
    mesh: &PyMesh,
) -> PyResult<Vec<(&'static str, usize, PyGapReport)>> {
    let suite: Suite = suite.parse().map_err(to_py)?;
    let rows = py
        .detach(|| run_suite(suite, trials, seed, &mesh.inner))
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.check_name, r.trial, r.report.into()))
        .collect())
}

#[pyclass(name = "DirichletProblem", module = "pypxstab", frozen)]
pub struct PyDirichletProblem {
    inner: DirichletProblem,
}

#[pymethods]
impl PyDirichletProblem {
    /// `p` is an `ExponentField` or an expression; `phi` and `f` are
    /// expressions or nodal values.
    #[new]
    fn new(mesh: &PyMesh, p: ExponentInput<'_>, phi: NodalInput, f: NodalInput) -> PyResult<Self> {
        let mesh = mesh.inner.clone();
        let p = match p {
            ExponentInput::Field(field) => field.inner.clone(),
            ExponentInput::Expr(src) => build_exponent(&src, &mesh).map_err(to_py)?,
        };
        let phi = phi.field(&mesh, "phi")?;
        let f = f.field(&mesh, "f")?;
        let inner = DirichletProblem::new(mesh, p, phi, f).map_err(to_py)?;
        Ok(PyDirichletProblem { inner })
    }

    #[getter]
    fn mesh(&self) -> PyMesh {
        PyMesh {
            inner: self.inner.mesh.clone(),
        }
    }

    #[getter]
    fn p(&self) -> PyExponentField {
        PyExponentField {
            inner: self.inner.p.clone(),
        }
    }

    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi.values().to_vec()
    }

    #[getter]
    fn f(&self) -> Vec<f64> {
        self.inner.source.values().to_vec()
    }

    /// Regularized energy of a homogeneous iterate `u`.
    #[pyo3(signature = (u, reg = 0.0))]
    fn energy(&self, u: Vec<f64>, reg: f64) -> PyResult<f64> {
        check_len("u", u.len(), self.inner.mesh.num_vertices())?;
        Ok(solver::energy(&ScalarField::new(u), &self.inner, reg))
    }

    /// Gradient of the regularized energy with respect to nodal values.
    #[pyo3(signature = (u, reg = 0.0))]
    fn energy_gradient(&self, u: Vec<f64>, reg: f64) -> PyResult<Vec<f64>> {
        check_len("u", u.len(), self.inner.mesh.num_vertices())?;
        Ok(solver::energy_gradient(&ScalarField::new(u), &self.inner, reg).into_values())
    }

    /// Max-norm of the unregularized weak residual of a solution `w`.
    fn weak_residual(&self, w: Vec<f64>) -> PyResult<f64> {
        check_len("w", w.len(), self.inner.mesh.num_vertices())?;
        Ok(solver::weak_residual(&ScalarField::new(w), &self.inner))
    }
}

#[pyclass(name = "SolverOptions", module = "pypxstab")]
#[derive(Clone, Copy)]
pub struct PySolverOptions {
    #[pyo3(get, set)]
    residual_tol: f64,
    #[pyo3(get, set)]
    max_iterations: usize,
    #[pyo3(get, set)]
    reg_initial: f64,
    #[pyo3(get, set)]
    reg_final: f64,
    #[pyo3(get, set)]
    armijo_c: f64,
    #[pyo3(get, set)]
    backtrack_factor: f64,
}

impl From<PySolverOptions> for SolverOptions {
    fn from(o: PySolverOptions) -> Self {
        SolverOptions {
            residual_tol: o.residual_tol,
            max_iterations: o.max_iterations,
            reg_initial: o.reg_initial,
            reg_final: o.reg_final,
            armijo_c: o.armijo_c,
            backtrack_factor: o.backtrack_factor,
        }
    }
}

impl Default for PySolverOptions {
    fn default() -> Self {
        let d = SolverOptions::default();
        PySolverOptions {
            residual_tol: d.residual_tol,
            max_iterations: d.max_iterations,
            reg_initial: d.reg_initial,
            reg_final: d.reg_final,
            armijo_c: d.armijo_c,
            backtrack_factor: d.backtrack_factor,
        }
    }
}

#[pymethods]
impl PySolverOptions {
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<&Bound<'_, pyo3::types::PyDict>>) -> PyResult<Self> {
        let mut opts = PySolverOptions::default();
        if let Some(kwargs) = kwargs {
            for (key, value) in kwargs.iter() {
                let key: String = key.extract()?;
                match key.as_str() {
                    "residual_tol" => opts.residual_tol = value.extract()?,
                    "max_iterations" => opts.max_iterations = value.extract()?,
                    "reg_initial" => opts.reg_initial = value.extract()?,
                    "reg_final" => opts.reg_final = value.extract()?,
                    "armijo_c" => opts.armijo_c = value.extract()?,
                    "backtrack_factor" => opts.backtrack_factor = value.extract()?,
                    _ => return Err(PyValueError::new_err(format!("unknown option `{key}`"))),
                }
            }
        }
        SolverOptions::from(opts).validate().map_err(to_py)?;
        Ok(opts)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", SolverOptions::from(*self))
    }
}

fn options(opts: Option<PyRef<'_, PySolverOptions>>) -> SolverOptions {
    opts.map(|o| SolverOptions::from(*o)).unwrap_or_default()
}

#[pyclass(name = "SolveResult", module = "pypxstab", frozen)]
pub struct PySolveResult {
    inner: SolveResult,
}

#[pymethods]
impl PySolveResult {
    /// Nodal solution `w = φ - u`.
    #[getter]
    fn w(&self) -> Vec<f64> {
        self.inner.w.values().to_vec()
    }

    /// Homogeneous part `u`.
    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.u.values().to_vec()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn final_energy(&self) -> f64 {
        self.inner.final_energy
    }

    #[getter]
    fn residual_norm(&self) -> f64 {
        self.inner.residual_norm
    }

    #[getter]
    fn final_regularization(&self) -> f64 {
        self.inner.final_regularization
    }

    #[getter]
    fn fallback_steps(&self) -> usize {
        self.inner.fallback_steps
    }

    /// `(regularization, energy)` after every accepted step.
    #[getter]
    fn energy_trace(&self) -> Vec<(f64, f64)> {
        self.inner.energy_trace.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(iterations={}, final_energy={:e}, residual_norm={:e})",
            self.inner.iterations, self.inner.final_energy, self.inner.residual_norm
        )
    }
}

#[pyfunction]
#[pyo3(signature = (problem, options = None, initial = None))]
fn solve_dirichlet(
    py: Python<'_>,
    problem: &PyDirichletProblem,
    options: Option<PyRef<'_, PySolverOptions>>,
    initial: Option<Vec<f64>>,
) -> PyResult<PySolveResult> {
    let opts = self::options(options);
    let problem = &problem.inner;
    let initial = match initial {
        Some(v) => {
            check_len("initial", v.len(), problem.mesh.num_vertices())?;
            ScalarField::new(v)
        }
        None => ScalarField::zeros(problem.mesh.num_vertices()),
    };
    let inner = py
        .detach(|| solver::solve_dirichlet_from(problem, &opts, &initial))
        .map_err(to_py)?;
    Ok(PySolveResult { inner })
}

#[pyclass(name = "StabilityRow", module = "pypxstab", frozen)]
pub struct PyStabilityRow {
    inner: StabilityRow,
}

#[pymethods]
impl PyStabilityRow {
    #[getter]
    fn i(&self) -> usize {
        self.inner.i
    }

    #[getter]
    fn sup_gap(&self) -> f64 {
        self.inner.sup_gap
    }

    #[getter(D_grad_modular)]
    fn d_grad_modular(&self) -> f64 {
        self.inner.d_grad_modular
    }

    #[getter]
    fn lux_norm_diff(&self) -> f64 {
        self.inner.lux_norm_diff
    }

    #[getter]
    fn energy_modular_i(&self) -> f64 {
        self.inner.energy_modular_i
    }

    #[getter]
    fn energy_modular_limit(&self) -> f64 {
        self.inner.energy_modular_limit
    }

    #[getter]
    fn modular_gap(&self) -> f64 {
        self.inner.modular_gap
    }

    #[getter]
    fn unweighted_modular_i(&self) -> f64 {
        self.inner.unweighted_modular_i
    }

    #[getter]
    fn unweighted_modular_limit(&self) -> f64 {
        self.inner.unweighted_modular_limit
    }

    #[getter]
    fn weighted_modular_gap(&self) -> f64 {
        self.inner.weighted_modular_gap()
    }

    /// The report columns, `i` excluded.
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "StabilityRow(i={}, sup_gap={:e}, D_grad_modular={:e})",
            self.inner.i, self.inner.sup_gap, self.inner.d_grad_modular
        )
    }
}

#[pyclass(name = "StabilityReport", module = "pypxstab", frozen)]
pub struct PyStabilityReport {
    inner: StabilityReport,
}

#[pymethods]
impl PyStabilityReport {
    #[classattr]
    fn header() -> Vec<&'static str> {
        REPORT_HEADER.to_vec()
    }

    #[getter]
    fn direction(&self) -> String {
        self.inner.direction.to_string()
    }

    #[getter]
    fn rows(&self) -> Vec<PyStabilityRow> {
        self.inner
            .rows
            .iter()
            .map(|r| PyStabilityRow { inner: *r })
            .collect()
    }

    #[getter]
    fn limit(&self) -> PySolveResult {
        PySolveResult {
            inner: self.inner.limit.clone(),
        }
    }

    #[getter]
    fn solutions(&self) -> Vec<PySolveResult> {
        self.inner
            .solutions
            .iter()
            .map(|s| PySolveResult { inner: s.clone() })
            .collect()
    }

    /// One column of the report by header name.
    fn column(&self, name: &str) -> PyResult<Vec<f64>> {
        let k = REPORT_HEADER
            .iter()
            .position(|h| *h == name)
            .ok_or_else(|| PyValueError::new_err(format!("unknown column `{name}`")))?;
        Ok(self
            .inner
            .rows
            .iter()
            .map(|r| {
                if k == 0 {
                    r.i as f64
                } else {
                    r.values()[k - 1]
                }
            })
            .collect())
    }

    fn __len__(&self) -> usize {
        self.inner.rows.len()
    }
}

#[pyfunction]
#[pyo3(signature = (problem, schedule, options = None))]
fn run_stability(
    py: Python<'_>,
    problem: &PyDirichletProblem,
    schedule: &PyExponentSchedule,
    options: Option<PyRef<'_, PySolverOptions>>,
) -> PyResult<PyStabilityReport> {
    let opts = self::options(options);
    let (problem, schedule) = (&problem.inner, &schedule.inner);
    let inner = py
        .detach(|| stability::run_stability(problem, schedule, &opts))
        .map_err(to_py)?;
    Ok(PyStabilityReport { inner })
}

#[pymodule]
fn pypxstab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add(
        "NonConvergenceError",
        m.py().get_type::<NonConvergenceError>(),
    )?;
    m.add_class::<PyMesh>()?;
    m.add_class::<PyExponentField>()?;
    m.add_class::<PyExponentSchedule>()?;
    m.add_class::<PyGapReport>()?;
    m.add_class::<PyNormModularReport>()?;
    m.add_class::<PyDirichletProblem>()?;
    m.add_class::<PySolverOptions>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyStabilityRow>()?;
    m.add_class::<PyStabilityReport>()?;
    m.add_function(wrap_pyfunction!(modular, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_modular, m)?)?;
    m.add_function(wrap_pyfunction!(gradient_modular, m)?)?;
    m.add_function(wrap_pyfunction!(luxemburg_norm, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(holder_gap, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_bound_gap, m)?)?;
    m.add_function(wrap_pyfunction!(norm_modular_gap, m)?)?;
    m.add_function(wrap_pyfunction!(embedding_constant, m)?)?;
    m.add_function(wrap_pyfunction!(embedding_gap, m)?)?;
    m.add_function(wrap_pyfunction!(convexity_gap, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add_function(wrap_pyfunction!(solve_dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(run_stability, m)?)?;
    Ok(())
}
