//! Dirichlet problem for the p(x)-Laplacian as convex energy minimization.
//!
//! With boundary datum `φ` and source density `f`, the homogeneous part `u`
//! (zero on the boundary) minimizes
//!
//! ```text
//! E(u) = Σ_T |T| p_T^{-1} (|∇(u-φ)_T|² + reg²)^{p_T/2} - ∫ f u dx
//! ```
//!
//! and the solution of `div(|∇w|^{p-2}∇w) = f`, `w = φ` on the boundary, is
//! `w = φ - u`. The minimization is a damped Newton method with Armijo
//! backtracking, run for a decreasing sequence of regularizations.

use nalgebra::DVector;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::mesh::{Mesh, ScalarField};

/// Relative residual every Newton linear solve has to reach.
pub const LINEAR_TOLERANCE: f64 = 1e-10;

/// Smallest admissible line-search step, relative to the Newton direction.
const MIN_STEP: f64 = 1e-14;

/// Extra Newton steps taken at the final regularization once the residual
/// tolerance is met; they stop early when the update is at rounding level.
const POLISH_STEPS: usize = 3;
const POLISH_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct DirichletProblem {
    pub mesh: Mesh,
    pub p: ExponentField,
    /// Boundary datum, given on every vertex; only its trace enters `w`.
    pub phi: ScalarField,
    /// Source density `f`, paired with `u` as `∫ f u dx`.
    pub source: ScalarField,
}

impl DirichletProblem {
    pub fn new(
        mesh: Mesh,
        p: ExponentField,
        phi: ScalarField,
        source: ScalarField,
    ) -> Result<Self> {
        if p.len() != mesh.num_cells() {
            return Err(Error::InvalidArgument(format!(
                "exponent has {} samples, mesh has {} cells",
                p.len(),
                mesh.num_cells()
            )));
        }
        for (name, field) in [("phi", &phi), ("source", &source)] {
            if field.len() != mesh.num_vertices() {
                return Err(Error::InvalidArgument(format!(
                    "{name} has {} values, mesh has {} vertices",
                    field.len(),
                    mesh.num_vertices()
                )));
            }
            if !field.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} has non-finite values"
                )));
            }
        }
        Ok(DirichletProblem {
            mesh,
            p,
            phi,
            source,
        })
    }

    /// Same mesh and data with another exponent.
    pub fn with_exponent(&self, p: ExponentField) -> Result<Self> {
        Self::new(self.mesh.clone(), p, self.phi.clone(), self.source.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub residual_tol: f64,
    /// Newton iterations allowed per regularization stage.
    pub max_iterations: usize,
    pub reg_initial: f64,
    pub reg_final: f64,
    pub armijo_c: f64,
    pub backtrack_factor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            residual_tol: 1e-8,
            max_iterations: 200,
            reg_initial: 1e-2,
            reg_final: 1e-8,
            armijo_c: 1e-4,
            backtrack_factor: 0.5,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("residual_tol", self.residual_tol),
            ("reg_initial", self.reg_initial),
            ("reg_final", self.reg_final),
            ("armijo_c", self.armijo_c),
            ("backtrack_factor", self.backtrack_factor),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be > 0, got {value}"
                )));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
        }
        if self.reg_final > self.reg_initial {
            return Err(Error::InvalidArgument(
                "reg_final must not exceed reg_initial".into(),
            ));
        }
        if self.armijo_c >= 1.0 || self.backtrack_factor >= 1.0 {
            return Err(Error::InvalidArgument(
                "armijo_c and backtrack_factor must be < 1".into(),
            ));
        }
        Ok(())
    }

    /// The continuation sequence `reg_initial, reg_initial/10, ...`, ending
    /// at the first value `<= reg_final` (clamped to `reg_final`).
    pub fn regularizations(&self) -> Vec<f64> {
        let mut regs = vec![];
        let mut reg = self.reg_initial;
        while reg > self.reg_final * (1.0 + 1e-12) {
            regs.push(reg);
            reg /= 10.0;
        }
        regs.push(self.reg_final);
        regs
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    /// `w = φ - u`
    pub w: ScalarField,
    /// Homogeneous minimizer, zero on boundary vertices.
    pub u: ScalarField,
    /// Newton iterations summed over all stages.
    pub iterations: usize,
    pub final_energy: f64,
    /// `max |∂E/∂u_h|` over interior hat functions at the final regularization.
    pub residual_norm: f64,
    pub final_regularization: f64,
    /// Gradient steps taken because the Newton step failed.
    pub fallback_steps: usize,
    /// `(reg, energy)` at the start of each stage and after each accepted step.
    pub energy_trace: Vec<(f64, f64)>,
}

struct EnergyParts {
    modular: f64,
    pairing: f64,
}

impl EnergyParts {
    fn value(&self) -> f64 {
        self.modular - self.pairing
    }

    /// Rounding noise in `value`.
    fn noise(&self) -> f64 {
        64.0 * f64::EPSILON * (self.modular.abs() + self.pairing.abs())
    }
}

/// Cell gradients of `u - φ`.
fn shifted_gradient(u: &ScalarField, problem: &DirichletProblem) -> crate::mesh::CellVectorField {
    problem.mesh.gradient(&u.sub(&problem.phi))
}

fn energy_parts(u: &ScalarField, problem: &DirichletProblem, reg: f64) -> EnergyParts {
    let mesh = &problem.mesh;
    let grads = shifted_gradient(u, problem);
    let reg2 = reg * reg;
    let modular = grads
        .iter()
        .zip(problem.p.samples())
        .zip(mesh.measures())
        .map(|((g, &p), &m)| {
            let s: f64 = g.iter().map(|c| c * c).sum::<f64>() + reg2;
            m * s.powf(0.5 * p) / p
        })
        .sum();
    let f_cells = mesh.cell_values(&problem.source);
    let u_cells = mesh.cell_values(u);
    let pairing = f_cells
        .iter()
        .zip(&u_cells)
        .zip(mesh.measures())
        .map(|((f, u), m)| f * u * m)
        .sum();
    EnergyParts { modular, pairing }
}

/// Regularized Dirichlet energy of the homogeneous part `u`. At `reg = 0`
/// this is `∫ p^{-1}|∇(u-φ)|^p - ∫ f u`.
pub fn energy(u: &ScalarField, problem: &DirichletProblem, reg: f64) -> f64 {
    energy_parts(u, problem, reg).value()
}

/// `(|g|² + reg²)^{(p-2)/2}`, with the flux convention `0^{p-2}·0 = 0`.
fn flux_coefficient(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.powf(0.5 * p - 1.0)
    }
}

/// Exact gradient of [`energy`] with respect to the interior nodal values;
/// boundary entries are zero.
pub fn energy_gradient(u: &ScalarField, problem: &DirichletProblem, reg: f64) -> ScalarField {
    let mesh = &problem.mesh;
    let d = mesh.dim();
    let grads = shifted_gradient(u, problem);
    let f_cells = mesh.cell_values(&problem.source);
    let reg2 = reg * reg;
    let share = 1.0 / (d + 1) as f64;
    let mut out = vec![0.0; mesh.num_vertices()];
    for (t, f_t) in f_cells.iter().enumerate() {
        let g = grads.get(t);
        let m = mesh.measures()[t];
        let s: f64 = g.iter().map(|c| c * c).sum::<f64>() + reg2;
        let coef = flux_coefficient(s, problem.p.samples()[t]);
        for (local, &v) in mesh.cell(t).iter().enumerate() {
            if mesh.is_boundary(v) {
                continue;
            }
            let phi = mesh.basis_gradient(t, local);
            let dot: f64 = g.iter().zip(phi).map(|(a, b)| a * b).sum();
            out[v] += m * (coef * dot - f_t * share);
        }
    }
    ScalarField::new(out)
}

/// `max_h |−∫|∇w|^{p-2}∇w·∇h dx − ∫ f h dx|` over interior hat functions `h`.
pub fn weak_residual(w: &ScalarField, problem: &DirichletProblem) -> f64 {
    let u = problem.phi.sub(w);
    max_interior(&energy_gradient(&u, problem, 0.0), &problem.mesh)
}

fn max_interior(field: &ScalarField, mesh: &Mesh) -> f64 {
    mesh.interior_vertices()
        .map(|v| field.values()[v].abs())
        .fold(0.0, f64::max)
}

/// Interior vertex numbering for the Newton systems.
struct Dofs {
    vertices: Vec<usize>,
    index: Vec<Option<usize>>,
}

impl Dofs {
    fn new(mesh: &Mesh) -> Self {
        let vertices: Vec<usize> = mesh.interior_vertices().collect();
        let mut index = vec![None; mesh.num_vertices()];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = Some(i);
        }
        Dofs { vertices, index }
    }

    fn len(&self) -> usize {
        self.vertices.len()
    }
}

/// Hessian of the regularized energy restricted to the interior dofs.
///
/// On each cell the integrand `g ↦ (|g|²+reg²)^{p/2}/p` has Hessian
/// `a·I + b·g gᵀ`, `a = s^{p/2-1}`, `b = (p-2)s^{p/2-2}`, `s = |g|²+reg²`.
fn assemble_hessian(
    u: &ScalarField,
    problem: &DirichletProblem,
    reg: f64,
    dofs: &Dofs,
) -> CscMatrix<f64> {
    let mesh = &problem.mesh;
    let d = mesh.dim();
    let grads = shifted_gradient(u, problem);
    let n = dofs.len();
    let mut coo = CooMatrix::new(n, n);
    let reg2 = reg * reg;
    for t in 0..mesh.num_cells() {
        let g = grads.get(t);
        let p = problem.p.samples()[t];
        let m = mesh.measures()[t];
        let s: f64 = g.iter().map(|c| c * c).sum::<f64>() + reg2;
        let a = s.powf(0.5 * p - 1.0);
        let b = (p - 2.0) * s.powf(0.5 * p - 2.0);
        let cell = mesh.cell(t);
        for (la, &va) in cell.iter().enumerate() {
            let Some(ia) = dofs.index[va] else { continue };
            let ga = mesh.basis_gradient(t, la);
            let ga_g: f64 = ga.iter().zip(g).map(|(x, y)| x * y).sum();
            for (lb, &vb) in cell.iter().enumerate() {
                let Some(ib) = dofs.index[vb] else { continue };
                let gb = mesh.basis_gradient(t, lb);
                let gb_g: f64 = gb.iter().zip(g).map(|(x, y)| x * y).sum();
                let ga_gb: f64 = (0..d).map(|k| ga[k] * gb[k]).sum();
                coo.push(ia, ib, m * (a * ga_gb + b * ga_g * gb_g));
            }
        }
    }
    CscMatrix::from(&coo)
}

fn csc_mul(matrix: &CscMatrix<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut y = DVector::zeros(matrix.nrows());
    for (i, j, v) in matrix.triplet_iter() {
        y[i] += v * x[j];
    }
    y
}

/// Solves `K x = b` by sparse Cholesky plus iterative refinement. `None` if
/// `K` is not numerically positive definite or the residual target is missed.
fn solve_spd(matrix: &CscMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let chol = CscCholesky::factor(matrix).ok()?;
    let b_norm = rhs.norm();
    if b_norm == 0.0 {
        return Some(DVector::zeros(rhs.len()));
    }
    let mut x: DVector<f64> = chol.solve(rhs).column(0).into_owned();
    for _ in 0..4 {
        let r = rhs - csc_mul(matrix, &x);
        if r.norm() <= LINEAR_TOLERANCE * b_norm {
            return x.iter().all(|v| v.is_finite()).then_some(x);
        }
        let dx: DVector<f64> = chol.solve(&r).column(0).into_owned();
        x += dx;
    }
    None
}

fn gather(field: &ScalarField, dofs: &Dofs) -> DVector<f64> {
    DVector::from_iterator(dofs.len(), dofs.vertices.iter().map(|&v| field.values()[v]))
}

fn step(u: &ScalarField, direction: &DVector<f64>, alpha: f64, dofs: &Dofs) -> ScalarField {
    let mut next = u.clone();
    let values = next.values_mut();
    for (i, &v) in dofs.vertices.iter().enumerate() {
        values[v] += alpha * direction[i];
    }
    next
}

/// Backtracking line search along `direction`. Returns the accepted iterate
/// and its energy, or `None` once the step falls below `min_alpha`.
#[allow(clippy::too_many_arguments)]
fn line_search(
    u: &ScalarField,
    current: &EnergyParts,
    direction: &DVector<f64>,
    slope: f64,
    problem: &DirichletProblem,
    reg: f64,
    opts: &SolverOptions,
    dofs: &Dofs,
    min_alpha: f64,
) -> Option<(ScalarField, EnergyParts)> {
    let e0 = current.value();
    let mut alpha = 1.0;
    while alpha >= min_alpha {
        let candidate = step(u, direction, alpha, dofs);
        let parts = energy_parts(&candidate, problem, reg);
        let e = parts.value();
        let noise = current.noise().max(parts.noise());
        if e.is_finite() && e <= e0 + opts.armijo_c * alpha * slope + noise {
            return Some((candidate, parts));
        }
        alpha *= opts.backtrack_factor;
    }
    None
}

/// Solves the Dirichlet problem starting from `u = 0`.
pub fn solve_dirichlet(problem: &DirichletProblem, opts: &SolverOptions) -> Result<SolveResult> {
    let start = ScalarField::zeros(problem.mesh.num_vertices());
    solve_dirichlet_from(problem, opts, &start)
}

/// Solves the Dirichlet problem from the homogeneous initial iterate
/// `initial`; its boundary values are ignored.
pub fn solve_dirichlet_from(
    problem: &DirichletProblem,
    opts: &SolverOptions,
    initial: &ScalarField,
) -> Result<SolveResult> {
    opts.validate()?;
    let mesh = &problem.mesh;
    if initial.len() != mesh.num_vertices() {
        return Err(Error::InvalidArgument(
            "initial iterate has the wrong length".into(),
        ));
    }
    let dofs = Dofs::new(mesh);
    let mut u = initial.clone();
    for (v, value) in u.values_mut().iter_mut().enumerate() {
        if mesh.is_boundary(v) {
            *value = 0.0;
        }
    }

    let mut iterations = 0;
    let mut fallback_steps = 0;
    let mut energy_trace = vec![];
    let mut residual = f64::INFINITY;
    let regs = opts.regularizations();
    let final_reg = *regs.last().unwrap();

    for &reg in &regs {
        let mut parts = energy_parts(&u, problem, reg);
        energy_trace.push((reg, parts.value()));
        let mut stage_iterations = 0;
        let polish = reg == final_reg;
        let mut polish_steps = 0;
        let mut last_update = f64::INFINITY;
        loop {
            let grad = energy_gradient(&u, problem, reg);
            residual = max_interior(&grad, mesh);
            let mut polishing = false;
            if residual <= opts.residual_tol {
                let scale = 1.0 + u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if !polish || polish_steps >= POLISH_STEPS || last_update <= POLISH_FLOOR * scale {
                    break;
                }
                polish_steps += 1;
                polishing = true;
            }
            if stage_iterations >= opts.max_iterations || dofs.len() == 0 {
                if polishing {
                    break;
                }
                return Err(Error::NonConvergence {
                    iterations: iterations + stage_iterations,
                    residual,
                    regularization: reg,
                    last_iterate: u.into_values(),
                });
            }
            stage_iterations += 1;

            let g = gather(&grad, &dofs);
            let hessian = assemble_hessian(&u, problem, reg, &dofs);
            let newton = solve_spd(&hessian, &(-&g)).and_then(|d| {
                let slope = g.dot(&d);
                (slope < 0.0).then_some((d, slope))
            });
            let accepted = newton.and_then(|(d, slope)| {
                line_search(&u, &parts, &d, slope, problem, reg, opts, &dofs, MIN_STEP)
            });
            let (next, next_parts) = match accepted {
                Some(found) => found,
                None if polishing => break,
                None => {
                    fallback_steps += 1;
                    let d = -&g;
                    let slope = -g.norm_squared();
                    match line_search(&u, &parts, &d, slope, problem, reg, opts, &dofs, 1e-30) {
                        Some(found) => found,
                        None => {
                            return Err(Error::NonConvergence {
                                iterations: iterations + stage_iterations,
                                residual,
                                regularization: reg,
                                last_iterate: u.into_values(),
                            })
                        }
                    }
                }
            };
            last_update = next.max_abs_diff(&u);
            u = next;
            parts = next_parts;
            energy_trace.push((reg, parts.value()));
        }
        iterations += stage_iterations;
    }

    let w = problem.phi.sub(&u);
    Ok(SolveResult {
        w,
        final_energy: energy(&u, problem, final_reg),
        u,
        iterations,
        residual_norm: residual,
        final_regularization: final_reg,
        fallback_steps,
        energy_trace,
    })
}
