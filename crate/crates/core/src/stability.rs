//! Exponent-stability experiments: solve the Dirichlet problem for every
//! exponent of a monotone schedule and measure how far each solution is from
//! the solution at the limit exponent.

use crate::error::{Error, Result};
use crate::exponent::{Direction, ExponentField, ExponentSchedule};
use crate::mesh::{Mesh, ScalarField};
use crate::modular::{gradient_modular, luxemburg_norm, modular, weighted_modular};
use crate::solver::{solve_dirichlet, DirichletProblem, SolveResult, SolverOptions};

/// Column names of the report CSV, in order.
pub const REPORT_HEADER: [&str; 7] = [
    "i",
    "sup_gap",
    "D_grad_modular",
    "lux_norm_diff",
    "energy_modular_i",
    "energy_modular_limit",
    "modular_gap",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub i: usize,
    /// `‖p_i - p‖_∞`
    pub sup_gap: f64,
    /// `∫|∇(w_i - w)|^{p_i}` (increasing) or `∫|∇(w_i - w)|^p` (decreasing)
    pub d_grad_modular: f64,
    /// `‖w_i - w‖_{p_I}` at the reference index `I = 1`
    pub lux_norm_diff: f64,
    /// `∫ p_i^{-1} |∇(u_i - φ)|^{p_i}`
    pub energy_modular_i: f64,
    /// `∫ p^{-1} |∇(u - φ)|^p`
    pub energy_modular_limit: f64,
    /// `|∫|∇(u_i - φ)|^{p_i} - ∫|∇(u - φ)|^p|`
    pub modular_gap: f64,
    /// `∫|∇(u_i - φ)|^{p_i}`
    pub unweighted_modular_i: f64,
    /// `∫|∇(u - φ)|^p`
    pub unweighted_modular_limit: f64,
}

impl StabilityRow {
    /// `|energy_modular_i - energy_modular_limit|`
    pub fn weighted_modular_gap(&self) -> f64 {
        (self.energy_modular_i - self.energy_modular_limit).abs()
    }

    /// Values in [`REPORT_HEADER`] order, `i` excluded.
    pub fn values(&self) -> [f64; 6] {
        [
            self.sup_gap,
            self.d_grad_modular,
            self.lux_norm_diff,
            self.energy_modular_i,
            self.energy_modular_limit,
            self.modular_gap,
        ]
    }
}

/// One report row comparing `w_i` (exponent `p_i`) against the limit
/// solution `w` (exponent `p`). `reference` is the exponent of the Luxemburg
/// norm used for `lux_norm_diff`.
#[allow(clippy::too_many_arguments)]
pub fn diagnostics_row(
    i: usize,
    w_i: &ScalarField,
    w: &ScalarField,
    p_i: &ExponentField,
    p: &ExponentField,
    reference: &ExponentField,
    direction: Direction,
    mesh: &Mesh,
) -> StabilityRow {
    let diff = w_i.sub(w);
    let d_exponent = match direction {
        Direction::Increasing => p_i,
        Direction::Decreasing => p,
    };
    // |∇(u - φ)| = |∇w| since w = φ - u.
    let grad_i = mesh.gradient(w_i).norms();
    let grad = mesh.gradient(w).norms();
    let unweighted_i = modular(&grad_i, p_i, mesh);
    let unweighted = modular(&grad, p, mesh);
    StabilityRow {
        i,
        sup_gap: p_i.sup_distance(p),
        d_grad_modular: gradient_modular(&diff, d_exponent, mesh),
        lux_norm_diff: luxemburg_norm(&mesh.cell_values(&diff), reference, mesh).value,
        energy_modular_i: weighted_modular(&grad_i, p_i, mesh),
        energy_modular_limit: weighted_modular(&grad, p, mesh),
        modular_gap: (unweighted_i - unweighted).abs(),
        unweighted_modular_i: unweighted_i,
        unweighted_modular_limit: unweighted,
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub direction: Direction,
    pub rows: Vec<StabilityRow>,
    pub limit: SolveResult,
    /// Solutions for schedule indices `1..=N`, in order.
    pub solutions: Vec<SolveResult>,
}

impl StabilityReport {
    pub fn column(&self, f: impl Fn(&StabilityRow) -> f64) -> Vec<f64> {
        self.rows.iter().map(f).collect()
    }
}

/// Solves the limit problem (exponent `schedule.base()`) and every scheduled
/// problem, and tabulates one [`StabilityRow`] per schedule index.
///
/// Scheduled solves are independent and run on scoped threads; the rows do
/// not depend on scheduling.
pub fn run_stability(
    problem: &DirichletProblem,
    schedule: &ExponentSchedule,
    opts: &SolverOptions,
) -> Result<StabilityReport> {
    if schedule.base() != &problem.p {
        return Err(Error::InvalidArgument(
            "schedule base differs from the problem exponent".into(),
        ));
    }
    let limit = solve_dirichlet(problem, opts)?;

    let outcomes: Vec<Result<SolveResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = schedule
            .fields()
            .iter()
            .map(|p_i| {
                scope.spawn(move || {
                    let scheduled = problem.with_exponent(p_i.clone())?;
                    solve_dirichlet(&scheduled, opts)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scheduled solve panicked"))
            .collect()
    });

    let mut solutions = Vec::with_capacity(outcomes.len());
    for (k, outcome) in outcomes.into_iter().enumerate() {
        solutions.push(outcome.map_err(|e| Error::Schedule {
            index: k + 1,
            source: Box::new(e),
        })?);
    }

    let reference = schedule.field(1);
    let rows = solutions
        .iter()
        .enumerate()
        .map(|(k, sol)| {
            diagnostics_row(
                k + 1,
                &sol.w,
                &limit.w,
                schedule.field(k + 1),
                schedule.base(),
                reference,
                schedule.direction(),
                &problem.mesh,
            )
        })
        .collect();

    Ok(StabilityReport {
        direction: schedule.direction(),
        rows,
        limit,
        solutions,
    })
}
