//! Modulars and Luxemburg norms for variable exponents, plus the inequality
//! suite relating them. Every integral is the one-point barycentric
//! quadrature of [`Mesh::integrate`], so the inequalities are checked on the
//! discrete measure space the mesh defines.

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::mesh::{Mesh, ScalarField};

/// Relative slack absorbed by [`GapReport`] comparisons.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// Relative bracket width at which the norm bisection may stop.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormResult {
    pub value: f64,
    /// Modular of `f / value`; zero when `value == 0`.
    pub modular_at_value: f64,
    pub bisection_iterations: usize,
}

/// Outcome of checking `lhs <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

impl GapReport {
    /// `lhs <= rhs` up to `GAP_TOLERANCE · max(1, |rhs|)`.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let satisfied = lhs <= rhs + GAP_TOLERANCE * rhs.abs().max(1.0);
        GapReport {
            lhs,
            rhs,
            satisfied,
        }
    }

    /// Strict `lhs < rhs`.
    pub fn strict(lhs: f64, rhs: f64) -> Self {
        GapReport {
            lhs,
            rhs,
            satisfied: lhs < rhs,
        }
    }

    pub fn gap(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Which bound of the norm–modular estimate is active.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModularBranch {
    /// modular <= 1, the exponent `1/p_plus` suffices
    UnitBall,
    /// modular > 1, the exponent `1/p_minus` applies
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormModularReport {
    pub gap: GapReport,
    pub branch: ModularBranch,
    /// `‖u‖ <= modular^(1/p_plus)` when `branch == UnitBall`,
    /// `‖u‖ <= modular^(1/p_minus)` otherwise.
    pub branch_gap: GapReport,
}

fn check_aligned(values: usize, p: &ExponentField, mesh: &Mesh) {
    assert_eq!(values, mesh.num_cells(), "one value per cell expected");
    assert_eq!(
        p.len(),
        mesh.num_cells(),
        "one exponent sample per cell expected"
    );
}

/// `∫ |f|^p dx`
pub fn modular(f_cells: &[f64], p: &ExponentField, mesh: &Mesh) -> f64 {
    check_aligned(f_cells.len(), p, mesh);
    f_cells
        .iter()
        .zip(p.samples())
        .zip(mesh.measures())
        .map(|((f, p), m)| f.abs().powf(*p) * m)
        .sum()
}

/// `∫ p^{-1} |f|^p dx`
pub fn weighted_modular(f_cells: &[f64], p: &ExponentField, mesh: &Mesh) -> f64 {
    check_aligned(f_cells.len(), p, mesh);
    f_cells
        .iter()
        .zip(p.samples())
        .zip(mesh.measures())
        .map(|((f, p), m)| f.abs().powf(*p) / p * m)
        .sum()
}

/// `∫ |∇u|^p dx` for a nodal field.
pub fn gradient_modular(u: &ScalarField, p: &ExponentField, mesh: &Mesh) -> f64 {
    modular(&mesh.gradient(u).norms(), p, mesh)
}

/// `∫ p^{-1} |∇u|^p dx`, the Dirichlet energy without source term.
pub fn weighted_gradient_modular(u: &ScalarField, p: &ExponentField, mesh: &Mesh) -> f64 {
    weighted_modular(&mesh.gradient(u).norms(), p, mesh)
}

fn scaled_modular(abs_f: &[f64], p: &ExponentField, mesh: &Mesh, lambda: f64) -> f64 {
    abs_f
        .iter()
        .zip(p.samples())
        .zip(mesh.measures())
        .map(|((f, p), m)| (f / lambda).powf(*p) * m)
        .sum()
}

/// Luxemburg norm `inf { λ > 0 : ∫ (|f|/λ)^p dx <= 1 }`.
///
/// The map `λ ↦ modular(f/λ)` is continuous and strictly decreasing for
/// `f ≠ 0`, so the root is bracketed by doubling/halving from
/// `max|f| · |Ω|^{1/p_plus}` and then bisected. The bisection runs until the
/// bracket cannot shrink further in floating point, which is well inside
/// [`NORM_TOLERANCE`]. The upper end of the bracket is returned, so
/// `modular_at_value <= 1` always.
pub fn luxemburg_norm(f_cells: &[f64], p: &ExponentField, mesh: &Mesh) -> NormResult {
    check_aligned(f_cells.len(), p, mesh);
    let abs_f: Vec<f64> = f_cells.iter().map(|f| f.abs()).collect();
    let max_f = abs_f.iter().copied().fold(0.0, f64::max);
    if max_f == 0.0 {
        return NormResult {
            value: 0.0,
            modular_at_value: 0.0,
            bisection_iterations: 0,
        };
    }
    let rho = |lambda: f64| scaled_modular(&abs_f, p, mesh, lambda);

    let guess = max_f * mesh.total_measure().powf(1.0 / p.p_plus());
    let (mut lo, mut hi) = (guess, guess);
    let mut rho_hi = rho(hi);
    if rho_hi > 1.0 {
        while rho_hi > 1.0 {
            lo = hi;
            hi *= 2.0;
            rho_hi = rho(hi);
        }
    } else {
        loop {
            lo *= 0.5;
            let r = rho(lo);
            if r > 1.0 {
                break;
            }
            hi = lo;
            rho_hi = r;
        }
    }

    let mut iterations = 0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
        iterations += 1;
        let r = rho(mid);
        if r > 1.0 {
            lo = mid;
        } else {
            hi = mid;
            rho_hi = r;
        }
    }
    debug_assert!(hi - lo <= NORM_TOLERANCE * hi);
    NormResult {
        value: hi,
        modular_at_value: rho_hi,
        bisection_iterations: iterations,
    }
}

/// `‖u‖_p + ‖|∇u|‖_p`, with `u` taken at the barycenters.
pub fn sobolev_norm(u: &ScalarField, p: &ExponentField, mesh: &Mesh) -> f64 {
    let values = mesh.cell_values(u);
    let grads = mesh.gradient(u).norms();
    luxemburg_norm(&values, p, mesh).value + luxemburg_norm(&grads, p, mesh).value
}

/// Nodewise conjugate exponent `q = p / (p - 1)`.
pub fn conjugate(p: &ExponentField) -> ExponentField {
    ExponentField::new(p.samples().iter().map(|&p| p / (p - 1.0)).collect())
        .expect("conjugate of an exponent > 1 is an exponent > 1")
}

/// Hölder: `∫|uv| <= 2 ‖u‖_p ‖v‖_q` with `q` the conjugate of `p`.
pub fn holder_gap(u_cells: &[f64], v_cells: &[f64], p: &ExponentField, mesh: &Mesh) -> GapReport {
    let q = conjugate(p);
    let uv: Vec<f64> = u_cells
        .iter()
        .zip(v_cells)
        .map(|(u, v)| (u * v).abs())
        .collect();
    let lhs = mesh.integrate(&uv);
    let rhs =
        2.0 * luxemburg_norm(u_cells, p, mesh).value * luxemburg_norm(v_cells, &q, mesh).value;
    GapReport::new(lhs, rhs)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "eps must lie in (0, 1), got {eps}"
        )))
    }
}

fn check_ordering(p: &ExponentField, q: &ExponentField, eps: f64) -> Result<()> {
    for (node, (&pv, &qv)) in p.samples().iter().zip(q.samples()).enumerate() {
        if !(pv <= qv && qv <= pv + eps) {
            return Err(Error::ExponentOrdering { node });
        }
    }
    Ok(())
}

/// The ε-estimate for `p <= q <= p + ε`:
///
/// * unweighted: `∫|f|^p <= ε|Ω| + ε^{-ε} ∫|f|^q`
/// * weighted: `∫p^{-1}|f|^p <= ε|Ω| + ε^{-ε}(1+ε) ∫q^{-1}|f|^q`
pub fn epsilon_bound_gap(
    f_cells: &[f64],
    p: &ExponentField,
    q: &ExponentField,
    eps: f64,
    weighted: bool,
    mesh: &Mesh,
) -> Result<GapReport> {
    check_eps(eps)?;
    check_ordering(p, q, eps)?;
    let omega = mesh.total_measure();
    let scale = eps.powf(-eps);
    let report = if weighted {
        GapReport::new(
            weighted_modular(f_cells, p, mesh),
            eps * omega + scale * (1.0 + eps) * weighted_modular(f_cells, q, mesh),
        )
    } else {
        GapReport::new(
            modular(f_cells, p, mesh),
            eps * omega + scale * modular(f_cells, q, mesh),
        )
    };
    Ok(report)
}

/// `‖u‖_p <= max(ρ^{1/p_plus}, ρ^{1/p_minus})`, `ρ = ∫|u|^p`.
pub fn norm_modular_gap(u_cells: &[f64], p: &ExponentField, mesh: &Mesh) -> NormModularReport {
    let rho = modular(u_cells, p, mesh);
    let norm = luxemburg_norm(u_cells, p, mesh).value;
    let upper = rho.powf(1.0 / p.p_plus());
    let lower = rho.powf(1.0 / p.p_minus());
    let (branch, bound) = if rho <= 1.0 {
        (ModularBranch::UnitBall, upper)
    } else {
        (ModularBranch::Outside, lower)
    };
    NormModularReport {
        gap: GapReport::new(norm, upper.max(lower)),
        branch,
        branch_gap: GapReport::new(norm, bound),
    }
}

/// `ε·|Ω| + ε^{-ε}`, the constant of the embedding `‖g‖_p <= C ‖g‖_q` for
/// `p <= q <= p + ε`.
pub fn embedding_constant(eps: f64, measure: f64) -> Result<f64> {
    check_eps(eps)?;
    if measure.is_nan() || measure <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "measure must be > 0, got {measure}"
        )));
    }
    Ok(eps * measure + eps.powf(-eps))
}

/// `‖g‖_p <= (ε|Ω| + ε^{-ε}) ‖g‖_q` for `p <= q <= p + ε`.
pub fn embedding_gap(
    g_cells: &[f64],
    p: &ExponentField,
    q: &ExponentField,
    eps: f64,
    mesh: &Mesh,
) -> Result<GapReport> {
    let c = embedding_constant(eps, mesh.total_measure())?;
    check_ordering(p, q, eps)?;
    Ok(GapReport::new(
        luxemburg_norm(g_cells, p, mesh).value,
        c * luxemburg_norm(g_cells, q, mesh).value,
    ))
}

/// Midpoint convexity of `ρ_p(g) = ∫p^{-1}|∇g|^p`:
/// `ρ((u+v)/2) <= (ρ(u)+ρ(v))/2`, strict whenever `ρ((u-v)/2) > 0`.
pub fn convexity_gap(
    u: &ScalarField,
    v: &ScalarField,
    p: &ExponentField,
    mesh: &Mesh,
) -> GapReport {
    let mid = u.axpby(0.5, v, 0.5);
    let half_diff = u.axpby(0.5, v, -0.5);
    let lhs = weighted_gradient_modular(&mid, p, mesh);
    let rhs = 0.5 * (weighted_gradient_modular(u, p, mesh) + weighted_gradient_modular(v, p, mesh));
    if weighted_gradient_modular(&half_diff, p, mesh) > 0.0 {
        GapReport::strict(lhs, rhs)
    } else {
        GapReport::new(lhs, rhs)
    }
}
