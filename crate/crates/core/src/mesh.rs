//! Structured P1 meshes on intervals and rectangles, nodal fields, cellwise
//! gradients and one-point barycentric quadrature.

use crate::error::{Error, Result};
use crate::expr::Expression;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    Rectangle { ax: f64, ay: f64, bx: f64, by: f64 },
}

impl Domain {
    pub fn unit_interval() -> Self {
        Domain::Interval { a: 0.0, b: 1.0 }
    }

    pub fn unit_square() -> Self {
        Domain::Rectangle {
            ax: 0.0,
            ay: 0.0,
            bx: 1.0,
            by: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }

    pub fn measure(&self) -> f64 {
        match *self {
            Domain::Interval { a, b } => b - a,
            Domain::Rectangle { ax, ay, bx, by } => (bx - ax) * (by - ay),
        }
    }
}

/// A conforming P1 mesh. Points are stored as `[x, y]`; in one dimension
/// `y` is always zero.
#[derive(Debug, Clone)]
pub struct Mesh {
    domain: Domain,
    dim: usize,
    vertices: Vec<[f64; 2]>,
    cells: Vec<usize>,
    boundary: Vec<bool>,
    measures: Vec<f64>,
    barycenters: Vec<[f64; 2]>,
    // per cell, per local vertex, `dim` components
    basis_grads: Vec<f64>,
}

impl Mesh {
    /// Uniform mesh with `n` cells (1D) or `n x n` squares split into
    /// `2n^2` triangles (2D).
    pub fn new(domain: Domain, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "mesh resolution must be >= 1".into(),
            ));
        }
        match domain {
            Domain::Interval { a, b } => {
                if b <= a || !(b - a).is_finite() {
                    return Err(Error::DegenerateDomain(format!("interval ({a}, {b})")));
                }
                Ok(Self::interval(domain, a, b, n))
            }
            Domain::Rectangle { ax, ay, bx, by } => {
                if bx <= ax || by <= ay || !domain.measure().is_finite() {
                    return Err(Error::DegenerateDomain(format!(
                        "rectangle ({ax}, {ay}) x ({bx}, {by})"
                    )));
                }
                Ok(Self::rectangle(domain, [ax, ay], [bx, by], n))
            }
        }
    }

    fn interval(domain: Domain, a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        let vertices: Vec<[f64; 2]> = (0..=n)
            .map(|i| {
                let x = if i == n { b } else { a + h * i as f64 };
                [x, 0.0]
            })
            .collect();
        let mut boundary = vec![false; n + 1];
        boundary[0] = true;
        boundary[n] = true;
        let cells: Vec<usize> = (0..n).flat_map(|i| [i, i + 1]).collect();
        Self::finish(domain, 1, vertices, cells, boundary)
    }

    fn rectangle(domain: Domain, lo: [f64; 2], hi: [f64; 2], n: usize) -> Self {
        let hx = (hi[0] - lo[0]) / n as f64;
        let hy = (hi[1] - lo[1]) / n as f64;
        let coord =
            |i: usize, h: f64, lo: f64, hi: f64| if i == n { hi } else { lo + h * i as f64 };
        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        let mut boundary = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([coord(i, hx, lo[0], hi[0]), coord(j, hy, lo[1], hi[1])]);
                boundary.push(i == 0 || j == 0 || i == n || j == n);
            }
        }
        let id = |i: usize, j: usize| j * (n + 1) + i;
        let mut cells = Vec::with_capacity(6 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (v00, v10, v01, v11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                cells.extend_from_slice(&[v00, v10, v11]);
                cells.extend_from_slice(&[v00, v11, v01]);
            }
        }
        Self::finish(domain, 2, vertices, cells, boundary)
    }

    fn finish(
        domain: Domain,
        dim: usize,
        vertices: Vec<[f64; 2]>,
        cells: Vec<usize>,
        boundary: Vec<bool>,
    ) -> Self {
        let k = dim + 1;
        let ncells = cells.len() / k;
        let mut measures = Vec::with_capacity(ncells);
        let mut barycenters = Vec::with_capacity(ncells);
        let mut basis_grads = Vec::with_capacity(ncells * k * dim);
        for cell in cells.chunks_exact(k) {
            let p: Vec<[f64; 2]> = cell.iter().map(|&v| vertices[v]).collect();
            if dim == 1 {
                let h = p[1][0] - p[0][0];
                measures.push(h);
                barycenters.push([0.5 * (p[0][0] + p[1][0]), 0.0]);
                basis_grads.extend_from_slice(&[-1.0 / h, 1.0 / h]);
            } else {
                let det = (p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]);
                measures.push(0.5 * det.abs());
                barycenters.push([
                    (p[0][0] + p[1][0] + p[2][0]) / 3.0,
                    (p[0][1] + p[1][1] + p[2][1]) / 3.0,
                ]);
                basis_grads.extend_from_slice(&[
                    (p[1][1] - p[2][1]) / det,
                    (p[2][0] - p[1][0]) / det,
                    (p[2][1] - p[0][1]) / det,
                    (p[0][0] - p[2][0]) / det,
                    (p[0][1] - p[1][1]) / det,
                    (p[1][0] - p[0][0]) / det,
                ]);
            }
        }
        Mesh {
            domain,
            dim,
            vertices,
            cells,
            boundary,
            measures,
            barycenters,
            basis_grads,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.measures.len()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    /// Vertex indices of cell `t` (two in 1D, three in 2D).
    pub fn cell(&self, t: usize) -> &[usize] {
        let k = self.dim + 1;
        &self.cells[t * k..(t + 1) * k]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(move |&v| !self.boundary[v])
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    /// Quadrature nodes: one per cell.
    pub fn barycenters(&self) -> &[[f64; 2]] {
        &self.barycenters
    }

    /// Sum of cell measures, i.e. `|Ω|` as seen by the quadrature.
    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    /// Gradient of the hat function of local vertex `local` on cell `t`.
    pub fn basis_gradient(&self, t: usize, local: usize) -> &[f64] {
        let d = self.dim;
        let start = (t * (d + 1) + local) * d;
        &self.basis_grads[start..start + d]
    }

    /// Cellwise constant gradient of the P1 interpolant of `u`.
    pub fn gradient(&self, u: &ScalarField) -> CellVectorField {
        let d = self.dim;
        let mut data = vec![0.0; self.num_cells() * d];
        for (t, g) in data.chunks_exact_mut(d).enumerate() {
            for (local, &v) in self.cell(t).iter().enumerate() {
                let phi = self.basis_gradient(t, local);
                for k in 0..d {
                    g[k] += u.values[v] * phi[k];
                }
            }
        }
        CellVectorField { dim: d, data }
    }

    /// One-point quadrature: `Σ value_T · |T|`.
    pub fn integrate(&self, cell_values: &[f64]) -> f64 {
        debug_assert_eq!(cell_values.len(), self.num_cells());
        cell_values
            .iter()
            .zip(&self.measures)
            .map(|(v, m)| v * m)
            .sum()
    }

    /// Value of the P1 interpolant of `u` at each cell barycenter.
    pub fn cell_values(&self, u: &ScalarField) -> Vec<f64> {
        let k = (self.dim + 1) as f64;
        (0..self.num_cells())
            .map(|t| self.cell(t).iter().map(|&v| u.values[v]).sum::<f64>() / k)
            .collect()
    }

    pub fn interpolate(&self, expr: &Expression) -> Result<ScalarField> {
        Ok(ScalarField::new(
            expr.eval_points(self.vertices.iter().copied())?,
        ))
    }

    pub fn interpolate_fn(&self, f: impl Fn([f64; 2]) -> f64) -> ScalarField {
        ScalarField::new(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Evaluates `expr` at the quadrature nodes.
    pub fn eval_cells(&self, expr: &Expression) -> Result<Vec<f64>> {
        expr.eval_points(self.barycenters.iter().copied())
    }
}

pub fn build_mesh(domain: Domain, n: usize) -> Result<Mesh> {
    Mesh::new(domain, n)
}

pub fn gradient(u: &ScalarField, mesh: &Mesh) -> CellVectorField {
    mesh.gradient(u)
}

pub fn integrate(cell_values: &[f64], mesh: &Mesh) -> f64 {
    mesh.integrate(cell_values)
}

/// Nodal values of a P1 function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Self {
        ScalarField { values }
    }

    pub fn zeros(n: usize) -> Self {
        ScalarField {
            values: vec![0.0; n],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `a·self + b·other`
    pub fn axpby(&self, a: f64, other: &ScalarField, b: f64) -> ScalarField {
        ScalarField::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        )
    }

    pub fn sub(&self, other: &ScalarField) -> ScalarField {
        self.axpby(1.0, other, -1.0)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-cell vectors, e.g. gradients of P1 functions.
#[derive(Debug, Clone, PartialEq)]
pub struct CellVectorField {
    dim: usize,
    data: Vec<f64>,
}

impl CellVectorField {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Euclidean norm on each cell.
    pub fn norms(&self) -> Vec<f64> {
        self.iter()
            .map(|g| g.iter().map(|c| c * c).sum::<f64>().sqrt())
            .collect()
    }
}
