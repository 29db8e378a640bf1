//! Variable exponent fields sampled at the quadrature nodes, monotone
//! schedules converging to a limit exponent, and a log-Hölder estimator.

use crate::error::{Error, Result};
use crate::expr::Expression;
use crate::mesh::Mesh;

/// Lowest value an increasing schedule may reach at any node, `1 + 0.05`.
pub const SCHEDULE_FLOOR: f64 = 1.05;

/// Exponent samples, one per cell barycenter, with cached extrema.
///
/// Every sample is finite and strictly greater than one.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    samples: Vec<f64>,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentField {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidArgument(
                "exponent field has no samples".into(),
            ));
        }
        let mut p_minus = f64::INFINITY;
        let mut p_plus = f64::NEG_INFINITY;
        for (node, &value) in samples.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    expr: "<exponent>".into(),
                    node,
                    value,
                });
            }
            if value <= 1.0 {
                return Err(Error::ExponentTooSmall { node, value });
            }
            p_minus = p_minus.min(value);
            p_plus = p_plus.max(value);
        }
        Ok(ExponentField {
            samples,
            p_minus,
            p_plus,
        })
    }

    pub fn constant(value: f64, len: usize) -> Result<Self> {
        Self::new(vec![value; len])
    }

    pub fn from_fn(mesh: &Mesh, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(mesh.barycenters().iter().map(|&p| f(p)).collect())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// `max |self - other|` over the nodes.
    pub fn sup_distance(&self, other: &ExponentField) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Samples `expr` at every cell barycenter of `mesh`.
pub fn build_exponent(expr: &str, mesh: &Mesh) -> Result<ExponentField> {
    let expr = Expression::parse(expr)?;
    ExponentField::new(mesh.eval_cells(&expr)?)
}

/// Largest `|p(x) - p(y)| · |log|x - y||` over all pairs of quadrature nodes.
///
/// This is a lower bound for the smallest constant in the log-Hölder
/// condition, restricted to the sampled pairs.
pub fn log_holder_constant(p: &ExponentField, mesh: &Mesh) -> f64 {
    let nodes = mesh.barycenters();
    let samples = p.samples();
    let mut best = 0.0f64;
    for i in 0..nodes.len() {
        for j in (i + 1)..nodes.len() {
            let dp = (samples[i] - samples[j]).abs();
            if dp == 0.0 {
                continue;
            }
            let dist = (nodes[i][0] - nodes[j][0]).hypot(nodes[i][1] - nodes[j][1]);
            if dist == 0.0 {
                continue;
            }
            best = best.max(dp * dist.ln().abs());
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "increasing" => Ok(Direction::Increasing),
            "decreasing" => Ok(Direction::Decreasing),
            other => Err(Error::InvalidArgument(format!(
                "direction must be `increasing` or `decreasing`, got `{other}`"
            ))),
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        })
    }
}

/// Exponents `p_i = p ∓ c_i`, `c_i = c1 / i`, converging monotonically and
/// uniformly to `base`.
#[derive(Debug, Clone)]
pub struct ExponentSchedule {
    direction: Direction,
    base: ExponentField,
    offsets: Vec<f64>,
    fields: Vec<ExponentField>,
}

impl ExponentSchedule {
    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn base(&self) -> &ExponentField {
        &self.base
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Field with 1-based schedule index `i`.
    pub fn field(&self, i: usize) -> &ExponentField {
        &self.fields[i - 1]
    }

    pub fn fields(&self) -> &[ExponentField] {
        &self.fields
    }
}

pub fn make_schedule(
    base: &ExponentField,
    direction: Direction,
    count: usize,
    c1: f64,
) -> Result<ExponentSchedule> {
    if count == 0 {
        return Err(Error::InvalidArgument(
            "schedule needs at least one step".into(),
        ));
    }
    if c1 <= 0.0 || !c1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "schedule offset c1 must be > 0, got {c1}"
        )));
    }
    let offsets: Vec<f64> = (1..=count).map(|i| c1 / i as f64).collect();
    let sign = match direction {
        Direction::Increasing => -1.0,
        Direction::Decreasing => 1.0,
    };
    if direction == Direction::Increasing {
        // c_1 is the largest offset, so it decides the floor.
        for (node, &p) in base.samples().iter().enumerate() {
            let value = p - offsets[0];
            if value < SCHEDULE_FLOOR {
                return Err(Error::ScheduleFloor {
                    node,
                    value,
                    floor: SCHEDULE_FLOOR,
                });
            }
        }
    }
    let fields = offsets
        .iter()
        .map(|&c| ExponentField::new(base.samples().iter().map(|&p| p + sign * c).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExponentSchedule {
        direction,
        base: base.clone(),
        offsets,
        fields,
    })
}
