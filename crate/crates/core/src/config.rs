//! Flat `key = value` run configuration.
//!
//! One pair per line, `#` starts a comment, blank lines are ignored. Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `domain` | `interval a b` or `rectangle ax ay bx by` |
//! | `n` | mesh resolution, integer >= 1 |
//! | `p`, `phi`, `f` | expressions in `x`, `y` |
//! | `residual_tol`, `max_iterations`, `reg_initial`, `reg_final`, `armijo_c`, `backtrack_factor` | solver options |
//! | `direction` | `increasing` or `decreasing` |
//! | `count` | number of schedule steps, integer >= 1 |
//! | `c1` | first schedule offset, > 0 |
//! | `suite` | `holder`, `epsilon`, `norm-modular` or `convexity` |
//! | `trials`, `seed` | check-suite trial count and RNG seed |
//! | `out` | output path |

use std::path::PathBuf;
use std::str::FromStr;

use crate::checks::Suite;
use crate::error::{Error, Result};
use crate::exponent::{build_exponent, make_schedule, Direction, ExponentSchedule};
use crate::expr::Expression;
use crate::mesh::{Domain, Mesh};
use crate::solver::{DirichletProblem, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Solve,
    Stability,
    Check,
}

impl Command {
    fn required(&self) -> &'static [&'static str] {
        match self {
            Command::Norm => &["domain", "n", "p", "f"],
            Command::Solve => &["domain", "n", "p", "phi", "f"],
            Command::Stability => &["domain", "n", "p", "phi", "f", "direction", "count", "c1"],
            Command::Check => &[],
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub domain: Option<Domain>,
    pub n: Option<usize>,
    pub p: Option<Expression>,
    pub phi: Option<Expression>,
    pub f: Option<Expression>,
    pub solver: SolverOptions,
    pub direction: Option<Direction>,
    pub count: Option<usize>,
    pub c1: Option<f64>,
    pub suite: Option<Suite>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn parse_domain(value: &str) -> std::result::Result<Domain, String> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().ok_or("empty domain")?;
    let nums = parts
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match (kind, nums.as_slice()) {
        ("interval", &[a, b]) => Ok(Domain::Interval { a, b }),
        ("rectangle", &[ax, ay, bx, by]) => Ok(Domain::Rectangle { ax, ay, bx, by }),
        ("interval", _) => Err("interval takes 2 endpoints".into()),
        ("rectangle", _) => Err("rectangle takes 4 coordinates".into()),
        _ => Err(format!("unknown domain kind `{kind}`")),
    }
}

fn parse_num<T: FromStr>(value: &str) -> std::result::Result<T, String> {
    value
        .parse::<T>()
        .map_err(|_| format!("`{value}` is not a valid number"))
}

fn positive_int(value: &str) -> std::result::Result<usize, String> {
    let v: i64 = parse_num(value)?;
    if v < 1 {
        return Err(format!("value {v} out of range (must be >= 1)"));
    }
    Ok(v as usize)
}

fn positive_real(value: &str) -> std::result::Result<f64, String> {
    let v: f64 = parse_num(value)?;
    if v <= 0.0 || !v.is_finite() {
        return Err(format!("value {v} out of range (must be > 0)"));
    }
    Ok(v)
}

fn expression(value: &str) -> std::result::Result<Expression, String> {
    Expression::parse(value).map_err(|e| e.to_string())
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |reason: String| Error::Config { line, reason };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
        let (key, value) = (key.trim(), value.trim());
        let outcome: std::result::Result<(), String> = (|| {
            match key {
                "domain" => cfg.domain = Some(parse_domain(value)?),
                "n" => cfg.n = Some(positive_int(value)?),
                "p" => cfg.p = Some(expression(value)?),
                "phi" => cfg.phi = Some(expression(value)?),
                "f" => cfg.f = Some(expression(value)?),
                "residual_tol" => cfg.solver.residual_tol = positive_real(value)?,
                "max_iterations" => cfg.solver.max_iterations = positive_int(value)?,
                "reg_initial" => cfg.solver.reg_initial = positive_real(value)?,
                "reg_final" => cfg.solver.reg_final = positive_real(value)?,
                "armijo_c" => cfg.solver.armijo_c = positive_real(value)?,
                "backtrack_factor" => cfg.solver.backtrack_factor = positive_real(value)?,
                "direction" => {
                    cfg.direction = Some(value.parse().map_err(|e: Error| e.to_string())?)
                }
                "count" => cfg.count = Some(positive_int(value)?),
                "c1" => cfg.c1 = Some(positive_real(value)?),
                "suite" => cfg.suite = Some(value.parse().map_err(|e: Error| e.to_string())?),
                "trials" => cfg.trials = Some(positive_int(value)?),
                "seed" => cfg.seed = Some(parse_num(value)?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                other => return Err(format!("unknown key `{other}`")),
            }
            Ok(())
        })();
        outcome.map_err(err)?;
    }
    cfg.solver.validate().map_err(|e| Error::Config {
        line: 0,
        reason: e.to_string(),
    })?;
    Ok(cfg)
}

fn require<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::MissingKey(key.to_string()))
}

impl RunConfig {
    /// Fails with the first required key of `command` that is absent.
    pub fn validate_for(&self, command: Command) -> Result<()> {
        for &key in command.required() {
            let present = match key {
                "domain" => self.domain.is_some(),
                "n" => self.n.is_some(),
                "p" => self.p.is_some(),
                "phi" => self.phi.is_some(),
                "f" => self.f.is_some(),
                "direction" => self.direction.is_some(),
                "count" => self.count.is_some(),
                "c1" => self.c1.is_some(),
                _ => unreachable!(),
            };
            if !present {
                return Err(Error::MissingKey(key.to_string()));
            }
        }
        Ok(())
    }

    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(require(&self.domain, "domain")?, require(&self.n, "n")?)
    }

    pub fn problem(&self) -> Result<DirichletProblem> {
        let mesh = self.mesh()?;
        let p = build_exponent(require(&self.p, "p")?.source(), &mesh)?;
        let phi = mesh.interpolate(&require(&self.phi, "phi")?)?;
        let f = mesh.interpolate(&require(&self.f, "f")?)?;
        DirichletProblem::new(mesh, p, phi, f)
    }

    pub fn schedule(&self, problem: &DirichletProblem) -> Result<ExponentSchedule> {
        make_schedule(
            &problem.p,
            require(&self.direction, "direction")?,
            require(&self.count, "count")?,
            require(&self.c1, "c1")?,
        )
    }
}
