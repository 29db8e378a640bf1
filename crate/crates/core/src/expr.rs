//! Scalar expressions in `x` and `y`.
//!
//! Accepted grammar: numeric literals, the variables `x` and `y`, the binary
//! operators `+ - * / ^`, unary minus, parentheses and the functions `sin`,
//! `cos`, `exp` and `abs`. Anything else is rejected when the expression is
//! parsed.

use std::fmt;
use std::str::FromStr;

use meval::Context;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Expression {
    source: String,
    expr: meval::Expr,
}

fn context() -> Context<'static> {
    let mut ctx = Context::empty();
    ctx.func("sin", f64::sin)
        .func("cos", f64::cos)
        .func("exp", f64::exp)
        .func("abs", f64::abs);
    ctx
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let expr = meval::Expr::from_str(source).map_err(|e| Error::Parse {
            expr: source.to_string(),
            reason: e.to_string(),
        })?;
        let parsed = Expression {
            source: source.trim().to_string(),
            expr,
        };
        // Unknown names only surface at evaluation time.
        let mut ctx = context();
        ctx.var("x", 0.5).var("y", 0.5);
        parsed
            .expr
            .eval_with_context(&ctx)
            .map_err(|e| Error::Parse {
                expr: parsed.source.clone(),
                reason: e.to_string(),
            })?;
        Ok(parsed)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Evaluates at every point, failing on the first non-finite value.
    pub fn eval_points<I>(&self, points: I) -> Result<Vec<f64>>
    where
        I: IntoIterator<Item = [f64; 2]>,
    {
        let mut ctx = context();
        points
            .into_iter()
            .enumerate()
            .map(|(node, [x, y])| {
                ctx.var("x", x).var("y", y);
                let value = self
                    .expr
                    .eval_with_context(&ctx)
                    .map_err(|e| Error::Parse {
                        expr: self.source.clone(),
                        reason: e.to_string(),
                    })?;
                if value.is_finite() {
                    Ok(value)
                } else {
                    Err(Error::NonFinite {
                        expr: self.source.clone(),
                        node,
                        value,
                    })
                }
            })
            .collect()
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.eval_points([[x, y]])?[0])
    }
}

impl FromStr for Expression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expression::parse(s)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
