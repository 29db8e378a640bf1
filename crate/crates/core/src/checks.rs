//! Seeded randomized inequality suites. Each trial draws an exponent family
//! (cycling through `2`, `2 + x`, `1.5 + 0.4 sin(3x)`) and random fields whose
//! magnitudes span several decades, so both sides of the unit ball are hit.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponent::{build_exponent, ExponentField};
use crate::mesh::{Mesh, ScalarField};
use crate::modular::{
    convexity_gap, embedding_gap, epsilon_bound_gap, holder_gap, norm_modular_gap, GapReport,
};

pub const EXPONENT_FAMILIES: [&str; 3] = ["2", "2 + x", "1.5 + 0.4*sin(3*x)"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Holder,
    Epsilon,
    NormModular,
    Convexity,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Holder => "holder",
            Suite::Epsilon => "epsilon",
            Suite::NormModular => "norm-modular",
            Suite::Convexity => "convexity",
        }
    }

    pub fn all() -> [Suite; 4] {
        [
            Suite::Holder,
            Suite::Epsilon,
            Suite::NormModular,
            Suite::Convexity,
        ]
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::all()
            .into_iter()
            .find(|suite| suite.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown suite `{s}` (expected holder, epsilon, norm-modular or convexity)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckRow {
    pub check_name: &'static str,
    pub trial: usize,
    pub report: GapReport,
}

fn random_values(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    (0..len)
        .map(|_| {
            // occasional exact zeros
            if rng.random_range(0.0..1.0) < 0.05 {
                0.0
            } else {
                scale * rng.random_range(-1.0..1.0)
            }
        })
        .collect()
}

/// Runs `trials` trials of `suite` on `mesh`. The epsilon suite emits three
/// rows per trial (`epsilon`, `epsilon-weighted`, `embedding`); the others
/// emit one.
pub fn run_suite(suite: Suite, trials: usize, seed: u64, mesh: &Mesh) -> Result<Vec<CheckRow>> {
    let families = EXPONENT_FAMILIES
        .iter()
        .map(|e| build_exponent(e, mesh))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = mesh.num_cells();
    let mut rows = Vec::with_capacity(trials);
    for trial in 0..trials {
        let p = &families[trial % families.len()];
        match suite {
            Suite::Holder => {
                let u = random_values(&mut rng, cells);
                let v = random_values(&mut rng, cells);
                rows.push(CheckRow {
                    check_name: "holder",
                    trial,
                    report: holder_gap(&u, &v, p, mesh),
                });
            }
            Suite::Epsilon => {
                let eps = rng.random_range(0.01..0.99);
                let q = ExponentField::new(
                    p.samples()
                        .iter()
                        .map(|&pv| pv + eps * rng.random_range(0.0..1.0))
                        .collect(),
                )?;
                let f = random_values(&mut rng, cells);
                for (name, weighted) in [("epsilon", false), ("epsilon-weighted", true)] {
                    rows.push(CheckRow {
                        check_name: name,
                        trial,
                        report: epsilon_bound_gap(&f, p, &q, eps, weighted, mesh)?,
                    });
                }
                rows.push(CheckRow {
                    check_name: "embedding",
                    trial,
                    report: embedding_gap(&f, p, &q, eps, mesh)?,
                });
            }
            Suite::NormModular => {
                let u = random_values(&mut rng, cells);
                rows.push(CheckRow {
                    check_name: "norm-modular",
                    trial,
                    report: norm_modular_gap(&u, p, mesh).gap,
                });
            }
            Suite::Convexity => {
                let u = ScalarField::new(random_values(&mut rng, mesh.num_vertices()));
                let v = ScalarField::new(random_values(&mut rng, mesh.num_vertices()));
                rows.push(CheckRow {
                    check_name: "convexity",
                    trial,
                    report: convexity_gap(&u, &v, p, mesh),
                });
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;

    #[test]
    fn suites_are_satisfied_and_deterministic() {
        let mesh = Mesh::new(Domain::unit_interval(), 16).unwrap();
        for suite in Suite::all() {
            let a = run_suite(suite, 30, 42, &mesh).unwrap();
            let b = run_suite(suite, 30, 42, &mesh).unwrap();
            assert_eq!(a, b);
            assert!(a.iter().all(|r| r.report.satisfied), "{}", suite.name());
        }
    }

    #[test]
    fn suite_names_parse() {
        for suite in Suite::all() {
            assert_eq!(suite.name().parse::<Suite>().unwrap(), suite);
        }
        assert!("cauchy".parse::<Suite>().is_err());
    }
}
