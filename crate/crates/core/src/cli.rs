//! Command dispatch for the `pxstab` binary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::checks::{run_suite, Suite};
use crate::config::{parse_config, Command, RunConfig};
use crate::error::{Error, Result};
use crate::exponent::build_exponent;
use crate::mesh::{Domain, Mesh};
use crate::modular::luxemburg_norm;
use crate::report::{
    fmt_real, write_gap_csv, write_solution_csv, write_stability_csv, write_summary_csv,
};
use crate::solver::solve_dirichlet;
use crate::stability::run_stability;

#[derive(Debug, Parser)]
#[command(
    name = "pxstab",
    version,
    about = "Variable-exponent norms, p(x)-Laplacian solves and exponent-stability reports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Print the Luxemburg norm of `f` under the exponent `p`
    Norm {
        #[arg(long)]
        config: PathBuf,
    },
    /// Solve the Dirichlet problem and write the nodal solution
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an exponent schedule and write the convergence report
    Stability {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a randomized inequality suite
    Check {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional config supplying `domain` and `n` (default: interval 0 1, n = 64)
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Whether every postcondition held; `reason` explains a failure.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub ok: bool,
    pub reason: String,
}

impl Outcome {
    fn pass() -> Self {
        Outcome {
            ok: true,
            reason: String::new(),
        }
    }
}

fn load(path: &Path, command: Command) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg = parse_config(&text)?;
    cfg.validate_for(command)?;
    Ok(cfg)
}

fn output_path(flag: &Option<PathBuf>, cfg: &RunConfig) -> Result<PathBuf> {
    flag.clone()
        .or_else(|| cfg.out.clone())
        .ok_or_else(|| Error::MissingKey("out".into()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Summary file written next to a solution CSV: `sol.csv` -> `sol.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

pub fn run(cli: &Cli, stdout: &mut impl Write) -> Result<Outcome> {
    match &cli.command {
        Cmd::Norm { config } => {
            let cfg = load(config, Command::Norm)?;
            let mesh = cfg.mesh()?;
            let p = build_exponent(cfg.p.as_ref().unwrap().source(), &mesh)?;
            let f = mesh.eval_cells(cfg.f.as_ref().unwrap())?;
            let norm = luxemburg_norm(&f, &p, &mesh);
            writeln!(
                stdout,
                "luxemburg_norm,modular_at_value,bisection_iterations"
            )?;
            writeln!(
                stdout,
                "{},{},{}",
                fmt_real(norm.value),
                fmt_real(norm.modular_at_value),
                norm.bisection_iterations
            )?;
            Ok(Outcome::pass())
        }
        Cmd::Solve { config, out } => {
            let cfg = load(config, Command::Solve)?;
            let out = output_path(out, &cfg)?;
            let problem = cfg.problem()?;
            let result = solve_dirichlet(&problem, &cfg.solver)?;
            write_solution_csv(create(&out)?, &problem.mesh, &result)?;
            write_summary_csv(create(&summary_path(&out))?, &result)?;
            write_summary_csv(&mut *stdout, &result)?;
            if result.residual_norm <= cfg.solver.residual_tol {
                Ok(Outcome::pass())
            } else {
                Ok(Outcome {
                    ok: false,
                    reason: format!("residual_norm={}", fmt_real(result.residual_norm)),
                })
            }
        }
        Cmd::Stability { config, out } => {
            let cfg = load(config, Command::Stability)?;
            let out = output_path(out, &cfg)?;
            let problem = cfg.problem()?;
            let schedule = cfg.schedule(&problem)?;
            let report = run_stability(&problem, &schedule, &cfg.solver)?;
            write_stability_csv(create(&out)?, &report)?;
            let bad = report
                .rows
                .iter()
                .find(|r| r.values().iter().any(|v| !v.is_finite() || *v < 0.0));
            match bad {
                None => Ok(Outcome::pass()),
                Some(row) => Ok(Outcome {
                    ok: false,
                    reason: format!("non_finite_row i={}", row.i),
                }),
            }
        }
        Cmd::Check {
            suite,
            trials,
            seed,
            out,
            config,
        } => {
            let cfg = match config {
                Some(path) => load(path, Command::Check)?,
                None => RunConfig::default(),
            };
            let suite: Suite = match suite {
                Some(name) => name.parse()?,
                None => cfg.suite.ok_or_else(|| Error::MissingKey("suite".into()))?,
            };
            let trials = trials
                .or(cfg.trials)
                .ok_or_else(|| Error::MissingKey("trials".into()))?;
            let seed = seed
                .or(cfg.seed)
                .ok_or_else(|| Error::MissingKey("seed".into()))?;
            let out = output_path(out, &cfg)?;
            let mesh = Mesh::new(
                cfg.domain.unwrap_or_else(Domain::unit_interval),
                cfg.n.unwrap_or(64),
            )?;
            let rows = run_suite(suite, trials, seed, &mesh)?;
            write_gap_csv(create(&out)?, &rows)?;
            let violations = rows.iter().filter(|r| !r.report.satisfied).count();
            writeln!(
                stdout,
                "suite={} rows={} violations={}",
                suite.name(),
                rows.len(),
                violations
            )?;
            if violations == 0 {
                Ok(Outcome::pass())
            } else {
                Ok(Outcome {
                    ok: false,
                    reason: format!("violations={violations}"),
                })
            }
        }
    }
}
