//! Acceptance criteria, one line of output per criterion. Runs without the
//! libtest harness so the lines are always printed; the process exits
//! non-zero if any criterion fails. A criterion that the exact continuum
//! solution also misses is printed as UNATTAINABLE, never as PASS.

use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use pxstab::checks::{run_suite, Suite};
use pxstab::exponent::{build_exponent, make_schedule, Direction, ExponentField};
use pxstab::mesh::{Domain, Mesh, ScalarField};
use pxstab::modular::{gradient_modular, luxemburg_norm, modular};
use pxstab::solver::{energy, energy_gradient, solve_dirichlet, DirichletProblem, SolverOptions};
use pxstab::stability::{run_stability, StabilityReport, StabilityRow};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Status);

enum Status {
    Pass(String),
    Fail(String),
    /// Bound not met by the exact continuum solution either.
    Unattainable(String),
}

impl From<Outcome> for Status {
    fn from(o: Outcome) -> Self {
        match o {
            Ok(s) => Status::Pass(s),
            Err(s) => Status::Fail(s),
        }
    }
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn problem(
    domain: Domain,
    n: usize,
    p: &str,
    phi: impl Fn([f64; 2]) -> f64,
    f: impl Fn([f64; 2]) -> f64,
) -> DirichletProblem {
    let mesh = Mesh::new(domain, n).unwrap();
    let p = build_exponent(p, &mesh).unwrap();
    let phi = mesh.interpolate_fn(phi);
    let f = mesh.interpolate_fn(f);
    DirichletProblem::new(mesh, p, phi, f).unwrap()
}

fn max_nodal_error(mesh: &Mesh, w: &ScalarField, exact: impl Fn([f64; 2]) -> f64) -> f64 {
    mesh.vertices()
        .iter()
        .zip(w.values())
        .map(|(&x, v)| (v - exact(x)).abs())
        .fold(0.0, f64::max)
}

/// AC1: every inequality suite, 1000 seeded trials on (0,1) with n = 64.
fn inequality_suites() -> Outcome {
    let mesh = Mesh::new(Domain::unit_interval(), 64).unwrap();
    let mut summary = vec![];
    for (k, suite) in Suite::all().into_iter().enumerate() {
        let rows = run_suite(suite, 1000, 7 + k as u64, &mesh).map_err(|e| e.to_string())?;
        let trials = rows.iter().map(|r| r.trial).max().unwrap() + 1;
        ensure(
            trials == 1000,
            format!("{} ran {trials} trials", suite.name()),
        )?;
        let violations = rows.iter().filter(|r| !r.report.satisfied).count();
        ensure(
            violations == 0,
            format!("{}: {violations} violations", suite.name()),
        )?;
        summary.push(format!("{}={} rows", suite.name(), rows.len()));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("holder.csv");
    let out = out.to_string_lossy();
    run_binary(&[
        "check", "--suite", "holder", "--trials", "1000", "--seed", "7", "--out", &out,
    ])?;
    let text = std::fs::read_to_string(&*out).map_err(|e| e.to_string())?;
    let rows = text.lines().count() - 1;
    ensure(rows == 1000, format!("CLI holder check wrote {rows} rows"))?;
    ensure(
        text.lines().skip(1).all(|l| l.ends_with(",true")),
        "CLI holder check reported a violation".into(),
    )?;
    Ok(format!(
        "zero violations ({}); CLI holder check 1000 rows, exit 0",
        summary.join(", ")
    ))
}

/// AC2: Luxemburg norm against the constant-exponent closed form, plus the
/// homogeneity and unit-ball invariants.
fn luxemburg_oracle() -> Outcome {
    let mesh = Mesh::new(Domain::unit_interval(), 64).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for p0 in [1.5, 2.0, 3.0] {
        let p = ExponentField::constant(p0, mesh.num_cells()).unwrap();
        for _ in 0..100 {
            let scale = 10f64.powf(rng.random_range(-3.0..3.0));
            let f: Vec<f64> = (0..mesh.num_cells())
                .map(|_| scale * rng.random_range(-1.0..1.0))
                .collect();
            let norm = luxemburg_norm(&f, &p, &mesh).value;
            let closed = modular(&f, &p, &mesh).powf(1.0 / p0);
            let rel = (norm - closed).abs() / norm;
            worst = worst.max(rel);
            ensure(rel <= 1e-8, format!("p0={p0}: relative error {rel:e}"))?;
        }
    }
    for family in ["2", "2 + x", "1.5 + 0.4*sin(3*x)"] {
        let p = build_exponent(family, &mesh).unwrap();
        for _ in 0..50 {
            let f: Vec<f64> = (0..mesh.num_cells())
                .map(|_| rng.random_range(-5.0..5.0))
                .collect();
            let norm = luxemburg_norm(&f, &p, &mesh).value;
            for c in [-3.5, 1e-4, 250.0] {
                let cf: Vec<f64> = f.iter().map(|v| c * v).collect();
                let scaled = luxemburg_norm(&cf, &p, &mesh).value;
                let rel = (scaled - c.abs() * norm).abs() / (c.abs() * norm);
                ensure(rel <= 1e-8, format!("homogeneity {family} c={c}: {rel:e}"))?;
            }
            let inside: Vec<f64> = f.iter().map(|v| v / norm).collect();
            let outside: Vec<f64> = f.iter().map(|v| v / (0.999 * norm)).collect();
            ensure(
                modular(&inside, &p, &mesh) <= 1.0,
                format!("unit ball {family}: inside"),
            )?;
            ensure(
                modular(&outside, &p, &mesh) > 1.0,
                format!("unit ball {family}: outside"),
            )?;
        }
    }
    Ok(format!(
        "max relative error {worst:.2e} <= 1e-8; homogeneity and unit ball hold"
    ))
}

/// AC3: manufactured p = 2 solution on the unit square, second order.
fn manufactured_p2() -> Outcome {
    let exact = |x: [f64; 2]| (PI * x[0]).sin() * (PI * x[1]).sin();
    let mut errors = vec![];
    for n in [32, 64] {
        let pr = problem(
            Domain::unit_square(),
            n,
            "2",
            |_| 0.0,
            |x| -2.0 * PI * PI * exact(x),
        );
        let res = solve_dirichlet(&pr, &SolverOptions::default()).map_err(|e| e.to_string())?;
        ensure(
            res.residual_norm <= 1e-8,
            format!("n={n}: residual {:e}", res.residual_norm),
        )?;
        errors.push(max_nodal_error(&pr.mesh, &res.w, exact));
    }
    let ratio = errors[0] / errors[1];
    ensure(
        (3.2..=4.8).contains(&ratio),
        format!(
            "error ratio {ratio:.3} outside [3.2, 4.8] ({:e}, {:e})",
            errors[0], errors[1]
        ),
    )?;
    Ok(format!(
        "errors {:.3e} -> {:.3e}, ratio {ratio:.3}",
        errors[0], errors[1]
    ))
}

/// AC4: closed-form 1D solutions for p = 3 and p = 2 with f = 1.
fn one_dimensional_closed_form() -> Outcome {
    let q = 1.5;
    let exact3 = |x: [f64; 2]| -(0.5f64.powf(q) - (x[0] - 0.5).abs().powf(q)) / q;
    let pr = problem(Domain::unit_interval(), 512, "3", |_| 0.0, |_| 1.0);
    let res = solve_dirichlet(&pr, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let err3 = max_nodal_error(&pr.mesh, &res.w, exact3);
    ensure(err3 <= 1e-3, format!("p=3 error {err3:e}"))?;
    let mid = res.w.values()[256];
    ensure((mid - (-0.235702)).abs() < 1e-3, format!("w(1/2) = {mid}"))?;

    let pr = problem(Domain::unit_interval(), 512, "2", |_| 0.0, |_| 1.0);
    let res = solve_dirichlet(&pr, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let err2 = max_nodal_error(&pr.mesh, &res.w, |x| 0.5 * (x[0] * x[0] - x[0]));
    ensure(err2 <= 1e-10, format!("p=2 error {err2:e}"))?;
    Ok(format!(
        "p=3 error {err3:.3e} <= 1e-3; p=2 nodal error {err2:.3e} <= 1e-10 (nodally exact)"
    ))
}

/// AC5: φ = x₁ is p(x)-harmonic for p = 2 + x₁.
fn p_harmonic_exactness() -> Outcome {
    let pr = problem(Domain::unit_square(), 32, "2 + x", |x| x[0], |_| 0.0);
    let res = solve_dirichlet(&pr, &SolverOptions::default()).map_err(|e| e.to_string())?;
    let grad_mod = gradient_modular(&res.u, &pr.p, &pr.mesh);
    let err = res.w.max_abs_diff(&pr.phi);
    ensure(
        grad_mod <= 1e-10,
        format!("gradient modular of u {grad_mod:e}"),
    )?;
    ensure(err <= 1e-10, format!("|w - φ| {err:e}"))?;
    Ok(format!("∫|∇u|^p = {grad_mod:.2e}, max|w-φ| = {err:.2e}"))
}

fn non_increasing_from_second(values: &[f64]) -> bool {
    values[1..].windows(2).all(|w| w[1] <= w[0])
}

fn converges(name: &str, values: &[f64]) -> Result<String, String> {
    let first = values[0];
    let last = *values.last().unwrap();
    let bound = 1e-3f64.max(first / 10.0);
    ensure(
        non_increasing_from_second(values),
        format!("{name} not non-increasing: {values:?}"),
    )?;
    ensure(last <= bound, format!("{name} final {last:e} > {bound:e}"))?;
    Ok(format!("{name} {first:.2e}->{last:.2e}"))
}

fn stability_run(direction: Direction) -> Result<StabilityReport, String> {
    let pr = problem(Domain::unit_interval(), 256, "2", |_| 0.0, |_| 1.0);
    let schedule = make_schedule(&pr.p, direction, 6, 0.5).map_err(|e| e.to_string())?;
    run_stability(&pr, &schedule, &SolverOptions::default()).map_err(|e| e.to_string())
}

/// Continuum values at i = 1 and i = 6 for p_i = 2 - 0.5/i, f = 1 on (0,1),
/// from the closed-form solutions `w_p = (|x-1/2|^a - 2^{-a})/a`, a = p/(p-1).
const LUX_CONTINUUM: [f64; 2] = [0.0554689462789, 0.00794813222382];
const MODULAR_GAP_CONTINUUM: [f64; 2] = [0.0520833333333, 0.00739039202981];

/// AC6: increasing schedule p_i = 2 - 0.5/i. Monotone trends for all three
/// quantities, final-value bound for D.
fn increasing_schedule() -> Outcome {
    let report = stability_run(Direction::Increasing)?;
    let d = converges("D", &report.column(|r| r.d_grad_modular))?;
    for (name, col) in [
        ("lux", report.column(|r| r.lux_norm_diff)),
        ("modular_gap", report.column(|r| r.modular_gap)),
    ] {
        ensure(
            non_increasing_from_second(&col),
            format!("{name} not non-increasing: {col:?}"),
        )?;
    }
    Ok(format!("{d}; lux and modular_gap non-increasing"))
}

/// Final-value bound for a quantity whose continuum decay is linear in c_i,
/// so that `value(6) ≈ value(1)/7`. Reported unattainable when the discrete
/// values sit on the continuum ones and the continuum misses the bound.
fn final_bound(name: &str, values: &[f64], continuum: [f64; 2]) -> Status {
    let (first, last) = (values[0], values[5]);
    let bound = 1e-3f64.max(first / 10.0);
    if last <= bound {
        return Status::Pass(format!("{name} {first:.3e}->{last:.3e} <= {bound:.3e}"));
    }
    let rel = |got: f64, want: f64| (got - want).abs() / want;
    let (e1, e6) = (rel(first, continuum[0]), rel(last, continuum[1]));
    let continuum_bound = 1e-3f64.max(continuum[0] / 10.0);
    if e1 > 1e-3 || e6 > 1e-3 || continuum[1] <= continuum_bound {
        return Status::Fail(format!(
            "{name} {first:.3e}->{last:.3e} > {bound:.3e}, off the closed form ({e1:.1e}, {e6:.1e})"
        ));
    }
    Status::Unattainable(format!(
        "{name} {first:.4e}->{last:.4e} > {bound:.3e}; closed form {:.4e}->{:.4e} (ratio {:.3}), agreement {:.1e}",
        continuum[0],
        continuum[1],
        continuum[1] / continuum[0],
        e1.max(e6)
    ))
}

fn increasing_schedule_bounds(
    column: fn(&StabilityRow) -> f64,
    name: &str,
    continuum: [f64; 2],
) -> Status {
    match stability_run(Direction::Increasing) {
        Ok(report) => final_bound(name, &report.column(column), continuum),
        Err(e) => Status::Fail(e),
    }
}

/// AC7: decreasing schedule p_i = 2 + 0.5/i, D measured with the limit exponent.
fn decreasing_schedule() -> Outcome {
    let report = stability_run(Direction::Decreasing)?;
    converges("D", &report.column(|r| r.d_grad_modular))
}

/// AC8: energy gradient against central differences.
fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cases = [
        problem(
            Domain::unit_interval(),
            24,
            "1.5 + 0.4*sin(3*x)",
            |x| x[0],
            |x| 1.0 + x[0],
        ),
        problem(Domain::unit_square(), 5, "2 + x", |x| x[0] * x[1], |_| 1.0),
    ];
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let pr = &cases[k % 2];
        for reg in [1e-2, 1e-6] {
            let u = ScalarField::new(
                (0..pr.mesh.num_vertices())
                    .map(|v| {
                        if pr.mesh.is_boundary(v) {
                            0.0
                        } else {
                            rng.random_range(-1.0..1.0)
                        }
                    })
                    .collect(),
            );
            let grad = energy_gradient(&u, pr, reg);
            let scale = grad.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for v in pr.mesh.interior_vertices() {
                let mut plus = u.clone();
                plus.values_mut()[v] += h;
                let mut minus = u.clone();
                minus.values_mut()[v] -= h;
                let fd = (energy(&plus, pr, reg) - energy(&minus, pr, reg)) / (2.0 * h);
                let rel = (fd - grad.values()[v]).abs() / scale;
                worst = worst.max(rel);
            }
        }
    }
    ensure(worst <= 1e-5, format!("relative error {worst:e}"))?;
    Ok(format!(
        "50 iterates x 2 regularizations, max relative error {worst:.2e}"
    ))
}

fn run_binary(args: &[&str]) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_pxstab"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        status.status.success(),
        format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        ),
    )
}

/// AC9: identical seeds and configs give byte-identical CSVs.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let config = path("stability.cfg");
    std::fs::write(
        &config,
        "domain = interval 0 1\nn = 64\np = 2 + x\nphi = 0\nf = 1\ndirection = increasing\ncount = 3\nc1 = 0.5\n",
    )
    .map_err(|e| e.to_string())?;
    let read = |p: &str| std::fs::read(Path::new(p)).map_err(|e| e.to_string());
    let mut compared = 0;
    for suite in ["holder", "epsilon", "norm-modular", "convexity"] {
        let (a, b) = (
            path(&format!("{suite}-a.csv")),
            path(&format!("{suite}-b.csv")),
        );
        for out in [&a, &b] {
            run_binary(&[
                "check", "--suite", suite, "--trials", "50", "--seed", "99", "--out", out,
            ])?;
        }
        ensure(read(&a)? == read(&b)?, format!("{suite} CSVs differ"))?;
        compared += 1;
    }
    for cmd in ["solve", "stability"] {
        let (a, b) = (path(&format!("{cmd}-a.csv")), path(&format!("{cmd}-b.csv")));
        for out in [&a, &b] {
            run_binary(&[cmd, "--config", &config, "--out", out])?;
        }
        ensure(read(&a)? == read(&b)?, format!("{cmd} CSVs differ"))?;
        compared += 1;
    }
    Ok(format!("{compared} output pairs byte-identical"))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("AC1 inequality suites", || inequality_suites().into()),
        ("AC2 Luxemburg norm oracle", || luxemburg_oracle().into()),
        ("AC3 manufactured p=2 solve", || manufactured_p2().into()),
        ("AC4 1D closed forms", || {
            one_dimensional_closed_form().into()
        }),
        ("AC5 p(x)-harmonic exactness", || {
            p_harmonic_exactness().into()
        }),
        ("AC6 increasing schedule", || increasing_schedule().into()),
        ("AC6 increasing schedule, lux final bound", || {
            increasing_schedule_bounds(|r| r.lux_norm_diff, "lux", LUX_CONTINUUM)
        }),
        ("AC6 increasing schedule, modular_gap final bound", || {
            increasing_schedule_bounds(|r| r.modular_gap, "modular_gap", MODULAR_GAP_CONTINUUM)
        }),
        ("AC7 decreasing schedule", || decreasing_schedule().into()),
        ("AC8 gradient check", || gradient_check().into()),
        ("AC9 determinism", || determinism().into()),
    ];
    let (mut passed, mut failed, mut unattainable) = (0, 0, 0);
    for (name, criterion) in criteria {
        let start = Instant::now();
        let status = criterion();
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match status {
            Status::Pass(d) => {
                passed += 1;
                ("PASS", d)
            }
            Status::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Status::Unattainable(d) => {
                unattainable += 1;
                ("UNATTAINABLE", d)
            }
        };
        println!("{tag} {name}: {detail} [{secs:.1}s]");
    }
    println!("{passed} passed, {failed} failed, {unattainable} unattainable");
    if failed > 0 {
        std::process::exit(1);
    }
}
