use std::path::Path;
use std::process::{Command, Output};

fn pxstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pxstab"))
        .args(args)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn norm_prints_luxemburg_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "norm.cfg",
        "# constant datum\ndomain = interval 0 1\nn = 40\np = 2 + x\nf = 2\n",
    );
    let o = pxstab(&["norm", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("luxemburg_norm,modular_at_value,bisection_iterations")
    );
    let value: f64 = lines
        .next()
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((value - 2.0).abs() < 1e-14);
}

#[test]
fn solve_writes_solution_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sol.csv");
    let cfg = write_config(
        dir.path(),
        "solve.cfg",
        &format!(
            "domain = interval 0 1\nn = 16\np = 2\nphi = 0\nf = 1\nout = {}\n",
            out.display()
        ),
    );
    let o = pxstab(&["solve", "--config", &cfg]);
    assert!(o.status.success(), "{}", stderr(&o));

    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("vertex_id,x,y,w"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 17);
    for r in &rows {
        assert!((r[3] - 0.5 * (r[1] * r[1] - r[1])).abs() < 1e-12);
    }
    assert!(!csv.contains('\r'));

    let summary = std::fs::read_to_string(dir.path().join("sol.summary.csv")).unwrap();
    assert!(summary.starts_with("iterations,final_energy,residual_norm,final_regularization\n"));
    assert_eq!(stdout(&o), summary);
}

#[test]
fn out_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "solve.cfg",
        "domain = rectangle 0 0 1 1\nn = 4\np = 2 + x\nphi = x\nf = 0\nout = ignored.csv\n",
    );
    let out = dir.path().join("flag.csv");
    let o = pxstab(&["solve", "--config", &cfg, "--out", &out.to_string_lossy()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.exists());
    assert!(!Path::new("ignored.csv").exists());
}

#[test]
fn stability_report_has_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "stab.cfg",
        "domain = interval 0 1\nn = 32\np = 2\nphi = 0\nf = 1\ndirection = decreasing\ncount = 3\nc1 = 0.5\n",
    );
    let out = dir.path().join("stab.csv");
    let o = pxstab(&[
        "stability",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("i,sup_gap,D_grad_modular,lux_norm_diff,energy_modular_i,energy_modular_limit,modular_gap")
    );
    let ids: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["1", "2", "3"]);
}

#[test]
fn check_reports_rows_and_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("conv.csv");
    let o = pxstab(&[
        "check",
        "--suite",
        "convexity",
        "--trials",
        "30",
        "--seed",
        "3",
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "suite=convexity rows=30 violations=0");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("check_name,trial,lhs,rhs,satisfied\n"));
}

#[test]
fn missing_key_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.cfg",
        "domain = interval 0 1\nn = 8\np = 2\n",
    );
    let o = pxstab(&["norm", "--config", &cfg]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).starts_with("error kind=missing_key"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn bad_inputs_fail_with_structured_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "unknown key",
            "domain = interval 0 1\nn = 8\np = 2\nf = 1\ncolour = red\n",
        ),
        (
            "unknown function",
            "domain = interval 0 1\nn = 8\np = 2\nf = tan(x)\n",
        ),
        (
            "exponent at one",
            "domain = interval 0 1\nn = 8\np = 1\nf = 1\n",
        ),
        (
            "degenerate domain",
            "domain = interval 1 1\nn = 8\np = 2\nf = 1\n",
        ),
    ];
    for (name, body) in cases {
        let cfg = write_config(dir.path(), "bad.cfg", body);
        let o = pxstab(&["norm", "--config", &cfg]);
        assert!(!o.status.success(), "{name}");
        assert!(
            stderr(&o).starts_with("error kind="),
            "{name}: {}",
            stderr(&o)
        );
    }
}

#[test]
fn schedule_below_floor_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "stab.cfg",
        "domain = interval 0 1\nn = 8\np = 1.4\nphi = 0\nf = 1\ndirection = increasing\ncount = 2\nc1 = 0.5\n",
    );
    let out = dir.path().join("s.csv");
    let o = pxstab(&[
        "stability",
        "--config",
        &cfg,
        "--out",
        &out.to_string_lossy(),
    ]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).starts_with("error kind=schedule_floor"),
        "{}",
        stderr(&o)
    );
}
