use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use num_complex::Complex64;
use psqm_core::io::{read_field, write_field};
use psqm_core::{Field, PhaseGrid};

fn psqm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psqm"))
        .args(args)
        .output()
        .expect("run psqm")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn gaussian_file(path: &Path) -> Field {
    let g = Arc::new(PhaseGrid::uniform(1, 6.0, 32, 1.0, 0.0).unwrap());
    let f = Field::sample(g, |u| {
        Complex64::new((-(u[0] * u[0] + u[1] * u[1])).exp(), 0.0)
    })
    .unwrap();
    write_field(path, &f).unwrap();
    f
}

#[test]
fn algebra_verify_prints_55_pass_lines() {
    let o = psqm(&["algebra", "verify"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 55);
    assert!(out.lines().any(|l| l == "PASS [K1, P1] = i"), "{out}");
    assert!(out.contains("casimir I1 = 0 (ok)"));
}

#[test]
fn algebra_verify_with_parameters() {
    let o = psqm(&[
        "algebra",
        "verify",
        "--m",
        "3/2",
        "--t",
        "-1/4",
        "--hbar",
        "0.5",
        "--velocity",
        "1,0,-2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = psqm(&["algebra", "verify", "--m", "0"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = psqm(&["algebra", "verify", "--velocity", "1,2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ho3d_spectrum_to_five() {
    let o = psqm(&["ho3d", "spectrum", "--emax", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("1.5 2.5 3.5 4.5"));
    let o = psqm(&["ho3d", "spectrum", "--emax", "5", "--grid-n", "10"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn ho3d_solve_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("h.json");
    let o = psqm(&["ho3d", "solve", "--n", "2", "--json", p(&json)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("exact energy 7/2"));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["energy"], 3.5);
    assert_eq!(v["is_eigen"], true);
    assert_eq!(v["quantum_numbers"], serde_json::json!([2]));
}

#[test]
fn nc_state_energy() {
    let o = psqm(&["nc", "state", "--nx", "1", "--ny", "1", "--theta", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("energy 4.242640687"), "{out}");
    assert!(out.contains("exact energy 3√2"), "{out}");
}

#[test]
fn nc_wigner_writes_field_and_slices() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.psqf");
    let o = psqm(&[
        "nc",
        "wigner",
        "--nx",
        "1",
        "--ny",
        "0",
        "--theta",
        "0.5",
        "--out",
        p(&out),
        "--grid-n",
        "8",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f = read_field(&out).unwrap();
    assert_eq!(f.grid().shape(), vec![8; 4]);
    assert_eq!(f.grid().theta(), 0.5);
    assert!((f.integrate().re - 1.0).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("w.x_px.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,px,re,im"));
    assert_eq!(csv.lines().count(), 65);
    assert!(dir.path().join("w.x_y.csv").exists());
}

#[test]
fn export_csv_slice() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("g.psqf");
    let out = dir.path().join("g.csv");
    gaussian_file(&input);
    // in one dimension both axes are free
    let o = psqm(&[
        "export",
        "csv",
        "--in",
        p(&input),
        "--slice",
        "",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().next(), Some("q,p,re,im"));
    assert_eq!(csv.lines().count(), 32 * 32 + 1);
    let o = psqm(&[
        "export",
        "csv",
        "--in",
        p(&input),
        "--slice",
        "q=0",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = psqm(&[
        "export",
        "csv",
        "--in",
        p(&input),
        "--slice",
        "z=0",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn star_mul_of_gaussians() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.psqf");
    let out = dir.path().join("b.psqf");
    gaussian_file(&a);
    let o = psqm(&[
        "star",
        "mul",
        "--left",
        p(&a),
        "--right",
        p(&a),
        "--order",
        "0",
        "--theta",
        "0",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let f = read_field(&a).unwrap();
    let g = read_field(&out).unwrap();
    let sq = f.mul(&f).unwrap();
    assert!(g.max_abs_diff(&sq).unwrap() < 1e-15);
    // θ needs two dimensions
    let o = psqm(&[
        "star",
        "mul",
        "--left",
        p(&a),
        "--right",
        p(&a),
        "--order",
        "1",
        "--theta",
        "1",
        "--out",
        p(&out),
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn evolve_ground_state_quarter_period() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.psqf");
    let out = dir.path().join("b.psqf");
    let f = gaussian_file(&a);
    let o = psqm(&[
        "evolve",
        "--state",
        p(&a),
        "--hamiltonian",
        "(q^2 + p^2)/2",
        "--t",
        "1.5707963267948966",
        "--dt",
        "0.02",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    // E = 1/2: ψ(π/2) = e^{−iπ/4} ψ(0)
    let g = read_field(&out).unwrap();
    let expected = f.scale(Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4));
    assert!(g.max_abs_diff(&expected).unwrap() < 1e-6);
}

#[test]
fn malformed_hamiltonian_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.psqf");
    gaussian_file(&a);
    let out = dir.path().join("b.psqf");
    for spec in ["q^", "x + 1", "q*(p", "q/p"] {
        let o = psqm(&[
            "evolve",
            "--state",
            p(&a),
            "--hamiltonian",
            spec,
            "--t",
            "1",
            "--dt",
            "0.1",
            "--out",
            p(&out),
        ]);
        assert_eq!(o.status.code(), Some(2), "{spec}");
        assert!(
            stderr(&o).contains("parse error at column"),
            "{spec}: {}",
            stderr(&o)
        );
    }
}

#[test]
fn bad_files_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.psqf");
    std::fs::write(&junk, b"nope").unwrap();
    let out = dir.path().join("o.csv");
    let o = psqm(&[
        "export",
        "csv",
        "--in",
        p(&junk),
        "--slice",
        "",
        "--out",
        p(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("field file"));
    let o = psqm(&["ho3d", "spectrum", "--emax", "5", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn memory_cap_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.psqf");
    let o = Command::new(env!("CARGO_BIN_EXE_psqm"))
        .args([
            "nc",
            "wigner",
            "--nx",
            "0",
            "--ny",
            "0",
            "--theta",
            "0",
            "--out",
            p(&out),
        ])
        .env("PSQM_MEM_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("memory cap"), "{}", stderr(&o));
    assert!(!out.exists());
}
