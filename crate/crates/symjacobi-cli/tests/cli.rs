use std::process::Command;

use symjacobi::basis::SymmetrizedCoeffs;
use symjacobi::jacobi::JacobiParams;
use symjacobi::operators::{riesz_apply, semigroup_apply, ParityTarget};
use symjacobi::verify::Suite;
use symjacobi_cli::{
    cmd_ap_check, cmd_basis, cmd_kernel, cmd_operator, cmd_verify, parse_atoms, parse_input,
    OpName, OperatorArgs, OperatorInput, Route, RunConfig,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symjacobi"))
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn basis_csv_header_constant_mode_and_parity() {
    let cfg = RunConfig {
        alpha: 0.5,
        beta: 2.0,
        n_max: 6,
        nodes: 10,
        ..Default::default()
    };
    let out = cmd_basis(&cfg).unwrap();
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "# alpha=0.5 beta=2 n_max=6");
    assert_eq!(lines.next().unwrap(), "n,theta,phi");
    let r = rows(&out);
    assert_eq!(r.len(), 7 * 10);
    let zero: Vec<f64> = r
        .iter()
        .filter(|x| x[0] == "0")
        .map(|x| num(&x[2]))
        .collect();
    assert!(zero.iter().all(|&v| (v - zero[0]).abs() < 1e-15));
    // the grid is symmetric, so row j and row 9 − j of each n are mirror images
    for n in 0..=6 {
        let block = &r[n * 10..(n + 1) * 10];
        for j in 0..10 {
            let (a, b) = (&block[j], &block[9 - j]);
            assert!((num(&a[1]) + num(&b[1])).abs() < 1e-15);
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((num(&a[2]) - sign * num(&b[2])).abs() < 1e-12);
        }
    }
}

#[test]
fn kernel_csv_routes_symmetry_and_mass() {
    let cfg = RunConfig {
        alpha: 0.5,
        beta: 2.0,
        nodes: 6,
        ..Default::default()
    };
    let t = 0.5;
    let out = cmd_kernel(&cfg, t, Route::Both).unwrap();
    assert!(out
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("t,theta,phi,H,H_tilde,H_sym,mass_H,route,rel_diff,status"));
    let r = rows(&out);
    assert_eq!(r.len(), 36);
    let target = 0.5 * (-0.5 * t * 3.5f64).exp();
    for (k, row) in r.iter().enumerate() {
        assert_eq!(row[9], "ok");
        assert!(num(&row[8]) < 1e-6);
        assert!((num(&row[6]) - target).abs() < 1e-10);
        let (i, j) = (k / 6, k % 6);
        let mirror = &r[j * 6 + i];
        assert!((num(&row[3]) - num(&mirror[3])).abs() <= 1e-12 * num(&row[3]).abs());
        assert!((num(&row[5]) - num(&mirror[5])).abs() <= 1e-12 * num(&row[5]).abs().max(1.0));
    }
}

#[test]
fn kernel_dk_route_rejects_small_parameters() {
    let cfg = RunConfig {
        alpha: -0.7,
        beta: 0.0,
        nodes: 4,
        ..Default::default()
    };
    assert!(cmd_kernel(&cfg, 1.0, Route::Dk).is_err());
    assert!(cmd_kernel(&cfg, 1.0, Route::Series).is_ok());
}

#[test]
fn operator_on_coefficients_matches_library() {
    let cfg = RunConfig {
        alpha: 0.0,
        beta: 0.0,
        n_max: 5,
        nodes: 8,
        ..Default::default()
    };
    let input = parse_input("index,value\n0,1.0\n1,0.5\n2,-0.25\n3,0.125\n").unwrap();
    let f = SymmetrizedCoeffs::new(
        JacobiParams::new(0.0, 0.0).unwrap(),
        vec![1.0, 0.5, -0.25, 0.125, 0.0, 0.0],
    );

    let args = OperatorArgs {
        op: OpName::Semigroup,
        t: 0.3,
        ..Default::default()
    };
    let out = cmd_operator(&cfg, &args, &input).unwrap();
    let got: Vec<f64> = rows(&out).iter().map(|r| num(&r[1])).collect();
    assert_eq!(got, semigroup_apply(&f, 0.3).unwrap().coeffs);

    let args = OperatorArgs {
        op: OpName::Riesz,
        order: 2,
        parity: ParityTarget::RestrictedEven,
        ..Default::default()
    };
    let out = cmd_operator(&cfg, &args, &input).unwrap();
    let got: Vec<f64> = rows(&out).iter().map(|r| num(&r[1])).collect();
    assert_eq!(
        got,
        riesz_apply(&f, 2, ParityTarget::RestrictedEven)
            .unwrap()
            .coeffs
    );

    let args = OperatorArgs {
        op: OpName::Gfun,
        m: 1,
        order: 0,
        ..Default::default()
    };
    let out = cmd_operator(&cfg, &args, &input).unwrap();
    assert_eq!(rows(&out).len(), 8);
    assert!(out.contains("theta,value"));
}

#[test]
fn operator_on_samples_analyses_first() {
    // a constant sample set is Φ₀ times √μ(−π, π); the semigroup then leaves it alone when λ₀ = 0
    let cfg = RunConfig {
        alpha: -0.5,
        beta: -0.5,
        n_max: 6,
        nodes: 64,
        ..Default::default()
    };
    let text: String = std::iter::once("theta,value".to_owned())
        .chain((0..=40).map(|j| format!("{},1.0", -3.2 + 6.4 * j as f64 / 40.0)))
        .collect::<Vec<_>>()
        .join("\n");
    let input = parse_input(&text).unwrap();
    assert!(matches!(input, OperatorInput::Samples(_)));
    let args = OperatorArgs {
        op: OpName::Semigroup,
        t: 2.0,
        ..Default::default()
    };
    let got: Vec<f64> = rows(&cmd_operator(&cfg, &args, &input).unwrap())
        .iter()
        .map(|r| num(&r[1]))
        .collect();
    assert!((got[0] - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    assert!(got[1..].iter().all(|c| c.abs() < 1e-12));
}

#[test]
fn multiplier_options() {
    assert_eq!(
        parse_atoms("0.5:1, 2:0.25").unwrap(),
        vec![(0.5, 1.0), (2.0, 0.25)]
    );
    assert!(parse_atoms("0.5").is_err());
    let cfg = RunConfig {
        n_max: 4,
        ..Default::default()
    };
    let input = OperatorInput::Coefficients(vec![0.0, 1.0, 1.0]);
    // a single atom at t reproduces the semigroup
    let atom = OperatorArgs {
        op: OpName::Multiplier,
        atoms: vec![(0.7, 1.0)],
        ..Default::default()
    };
    let semi = OperatorArgs {
        op: OpName::Semigroup,
        t: 0.7,
        ..Default::default()
    };
    assert_eq!(
        cmd_operator(&cfg, &atom, &input).unwrap(),
        cmd_operator(&cfg, &semi, &input).unwrap()
    );
    let bad = OperatorArgs {
        op: OpName::Multiplier,
        profile: "nope".into(),
        ..Default::default()
    };
    assert!(cmd_operator(&cfg, &bad, &input).is_err());
}

#[test]
fn bad_input_files() {
    assert!(parse_input("x,y\n1,2\n").is_err());
    assert!(parse_input("index,value\n1.5,2\n").is_err());
    assert!(parse_input("theta,value\n1,2,3\n").is_err());
}

#[test]
fn verify_basis_passes_and_is_deterministic() {
    let cfg = RunConfig {
        seed: 11,
        ..Default::default()
    };
    let a = cmd_verify(&cfg, Suite::Basis).unwrap();
    let b = cmd_verify(&cfg, Suite::Basis).unwrap();
    assert!(a.passed, "{:?}", a.failures());
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.to_json().contains("\"schema_version\": \"1\""));
}

#[test]
fn ap_check_out_of_range_diverges() {
    let cfg = RunConfig {
        level: 3,
        ..Default::default()
    };
    let r = cmd_ap_check(&cfg, 2.5, 0.0, 2.0).unwrap();
    assert_eq!(serde_json::to_value(r.verdict).unwrap(), "diverging");
    assert!(!r.in_class && r.agrees);
}

#[test]
fn binary_exit_codes() {
    let st = bin().args(["basis", "--bogus"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().args(["verify", "--suite", "nope"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin().args(["--alpha", "-2", "basis"]).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin()
        .args(["basis", "--nmax", "2", "--nodes", "4"])
        .env("SYMJACOBI_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(2));
    let st = bin()
        .args(["basis", "--nmax", "2", "--nodes", "4"])
        .env("SYMJACOBI_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert!(String::from_utf8(st.stdout)
        .unwrap()
        .starts_with("# alpha=0 beta=0 n_max=2\nn,theta,phi\n"));
}

#[test]
fn binary_verify_and_operator_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("basis.json");
    let st = bin()
        .args([
            "verify", "--suite", "basis", "--alpha", "0", "--beta", "0", "--report",
        ])
        .arg(&report)
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["schema_version"], "1");
    assert_eq!(json["passed"], true);

    let input = dir.path().join("f.csv");
    let output = dir.path().join("g.csv");
    std::fs::write(&input, "index,value\n0,1\n2,1\n").unwrap();
    let st = bin()
        .args([
            "operator", "--op", "riesz", "--N", "1", "--parity", "even", "--input",
        ])
        .arg(&input)
        .arg("--output")
        .arg(&output)
        .output()
        .unwrap();
    assert_eq!(
        st.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&st.stderr)
    );
    assert!(std::fs::read_to_string(&output)
        .unwrap()
        .contains("index,value"));

    let st = bin()
        .args([
            "ap-check", "--r", "1", "--s", "-1", "--p", "2", "--level", "3",
        ])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(0));
}
