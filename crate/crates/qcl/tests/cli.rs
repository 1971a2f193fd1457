use std::process::{Command, Output};

use qcl::report::{read_csv_values, Record};
use qcl_core::theorems::TWO_PI2;

fn qcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcl")).args(args).env("QCL_THREADS", "2").output().expect("binary runs")
}

fn records(out: &Output) -> Vec<Record> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn verify_examples() {
    let out = qcl(&["verify", "--theorem", "fueter32", "--f", "const:1", "--q0", "0,0,0,0", "--surface", "sphere:r=1", "--quad", "32", "--tol", "1e-6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert!((r.value[0] - 19.7392088).abs() < 1e-6);
    assert!(r.seconds > 0.0);

    let out = qcl(&["verify", "--theorem", "alt48", "--f", "const:1", "--surface", "prism:rho=1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &records(&out)[0];
    assert!((r.value[2] - 6.5797363).abs() < 1e-6, "{r:?}");

    let out = qcl(&["verify", "--theorem", "cauchy28", "--f", "poly:x - w*I", "--surface", "box:h=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(records(&out)[0].value.iter().all(|v| v.abs() < 1e-8));
}

#[test]
fn exit_codes() {
    let out = qcl(&["verify", "--theorem", "fueter32", "--quad", "2", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!records(&out)[0].pass);
    for bad in [
        vec!["verify", "--theorem", "fueter99"],
        vec!["verify", "--theorem", "fueter32", "--surface", "cube:h=1"],
        vec!["verify", "--theorem", "fueter32", "--q0", "1,2"],
        vec!["verify"],
        // q0 inside the surface is not allowed for the sandwich-zero theorem
        vec!["verify", "--theorem", "sandwichzero33", "--surface", "sphere:r=1"],
        // not left-regular
        vec!["verify", "--theorem", "fueter32", "--f", "poly:x"],
        vec!["convergence", "--theorem", "fueter32", "--quad", "8"],
        vec!["frobnicate"],
    ] {
        let out = qcl(&bad);
        assert_eq!(out.status.code(), Some(2), "{bad:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"theorem": "fueter32", "surface": "sphere:r=2", "orders": [16], "format": "csv"}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = qcl(&["verify", "--config", p]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("theorem,") && text.contains("sphere:r=2@"), "{text}");
    let out = qcl(&["verify", "--config", p, "--surface", "box:h=0.5", "--format", "json", "--quad", "8"]);
    let r = &records(&out)[0];
    assert_eq!(r.surface, "box:h=0.5@0,0,0,0");
    assert_eq!(r.quad.order, 8);
}

#[test]
fn csv_and_json_carry_the_same_bits() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("r.csv");
    let args = ["verify", "--theorem", "bialt71", "--f", "random:deg=1", "--seed", "5", "--q0", "0.1,0,-0.2,0.05"];
    let json = qcl(&args);
    let mut with_csv = args.to_vec();
    with_csv.extend(["--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(qcl(&with_csv).status.code(), Some(0));
    let rows = read_csv_values(&std::fs::read_to_string(&csv_path).unwrap()).unwrap();
    let r = &records(&json)[0];
    for k in 0..8 {
        assert_eq!(rows[0].0[k].to_bits(), r.value[k].to_bits());
        assert_eq!(rows[0].1[k].to_bits(), r.expected[k].to_bits());
    }
}

#[test]
fn convergence_sweeps() {
    let out = qcl(&["convergence", "--theorem", "fueter32", "--surface", "sphere:r=1@0.2,0,0,0", "--quad", "4,8,16", "--self-test"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let rows = records(&out);
    assert_eq!(rows.iter().map(|r| r.quad.order).collect::<Vec<_>>(), [4, 8, 16]);
    assert!(rows[0].abs_err > rows[1].abs_err && rows[1].abs_err > rows[2].abs_err);

    let out = qcl(&["convergence", "--theorem", "alt48", "--quad", "16,32,64"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(records(&out).last().unwrap().abs_err < 1e-4);
}

#[test]
fn table_rows() {
    let out = qcl(&["table", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = records(&out);
    let find = |t: &str, route: &str| rows.iter().find(|r| r.theorem == t && r.route == route && r.field == "const:1").unwrap();
    assert_eq!(find("fueter32", "surface").expected[0], TWO_PI2);
    assert_eq!(find("alt49", "surface").expected[4], TWO_PI2 / 3.0);
    assert!(find("bialt71", "narrow").pass && find("bialt71", "wide").pass);
    assert!(rows.iter().all(|r| r.pass));
}

#[test]
fn kernel_eval_and_residues() {
    let out = qcl(&["kernel-eval", "--kernel", "fueter", "--at", "2,0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // H(2) = 2/16
    assert_eq!(v["value"][0], 0.125);
    let out = qcl(&["kernel-eval", "--kernel", "alt-x", "--at", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));

    let out = qcl(&["residue", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains(",-0.25,") && text.contains(",-0.5,") && text.contains(",-2,"));

    let out = qcl(&["residue", "--den", "1,0,-2,0,1", "--pole", "1", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["analytic"][0], -0.25);
    // wrong pole order
    let out = qcl(&["residue", "--den", "-1,0,1", "--pole", "1", "--order", "2"]);
    assert_eq!(out.status.code(), Some(1));
}
