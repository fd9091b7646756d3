use assert_cmd::Command;
use std::path::PathBuf;

fn mcg() -> Command {
    Command::cargo_bin("mcg").unwrap()
}

fn stdout(args: &[&str]) -> (String, i32) {
    let out = mcg().args(args).output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), out.status.code().unwrap())
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mcg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn boundary_genus_two() {
    let (out, code) = stdout(&["boundary", "--genus", "2"]);
    assert_eq!(out, "[1,2,-1,-2,3,4,-3,-4]\n");
    assert_eq!(code, 0);
}

#[test]
fn lantern_verifies() {
    let (out, code) = stdout(&["verify", "--relation", "lantern", "--genus", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("PASS lantern"));
}

#[test]
fn crossed_lantern_and_telescope_verify() {
    assert_eq!(stdout(&["verify", "--relation", "crossed-lantern", "--genus", "2"]).1, 0);
    let (out, code) = stdout(&["verify", "--relation", "telescope", "--genus", "3", "--p", "5"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("PASS coefficient: coefficient 5"));
}

#[test]
fn irreducible_reports_the_invariant_line() {
    let (out, code) = stdout(&["irreducible", "--g", "1", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("reducible: invariant subspace of dimension 1"));
    assert!(out.contains("[[1,0],[0,1]]"));
    let (out, _) = stdout(&["irreducible", "--g", "1", "--p", "3"]);
    assert!(out.lines().any(|l| l == "irreducible"));
}

#[test]
fn johnson_rejects_non_torelli_input() {
    let f = temp_file("twist.json", r#"{"genus": 2, "provenance": "Ta1^3"}"#);
    let (out, code) = stdout(&["johnson", "--in", f.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.starts_with("FAIL torelli"));
    let (out, code) = stdout(&["johnson", "--in", f.to_str().unwrap(), "--mod", "3"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn johnson_of_a_bounding_pair() {
    let f = temp_file("bp.json", r#"{"genus": 3, "provenance": "Ta2 * ((Ta1 * Tb1 * Tc1 * Tb2)^5 * Ta2 * (Ta1 * Tb1 * Tc1 * Tb2)^-5)^-1"}"#);
    let (out, code) = stdout(&["johnson", "--in", f.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with('{'));
}

#[test]
fn serialized_mapping_classes_round_trip() {
    use mcg_core::surface::{standard_twist, Curve};
    let ctx = mcg_core::SurfaceContext::new(2).unwrap();
    let t = standard_twist(&ctx, Curve::B(1)).unwrap();
    let f = temp_file("tb1.json", &t.to_json());
    let (out, code) = stdout(&["abelianize", "--in", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS symplectic"));
    let (out, _) = stdout(&["level", "--in", f.to_str().unwrap(), "--p", "3"]);
    assert!(out.starts_with("level 3: not a member"));
}

#[test]
fn psi_and_charney() {
    let m = temp_file("m.json", r#"{"rows": [[1, 3, 0], [0, 1, 0], [0, 0, 1]]}"#);
    let (out, code) = stdout(&["psi", "--flavor", "sl", "--p", "3", "--in", m.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with(r#"{"flavor":"sl","p":3,"rows":[[0,1,0],[0,0,0],[0,0,0]]}"#));
    let (_, code) = stdout(&["psi", "--flavor", "sl", "--p", "5", "--in", m.to_str().unwrap()]);
    assert_eq!(code, 1);
    let (out, code) = stdout(&["charney", "--n", "3", "--p", "3", "--in", m.to_str().unwrap(), "--which", "G"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("G: member"));
}

#[test]
fn generate_modp() {
    let (out, code) = stdout(&["generate-modp", "--g", "2", "--p", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("generated 720 of 720"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(stdout(&["bogus"]).1, 2);
    assert_eq!(stdout(&["boundary"]).1, 2);
    assert_eq!(stdout(&["boundary", "--genus", "0"]).1, 2);
    assert_eq!(stdout(&["abelianize", "--in", "/nonexistent/file.json"]).1, 2);
}

#[test]
fn reports_are_reproducible() {
    let args = ["--json", "verify", "--relation", "telescope", "--genus", "3", "--p", "3"];
    assert_eq!(stdout(&args), stdout(&args));
}

#[test]
fn selftest_passes() {
    let (out, code) = stdout(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 15);
}
