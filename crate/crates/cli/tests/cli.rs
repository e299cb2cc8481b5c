use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fgdef(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fgdef"))
        .args(args)
        .env_remove("FGDEF_BUDGET")
        .output()
        .expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn mersenne_lmax_13_rows_and_checks() {
    let o = fgdef(&["mersenne", "--field", "5", "--curve", "0,0,0,1,0", "--lmax", "13"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json_out(&o);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["config"]["lmax"], 13);
    let r = &v["result"];
    assert_eq!(r["curve"]["t"], 2);
    assert_eq!(r["curve"]["N1"], 4);
    assert_eq!(r["at_most_two"]["pass"], true);
    assert_eq!(r["psi_sum"]["holds"], true);
    let rows = r["rows"].as_array().unwrap();
    let ells: Vec<u64> = rows.iter().map(|x| x["ell"].as_u64().unwrap()).collect();
    assert_eq!(ells, vec![2, 3, 5, 7, 11, 13]);
    assert_eq!(rows[0]["e_ell"], "8");
    assert_eq!(rows[1]["e_ell"], "37");
    assert_eq!(rows[1]["psi"]["den"], "37");
    assert_eq!(r["min_psi"]["ell"], 11);
    assert_eq!(r["min_psi"]["psi"], rows[4]["psi"]);
}

#[test]
fn mersenne_csv_is_a_subset_of_json() {
    let o = fgdef(&["mersenne", "--field", "5", "--curve", "0,0,0,1,0", "--lmax", "5", "--bound", "5", "--out", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "ell,e_ell,factors,psi_num,psi_den,complete");
    assert_eq!(lines[1], "2,8,2^3,1,2,true");
    assert_eq!(lines[2], "3,37,37^1,1,37,true");
}

#[test]
fn reports_are_byte_identical_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = fgdef(&["dvr", "--trials", "300", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(v["seed"], 7);
    assert_eq!(v["config"]["trials"], 300);
    assert_eq!(v["result"]["conclusion"], "anisotropic");
    let leftovers = std::fs::read_dir(dir.path()).unwrap().count();
    assert_eq!(leftovers, 2);
}

#[test]
fn char0_sentence_with_everything_bound_is_false() {
    let dir = tempfile::tempdir().unwrap();
    let sentence = dir.path().join("char0.sexp");
    let o = fgdef(&["emit", "char0", "--out", sentence.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let all = write(dir.path(), "all.sexp", "(lambda (x) (= x x))\n");
    let bind = format!("Z_PREDICATE={all}");
    let o = fgdef(&["eval-formula", "--field", "5", "--formula", sentence.to_str().unwrap(), "--bind", &bind]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "false\n");
}

#[test]
fn eval_with_assignment_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sq.sexp", "(exists y (= (* y y) x))");
    let yes = fgdef(&["eval-formula", "--field", "7", "--formula", &f, "--assign", "x=2"]);
    assert_eq!(String::from_utf8(yes.stdout).unwrap(), "true\n");
    let no = fgdef(&["eval-formula", "--field", "7", "--formula", &f, "--assign", "x=3"]);
    assert_eq!(String::from_utf8(no.stdout).unwrap(), "false\n");
    let over = fgdef(&["eval-formula", "--field", "7", "--formula", &f, "--assign", "x=3", "--budget", "2"]);
    assert_eq!(over.status.code(), Some(1));
    let unassigned = fgdef(&["eval-formula", "--field", "7", "--formula", &f]);
    assert_eq!(unassigned.status.code(), Some(1));
}

#[test]
fn budget_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "sq.sexp", "(exists y (= (* y y) x))");
    let o = Command::new(env!("CARGO_BIN_EXE_fgdef"))
        .args(["eval-formula", "--field", "7", "--formula", &f, "--assign", "x=3"])
        .env("FGDEF_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn incomplete_scan_keeps_partial_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("m.json");
    let o = fgdef(&["mersenne", "--field", "5", "--lmax", "60", "--budget", "10", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["complete"], false);
    assert!(v["result"]["rows"].as_array().unwrap().iter().any(|r| r["complete"] == false));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(fgdef(&["nope"]).status.code(), Some(1));
    assert_eq!(fgdef(&["mersenne", "--field", "6"]).status.code(), Some(1));
    assert_eq!(fgdef(&["springer", "--d", "2", "--ext-degree", "2"]).status.code(), Some(1));
    assert_eq!(fgdef(&["emit", "anisotropy-membership", "--d", "3"]).status.code(), Some(1));
    assert_eq!(fgdef(&["genprob", "--field", "5", "--ell", "2", "--out", "csv"]).status.code(), Some(1));
    assert_eq!(fgdef(&["--help"]).status.code(), Some(0));
}

#[test]
fn help_lists_defaults() {
    let o = fgdef(&["mersenne", "--help"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[default: auto]"));
    assert!(text.contains("[default: 60]"));
    assert!(text.contains("FGDEF_BUDGET"));
}

#[test]
fn genprob_j_zero_curve_passes_over_the_larger_ring() {
    let o = fgdef(&["genprob", "--field", "7", "--curve", "0,0,0,0,5", "--ell", "2", "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_out(&o)["result"]["report"];
    assert_eq!(r["ring"], "Z[F, zeta_3]");
    assert_eq!(r["pass"], true);
    assert_eq!(r["total"], 63);
}

#[test]
fn springer_cw_and_zsum() {
    let s = fgdef(&["springer", "--d", "3", "--base", "2", "--ext-degree", "2"]);
    assert_eq!(s.status.code(), Some(0));
    assert_eq!(json_out(&s)["result"]["counterexamples"], serde_json::json!([]));
    let c = fgdef(&["cw", "--q", "4,5", "--out", "csv"]);
    assert_eq!(c.status.code(), Some(0));
    let text = String::from_utf8(c.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("F_2^2,3,6,27,27,0"));
    let z = fgdef(&["zsum", "--q", "5"]);
    assert_eq!(z.status.code(), Some(0));
    assert_eq!(json_out(&z)["result"]["summary"]["q"], 5);
}

#[test]
fn dvr_control_lifts_its_witness() {
    let o = fgdef(&["dvr", "--coeffs", "1,1", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json_out(&o)["result"]["conclusion"], "isotropic-with-witness");
}

#[test]
fn emitted_formulas_parse_back() {
    for kind in ["represents-zero", "s-family", "t-family", "a-s", "char0", "anisotropy-membership", "algdep"] {
        let o = fgdef(&["emit", kind]);
        assert_eq!(o.status.code(), Some(0), "{kind}");
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(fgdef::logic::parse_formula(&text).is_ok(), "{kind}");
    }
}

#[test]
fn selftest_on_a_clean_build_passes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("selftest.json");
    let o = fgdef(&["selftest", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["result"]["pass"], true);
    assert_eq!(v["schema_version"], 1);
}
