use std::path::PathBuf;
use std::process::{Command, Output};

fn algprog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_algprog")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn defpoly_line(expr: &str) -> String {
    let o = algprog(&["defpoly", expr]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    stdout(&o).lines().last().unwrap().to_string()
}

#[test]
fn defpoly_goldens() {
    assert_eq!(defpoly_line("sqrt(x)"), "z^2 - x");
    assert_eq!(defpoly_line("x^(1/3)"), "z^3 - x");
    assert_eq!(defpoly_line("sqrt(x) + sqrt(y)"), "z^4 - 2*y*z^2 - 2*x*z^2 + y^2 - 2*x*y + x^2");
}

#[test]
fn defpoly_reports_degrees() {
    let o = algprog(&["defpoly", "sqrt(x) + sqrt(y)"]);
    let out = stderr(&o);
    assert!(out.contains("z: degree 4 (bound 4"), "{out}");
}

#[test]
fn transcendental_input_is_a_parse_error() {
    let o = algprog(&["defpoly", "sin(x)"]);
    assert_eq!(o.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_str(stderr(&o).trim()).unwrap();
    assert_eq!(err["exit_code"], 3);
}

#[test]
fn domain_strategy_needs_a_domain() {
    let o = algprog(&["isolate", "sqrt(x)", "--strategy", "domain"]);
    assert_eq!(o.status.code(), Some(2));
}

fn counts(stderr: &str) -> &str {
    stderr.lines().find(|l| l.starts_with("auxiliary variables")).expect("count line")
}

#[test]
fn goldstein_price_uses_one_auxiliary_variable() {
    let gp = data("goldstein_price.json");
    let o = algprog(&["reformulate", &gp, "--strategy", "domain", "--point", "x=2,y=3", "--baseline"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(counts(&stderr(&o)).contains("1 (ours) vs 2 (one per radical)"));
}

#[test]
fn rosenbrock_uses_one_auxiliary_variable() {
    let r = data("rosenbrock.json");
    let o = algprog(&["reformulate", &r, "--strategy", "domain", "--point", "x=0,y=0", "--baseline"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(counts(&err).contains("1 (ours) vs 2 (one per radical)"));
    assert!(counts(&err).contains("open_dense_case"));
}

#[test]
fn polynomial_problems_pass_through() {
    let o = algprog(&["reformulate", &data("polynomial.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(counts(&stderr(&o)).contains("0 (ours) vs 0 (one per radical)"));
    let out: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(out["children"].as_array().unwrap().len(), 1);
    assert_eq!(out["aux_count_ours"], 0);
}

#[test]
fn smtlib_output_declares_the_new_variable() {
    let r = data("rosenbrock.json");
    let o = algprog(&["reformulate", &r, "--strategy", "domain", "--point", "x=0,y=0", "--format", "smtlib"]);
    let out = stdout(&o);
    assert!(out.contains("(set-logic QF_NRA)"));
    assert!(out.contains("(declare-fun z () Real)"));
}

#[test]
fn output_is_deterministic() {
    let gp = data("goldstein_price.json");
    let args = ["reformulate", &gp, "--strategy", "domain", "--point", "x=2,y=3", "--verify", "--seed", "7"];
    let a = algprog(&args);
    let b = algprog(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let c = algprog(&["isolate", "sqrt(x) + sqrt(y)", "--strategy", "grid", "--box", "x=1/4:4", "--box", "y=1/4:4", "--merge"]);
    let d = algprog(&["isolate", "sqrt(x) + sqrt(y)", "--strategy", "grid", "--box", "x=1/4:4", "--box", "y=1/4:4", "--merge"]);
    assert_eq!(c.status.code(), Some(0), "{}", stderr(&c));
    assert_eq!(stdout(&c), stdout(&d));
}

#[test]
fn verify_accepts_a_correct_defining_polynomial() {
    let o = algprog(&["verify", "--expr", "sqrt(x)", "--defining", "z^2 - x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn verify_failure_exits_four() {
    let o = algprog(&["verify", "--expr", "sqrt(x)", "--defining", "z^2 - x - 1"]);
    assert_eq!(o.status.code(), Some(4));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["records"][0]["status"], "fail");
}

#[test]
fn isolate_certificate_round_trips_through_verify() {
    let dir = std::env::temp_dir().join(format!("algprog-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cert = dir.join("cert.json");
    let cert = cert.to_str().unwrap();
    let o = algprog(&["isolate", "x^(1/2) + x^(1/3)", "--out", cert]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = algprog(&["verify", "--expr", "x^(1/2) + x^(1/3)", "--certificate", cert]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).ok();
}
