use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_metaplectic"));
    c.env_remove("METAPLECTIC_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const J: &str = r#"{"d": 1, "rows": [[0, 1], [-1, 0]], "label": "J"}"#;

#[test]
fn check_standard_j() {
    let dir = TempDir::new().unwrap();
    let j = file(dir.path(), "j.json", J);
    let o = run(&["check", s(&j)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "symplectic: yes (residual 0.000e0)\n\
         free: yes (sigma_min(B)/sigma_max(S) = 1.000e0)\n\
         shift-invertible: n/a (odd d)\n"
    );
}

#[test]
fn check_wigner_matrix_is_shift_invertible() {
    let dir = TempDir::new().unwrap();
    let m = file(
        dir.path(),
        "w.json",
        r#"{"d": 2, "rows": [[0.5, 0.5, 0, 0], [0, 0, 0.5, -0.5], [0, 0, 1, 1], [-1, 1, 0, 0]]}"#,
    );
    let o = run(&["check", s(&m)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("shift-invertible: yes (det E = 2.500000e-1)"), "{}", stdout(&o));
}

#[test]
fn classify_free_det_b_four() {
    let dir = TempDir::new().unwrap();
    let m = file(dir.path(), "b.json", r#"{"d": 1, "rows": [[0, 4], [-0.25, 0]]}"#);
    let o = run(&["classify", "--p", "1", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "case: free (B invertible)\ndet A: 0.000000e0\ndet B: 4.000000e0\nnorm L^1 -> L^inf: 0.500000\n"
    );
    let m = file(dir.path(), "b2.json", r#"{"d": 1, "rows": [[0, 0.25], [-4, 0]]}"#);
    let o = run(&["classify", "--p", "1", s(&m)]);
    assert!(stdout(&o).ends_with("norm L^1 -> L^inf: 2.000000\n"), "{}", stdout(&o));
}

#[test]
fn classify_ambiguous_exits_three() {
    let dir = TempDir::new().unwrap();
    let m = file(dir.path(), "a.json", r#"{"d": 1, "rows": [[1, 1e-11], [0, 1]]}"#);
    let o = run(&["classify", s(&m)]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("case: ambiguous"));
}

#[test]
fn factorize_rejects_non_symplectic() {
    let dir = TempDir::new().unwrap();
    let m = file(dir.path(), "bad.json", r#"{"d": 1, "rows": [[1, 1], [0, 2]]}"#);
    let o = run(&["factorize", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not symplectic"));
}

#[test]
fn malformed_input_reports_location() {
    let dir = TempDir::new().unwrap();
    let m = file(dir.path(), "bad.json", "{\"d\": 1,\n\"rows\": [[1, 0], [0]]}");
    let o = run(&["check", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rows[1]: expected 2 entries, got 1"), "{}", stderr(&o));
    let m = file(dir.path(), "bad2.json", "{\"d\": 1,\n\"rows\": [[1, 0] [0, 1]]}");
    let o = run(&["check", s(&m)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = run(&["check", "/nonexistent/matrix.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_verb_is_rejected() {
    let o = run(&["transmogrify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn factorize_writes_report() {
    let dir = TempDir::new().unwrap();
    let j = file(dir.path(), "j.json", J);
    let out = dir.path().join("f.json");
    let o = run(&["factorize", s(&j), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"label\": \"J\""));
    assert!(text.contains("\"residual\": 0.0"));
}

#[test]
fn tolerance_from_environment() {
    let dir = TempDir::new().unwrap();
    let m = file(dir.path(), "near.json", r#"{"d": 1, "rows": [[1, 0], [0, 1.000001]]}"#);
    assert_eq!(run(&["check", s(&m)]).status.code(), Some(2));
    let o = bin().env("METAPLECTIC_TOL", "1e-5").args(["check", s(&m)]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = run(&["check", "--tol", "1e-5", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn apply_fourier_to_gaussian() {
    let dir = TempDir::new().unwrap();
    let j = file(dir.path(), "j.json", J);
    let out = dir.path().join("out.json");
    let o = run(&["apply", s(&j), "--n", "64", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(r#"{"d":1,"n":64,"extent":4.0,"values":["#));
    let o2 = run(&["apply", s(&j), s(&out)]);
    assert_eq!(o2.status.code(), Some(0));
}

#[test]
fn wigner_csv_and_json() {
    let dir = TempDir::new().unwrap();
    let j = file(dir.path(), "j.json", J);
    let f = dir.path().join("f.json");
    run(&["apply", s(&j), "--n", "16", "--out", s(&f)]);
    let csv = dir.path().join("w.csv");
    let o = run(&["wigner", s(&f), "--out", s(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("z1,z2,abs"));
    assert_eq!(text.lines().count(), 257);
    let o = run(&["wigner", s(&f), "--kind", "metaplectic"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["wigner", s(&f), "--kind", "stft"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn quantize_weyl_identity() {
    let dir = TempDir::new().unwrap();
    let w = file(
        dir.path(),
        "w.json",
        r#"{"d": 2, "rows": [[0.5, 0.5, 0, 0], [0, 0, 0.5, -0.5], [0, 0, 1, 1], [-1, 1, 0, 0]]}"#,
    );
    let n = 16;
    let ones: Vec<String> = (0..n * n).flat_map(|_| ["1".to_string(), "0".to_string()]).collect();
    let sym =
        file(dir.path(), "a.json", &format!(r#"{{"d": 2, "n": {n}, "extent": 2.0, "values": [{}]}}"#, ones.join(",")));
    let o = run(&["quantize", s(&w), s(&sym), "--out", s(&dir.path().join("y.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("rows: 16\nadjoint defect: "), "{out}");
    assert!(out.contains("trace: 1.600000e1"), "{out}");
}

#[test]
fn probe_writes_table_and_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("t.csv");
    let o = run(&["probe", "unbounded", "--p", "1", "--q", "inf", "--out", s(&table)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("verdict: diverges"));
    assert!(text.contains(&format!("table: {}", table.display())));
    let csv = fs::read_to_string(&table).unwrap();
    assert_eq!(csv.lines().next(), Some("parameter,label,ratio,reference"));
    assert_eq!(csv.lines().count(), 7);
    let again = run(&["probe", "unbounded", "--p", "1", "--q", "inf", "--out", s(&table)]);
    assert_eq!(stdout(&again), text);
    assert_eq!(fs::read_to_string(&table).unwrap(), csv);
}

#[test]
fn probe_preconditions() {
    let dir = TempDir::new().unwrap();
    let j = file(dir.path(), "j.json", J);
    let o = run(&["probe", "unbounded", s(&j)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["probe", "beckner", s(&j), "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verdict: converges"));
    let o = run(&["probe", "beckner", s(&j), "--p", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn demo_table() {
    let o = run(&["demo"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 6);
    assert!(text.ends_with("verdict: converges\n"));
    assert_eq!(stdout(&run(&["demo"])), text);
}
