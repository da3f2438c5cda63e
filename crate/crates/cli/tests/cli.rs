use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn write(d: &Path, name: &str, v: &Value) -> String {
    let p = d.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn diag(entries: &[f64]) -> Value {
    let n = entries.len();
    let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0.0 }).collect()).collect();
    json!({ "dim": n, "re": re })
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conemetric")).args(args).output().unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

/// Werner state p·Sym/d_s + (1−p)·Anti/d_a on C^d ⊗ C^d.
fn werner(d: usize, p: f64) -> Vec<Vec<f64>> {
    let n = d * d;
    let (ds, da) = ((d * (d + 1) / 2) as f64, (d * (d - 1) / 2) as f64);
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let id = if r == c { 1.0 } else { 0.0 };
                    let swap = if c == (r % d) * d + r / d { 1.0 } else { 0.0 };
                    p * (id + swap) / 2.0 / ds + (1.0 - p) * (id - swap) / 2.0 / da
                })
                .collect()
        })
        .collect()
}

#[test]
fn hilbert_commuting_equal_and_disjoint() {
    let d = dir("hilbert");
    let a = write(&d, "a.json", &diag(&[2.0, 1.0]));
    let b = write(&d, "b.json", &diag(&[0.5, 0.5]));
    let o = run(&["hilbert", &a, &b]);
    assert!(o.status.success());
    let v = json_out(&o);
    // diagonal ratios are 4 and 2
    assert!((f(&v["h"]) - (4.0f64 / 2.0).ln()).abs() < 1e-12);
    assert!((f(&v["sup"]) - 4.0).abs() < 1e-12);
    assert!((f(&v["inf"]) - 2.0).abs() < 1e-12);
    let v = json_out(&run(&["hilbert", &a, &a]));
    assert_eq!(f(&v["h"]), 0.0);
    let p0 = write(&d, "p0.json", &diag(&[1.0, 0.0]));
    let p1 = write(&d, "p1.json", &diag(&[0.0, 1.0]));
    let v = json_out(&run(&["hilbert", &p0, &p1]));
    assert_eq!(v["h"], json!("inf"));
}

#[test]
fn norms_on_werner_difference() {
    let d = dir("norm");
    let v = write(&d, "v.json", &diag(&[1.0, -1.0]));
    let o = json_out(&run(&["norm", &v]));
    assert!((f(&o["value"]) - 2.0).abs() < 1e-12);
    let (w1, w2) = (werner(3, 0.9), werner(3, 0.4));
    let diff: Vec<Vec<f64>> = w1.iter().zip(&w2).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
    let v = write(&d, "w.json", &json!({ "dim": 9, "re": diff, "shape": [3, 3] }));
    let plus = json_out(&run(&["norm", "--kind", "dist", "--measurements", "plus", &v]));
    assert!((f(&plus["value"]) - 1.0).abs() < 1e-10);
    let ppt = json_out(&run(&["norm", "--kind", "dist", "--measurements", "ppt", &v]));
    assert!((f(&ppt["value"]) - 2.0 / 3.0).abs() < 1e-10);
    let pp = json_out(&run(&["norm", "--kind", "dist", "--measurements", "ppt-plus", &v]));
    assert!((f(&pp["value"]) - 0.5).abs() < 1e-4);
    assert_eq!(pp["method"], json!("conic_solver"));
    // shape may also come from the flag
    let v2 = write(&d, "w2.json", &json!({ "dim": 9, "re": werner(3, 0.9) }));
    let o = run(&["norm", "--cone", "ppt", &v2]);
    assert_eq!(o.status.code(), Some(2), "missing shape is a usage error");
    let o = run(&["norm", "--cone", "ppt", "--shape", "3x3", &v2]);
    assert!(o.status.success());
}

#[test]
fn diameters() {
    let d = dir("diameter");
    let half = json!({ "dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]] });
    let t = write(&d, "dep.json", &json!({ "kind": "depolarizing", "p": 0.5, "sigma": half }));
    let o = json_out(&run(&["diameter", &t]));
    assert_eq!(o["exact"], json!(true));
    assert!((f(&o["lower"]) - 2.0 * 3f64.ln()).abs() < 1e-12);
    let t0 = write(&d, "dep0.json", &json!({ "kind": "depolarizing", "p": 0.0, "sigma": half }));
    assert_eq!(f(&json_out(&run(&["diameter", &t0]))["lower"]), 0.0);
    let id3: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let id = write(&d, "id.json", &json!({ "kind": "kraus", "kraus": [{ "re": id3 }] }));
    let o = json_out(&run(&["diameter", "--samples", "16", &id]));
    assert_eq!(o["inf_suspect"], json!(true));
    let bad = write(
        &d,
        "np.json",
        &json!({ "kind": "superop", "in_dim": 2, "out_dim": 2,
                 "matrix": [[1, 0, 0, 0], [0, 3, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]] }),
    );
    assert_eq!(run(&["diameter", &bad]).status.code(), Some(3));
    let aff = write(
        &d,
        "aff.json",
        &json!({ "kind": "qubit_affine", "lambda": [[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]], "v": [0, 0, 0] }),
    );
    let o = json_out(&run(&["diameter", &aff]));
    assert!((f(&o["lower"]) - 2.0 * 3f64.ln()).abs() < 1e-12);
}

#[test]
fn check_suites_and_exit_codes() {
    let o = run(&["check", "--suite", "fidelity", "--n", "200", "--seed", "7", "--dims", "3"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("certified failures: 0"));
    let o = run(&["check", "--suite", "birkhoff", "--n", "20"]);
    assert!(o.status.success());
    let o = run(&["check", "--suite", "spectral", "--dims", "2,3,4"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("d=2"));
    assert_eq!(run(&["check", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--suite", "fidelity", "--dims", "1"]).status.code(), Some(3));
    assert_eq!(run(&["hilbert", "/nonexistent.json", "/nonexistent.json"]).status.code(), Some(2));
}

#[test]
fn synthesis_cases() {
    let d = dir("synth");
    let p0 = write(&d, "p0.json", &diag(&[1.0, 0.0]));
    let p1 = write(&d, "p1.json", &diag(&[0.0, 1.0]));
    let h = write(&d, "h.json", &diag(&[0.5, 0.5]));
    let o = run(&["synthesize", &p0, &p1, &h, &h]);
    assert!(o.status.success());
    let v = json_out(&o);
    for k in 0..2 {
        assert!((f(&v["p"][k]) - 1.0).abs() < 1e-12);
    }
    // T(ρ) = tr(ρ) I/2 has Choi matrix I/2
    let choi = &v["map"]["choi"];
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 0.5 } else { 0.0 };
            assert!((f(&choi["re"][i][j]) - want).abs() < 1e-12);
        }
    }
    assert_eq!(v["instrument"]["trace_preserving"], json!(true));

    let a = write(&d, "a.json", &diag(&[0.7, 0.3]));
    let o = run(&["synthesize", &a, &h, &a, &h]);
    assert!(o.status.success(), "identity pair is feasible");

    let (x, y) = (write(&d, "x.json", &diag(&[0.6, 0.4])), write(&d, "y.json", &diag(&[0.4, 0.6])));
    let (xp, yp) = (write(&d, "xp.json", &diag(&[0.9, 0.1])), write(&d, "yp.json", &diag(&[0.1, 0.9])));
    let o = run(&["synthesize", &x, &y, &xp, &yp]);
    assert_eq!(o.status.code(), Some(4));
    let v = json_out(&o);
    assert!(f(&v["h_out"]) > f(&v["h_in"]));
}

#[test]
fn demos_run_clean() {
    let o = run(&["demo", "--name", "data_hiding"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("1.000000") && text.contains("0.666667") && text.contains("0.500000"));
    let o = run(&["demo", "--name", "optimality"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("0.244918"));
    for name in ["werner_diameters", "qubit_restriction"] {
        assert!(run(&["demo", "--name", name]).status.success());
    }
}

#[test]
fn output_is_deterministic_and_reparses() {
    let d = dir("roundtrip");
    let a = write(&d, "a.json", &json!({ "dim": 2, "re": [[0.7, 0.1], [0.1, 0.3]], "im": [[0.0, 0.2], [-0.2, 0.0]] }));
    let b = write(&d, "b.json", &diag(&[0.5, 0.5]));
    let c = write(&d, "c.json", &diag(&[0.8, 0.2]));
    let args = ["synthesize", &a, &b, &c, &b];
    let (o1, o2) = (run(&args), run(&args));
    assert!(o1.status.success());
    assert_eq!(o1.stdout, o2.stdout);
    // every printed matrix re-reads to the same bits and prints identically
    let v = json_out(&o1);
    let choi = &v["map"]["choi"];
    let again: Value = serde_json::from_str(&serde_json::to_string(choi).unwrap()).unwrap();
    assert_eq!(choi, &again);
    let file = write(&d, "choi.json", choi);
    let o = run(&["hilbert", &file, &file]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn log_file_is_written() {
    let d = dir("log");
    let log = d.join("run.log");
    let _ = std::fs::remove_file(&log);
    let o = run(&["check", "--suite", "chernoff", "--n", "5", "--log", log.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&log).unwrap().contains("check chernoff"));
}
