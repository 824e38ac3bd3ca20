use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lprj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lprj")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_then_estimate() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("y.txt");
    let out = lprj(&["simulate", "--d", "0.3", "--phi", "-0.4", "--n", "576", "--seed", "7", "--out", path(&file)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_to_string(&file).unwrap().lines().count(), 576);

    for est in ["lpr", "jack-chambers", "jack-feasible", "gs"] {
        let out = lprj(&["estimate", "--input", path(&file), "--estimator", est, "--p", "1"]);
        assert_eq!(code(&out), 0, "{est}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["estimator"], est);
        let d = v["d"].as_f64().unwrap();
        assert!(d > 0.0 && d < 0.7, "{est}: {d}");
    }
}

#[test]
fn simulate_is_seeded() {
    let a = lprj(&["simulate", "--d", "0.1", "--n", "64", "--seed", "3"]);
    let b = lprj(&["simulate", "--d", "0.1", "--n", "64", "--seed", "3"]);
    let c = lprj(&["simulate", "--d", "0.1", "--n", "64", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn mc_output_does_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mc.json");
    fs::write(
        &cfg,
        r#"{"d": 0.0, "phi": [0.4], "n": 96, "alpha": 0.65, "m_values": [2, 3], "schemes": ["no", "mb"],
            "estimators": ["lpr", "jack-opt", "jack-chambers", "jack-feasible", "gs", "pw"],
            "knowledge": "estimated", "reps": 16, "seed": 42}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "16", "4"] {
        let out = lprj(&["mc", "--config", path(&cfg), "--threads", threads]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(out.stdout);
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(outputs.pop().unwrap()).unwrap();
    assert!(text.starts_with("model_label,phi,theta,d0,n,alpha,scheme,m,estimator,knowledge,reps,bias,bias_mc_se,rmse,failures,seed\n"));
    assert_eq!(text.lines().count(), 1 + 3 + 3 * 4);

    let json = dir.path().join("mc.out.json");
    let out = lprj(&["mc", "--config", path(&cfg), "--format", "json", "--out", path(&json)]);
    assert_eq!(code(&out), 0);
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 15);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"d": 0.0, "n": 96, "estimators": ["lpr"], "colour": 1}"#).unwrap();
    assert_eq!(code(&lprj(&["mc", "--config", path(&bad)])), 2);
    assert_eq!(code(&lprj(&["mc", "--config", path(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&lprj(&["estimate", "--input", path(&bad), "--estimator", "nope"])), 2);

    let y = dir.path().join("y.txt");
    let series: String = (0..100).map(|t| format!("{}\n", (t as f64 * 0.7).sin())).collect();
    fs::write(&y, format!("value\n{series}")).unwrap();
    assert_eq!(code(&lprj(&["estimate", "--input", path(&y), "--estimator", "jack-chambers", "--m", "3"])), 2);

    let flat = dir.path().join("flat.txt");
    fs::write(&flat, "1\n".repeat(64)).unwrap();
    assert_eq!(code(&lprj(&["estimate", "--input", path(&flat)])), 3);
}
