use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn treedom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treedom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_figure1_and_closed_forms() {
    let o = treedom(&["eval", "--tree", "figure1-gamma", "--set", "counterexample"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("1075/7776"));

    let o = treedom(&["eval", "--tree", "figure1-gamma-prime", "--set", "counterexample", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], "499/3888");

    let o = treedom(&["eval", "--tree", "paths:2,3", "--some-path", "--set", "box:[0,1/2]^2"]);
    assert_eq!(stdout(&o).lines().next(), Some("37/64"));

    let o = treedom(&["eval", "--tree", "paths:3,2", "--set", "empty:3"]);
    assert_eq!(stdout(&o).lines().next(), Some("0"));

    let o = treedom(&["eval", "--sizes", "1,2", "--set", "box:[0,1/2]^2", "--format", "csv"]);
    assert!(stdout(&o).starts_with("quantity,exact,decimal\npsi,"));
}

#[test]
fn dominates_exit_codes() {
    let code = |a: &str, b: &str| treedom(&["dominates", "--tree", a, "--other", b]).status.code();
    assert_eq!(code("sphere:2,2", "sphere:1,2"), Some(0));
    assert_eq!(code("height2:2,2", "height2:3,1"), Some(0));
    assert_eq!(code("height2:3,1", "height2:2,2"), Some(1));
    assert_eq!(code("sphere:1,2", "sphere:2,2"), Some(1));

    let o = treedom(&["dominates", "--tree", "figure1-gamma", "--other", "figure1-gamma-prime"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("undecidable by implemented criteria"));
    assert!(out.contains("1075/7776") && out.contains("499/3888"));
}

#[test]
fn tilde_pairs_alternating_growth() {
    let o = treedom(&["tilde", "--growth", "alt:1,2^n", "--N", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let values = v["values"].as_array().unwrap();
    assert_eq!(values.len(), 20);
    for j in 1..10usize {
        let want = 2f64.powf(j as f64 / 2.0);
        for n in [2 * j, 2 * j + 1] {
            let got = values[n - 1]["tilde_f"].as_f64().unwrap();
            assert!((got - want).abs() < 1e-9 * want, "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn classify_reports_regimes() {
    let regime = |g: &str| {
        let o = treedom(&["classify", "--growth", g, "--alpha", "1"]);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        (v["verdict"]["regime"].as_str().unwrap().to_string(), v["verdict"]["authority"].as_str().unwrap().to_string())
    };
    assert_eq!(regime("poly:1"), ("no-explosion".into(), "analytic".into()));
    assert_eq!(regime("poly:2"), ("explosion".into(), "analytic".into()));
    assert_eq!(regime("alt:1,2^n"), ("explosion".into(), "analytic".into()));
    assert_eq!(regime("table:1,2,3,4,5,6,7,8,9,10").1, "evidence");
}

#[test]
fn simulate_writes_outputs_and_replays_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = treedom(&[
        "simulate", "--growth", "poly:1", "-N", "50", "--replicas", "4", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    assert!(csv.starts_with("level,m_hat,normalizer,ratio,mode,seed,replica\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 50);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["ratio_statistics"]["bands"].as_array().unwrap().len(), 50);

    let manifest_path = out.join("manifest.json");
    let manifest: Value = serde_json::from_str(&fs::read_to_string(&manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert!(manifest["inputs"]["growth"].as_str().unwrap().len() == 64);
    assert!(manifest["outputs"]["trajectories.csv"].is_string());

    let again = dir.path().join("again");
    let r = treedom(&["replay", manifest_path.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(r.status.success(), "{}", stdout(&r));
    assert!(stdout(&r).contains("replay: identical"));
    assert_eq!(fs::read(out.join("trajectories.csv")).unwrap(), fs::read(again.join("trajectories.csv")).unwrap());

    // A tampered hash is detected.
    let tampered = manifest_path.to_str().unwrap().replace("manifest.json", "tampered.json");
    let text = fs::read_to_string(&manifest_path).unwrap();
    let h = manifest["outputs"]["summary.json"].as_str().unwrap();
    fs::write(&tampered, text.replace(h, &"0".repeat(64))).unwrap();
    let r = treedom(&["replay", &tampered]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("output summary.json: MISMATCH"));
}

#[test]
fn exact_runs_replay_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let tree = dir.path().join("tree.json");
    fs::write(&tree, r#"{"children":[{"children":[{},{}]},{"children":[{}]}]}"#).unwrap();
    let set = dir.path().join("set.json");
    fs::write(&set, r#"{"dim":2,"boxes":[{"lo":["0","0"],"hi":["1/2","1"]}]}"#).unwrap();
    let out = dir.path().join("out");
    let o = treedom(&[
        "eval",
        "--tree",
        &format!("@{}", tree.display()),
        "--set",
        &format!("@{}", set.display()),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().next(), Some("1/4"));
    let r = treedom(&["replay", out.join("manifest.json").to_str().unwrap()]);
    assert!(r.status.success());

    // Changing an input file is reported.
    fs::write(&set, r#"{"dim":2,"boxes":[{"lo":["0","0"],"hi":["1","1"]}]}"#).unwrap();
    let r = treedom(&["replay", out.join("manifest.json").to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stdout(&r).contains("input set: MISMATCH"));
}

#[test]
fn malformed_input_points_at_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("set.json");
    fs::write(&set, r#"{"dim":2,"boxes":[{"lo":["0","0"],"hi":["1/2","x"]}]}"#).unwrap();
    let out = dir.path().join("out");
    let o = treedom(&[
        "eval", "--tree", "paths:2,2", "--set", &format!("@{}", set.display()), "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(64));
    assert!(stderr(&o).contains("/boxes/0/hi/1"), "{}", stderr(&o));
    assert!(!out.exists(), "no partial output on failure");

    let o = treedom(&["eval", "--tree", "paths:2,2", "--set", "box:[0,1/2]^3"]);
    assert_eq!(o.status.code(), Some(65));
    let o = treedom(&["tilde", "--growth", "cubic:3"]);
    assert_eq!(o.status.code(), Some(64));
    let o = treedom(&["simulate", "--growth", "poly:1", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(64));
}

#[test]
fn scan_conjecture_small_run() {
    let o = treedom(&["scan-conjecture", "--samples", "60", "--seed", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["violation_count"], 0);
    assert_eq!(v["samples"], 60);
}
