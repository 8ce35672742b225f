use std::process::{Command, Output};

use serde_json::Value;

fn geomprob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomprob"))
        .args(args)
        .env_remove("GEOMPROB_SEED")
        .output()
        .expect("binary runs")
}

fn last_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().last().expect("some output");
    serde_json::from_str(line).expect("report line is JSON")
}

#[test]
fn exact_table_writes_csv() {
    let dir = std::env::temp_dir().join(format!("geomprob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("table.csv");
    let out = geomprob(&[
        "exact-table",
        "--d",
        "2..4",
        "--k",
        "1..3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("d,k,ball_moment,pinned_moment,ratio_bound,chain_bound")
    );
    let row: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("3,2,"))
        .unwrap()
        .split(',')
        .collect();
    assert!((row[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(text.lines().count(), 10);
    let rep = last_json(&out);
    assert_eq!(rep["name"], "exact-table");
    assert_eq!(rep["verdict"], "pass");
}

#[test]
fn table_rows_as_json() {
    let out = geomprob(&["k0-scan", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["d"], 2);
    assert_eq!(first["k0"], 8);
}

#[test]
fn malformed_body_exits_2() {
    let out = geomprob(&["estimate", "--body", "{\"type\": \"ball\", \"radius\": "]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = geomprob(&["estimate", "--body", "{\"type\": \"torus\"}"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(geomprob(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        geomprob(&["exact-table", "--d", "4..2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        geomprob(&["counterexample", "--d", "four"]).status.code(),
        Some(2)
    );
}

#[test]
fn seed_from_environment_and_flag() {
    let body = r#"{"type":"ball","center":[0,0],"radius":1}"#;
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_geomprob"));
        cmd.args(["estimate", "--body", body, "--n", "2000"]);
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        match env {
            Some(e) => cmd.env("GEOMPROB_SEED", e),
            None => cmd.env_remove("GEOMPROB_SEED"),
        };
        last_json(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("42"), None)["seed"], 42);
    assert_eq!(run(Some("42"), Some("7"))["seed"], 7);
    assert_eq!(run(None, None)["seed"], 1);
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "counterexample",
        "--d",
        "3",
        "--eps",
        "0.1",
        "--n",
        "20000",
        "--seed",
        "3",
    ];
    let a = last_json(&geomprob(&args));
    let b = last_json(&geomprob(&args));
    assert_eq!(a["metrics"], b["metrics"]);
    assert_eq!(a["params"]["d"], 3);
}

#[test]
fn shake_prints_polygon() {
    let out = geomprob(&[
        "symmetrize",
        "--poly",
        "[[1,0],[0,1],[-1,0],[0,-1]]",
        "--op",
        "shake",
        "--line",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["type"], "polygon");
    let verts: Vec<[f64; 2]> = serde_json::from_value(v["vertices"].clone()).unwrap();
    assert_eq!(verts.len(), 3);
    for expected in [[-1.0, -1.0], [1.0, -1.0], [0.0, 1.0]] {
        assert!(verts
            .iter()
            .any(|p| (p[0] - expected[0]).abs() < 1e-12 && (p[1] - expected[1]).abs() < 1e-12));
    }
}

#[test]
fn shake_below_line_is_rejected() {
    let out = geomprob(&[
        "symmetrize",
        "--poly",
        "[[0,0],[1,0],[0,1]]",
        "--op",
        "shake",
        "--line",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plane_check_off_boundary_exits_2() {
    let out = geomprob(&[
        "plane-check",
        "--poly",
        "[[0,0],[1,0],[1,1],[0,1]]",
        "--x",
        "0.5,0.5",
        "--n",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plane_check_square_passes() {
    let out = geomprob(&[
        "plane-check",
        "--poly",
        "[[0,0],[1,0],[1,1],[0,1]]",
        "--x",
        "0.5,0",
        "--n",
        "100000",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rep = last_json(&out);
    assert_eq!(rep["verdict"], "pass");
    assert!(rep["metrics"]["r0"].as_f64().unwrap() > rep["metrics"]["bound"].as_f64().unwrap());
}

#[test]
fn d3_probe_is_inconclusive() {
    let out = geomprob(&["d3-probe", "--n", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = last_json(&out);
    assert_eq!(rep["verdict"], "inconclusive");
    assert!(rep["metrics"]["delta_stderr"].as_f64().unwrap() > 0.0);
}

#[test]
fn failed_verdict_exits_1() {
    // In the plane the cone tip is not a counterexample: delta < 0.
    let out = geomprob(&[
        "counterexample",
        "--d",
        "2",
        "--eps",
        "0.1",
        "--n",
        "200000",
    ]);
    assert_eq!(last_json(&out)["verdict"], "fail");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn detcov_square_passes() {
    let out = geomprob(&["detcov-counterexample", "--body", "square", "--n", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(last_json(&out)["verdict"], "pass");
}

#[test]
fn numbers_have_at_most_12_significant_digits() {
    let out = geomprob(&["exact-table", "--d", "2", "--k", "1"]);
    let text = String::from_utf8_lossy(&out.stdout);
    let row = text.lines().nth(1).unwrap();
    for field in row.split(',').filter(|f| !f.is_empty()) {
        let digits: String = field
            .chars()
            .take_while(|c| *c != 'e')
            .filter(|c| c.is_ascii_digit())
            .collect();
        assert!(digits.trim_start_matches('0').len() <= 12, "{field}");
    }
}
