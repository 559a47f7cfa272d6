use std::process::{Command, Output};

fn zhutrace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhutrace")).args(args).output().expect("binary runs")
}

fn gram_file(name: &str, body: &str) -> String {
    let path = std::env::temp_dir().join(format!("zhutrace-cli-{}-{name}.json", std::process::id()));
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn char_json_and_text() {
    let out = zhutrace(&["--json", "char", "--algebra", "M", "--rank", "1", "--order", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["series"]["lead_exp"], "-1/24");
    assert_eq!(v["series"]["coeffs"], serde_json::json!(["1", "1", "2", "3", "5"]));
    let out = zhutrace(&["char", "--algebra", "M+", "--rank", "1", "--order", "4"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "q^(-1/24) * (1 + q^2 + q^3 + O(q^4))");
}

#[test]
fn trace_on_lattice_from_gram_file() {
    let g = gram_file("a1", r#"{"rank": 1, "gram": [[2]]}"#);
    let closed = zhutrace(&["trace", "--algebra", "VL+", "--state", "h1[-2] | g(2)", "--gram", &g, "--order", "4"]);
    let rec = zhutrace(&[
        "trace",
        "--algebra",
        "VL+",
        "--state",
        "h1[-2] | g(2)",
        "--gram",
        &g,
        "--order",
        "4",
        "--method",
        "recursion",
    ]);
    assert_eq!(closed.status.code(), Some(0));
    assert_eq!(closed.stdout, rec.stdout);
}

#[test]
fn exit_codes() {
    let out = zhutrace(&["char", "--algebra", "VL", "--gram", "/nonexistent/gram.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read gram file"));
    let out = zhutrace(&["trace", "--algebra", "M", "--state", "h2[-1]", "--rank", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = zhutrace(&["verify", "--suite", "heisenberg", "--rank", "1", "--max-weight", "3", "--order", "6"]);
    assert_eq!(out.status.code(), Some(0));
    // raw E_2 is not modular, so the check reports a failure
    let out = zhutrace(&["modcheck", "--eisenstein", "e", "--k", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = zhutrace(&["modcheck", "--eisenstein", "e", "--k", "4"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn eisenstein_theta_elliptic() {
    let out = zhutrace(&["eisenstein", "--kind", "fhat", "--m", "1", "--n", "1", "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let g = gram_file("a2", r#"{"rank": 2, "gram": [[2, 1], [1, 2]]}"#);
    let out = zhutrace(&["theta", "--gram", &g, "--vector", "0,0", "--order", "5"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "q^(0) * (1 + 6 q + 6 q^3 + 6 q^4 + O(q^5))");
    let out = zhutrace(&["--json", "elliptic", "--which", "q1", "--m", "1", "--z", "0.3,-0.2", "--tau", "0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["value"].is_array());
}
