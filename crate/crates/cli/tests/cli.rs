use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(rel: &str) -> PathBuf {
    root().join("corpus").join(rel)
}

fn qrunes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrunes")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_clean_and_failing() {
    let out = qrunes(&["check", s(&corpus("listings/bell.qrunes"))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!([]));

    let out = qrunes(&["check", s(&corpus("errors/if_on_cbit.qrunes"))]);
    assert_eq!(out.status.code(), Some(1));
    let records = stdout_json(&out);
    let first = &records[0];
    assert_eq!(first["code"], "E220");
    for key in ["severity", "message", "line", "column", "end_line", "end_column"] {
        assert!(first.get(key).is_some(), "{key}");
    }

    let out = qrunes(&["check", "--pretty", s(&corpus("errors/if_on_cbit.qrunes"))]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("error[E220]"), "{text}");
}

#[test]
fn missing_input_is_io_error() {
    let out = qrunes(&["check", "/nonexistent/x.qrunes"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let out = qrunes(&["run", s(&corpus("listings/bell.qrunes")), "--config", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_prints_result_json() {
    let out = qrunes(&["run", s(&corpus("listings/bell.qrunes")), "--config", s(&corpus("configs/bell.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["shots"], 1000);
    assert_eq!(v["seed"], 2019);
    let total: u64 = v["histogram"].as_object().unwrap().values().map(|n| n.as_u64().unwrap()).sum();
    assert_eq!(total, 1000);
    assert!(v["registers"]["c[0]"]["mean"].is_f64());

    let again = qrunes(&["run", s(&corpus("listings/bell.qrunes")), "--config", s(&corpus("configs/bell.json"))]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn run_pretty_draws_bars() {
    let out = qrunes(&["run", "--pretty", s(&corpus("listings/bell.qrunes")), "--config", s(&corpus("configs/bell.json"))]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("00 | #"), "{text}");
}

#[test]
fn pipeline_errors_are_json_objects() {
    let out = qrunes(&[
        "run",
        s(&corpus("errors/measureall_mismatch.qrunes")),
        "--config",
        s(&corpus("configs/measureall_mismatch.json")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = &stdout_json(&out)["error"];
    assert_eq!(err["kind"], "elaboration");
    assert_eq!(err["code"], "E240");

    let out = qrunes(&["run", s(&corpus("errors/if_on_cbit.qrunes")), "--config", s(&corpus("configs/bell.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "diagnostics");

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, r#"{"entry":"Bell","args":{"q":2,"c":2},"shots":0,"seed":1}"#).unwrap();
    let out = qrunes(&["run", s(&corpus("listings/bell.qrunes")), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "config");
}

#[test]
fn qwhile_limit_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("spin.qrunes");
    fs::write(&src, "spin(qubit q, cbit c){\n    X(q);\n    Measure(q, c);\n    qwhile (c) {\n        X(q);\n        X(q);\n        Measure(q, c);\n    }\n}\n").unwrap();
    let cfg = dir.path().join("spin.json");
    fs::write(&cfg, r#"{"entry":"spin","args":{"q":1,"c":1},"shots":2,"seed":1,"max_qwhile_iters":50}"#).unwrap();
    let out = qrunes(&["run", s(&src), "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "QWhileLimitExceeded");
}

#[test]
fn compile_matches_goldens() {
    let dir = tempfile::tempdir().unwrap();
    for (target, exts) in [("cpp", &["h", "cpp"][..]), ("python", &["py"][..])] {
        let out = qrunes(&["compile", s(&corpus("listings/bell.qrunes")), "--target", target, "-o", s(dir.path())]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        assert_eq!(stdout_json(&out)["target"], target);
        for ext in exts {
            let got = fs::read(dir.path().join(format!("bell.{ext}"))).unwrap();
            let want = fs::read(corpus(&format!("golden/bell.{ext}"))).unwrap();
            assert_eq!(got, want, "bell.{ext}");
        }
    }
}

#[test]
fn compile_target_overrides_language_setting() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("prog.qrunes");
    fs::write(&src, "language = Python;\n\nf(qubit q){\n    H(q);\n}\n").unwrap();
    let out = qrunes(&["compile", s(&src)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(dir.path().join("prog.py").exists());
    let out = qrunes(&["compile", s(&src), "--target", "cpp"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(dir.path().join("prog.cpp").exists());
}

#[test]
fn compile_qir_needs_config() {
    let dir = tempfile::tempdir().unwrap();
    let qif = corpus("listings/qif.qrunes");
    let out = qrunes(&["compile", s(&qif), "--target", "qir", "-o", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    let out = qrunes(&["compile", s(&qif), "--target", "qir", "-o", s(dir.path()), "--config", s(&corpus("configs/qif.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("qif.qir")).unwrap();
    assert!(text.starts_with("MEASURE q0 -> r0\nQIF r0\n"), "{text}");
}

#[test]
fn unknown_target_is_reported() {
    let out = qrunes(&["compile", s(&corpus("listings/bell.qrunes")), "--target", "cobol"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "codegen");
}

#[test]
fn profile_dir_adds_targets() {
    let dir = tempfile::tempdir().unwrap();
    let profile = fs::read_to_string(root().join("crates/core/profiles/python.toml"))
        .unwrap()
        .replacen("name = \"python\"", "name = \"py2\"", 1)
        .replacen("languages = [\"Python\", \"py\", \"pyQPanda\"]", "languages = [\"Py2\"]", 1);
    assert!(profile.contains("\"py2\"") && profile.contains("[\"Py2\"]"));
    fs::write(dir.path().join("py2.toml"), profile).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_qrunes"))
        .arg("targets")
        .env("QRUNES_PROFILE_DIR", dir.path())
        .output()
        .unwrap();
    let names = String::from_utf8(out.stdout).unwrap();
    assert!(names.lines().any(|l| l == "py2"), "{names}");
}

fn frame(v: &Value) -> Vec<u8> {
    let body = v.to_string();
    format!("Content-Length: {}\r\n\r\n{body}", body.len()).into_bytes()
}

fn read_frame(r: &mut impl BufRead) -> Value {
    let mut len = 0;
    loop {
        let mut line = String::new();
        r.read_line(&mut line).unwrap();
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some(n) = line.strip_prefix("Content-Length: ") {
            len = n.parse().unwrap();
        }
    }
    let mut body = vec![0; len];
    r.read_exact(&mut body).unwrap();
    serde_json::from_slice(&body).unwrap()
}

#[test]
fn lsp_over_stdio() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qrunes"))
        .arg("lsp")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stdin = child.stdin.take().unwrap();
    let mut stdout = BufReader::new(child.stdout.take().unwrap());
    stdin.write_all(&frame(&json!({"jsonrpc":"2.0","id":1,"method":"initialize","params":{"capabilities":{}}}))).unwrap();
    assert_eq!(read_frame(&mut stdout)["id"], 1);
    stdin.write_all(&frame(&json!({"jsonrpc":"2.0","method":"initialized","params":{}}))).unwrap();
    let text = fs::read_to_string(corpus("errors/scoping_blocked.qrunes")).unwrap();
    stdin
        .write_all(&frame(&json!({"jsonrpc":"2.0","method":"textDocument/didOpen","params":{"textDocument":{"uri":"file:///s.qrunes","languageId":"qrunes","version":1,"text":text}}})))
        .unwrap();
    let note = read_frame(&mut stdout);
    assert_eq!(note["method"], "textDocument/publishDiagnostics");
    assert_eq!(note["params"]["diagnostics"][0]["code"], "E210");
    stdin.write_all(&frame(&json!({"jsonrpc":"2.0","id":2,"method":"shutdown"}))).unwrap();
    assert_eq!(read_frame(&mut stdout)["id"], 2);
    stdin.write_all(&frame(&json!({"jsonrpc":"2.0","method":"exit"}))).unwrap();
    drop(stdin);
    assert!(child.wait().unwrap().success());
}
