//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use lsp_server::{Connection, Message, Notification, Request, RequestId};
use lsp_types::{Position, PublishDiagnosticsParams};
use num_complex::Complex64;
use qrunes::codegen::{EmitRequest, TargetRegistry};
use qrunes::diagnostics::DiagnosticRecord;
use qrunes::qir::{elaborate, ir_to_text, ElabLimits, Elaboration, Gate, GateKind, Node, QProgIR, Value};
use qrunes::simulator::{run_once, run_shots, shot_rng, RunConfig, SimState};
use qrunes::{LineIndex, Severity};
use qrunes_cli::RunConfigFile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn corpus(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel)
}

fn read(rel: &str) -> String {
    fs::read_to_string(corpus(rel)).unwrap_or_else(|e| panic!("{rel}: {e}"))
}

fn config(rel: &str) -> RunConfigFile {
    RunConfigFile::parse(&read(rel)).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build(src: &str, entry: &str, args: &[(&str, i64)]) -> Result<Elaboration, String> {
    let checked = qrunes::check(src);
    if checked.has_errors() {
        return Err(format!("{:?}", checked.diagnostics));
    }
    let args: IndexMap<String, Value> = args.iter().map(|(k, v)| (k.to_string(), Value::Int(*v))).collect();
    elaborate(checked.typed.as_ref().unwrap(), entry, &args, &ElabLimits::default()).map_err(|d| d.message)
}

fn build_from(src: &str, cfg: &RunConfigFile) -> Result<Elaboration, String> {
    let checked = qrunes::check(src);
    if checked.has_errors() {
        return Err(format!("{:?}", checked.diagnostics));
    }
    elaborate(checked.typed.as_ref().unwrap(), &cfg.entry, &cfg.args, &ElabLimits::default()).map_err(|d| d.message)
}

fn bell() -> Check {
    let start = Instant::now();
    let cfg = config("configs/bell.json");
    let program = build_from(&read("listings/bell.qrunes"), &cfg)?;
    ensure(!ir_to_text(&program.ir).is_empty(), || "empty IR".into())?;
    let result = run_shots(&program, &cfg.run_config()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(cfg.shots == 1000, || format!("config has {} shots", cfg.shots))?;
    ensure(result.histogram.keys().all(|k| k == "00" || k == "11"), || format!("keys {:?}", result.histogram))?;
    for key in ["00", "11"] {
        let n = result.histogram.get(key).copied().unwrap_or(0);
        ensure((440..=560).contains(&n), || format!("count[{key}] = {n}"))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))
}

fn qwhile_test() -> Check {
    let start = Instant::now();
    let cfg = config("configs/test.json");
    let program = build_from(&read("listings/test.qrunes"), &cfg)?;
    let result = run_shots(&program, &cfg.run_config()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(cfg.shots == 2000, || format!("config has {} shots", cfg.shots))?;
    let temp = &result.registers["temp"];
    ensure((0.87..=1.13).contains(&temp.mean), || format!("temp mean {}", temp.mean))?;
    let c = &result.registers["c"];
    ensure(c.min == 0 && c.max == 0, || format!("c ranged over [{}, {}]", c.min, c.max))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= 1e-9
}

fn qif_statevector() -> Check {
    let listing = read("listings/qif.qrunes");
    let prepared = listing.replacen("Measure(q, c);", "X(q);\n    Measure(q, c);", 1);
    ensure(prepared != listing, || "could not insert the X preparation".into())?;
    let cases = [
        (&prepared, 1, [Complex64::new(FRAC_1_SQRT_2, 0.0), Complex64::new(-FRAC_1_SQRT_2, 0.0)]),
        (&listing, 0, [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]),
    ];
    for (src, reg, amps) in cases {
        let program = build(src, "qif_example", &[("q", 1), ("c", 1)])?;
        for seed in 0..8 {
            let mut state = SimState::new(1, 1).map_err(|e| e.to_string())?;
            run_once(&program.ir, &RunConfig::new(1, seed), &mut state, &mut shot_rng(seed, 0)).map_err(|e| e.to_string())?;
            ensure(state.registers == [reg], || format!("c = {:?}", state.registers))?;
            ensure(close(state.amps[0], amps[0]) && close(state.amps[1], amps[1]), || {
                format!("c = {reg}: amplitudes {:?}", state.amps)
            })?;
        }
    }
    Ok(())
}

fn codes(src: &str) -> Vec<String> {
    qrunes::check(src)
        .diagnostics
        .iter()
        .filter(|d| d.is_error())
        .map(|d| d.code.to_string())
        .collect()
}

fn error_suite() -> Check {
    let cases = [
        ("f(cbit C1){\n    let a = C1;\n}\n", "E201"),
        ("f(qubit q, cbit c){\n    let ac = 1;\n    qif (c) {\n        ac += 1;\n    }\n}\n", "E210"),
        ("f(qubit q, cbit c){\n    Measure(q, c);\n    if (c) {\n        H(q);\n    }\n}\n", "E220"),
    ];
    for (src, code) in cases {
        let got = codes(src);
        ensure(got == [code], || format!("expected exactly {code}, got {got:?}"))?;
    }
    for entry in fs::read_dir(corpus("errors")).unwrap() {
        let path = entry.unwrap().path();
        let src = fs::read_to_string(&path).unwrap();
        let header = src.lines().next().unwrap_or_default();
        if let Some(code) = header.strip_prefix("// expect: ") {
            let got = codes(&src);
            ensure(got == [code.trim()], || format!("{}: expected {code}, got {got:?}", path.display()))?;
        }
    }
    let cfg = config("configs/measureall_mismatch.json");
    match build_from(&read("errors/measureall_mismatch.qrunes"), &cfg) {
        Err(msg) if msg.contains("must have same sizes") => {}
        other => return Err(format!("MeasureAll mismatch gave {:?}", other.map(|_| ()))),
    }
    let out = qrunes_cli::run(
        &corpus("errors/measureall_mismatch.qrunes"),
        &corpus("configs/measureall_mismatch.json"),
        false,
    );
    let err: serde_json::Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure(err["error"]["code"] == "E240", || format!("run reported {}", out.stdout))?;
    for entry in fs::read_dir(corpus("listings")).unwrap() {
        let path = entry.unwrap().path();
        let src = fs::read_to_string(&path).unwrap();
        let got = codes(&src);
        ensure(got.is_empty(), || format!("{}: {got:?}", path.display()))?;
    }
    Ok(())
}

fn all_qifs_materialized(ir: &QProgIR) -> Result<usize, String> {
    let mut count = 0;
    let mut bad = false;
    ir.walk(&mut |node| {
        if let Node::QIf { then, otherwise, .. } = node {
            count += 1;
            bad |= then.is_empty() || otherwise.is_empty();
        }
    });
    if bad {
        Err("a qif branch was dropped".into())
    } else {
        Ok(count)
    }
}

fn unrolling() -> Check {
    let src = "f(qvec q, int n){\n    for (i = 0 : n) H(q[i]);\n}\n";
    for n in [0, 1, 5, 100] {
        let program = build(src, "f", &[("q", n), ("n", n)])?;
        let gates = program.ir.nodes.iter().filter(|node| matches!(node, Node::Gate(g) if g.kind == GateKind::H)).count();
        ensure(gates == n as usize && program.ir.nodes.len() == n as usize, || {
            format!("n = {n}: {} nodes, {gates} H gates", program.ir.nodes.len())
        })?;
    }
    let listing = read("listings/qif.qrunes");
    let prepared = listing.replacen("Measure(q, c);", "X(q);\n    Measure(q, c);", 1);
    let mut texts = Vec::new();
    for src in [&listing, &prepared] {
        let program = build(src, "qif_example", &[("q", 1), ("c", 1)])?;
        let n = all_qifs_materialized(&program.ir)?;
        ensure(n == 1, || format!("{n} qif nodes"))?;
        texts.push(ir_to_text(&program.ir));
    }
    ensure(texts[0].contains("QELSE") && texts[1].ends_with(&texts[0]), || format!("{texts:?}"))?;
    let nested = "f(qvec q, cvec c){\n    Measure(q[0], c[0]);\n    qif (c[0]) {\n        qif (c[1]) { H(q[1]); } qelse { X(q[1]); }\n    } qelse {\n        qif (!c[1]) { Y(q[1]); } qelse { NOT(q[1]); }\n    }\n}\n";
    let program = build(nested, "f", &[("q", 2), ("c", 2)])?;
    let n = all_qifs_materialized(&program.ir)?;
    ensure(n == 3, || format!("{n} nested qif nodes"))?;
    let cfg = config("configs/test.json");
    let program = build_from(&read("listings/test.qrunes"), &cfg)?;
    all_qifs_materialized(&program.ir).map(|_| ())
}

fn goldens() -> Check {
    let registry = TargetRegistry::with_builtins();
    for stem in ["bell", "test", "foo", "qif"] {
        let checked = qrunes::check(&read(&format!("listings/{stem}.qrunes")));
        let typed = checked.typed.ok_or_else(|| format!("{stem} did not parse"))?;
        for target in ["cpp", "python"] {
            let out = registry.get(target).unwrap().emit(&EmitRequest::new(&typed, stem)).map_err(|e| e.to_string())?;
            ensure(!out.files.is_empty(), || format!("{stem}/{target}: no files"))?;
            for file in out.files {
                let want = fs::read(corpus(&format!("golden/{}", file.name))).map_err(|e| format!("{}: {e}", file.name))?;
                ensure(want == file.text.as_bytes(), || format!("{} differs from its golden", file.name))?;
            }
        }
    }
    let py = read("golden/bell.py");
    ensure(py.starts_with("from pyqpanda import *\n"), || "python autoimport missing".into())?;
    let cpp = read("golden/bell.cpp");
    ensure(cpp.starts_with("#include \"QPanda.h\"\n"), || "cpp autoimport missing".into())?;
    let listing = read("listings/test.qrunes");
    let script = listing.split("script:").nth(1).ok_or("test listing has no script")?;
    let script = script.trim_start_matches(['\n', '\r']).trim_end();
    ensure(script.contains("direcly_run"), || "unexpected script".into())?;
    for golden in ["golden/test.py", "golden/test.cpp"] {
        ensure(read(golden).contains(script), || format!("{golden} lacks the verbatim script"))?;
    }
    Ok(())
}

fn random_gate(rng: &mut ChaCha8Rng, n: usize) -> Gate {
    let a = rng.random_range(0..n);
    match rng.random_range(0..6) {
        0 => Gate::new(GateKind::H, vec![a]),
        1 => Gate::new(GateKind::X, vec![a]),
        2 => Gate::new(GateKind::Y, vec![a]),
        3 => Gate::new(GateKind::Not, vec![a]),
        4 => Gate::rx(a, rng.random_range(-10.0..10.0)),
        _ => {
            let b = (a + rng.random_range(1..n)) % n;
            Gate::new(GateKind::Cnot, vec![a, b])
        }
    }
}

fn simulator_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seq in 0..1000 {
        let n = rng.random_range(2..=6);
        let mut state = SimState::new(n, n).map_err(|e| e.to_string())?;
        let mut mrng = shot_rng(seq, 0);
        for _ in 0..rng.random_range(0..40) {
            if rng.random_bool(0.15) {
                let q = rng.random_range(0..n);
                state.measure_qubit(q, q, &mut mrng).map_err(|e| e.to_string())?;
            } else {
                state.apply_gate(&random_gate(&mut rng, n)).map_err(|e| e.to_string())?;
            }
            let norm = state.norm_sqr();
            ensure((norm - 1.0).abs() <= 1e-9, || format!("sequence {seq}: norm {norm}"))?;
        }
        let a = rng.random_range(0..n);
        let b = (a + 1) % n;
        for g in [Gate::new(GateKind::H, vec![a]), Gate::new(GateKind::X, vec![a]), Gate::new(GateKind::Cnot, vec![a, b])] {
            let before = state.amps.clone();
            state.apply_gate(&g).map_err(|e| e.to_string())?;
            state.apply_gate(&g).map_err(|e| e.to_string())?;
            let drift = state.amps.iter().zip(&before).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            ensure(drift <= 1e-12, || format!("sequence {seq}: {} twice drifted {drift}", g.kind.name()))?;
        }
    }
    for (listing, cfg) in [("listings/bell.qrunes", "configs/bell.json"), ("listings/test.qrunes", "configs/test.json")] {
        let cfg = config(cfg);
        let program = build_from(&read(listing), &cfg)?;
        let first = run_shots(&program, &cfg.run_config()).map_err(|e| e.to_string())?;
        let second = run_shots(&program, &cfg.run_config()).map_err(|e| e.to_string())?;
        ensure(first.histogram == second.histogram, || format!("{listing}: histograms differ for one seed"))?;
    }
    Ok(())
}

fn recv(conn: &Connection) -> Result<Message, String> {
    conn.receiver.recv_timeout(Duration::from_secs(10)).map_err(|e| e.to_string())
}

fn lsp_cli_equality() -> Check {
    let mut files = Vec::new();
    for dir in ["listings", "errors"] {
        for entry in fs::read_dir(corpus(dir)).unwrap() {
            files.push(entry.unwrap().path());
        }
    }
    files.sort();
    files.push(PathBuf::from("synthetic"));

    let (server, client) = Connection::memory();
    let handle = thread::spawn(move || qrunes_lsp::serve(&server).map_err(|e| e.to_string()));
    client
        .sender
        .send(Request::new(RequestId::from(1), "initialize".into(), json!({ "capabilities": {} })).into())
        .map_err(|e| e.to_string())?;
    recv(&client)?;
    client.sender.send(Notification::new("initialized".into(), json!({})).into()).map_err(|e| e.to_string())?;

    let dir = std::env::temp_dir().join(format!("qrunes-acceptance-{}", std::process::id()));
    fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (i, path) in files.iter().enumerate() {
        let (path, text) = if path.as_os_str() == "synthetic" {
            let text = "f(qubit q){\n    // é ü\n    H(r); X(q, q);\n    let x = 1 +;\n}\n".to_owned();
            let p = dir.join("synthetic.qrunes");
            fs::write(&p, &text).map_err(|e| e.to_string())?;
            (p, text)
        } else {
            (path.clone(), fs::read_to_string(path).unwrap())
        };
        let out = qrunes_cli::check(&path, false);
        let records: Vec<DiagnosticRecord> = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;

        let uri = format!("file:///doc{i}.qrunes");
        client
            .sender
            .send(
                Notification::new(
                    "textDocument/didOpen".into(),
                    json!({ "textDocument": { "uri": uri, "languageId": "qrunes", "version": 1, "text": text } }),
                )
                .into(),
            )
            .map_err(|e| e.to_string())?;
        let Message::Notification(note) = recv(&client)? else {
            return Err("expected publishDiagnostics".into());
        };
        let params: PublishDiagnosticsParams = serde_json::from_value(note.params).map_err(|e| e.to_string())?;
        let index = LineIndex::new(&text);
        let to_line_col = |p: Position| index.line_col(qrunes_lsp::offset_at(&text, p));
        let served: Vec<DiagnosticRecord> = params
            .diagnostics
            .iter()
            .map(|d| {
                let (line, column) = to_line_col(d.range.start);
                let (end_line, end_column) = to_line_col(d.range.end);
                DiagnosticRecord {
                    code: match &d.code {
                        Some(lsp_types::NumberOrString::String(s)) => s.clone(),
                        other => format!("{other:?}"),
                    },
                    severity: if d.severity == Some(lsp_types::DiagnosticSeverity::ERROR) {
                        Severity::Error
                    } else {
                        Severity::Warning
                    },
                    message: d.message.clone(),
                    line,
                    column,
                    end_line,
                    end_column,
                }
            })
            .collect();
        ensure(served == records, || {
            format!("{}:\n  lsp {served:?}\n  cli {records:?}", path.display())
        })?;
        compared += 1;
    }
    let _ = fs::remove_dir_all(&dir);
    client
        .sender
        .send(Request::new(RequestId::from(2), "shutdown".into(), json!(null)).into())
        .map_err(|e| e.to_string())?;
    recv(&client)?;
    client.sender.send(Notification::new("exit".into(), json!(null)).into()).map_err(|e| e.to_string())?;
    handle.join().map_err(|_| "server panicked".to_string())??;
    ensure(compared >= 17, || format!("only {compared} files compared"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("bell histogram", bell),
        ("qwhile Test statistics", qwhile_test),
        ("qif statevectors", qif_statevector),
        ("error suite and clean listings", error_suite),
        ("unrolling and qif materialization", unrolling),
        ("codegen goldens", goldens),
        ("simulator properties", simulator_properties),
        ("lsp and cli diagnostics agree", lsp_cli_equality),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS {}: {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
