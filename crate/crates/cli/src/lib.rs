//! Command implementations behind the `qrunes` binary.
//!
//! Each command returns an [`Outcome`] instead of printing, so the binary and
//! the tests share one code path.

pub mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use qrunes::codegen::{CodegenError, EmitRequest, EntryBinding, TargetRegistry};
use qrunes::diagnostics::to_records;
use qrunes::qir::{elaborate, ElabLimits};
use qrunes::semantics::TypedAst;
use qrunes::simulator::{run_shots, RunResult, SimError};
use qrunes::{Diagnostic, LineIndex};
use serde_json::{json, Value as Json};

pub use config::RunConfigFile;

/// Exit status, standard output and standard error of one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Outcome {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn io(message: String) -> Outcome {
        Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("qrunes: {message}\n"),
        }
    }

    fn error(error: Json) -> Outcome {
        Outcome {
            code: 1,
            stdout: format!("{}\n", json!({ "error": error })),
            stderr: String::new(),
        }
    }
}

fn read(path: &Path) -> Result<String, Outcome> {
    fs::read_to_string(path).map_err(|e| Outcome::io(format!("cannot read {}: {e}", path.display())))
}

fn diagnostic_error(kind: &str, diag: &Diagnostic, source: &str) -> Json {
    let index = LineIndex::new(source);
    let mut obj = serde_json::to_value(diag.to_record(&index)).unwrap();
    obj["kind"] = json!(kind);
    obj
}

fn checked_program(source: &str) -> Result<TypedAst, Outcome> {
    let checked = qrunes::check(source);
    if checked.has_errors() || checked.typed.is_none() {
        return Err(Outcome::error(json!({
            "kind": "diagnostics",
            "message": "the program has errors",
            "diagnostics": to_records(&checked.diagnostics, source),
        })));
    }
    Ok(checked.typed.unwrap())
}

fn load_config(path: &Path) -> Result<RunConfigFile, Outcome> {
    let text = read(path)?;
    RunConfigFile::parse(&text).map_err(|message| Outcome::error(json!({ "kind": "config", "message": message })))
}

/// `qrunes check`: diagnostics as a JSON array, or one line each with `pretty`.
pub fn check(path: &Path, pretty: bool) -> Outcome {
    let source = match read(path) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let checked = qrunes::check(&source);
    let records = to_records(&checked.diagnostics, &source);
    let stdout = if pretty {
        let mut out = String::new();
        for r in &records {
            let _ = writeln!(out, "{}:{}:{}: {}[{}]: {}", path.display(), r.line, r.column, r.severity, r.code, r.message);
        }
        if records.is_empty() {
            out.push_str("no problems\n");
        }
        out
    } else {
        format!("{}\n", serde_json::to_string(&records).unwrap())
    };
    Outcome {
        code: if checked.has_errors() { 1 } else { 0 },
        stdout,
        stderr: String::new(),
    }
}

fn codegen_error(err: &CodegenError, source: &str) -> Json {
    match err {
        CodegenError::Elaboration(d) => diagnostic_error("elaboration", d, source),
        CodegenError::Unsupported { span, .. } => json!({
            "kind": "codegen",
            "message": err.to_string(),
            "line": span.line,
            "column": span.column,
        }),
        _ => json!({ "kind": "codegen", "message": err.to_string() }),
    }
}

/// `qrunes compile`: writes the target's files and lists them as JSON.
pub fn compile(path: &Path, target: Option<&str>, out_dir: Option<&Path>, config: Option<&Path>) -> Outcome {
    let source = match read(path) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let typed = match checked_program(&source) {
        Ok(t) => t,
        Err(o) => return o,
    };
    let cfg = match config.map(load_config).transpose() {
        Ok(c) => c,
        Err(o) => return o,
    };
    let registry = match TargetRegistry::from_env() {
        Ok(r) => r,
        Err(e) => return Outcome::error(codegen_error(&e, &source)),
    };
    let (chosen, warning) = match registry.select(target, &typed.ast) {
        Ok(s) => s,
        Err(e) => return Outcome::error(codegen_error(&e, &source)),
    };
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out").to_owned();
    let mut request = EmitRequest::new(&typed, &stem);
    if let Some(cfg) = &cfg {
        request.entry = Some(EntryBinding {
            entry: &cfg.entry,
            args: &cfg.args,
        });
    }
    let text = match chosen.emit(&request) {
        Ok(t) => t,
        Err(e) => return Outcome::error(codegen_error(&e, &source)),
    };
    let dir: PathBuf = match out_dir {
        Some(d) => d.to_owned(),
        None => path.parent().map(Path::to_owned).unwrap_or_default(),
    };
    if let Err(e) = fs::create_dir_all(if dir.as_os_str().is_empty() { Path::new(".") } else { &dir }) {
        return Outcome::io(format!("cannot create {}: {e}", dir.display()));
    }
    let mut written = Vec::new();
    for file in &text.files {
        let dest = dir.join(&file.name);
        if let Err(e) = fs::write(&dest, &file.text) {
            return Outcome::io(format!("cannot write {}: {e}", dest.display()));
        }
        written.push(dest.display().to_string());
    }
    Outcome {
        code: 0,
        stdout: format!("{}\n", json!({ "target": chosen.name(), "files": written })),
        stderr: warning.map(|w| format!("warning: {w}\n")).unwrap_or_default(),
    }
}

fn sim_error(err: &SimError) -> Json {
    let mut obj = json!({ "kind": err.kind(), "message": err.to_string() });
    if let Some(span) = err.span() {
        obj["line"] = json!(span.line);
        obj["column"] = json!(span.column);
    }
    obj
}

/// Elaborates and simulates the configured entry of a checked source.
pub fn simulate(source: &str, cfg: &RunConfigFile) -> Result<RunResult, Json> {
    let typed = checked_program(source).map_err(|o| serde_json::from_str::<Json>(&o.stdout).unwrap()["error"].take())?;
    let program = elaborate(&typed, &cfg.entry, &cfg.args, &ElabLimits::default())
        .map_err(|d| diagnostic_error("elaboration", &d, source))?;
    run_shots(&program, &cfg.run_config()).map_err(|e| sim_error(&e))
}

/// `qrunes run`: simulates and prints the run result as JSON, or as a bar chart with `pretty`.
pub fn run(path: &Path, config: &Path, pretty: bool) -> Outcome {
    let source = match read(path) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let cfg = match load_config(config) {
        Ok(c) => c,
        Err(o) => return o,
    };
    match simulate(&source, &cfg) {
        Ok(result) if pretty => Outcome::ok(render(&result)),
        Ok(result) => Outcome::ok(format!("{}\n", serde_json::to_string(&result).unwrap())),
        Err(e) => Outcome::error(e),
    }
}

fn render(result: &RunResult) -> String {
    const WIDTH: u64 = 40;
    let mut out = String::new();
    let key_width = result.histogram.keys().map(String::len).max().unwrap_or(0);
    for (key, &count) in &result.histogram {
        let bar = "#".repeat((count * WIDTH / result.shots.max(1)) as usize);
        let _ = writeln!(out, "{key:>key_width$} | {bar:<40} {count}");
    }
    for (name, stats) in &result.registers {
        let _ = writeln!(out, "{name}: mean {:.4} min {} max {}", stats.mean, stats.min, stats.max);
    }
    let _ = writeln!(out, "shots {} seed {}", result.shots, result.seed);
    out
}

/// `qrunes targets`: registered target names, one per line.
pub fn targets() -> Outcome {
    match TargetRegistry::from_env() {
        Ok(r) => Outcome::ok(r.names().iter().map(|n| format!("{n}\n")).collect()),
        Err(e) => Outcome::error(json!({ "kind": "codegen", "message": e.to_string() })),
    }
}
