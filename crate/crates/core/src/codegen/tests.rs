use indexmap::IndexMap;
use proptest::prelude::*;

use super::*;
use crate::frontend::parse_source;
use crate::semantics::analyze;

fn checked(src: &str) -> TypedAst {
    let (typed, diags) = analyze(parse_source(src).unwrap());
    assert!(diags.iter().all(|d| !d.is_error()), "{diags:?}");
    typed
}

fn emit(target: &str, src: &str) -> Vec<OutputFile> {
    let typed = checked(src);
    TargetRegistry::with_builtins()
        .get(target)
        .unwrap()
        .emit(&EmitRequest::new(&typed, "out"))
        .unwrap()
        .files
}

fn source(target: &str, src: &str) -> String {
    emit(target, src).pop().unwrap().text
}

#[test]
fn fill_placeholders() {
    assert_eq!(fill("{a} << {b};", &[("a", "prog"), ("b", "H(q)")]), "prog << H(q);");
    assert_eq!(fill("{x} {unknown} {", &[("x", "1")]), "1 {unknown} {");
}

#[test]
fn gate_insertion_cpp() {
    let out = source("cpp", "f(qubit q){ H(q); }");
    assert!(out.lines().any(|l| l == "    prog << H(q);"), "{out}");
}

#[test]
fn autoimport_snippets() {
    let src = "@settings:\nautoimport = True;\n@qcode:\nf(qubit q){ H(q); }";
    assert!(source("python", src).starts_with("from pyqpanda import *\n"));
    for file in emit("cpp", src) {
        assert!(file.text.starts_with("#include \"QPanda.h\"\nusing namespace QPanda;\n"), "{}", file.name);
    }
    assert!(!source("python", "f(qubit q){ H(q); }").contains("import"));
}

#[test]
fn cpp_emits_header_and_source() {
    let files = emit("cpp", "f(qubit q){}\ng(qvec q, int n, double t, bool b){}");
    assert_eq!(files.len(), 2);
    assert_eq!(files[0].name, "out.h");
    assert_eq!(
        files[0].text,
        "QProg f(Qubit* q);\nQProg g(QVec q, int n, double t, bool b);\n"
    );
    assert_eq!(files[1].name, "out.cpp");
    assert_eq!(
        files[1].text,
        "#include \"out.h\"\n\nQProg f(Qubit* q)\n{\n    auto prog = QProg();\n    return prog;\n}\n\n\
         QProg g(QVec q, int n, double t, bool b)\n{\n    auto prog = QProg();\n    return prog;\n}\n"
    );
    assert_eq!(emit("python", "f(qubit q){}").len(), 1);
}

#[test]
fn template_listing() {
    let src = "let m = 0.908;\nsimple_test(qvec q,cvec c);\nsimple_test(qvec q,cvec c){ H(q[0]); RX(q[0],m); Measure(q[0],c[0]) }";
    let out = source("cpp", src);
    assert!(out.contains("\n\nconst auto m = 0.908;\n\nQProg simple_test("), "{out}");
    assert!(out.contains("prog << RX(q[0], m);"));
    assert!(out.contains("prog << Measure(q[0], c[0]);"));
    let out = source("python", src);
    assert!(out.starts_with("m = 0.908\n\ndef simple_test(q, c):\n"), "{out}");
}

#[test]
fn script_is_appended_verbatim() {
    let script = "\nint main() {\n  return 0;\n}\n";
    let src = format!("@qcode:\nf(qubit q){{ H(q); }}\n@script:{script}");
    assert!(source("cpp", &src).ends_with(&format!("}}\n{script}")));
    let src = "f(qubit q){ H(q); }\n@script:\nprint(1)";
    assert!(source("python", src).ends_with("return prog\n\nprint(1)\n"));
}

#[test]
fn shadowed_names_are_renamed() {
    let src = "scoping(qubit q, qvec qs, cbit c){ let ac = 1; measure(q, c)
        qif (c==1) { let ac = 100; let i = 0; while (i<ac){ H(qs[i]); i+=1; } }
        let i = ac; H(qs[i]); }";
    let out = source("cpp", src);
    assert!(out.contains("    auto ac = 1;\n"), "{out}");
    assert!(out.contains("    auto ac_1 = 100;\n    auto i = 0;\n    while (i < ac_1) {\n        prog_1 << H(qs[i]);\n        i += 1;\n    }\n"), "{out}");
    assert!(out.contains("    prog << CreateIfProg(c == 1, prog_1);\n    auto i_1 = ac;\n    prog << H(qs[i_1]);\n"), "{out}");
    let out = source("python", src);
    assert!(out.contains("    ac_1 = 100\n    i = 0\n    while i < ac_1:\n"), "{out}");
    assert!(out.contains("    i = ac\n    prog.insert(H(qs[i]))\n"), "{out}");
}

#[test]
fn quantum_alias_shadowing_param() {
    let src = "alias(qubit q, qvec qs){ qubit a = q; H(a); qubit q = qs[0]; qvec qs1 = qs[0:3]; H(q); }";
    let out = source("cpp", src);
    assert!(out.contains("    Qubit* a = q;\n    prog << H(a);\n    Qubit* q_1 = qs[0];\n"), "{out}");
    assert!(out.contains("    QVec qs1 = QVec(qs.begin() + 0, qs.begin() + 3);\n    prog << H(q_1);\n"), "{out}");
    let out = source("python", src);
    assert!(out.contains("    q_1 = qs[0]\n    qs1 = qs[0:3]\n    prog.insert(H(q_1))\n"), "{out}");
}

#[test]
fn sequential_loops_reuse_names_when_legal() {
    let src = "f(qvec q){ for (i = 0 : 2) H(q[i]); for (i = 0 : 2) X(q[i]); }";
    let out = source("cpp", src);
    assert_eq!(out.matches("for (int i = 0; i < 2; i++) {").count(), 2, "{out}");
    assert_eq!(source("python", src).matches("for i in range(0, 2):").count(), 2);
}

#[test]
fn expressions_respect_target_precedence() {
    let src = "f(qvec q, int a, int b){ let x = -(a - b) * 2; let y = !(a == b); let z = !a == b;
        let w = a < b == true; let d = (a + 1) / b; let e = a - (b - 1); let g = a && !b || a; }";
    let out = source("cpp", src);
    for l in ["auto x = -(a - b) * 2;", "auto y = !(a == b);", "auto z = !a == b;", "auto w = a < b == true;",
        "auto d = (a + 1) / b;", "auto e = a - (b - 1);", "auto g = a && !b || a;"] {
        assert!(out.contains(l), "{l}\n{out}");
    }
    let out = source("python", src);
    for l in ["x = -(a - b) * 2", "y = not a == b", "z = (not a) == b", "w = (a < b) == True",
        "d = int((a + 1) / b)", "e = a - (b - 1)", "g = a and not b or a"] {
        assert!(out.contains(l), "{l}\n{out}");
    }
}

#[test]
fn classical_assignments_are_inserted() {
    let src = "registers(cbit C1, cbit C2){ C1 = C2; C2 = !C2; C1 *= C2 + 1; qif (C2) { } }";
    let out = source("cpp", src);
    assert!(out.contains("prog << (C1 = C2);\n    prog << (C2 = !C2);\n    prog << (C1 = C1 * (C2 + 1));"), "{out}");
    assert!(out.contains("    auto prog_1 = QProg();\n    prog << CreateIfProg(C2, prog_1);"), "{out}");
    let out = source("python", src);
    assert!(out.contains("prog.insert(assign(C2, not C2))"), "{out}");
}

#[test]
fn if_else_chains() {
    let src = "f(qvec q, int n){ if (n == 0) { H(q[0]); } else if (n == 1) { X(q[0]); } else { } }";
    let out = source("cpp", src);
    assert!(out.contains("    if (n == 0) {\n        prog << H(q[0]);\n    } else if (n == 1) {\n        prog << X(q[0]);\n    } else {\n    }\n"), "{out}");
    let out = source("python", src);
    assert!(out.contains("    if n == 0:\n        prog.insert(H(q[0]))\n    elif n == 1:\n        prog.insert(X(q[0]))\n    else:\n        pass\n"), "{out}");
}

#[test]
fn user_calls_and_host_text() {
    let src = "foo(qvec q, int n){ H(q[n]); }\nbar(qvec q){ host int c = 1;\n    host{\n        c += 1;\n          c *= 2;\n    }\n    foo(q, c); }";
    let out = source("cpp", src);
    assert!(out.contains("    int c = 1;\n    c += 1;\n      c *= 2;\n    prog << foo(q, c);\n"), "{out}");
    let out = source("python", src);
    assert!(out.contains("    c = 1\n    c += 1;\n      c *= 2;\n    prog.insert(foo(q, c))\n"), "{out}");
}

#[test]
fn function_names_are_kept() {
    let src = "Alpha(qubit q){}\nbeta_2(qubit q){ Alpha(q); }";
    for target in ["cpp", "python"] {
        let out = source(target, src);
        assert!(out.contains("Alpha(") && out.contains("beta_2("));
    }
}

#[test]
fn target_selection() {
    let registry = TargetRegistry::with_builtins();
    assert_eq!(registry.names(), vec!["cpp", "python", "qir"]);
    let py = parse_source("@settings:\nlanguage = Python;\n@qcode:\nf(qubit q){}").unwrap();
    let (t, warn) = registry.select(None, &py).unwrap();
    assert_eq!((t.name(), warn), ("python", None));
    let (t, warn) = registry.select(Some("cpp"), &py).unwrap();
    assert_eq!(t.name(), "cpp");
    assert!(warn.unwrap().contains("Python"));
    let cpp = parse_source("@settings:\nlanguage = C++;\n@qcode:\nf(qubit q){}").unwrap();
    assert_eq!(registry.select(None, &cpp).unwrap().0.name(), "cpp");
    assert!(registry.select(Some("cpp"), &cpp).unwrap().1.is_none());
    let none = parse_source("f(qubit q){}").unwrap();
    assert_eq!(registry.select(None, &none).err(), Some(CodegenError::NoTarget));
    assert!(matches!(registry.select(Some("rust"), &none), Err(CodegenError::UnknownTarget(_))));
    let odd = parse_source("@settings:\nlanguage = Haskell;\n@qcode:\nf(qubit q){}").unwrap();
    assert!(matches!(registry.select(None, &odd), Err(CodegenError::UnknownLanguage(_))));
}

#[test]
fn profile_directory_adds_and_replaces_targets() {
    let dir = std::env::temp_dir().join(format!("qrunes-profiles-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let base = include_str!("../../profiles/python.toml");
    let custom = base
        .replace("name = \"python\"", "name = \"py-append\"")
        .replace("languages = [\"Python\", \"py\", \"pyQPanda\"]", "languages = [\"Appender\"]")
        .replace("insert = \"{prog}.insert({op})\"", "insert = \"{prog}.append({op})\"");
    std::fs::write(dir.join("append.toml"), custom).unwrap();
    std::fs::write(dir.join("notes.txt"), "ignored").unwrap();
    let mut registry = TargetRegistry::with_builtins();
    assert_eq!(registry.load_profile_dir(&dir).unwrap(), 1);
    let typed = checked("f(qubit q){ H(q); }");
    let out = registry.get("py-append").unwrap().emit(&EmitRequest::new(&typed, "x")).unwrap();
    assert!(out.files[0].text.contains("prog.append(H(q))"));
    let lang = parse_source("@settings:\nlanguage = appender;\n@qcode:\nf(qubit q){}").unwrap();
    assert_eq!(registry.select(None, &lang).unwrap().0.name(), "py-append");

    std::fs::write(dir.join("broken.toml"), "name = 3").unwrap();
    assert!(matches!(registry.load_profile_dir(&dir), Err(CodegenError::Profile(_))));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn missing_idiom_is_unsupported() {
    let text = include_str!("../../profiles/cpp.toml").replace(
        "qwhile = \"CreateWhileProg({cond}, {body})\"",
        "qwhile = \"\"",
    );
    let emitter = ProfileEmitter::new(Profile::from_toml(&text).unwrap());
    let typed = checked("f(qubit q, cbit c){ qwhile (c) { H(q); } }");
    assert!(matches!(
        emitter.emit(&EmitRequest::new(&typed, "x")),
        Err(CodegenError::Unsupported { .. })
    ));
    let text = include_str!("../../profiles/cpp.toml").replace("RX = \"RX\"\n", "");
    assert!(matches!(Profile::from_toml(&text), Err(CodegenError::Profile(_))));
}

#[test]
fn qir_target() {
    let typed = checked("Bell(qvec q, cvec c){ H(q[0]); CNOT(q[0], q[1]); MeasureAll(q, c); }");
    let registry = TargetRegistry::with_builtins();
    let qir = registry.get("qir").unwrap();
    assert!(matches!(
        qir.emit(&EmitRequest::new(&typed, "bell")),
        Err(CodegenError::MissingRunConfig(_))
    ));
    let args: IndexMap<String, Value> = [("q".to_owned(), Value::Int(2)), ("c".to_owned(), Value::Int(2))].into();
    let req = EmitRequest {
        entry: Some(EntryBinding { entry: "Bell", args: &args }),
        ..EmitRequest::new(&typed, "bell")
    };
    let out = qir.emit(&req).unwrap();
    assert_eq!(out.files[0].name, "bell.qir");
    assert_eq!(out.files[0].text, "H q0\nCNOT q0, q1\nMEASURE q0 -> r0\nMEASURE q1 -> r1\n");
    let args: IndexMap<String, Value> = [("q".to_owned(), Value::Int(2)), ("c".to_owned(), Value::Int(3))].into();
    let req = EmitRequest {
        entry: Some(EntryBinding { entry: "Bell", args: &args }),
        ..EmitRequest::new(&typed, "bell")
    };
    assert!(matches!(qir.emit(&req), Err(CodegenError::Elaboration(d)) if d.code == crate::Code::E240));
}

proptest! {
    #[test]
    fn insertion_order_follows_source(ops in prop::collection::vec((0usize..4, 0usize..3), 0..20)) {
        let names = ["H", "X", "Y", "NOT"];
        let body: String = ops.iter().map(|(g, i)| format!("{}(q[{i}]); ", names[*g])).collect();
        let src = format!("f(qvec q){{ {body}}}");
        for (target, prefix, map_not) in [("cpp", "    prog << ", "X"), ("python", "    prog.insert(", "X")] {
            let out = source(target, &src);
            let got: Vec<&str> = out.lines().filter_map(|l| l.strip_prefix(prefix)).collect();
            let want: Vec<String> = ops
                .iter()
                .map(|(g, i)| format!("{}(q[{i}])", if *g == 3 { map_not } else { names[*g] }))
                .collect();
            prop_assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(&want) {
                prop_assert!(g.starts_with(w.as_str()), "{} vs {}", g, w);
            }
        }
    }
}
