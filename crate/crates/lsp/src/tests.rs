use super::*;

const FOO: &str = "foo(qvec q, cvec c, int s){
    let size = len(q);
    for (i = 0 : size){
        if (i != s){
            CNOT(q[i],q[s]);
        }
    }
    MeasureAll(q,c);
}
";

fn doc(text: &str) -> Document {
    Document::new(1, text.to_owned())
}

fn at(text: &str, needle: &str, nth: usize) -> Position {
    let off = text.match_indices(needle).nth(nth).unwrap().0;
    position_of(text, off)
}

#[test]
fn hover_parameter() {
    let d = doc(FOO);
    let text = hover_text(&d, at(FOO, "q[i]", 0)).unwrap();
    assert_eq!(text, "q: qvec (quantum) — parameter of foo\ndefined at line 1, column 10");
    let text = hover_text(&d, at(FOO, "s]", 0)).unwrap();
    assert!(text.starts_with("s: int (assist-classical) — parameter of foo"), "{text}");
}

#[test]
fn hover_builtin_and_local() {
    let d = doc(FOO);
    assert_eq!(
        hover_text(&d, at(FOO, "CNOT", 0)).unwrap(),
        "CNOT(qubit, qubit) — builtin gate"
    );
    let text = hover_text(&d, at(FOO, "size)", 0)).unwrap();
    assert!(text.starts_with("size: int (assist-classical) — local in foo"), "{text}");
    let text = hover_text(&d, at(FOO, "i !=", 0)).unwrap();
    assert!(text.starts_with("i: int (assist-classical) — loop variable in foo"), "{text}");
    assert!(hover_text(&d, Position::new(0, 26)).is_none());
}

#[test]
fn hover_function() {
    let src = "g(qubit a){ H(a); }\nf(qvec q){ g(q[0]); }\n";
    let text = hover_text(&doc(src), at(src, "g(q", 0)).unwrap();
    assert!(text.starts_with("g(qubit a) — function"), "{text}");
}

#[test]
fn completion_respects_barrier() {
    let src = "f(qubit q, cbit c){\n    let k = 1;\n    qif (c) {\n        H(q);\n    }\n}\n";
    let d = doc(src);
    let labels = |pos| -> Vec<String> { completions(&d, pos).into_iter().map(|i| i.label).collect() };
    let inside = labels(at(src, "H(q)", 0));
    assert!(inside.contains(&"q".to_owned()) && inside.contains(&"c".to_owned()));
    assert!(!inside.contains(&"k".to_owned()));
    assert!(inside.contains(&"qif".to_owned()) && inside.contains(&"MeasureAll".to_owned()));
    let outside = labels(at(src, "qif", 0));
    assert!(outside.contains(&"k".to_owned()));
}

#[test]
fn diagnostics_match_check_records() {
    let src = "f(qubit q){\n    H(r);\n}\n";
    let d = doc(src);
    let lsp = diagnostics(&d);
    let records = qrunes::diagnostics::to_records(&d.checked.diagnostics, src);
    assert!(!records.is_empty());
    assert_eq!(lsp.len(), records.len());
    for (l, r) in lsp.iter().zip(&records) {
        assert_eq!(l.code, Some(NumberOrString::String(r.code.clone())));
        assert_eq!(l.message, r.message);
        assert_eq!((l.range.start.line + 1, l.range.start.character + 1), (r.line, r.column));
        assert_eq!((l.range.end.line + 1, l.range.end.character + 1), (r.end_line, r.end_column));
    }
}

#[test]
fn stale_change_is_ignored() {
    let mut server = Server::default();
    let uri: Uri = "file:///a.qrunes".parse().unwrap();
    let open = Notification::new(
        DidOpenTextDocument::METHOD.to_owned(),
        lsp_types::DidOpenTextDocumentParams {
            text_document: lsp_types::TextDocumentItem::new(uri.clone(), "qrunes".into(), 5, FOO.into()),
        },
    );
    assert_eq!(server.notification(open).len(), 1);
    let change = Notification::new(
        DidChangeTextDocument::METHOD.to_owned(),
        lsp_types::DidChangeTextDocumentParams {
            text_document: lsp_types::VersionedTextDocumentIdentifier::new(uri.clone(), 4),
            content_changes: vec![lsp_types::TextDocumentContentChangeEvent {
                range: None,
                range_length: None,
                text: "broken(".into(),
            }],
        },
    );
    assert!(server.notification(change).is_empty());
    assert_eq!(server.document(&uri).unwrap().text, FOO);
}
