//! Language server for QRunes: diagnostics, hover and completion over stdio.

mod position;

use std::collections::HashMap;
use std::error::Error;

use lsp_server::{Connection, ExtractError, Message, Notification, Request, RequestId, Response};
use lsp_types::notification::{
    DidChangeTextDocument, DidCloseTextDocument, DidOpenTextDocument, Notification as _, PublishDiagnostics,
};
use lsp_types::request::{Completion, HoverRequest, Request as _};
use lsp_types::{
    CompletionItem, CompletionItemKind, CompletionOptions, CompletionResponse, Diagnostic as LspDiagnostic,
    DiagnosticSeverity, Hover, HoverContents, HoverProviderCapability, MarkupContent, MarkupKind, NumberOrString,
    Position, PublishDiagnosticsParams, Range, ServerCapabilities, TextDocumentSyncCapability, TextDocumentSyncKind,
    Uri,
};
use qrunes::frontend::lexer::KEYWORDS;
use qrunes::semantics::{Reference, SymbolKind, BUILTINS};
use qrunes::{Checked, Severity};

pub use position::{offset_at, position_of};

const TYPE_NAMES: &[&str] = &["qubit", "qvec", "cbit", "cvec", "int", "double", "bool", "len"];

pub type BoxError = Box<dyn Error + Send + Sync>;

/// An open document and the analysis of its current text.
pub struct Document {
    pub version: i32,
    pub text: String,
    pub checked: Checked,
}

impl Document {
    pub fn new(version: i32, text: String) -> Document {
        let checked = qrunes::check(&text);
        Document { version, text, checked }
    }
}

pub fn capabilities() -> ServerCapabilities {
    ServerCapabilities {
        text_document_sync: Some(TextDocumentSyncCapability::Kind(TextDocumentSyncKind::FULL)),
        hover_provider: Some(HoverProviderCapability::Simple(true)),
        completion_provider: Some(CompletionOptions::default()),
        ..ServerCapabilities::default()
    }
}

/// Runs the server on stdin/stdout until the client sends `exit`.
pub fn run_stdio() -> Result<(), BoxError> {
    let (connection, io_threads) = Connection::stdio();
    serve(&connection)?;
    drop(connection);
    io_threads.join()?;
    Ok(())
}

/// Performs the initialize handshake, then handles messages until shutdown.
pub fn serve(connection: &Connection) -> Result<(), BoxError> {
    connection.initialize(serde_json::to_value(capabilities())?)?;
    let mut server = Server::default();
    for msg in &connection.receiver {
        match msg {
            Message::Request(req) => {
                if connection.handle_shutdown(&req)? {
                    return Ok(());
                }
                connection.sender.send(server.request(req).into())?;
            }
            Message::Notification(note) => {
                for out in server.notification(note) {
                    connection.sender.send(out.into())?;
                }
            }
            Message::Response(_) => {}
        }
    }
    Ok(())
}

#[derive(Default)]
pub struct Server {
    docs: HashMap<String, Document>,
}

impl Server {
    pub fn document(&self, uri: &Uri) -> Option<&Document> {
        self.docs.get(uri.as_str())
    }

    fn request(&mut self, req: Request) -> Response {
        let id = req.id.clone();
        match req.method.as_str() {
            HoverRequest::METHOD => match req.extract::<lsp_types::HoverParams>(HoverRequest::METHOD) {
                Ok((id, p)) => {
                    let tdp = p.text_document_position_params;
                    let hover = self.document(&tdp.text_document.uri).and_then(|d| hover(d, tdp.position));
                    Response::new_ok(id, hover)
                }
                Err(e) => bad_params(id, e),
            },
            Completion::METHOD => match req.extract::<lsp_types::CompletionParams>(Completion::METHOD) {
                Ok((id, p)) => {
                    let tdp = p.text_document_position;
                    let items = self
                        .document(&tdp.text_document.uri)
                        .map(|d| completions(d, tdp.position))
                        .unwrap_or_default();
                    Response::new_ok(id, CompletionResponse::Array(items))
                }
                Err(e) => bad_params(id, e),
            },
            _ => Response::new_err(
                id,
                lsp_server::ErrorCode::MethodNotFound as i32,
                format!("unhandled method {}", req.method),
            ),
        }
    }

    /// Applies a document notification, returning the diagnostics to publish.
    pub fn notification(&mut self, note: Notification) -> Vec<Notification> {
        match note.method.as_str() {
            DidOpenTextDocument::METHOD => {
                let Ok(p) = note.extract::<lsp_types::DidOpenTextDocumentParams>(DidOpenTextDocument::METHOD) else {
                    return Vec::new();
                };
                let doc = p.text_document;
                self.docs.insert(doc.uri.as_str().to_owned(), Document::new(doc.version, doc.text));
                vec![self.publish(&doc.uri)]
            }
            DidChangeTextDocument::METHOD => {
                let Ok(p) = note.extract::<lsp_types::DidChangeTextDocumentParams>(DidChangeTextDocument::METHOD)
                else {
                    return Vec::new();
                };
                let Some(change) = p.content_changes.into_iter().last() else {
                    return Vec::new();
                };
                let uri = p.text_document.uri;
                let version = p.text_document.version;
                if self.docs.get(uri.as_str()).is_some_and(|d| d.version > version) {
                    return Vec::new();
                }
                self.docs.insert(uri.as_str().to_owned(), Document::new(version, change.text));
                vec![self.publish(&uri)]
            }
            DidCloseTextDocument::METHOD => {
                let Ok(p) = note.extract::<lsp_types::DidCloseTextDocumentParams>(DidCloseTextDocument::METHOD) else {
                    return Vec::new();
                };
                let uri = p.text_document.uri;
                self.docs.remove(uri.as_str());
                vec![Notification::new(
                    PublishDiagnostics::METHOD.to_owned(),
                    PublishDiagnosticsParams::new(uri, Vec::new(), None),
                )]
            }
            _ => Vec::new(),
        }
    }

    fn publish(&self, uri: &Uri) -> Notification {
        let doc = &self.docs[uri.as_str()];
        Notification::new(
            PublishDiagnostics::METHOD.to_owned(),
            PublishDiagnosticsParams::new(uri.clone(), diagnostics(doc), Some(doc.version)),
        )
    }
}

fn bad_params(id: RequestId, e: ExtractError<Request>) -> Response {
    Response::new_err(id, lsp_server::ErrorCode::InvalidParams as i32, e.to_string())
}

/// The document's diagnostics in protocol form, in the same order `check` reports them.
pub fn diagnostics(doc: &Document) -> Vec<LspDiagnostic> {
    doc.checked
        .diagnostics
        .iter()
        .map(|d| LspDiagnostic {
            range: Range::new(position_of(&doc.text, d.span.start), position_of(&doc.text, d.span.end)),
            severity: Some(match d.severity {
                Severity::Error => DiagnosticSeverity::ERROR,
                Severity::Warning => DiagnosticSeverity::WARNING,
            }),
            code: Some(NumberOrString::String(d.code.as_str().to_owned())),
            source: Some("qrunes".to_owned()),
            message: d.message.clone(),
            ..LspDiagnostic::default()
        })
        .collect()
}

/// Hover text for the name under `pos`.
pub fn hover_text(doc: &Document, pos: Position) -> Option<String> {
    let typed = doc.checked.typed.as_ref()?;
    let offset = offset_at(&doc.text, pos);
    let (_, reference) = typed.reference_at(offset)?;
    match reference {
        Reference::Builtin(b) => Some(format!("{} — {}", b.signature(), b.description())),
        Reference::Symbol(id) => {
            let sym = typed.scopes.symbol(id);
            let head = match (sym.kind, &sym.sem_type) {
                (SymbolKind::Function, _) => {
                    let sig = typed
                        .functions
                        .get(&sym.name)
                        .map(|f| f.signature())
                        .unwrap_or_else(|| sym.name.clone());
                    format!("{sig} — function")
                }
                (kind, ty) => {
                    let ty = ty
                        .as_ref()
                        .map(|t| format!("{t} ({})", t.family()))
                        .unwrap_or_else(|| "unknown type".to_owned());
                    let owner = sym.owner.as_deref().unwrap_or("the program");
                    let role = match kind {
                        SymbolKind::Param => format!("parameter of {owner}"),
                        SymbolKind::LoopVar => format!("loop variable in {owner}"),
                        SymbolKind::TopConst => "top-level constant".to_owned(),
                        _ => format!("local in {owner}"),
                    };
                    format!("{}: {ty} — {role}", sym.name)
                }
            };
            Some(format!(
                "{head}\ndefined at line {}, column {}",
                sym.def_span.line, sym.def_span.column
            ))
        }
    }
}

pub fn hover(doc: &Document, pos: Position) -> Option<Hover> {
    let typed = doc.checked.typed.as_ref()?;
    let (span, _) = typed.reference_at(offset_at(&doc.text, pos))?;
    Some(Hover {
        contents: HoverContents::Markup(MarkupContent {
            kind: MarkupKind::PlainText,
            value: hover_text(doc, pos)?,
        }),
        range: Some(Range::new(position_of(&doc.text, span.start), position_of(&doc.text, span.end))),
    })
}

/// Keywords, builtins and the symbols visible at `pos`.
pub fn completions(doc: &Document, pos: Position) -> Vec<CompletionItem> {
    let mut items: Vec<CompletionItem> = KEYWORDS
        .iter()
        .chain(TYPE_NAMES)
        .map(|k| CompletionItem {
            label: (*k).to_owned(),
            kind: Some(CompletionItemKind::KEYWORD),
            ..CompletionItem::default()
        })
        .collect();
    items.extend(BUILTINS.iter().map(|b| CompletionItem {
        label: b.name.to_owned(),
        kind: Some(CompletionItemKind::FUNCTION),
        detail: Some(b.signature()),
        ..CompletionItem::default()
    }));
    if let Some(typed) = &doc.checked.typed {
        let offset = offset_at(&doc.text, pos);
        for sym in typed.visible_at(offset) {
            let (kind, detail) = match sym.kind {
                SymbolKind::Function => (
                    CompletionItemKind::FUNCTION,
                    typed.functions.get(&sym.name).map(|f| f.signature()),
                ),
                SymbolKind::TopConst => (CompletionItemKind::CONSTANT, sym.sem_type.as_ref().map(|t| t.to_string())),
                _ => (CompletionItemKind::VARIABLE, sym.sem_type.as_ref().map(|t| t.to_string())),
            };
            items.push(CompletionItem {
                label: sym.name.clone(),
                kind: Some(kind),
                detail,
                ..CompletionItem::default()
            });
        }
    }
    items
}

#[cfg(test)]
mod tests;
