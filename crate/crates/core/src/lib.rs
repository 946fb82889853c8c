//! QRunes compiler toolchain.
//!
//! The pipeline is `frontend` (tokens and syntax tree) → `semantics` (scopes
//! and typing) → `qir` (compile-time elaboration into a flat quantum IR) →
//! `simulator` (statevector execution with classical feedback). `codegen`
//! turns checked programs into host-language sources through a registry of
//! named targets.

pub mod codegen;
pub mod diagnostics;
pub mod frontend;
pub mod qir;
pub mod semantics;
pub mod simulator;
pub mod span;

pub use diagnostics::{Code, Diagnostic, DiagnosticRecord, Severity};
pub use span::{LineIndex, SourceSpan};

use semantics::TypedAst;

/// Result of parsing and analyzing one source text.
#[derive(Debug, Clone)]
pub struct Checked {
    /// `None` when the text did not parse.
    pub typed: Option<TypedAst>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Checked {
    pub fn has_errors(&self) -> bool {
        diagnostics::has_errors(&self.diagnostics)
    }
}

/// Parses and analyzes `source`. This is what `check` and the language server report.
pub fn check(source: &str) -> Checked {
    match frontend::parse_source(source) {
        Ok(ast) => {
            let (typed, diagnostics) = semantics::analyze(ast);
            Checked {
                typed: Some(typed),
                diagnostics,
            }
        }
        Err(diagnostics) => Checked {
            typed: None,
            diagnostics,
        },
    }
}
