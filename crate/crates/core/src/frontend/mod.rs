//! Source text to syntax tree.

pub mod ast;
pub mod lexer;
pub mod parser;

pub use ast::*;
pub use lexer::{tokenize, LexError, Token, TokenKind};
pub use parser::{parse, ParseError};

use crate::diagnostics::{Code, Diagnostic};

/// Tokenizes and parses, converting failures into diagnostics.
pub fn parse_source(source: &str) -> Result<Ast, Vec<Diagnostic>> {
    let tokens = tokenize(source)
        .map_err(|e| vec![Diagnostic::new(Code::E001, e.span, e.message)])?;
    parse(&tokens).map_err(|errs| {
        errs.into_iter()
            .map(|e| Diagnostic::new(Code::E002, e.span, e.to_string()))
            .collect()
    })
}
