//! Coded diagnostics shared by the CLI and the language server.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::span::{LineIndex, SourceSpan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// Stable diagnostic codes. The string form never changes between releases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Unrecognized character or unterminated comment/block.
    E001,
    /// Syntax error.
    E002,
    /// Malformed or misplaced settings entry.
    E003,
    E101,
    E102,
    E201,
    E202,
    E203,
    E204,
    E210,
    E220,
    E230,
    E231,
    E240,
    E241,
    E242,
    E243,
    E244,
    E245,
    E246,
    E247,
    E248,
    W001,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E101 => "E101",
            Code::E102 => "E102",
            Code::E201 => "E201",
            Code::E202 => "E202",
            Code::E203 => "E203",
            Code::E204 => "E204",
            Code::E210 => "E210",
            Code::E220 => "E220",
            Code::E230 => "E230",
            Code::E231 => "E231",
            Code::E240 => "E240",
            Code::E241 => "E241",
            Code::E242 => "E242",
            Code::E243 => "E243",
            Code::E244 => "E244",
            Code::E245 => "E245",
            Code::E246 => "E246",
            Code::E247 => "E247",
            Code::E248 => "E248",
            Code::W001 => "W001",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::W001 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub message: String,
    pub span: SourceSpan,
}

impl Diagnostic {
    pub fn new(code: Code, span: SourceSpan, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    pub fn to_record(&self, index: &LineIndex) -> DiagnosticRecord {
        let (end_line, end_column) = index.line_col(self.span.end);
        DiagnosticRecord {
            code: self.code.as_str().to_owned(),
            severity: self.severity,
            message: self.message.clone(),
            line: self.span.line,
            column: self.span.column,
            end_line,
            end_column,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: {}[{}]: {}",
            self.span.line, self.span.column, self.severity, self.code, self.message
        )
    }
}

/// Wire form of a diagnostic: `{code, severity, message, line, column, end_line, end_column}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagnosticRecord {
    pub code: String,
    pub severity: Severity,
    pub message: String,
    pub line: u32,
    pub column: u32,
    pub end_line: u32,
    pub end_column: u32,
}

/// Sorts by span start, then end, then code. Analysis output is always in this order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.span.start, a.span.end, a.code).cmp(&(b.span.start, b.span.end, b.code))
    });
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub fn to_records(diags: &[Diagnostic], source: &str) -> Vec<DiagnosticRecord> {
    let index = LineIndex::new(source);
    diags.iter().map(|d| d.to_record(&index)).collect()
}
