//! Tokenizer.
//!
//! Besides ordinary C-style tokens the lexer handles three raw regions whose
//! contents are not QRunes: settings values (`name = value;`), `host { ... }`
//! blocks and everything after `@script:`. Each becomes a single
//! [`TokenKind::Raw`] token holding the exact source text.

use std::fmt;

use thiserror::Error;

use crate::span::{LineIndex, SourceSpan};

pub const KEYWORDS: &[&str] = &[
    "let", "host", "if", "else", "while", "for", "qif", "qelse", "qwhile",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Keyword,
    Ident,
    Int,
    Float,
    Bool,
    Str,
    Op,
    Punct,
    SectionMarker,
    Raw,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Keyword => "keyword",
            TokenKind::Ident => "identifier",
            TokenKind::Int => "integer literal",
            TokenKind::Float => "float literal",
            TokenKind::Bool => "boolean literal",
            TokenKind::Str => "string literal",
            TokenKind::Op => "operator",
            TokenKind::Punct => "punctuation",
            TokenKind::SectionMarker => "section marker",
            TokenKind::Raw => "raw text",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub span: SourceSpan,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }

    pub fn is_punct(&self, p: &str) -> bool {
        self.is(TokenKind::Punct, p)
    }

    pub fn is_op(&self, op: &str) -> bool {
        self.is(TokenKind::Op, op)
    }

    pub fn is_keyword(&self, kw: &str) -> bool {
        self.is(TokenKind::Keyword, kw)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct LexError {
    pub span: SourceSpan,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Region {
    /// Before any section marker; leading `name = value;` lines are settings.
    Preamble,
    Settings,
    QCode,
}

const OPERATORS: &[&str] = &[
    "==", "!=", "<=", ">=", "&&", "||", "+=", "-=", "*=", "+", "-", "*", "/", "%", "<", ">",
    "=", "!",
];
const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ',', ';', ':'];

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    index: LineIndex,
    tokens: Vec<Token>,
    region: Region,
    depth: i32,
    preamble_open: bool,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut lx = Lexer {
        src: source,
        pos: 0,
        index: LineIndex::new(source),
        tokens: Vec::new(),
        region: Region::Preamble,
        depth: 0,
        preamble_open: true,
    };
    lx.run()?;
    Ok(lx.tokens)
}

impl<'a> Lexer<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn error(&self, start: usize, end: usize, message: impl Into<String>) -> LexError {
        LexError {
            span: self.index.span(start, end),
            message: message.into(),
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, end: usize) {
        self.tokens.push(Token {
            kind,
            lexeme: self.src[start..end].to_owned(),
            span: self.index.span(start, end),
        });
        self.pos = end;
    }

    /// Skips whitespace and comments starting at `from`; returns the new offset.
    fn skip_trivia_from(&self, from: usize) -> Result<usize, LexError> {
        let bytes = self.src.as_bytes();
        let mut i = from;
        loop {
            while i < bytes.len() && (bytes[i] as char).is_ascii_whitespace() {
                i += 1;
            }
            if self.src[i..].starts_with("//") {
                match self.src[i..].find('\n') {
                    Some(n) => i += n + 1,
                    None => i = bytes.len(),
                }
            } else if self.src[i..].starts_with("/*") {
                match self.src[i + 2..].find("*/") {
                    Some(n) => i += n + 4,
                    None => return Err(self.error(i, i + 2, "unterminated block comment")),
                }
            } else {
                // Non-ASCII whitespace.
                match self.src[i..].chars().next() {
                    Some(c) if c.is_whitespace() => i += c.len_utf8(),
                    _ => return Ok(i),
                }
            }
        }
    }

    fn at_item_start(&self) -> bool {
        match self.tokens.last() {
            None => true,
            Some(t) => {
                t.kind == TokenKind::SectionMarker
                    || (self.depth == 0 && (t.is_punct(";") || t.is_punct("}") || t.kind == TokenKind::Raw))
            }
        }
    }

    fn settings_allowed(&self) -> bool {
        match self.region {
            Region::Settings => true,
            Region::Preamble => self.preamble_open,
            Region::QCode => false,
        }
    }

    fn run(&mut self) -> Result<(), LexError> {
        loop {
            self.pos = self.skip_trivia_from(self.pos)?;
            let Some(c) = self.peek() else {
                return Ok(());
            };
            let start = self.pos;
            if c == '@' {
                if self.lex_marker()? {
                    return Ok(());
                }
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                self.lex_word(start)?;
                continue;
            }
            if c.is_ascii_digit() || (c == '.' && self.rest()[1..].starts_with(|d: char| d.is_ascii_digit())) {
                self.lex_number(start)?;
                continue;
            }
            if c == '"' {
                self.lex_string(start)?;
                continue;
            }
            if self.region == Region::Preamble && self.depth == 0 {
                self.preamble_open = false;
            }
            if let Some(op) = OPERATORS.iter().find(|op| self.rest().starts_with(**op)) {
                self.push(TokenKind::Op, start, start + op.len());
                continue;
            }
            if PUNCTUATION.contains(&c) {
                match c {
                    '{' => self.depth += 1,
                    '}' => self.depth -= 1,
                    _ => {}
                }
                self.push(TokenKind::Punct, start, start + 1);
                continue;
            }
            return Err(self.error(
                start,
                start + c.len_utf8(),
                format!("unrecognized character '{c}'"),
            ));
        }
    }

    /// Returns true when the script marker consumed the rest of the input.
    fn lex_marker(&mut self) -> Result<bool, LexError> {
        let start = self.pos;
        let rest = self.rest();
        let name_len = rest[1..]
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(rest.len() - 1);
        let name = &rest[1..1 + name_len];
        if !rest[1 + name_len..].starts_with(':') {
            return Err(self.error(start, start + 1 + name_len, "expected ':' after section name"));
        }
        let end = start + name_len + 2;
        match name {
            "settings" => self.region = Region::Settings,
            "qcode" | "qcodes" => self.region = Region::QCode,
            "script" => {
                self.push(TokenKind::SectionMarker, start, end);
                if end < self.src.len() {
                    self.push(TokenKind::Raw, end, self.src.len());
                }
                return Ok(true);
            }
            _ => {
                return Err(self.error(
                    start,
                    end,
                    format!("unknown section marker '@{name}:'"),
                ))
            }
        }
        self.depth = 0;
        self.push(TokenKind::SectionMarker, start, end);
        Ok(false)
    }

    fn lex_word(&mut self, start: usize) -> Result<(), LexError> {
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        let end = start + len;
        let word = &self.src[start..end];

        if self.settings_allowed() && self.at_item_start() && self.depth == 0 && !KEYWORDS.contains(&word) {
            let after = self.skip_trivia_from(end)?;
            let tail = &self.src[after..];
            if tail.starts_with('=') && !tail.starts_with("==") {
                self.push(TokenKind::Ident, start, end);
                self.push(TokenKind::Op, after, after + 1);
                let value_start = after + 1;
                let value_end = self.src[value_start..]
                    .find([';', '\n'])
                    .map(|n| value_start + n)
                    .unwrap_or(self.src.len());
                self.push(TokenKind::Raw, value_start, value_end);
                if self.src[value_end..].starts_with(';') {
                    self.push(TokenKind::Punct, value_end, value_end + 1);
                }
                return Ok(());
            }
        }
        if self.region == Region::Preamble {
            self.preamble_open = false;
        }

        let kind = if KEYWORDS.contains(&word) {
            TokenKind::Keyword
        } else if matches!(word, "true" | "false" | "True" | "False") {
            TokenKind::Bool
        } else {
            TokenKind::Ident
        };
        self.push(kind, start, end);
        if word == "host" {
            let after = self.skip_trivia_from(end)?;
            if self.src[after..].starts_with('{') {
                self.lex_host_block(after)?;
            }
        }
        Ok(())
    }

    /// `{ ... }` after `host`: brace balance is the only structure recognized.
    fn lex_host_block(&mut self, open: usize) -> Result<(), LexError> {
        let mut depth = 0usize;
        for (i, c) in self.src[open..].char_indices() {
            match c {
                '{' => depth += 1,
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        self.push(TokenKind::Raw, open, open + i + 1);
                        return Ok(());
                    }
                }
                _ => {}
            }
        }
        Err(self.error(open, open + 1, "unterminated host block"))
    }

    fn lex_number(&mut self, start: usize) -> Result<(), LexError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let mut float = false;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            float = true;
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                float = true;
                i = j;
            }
        }
        if i < bytes.len() && (bytes[i].is_ascii_alphabetic() || bytes[i] == b'_') {
            return Err(self.error(start, i + 1, "invalid numeric literal"));
        }
        let text = &self.src[start..i];
        if float {
            if text.parse::<f64>().is_err() {
                return Err(self.error(start, i, "invalid float literal"));
            }
            self.push(TokenKind::Float, start, i);
        } else {
            if text.parse::<i64>().is_err() {
                return Err(self.error(start, i, "integer literal out of range"));
            }
            self.push(TokenKind::Int, start, i);
        }
        if self.region == Region::Preamble {
            self.preamble_open = false;
        }
        Ok(())
    }

    fn lex_string(&mut self, start: usize) -> Result<(), LexError> {
        let mut escaped = false;
        for (i, c) in self.src[start + 1..].char_indices() {
            match c {
                '\\' if !escaped => escaped = true,
                '"' if !escaped => {
                    self.push(TokenKind::Str, start, start + 1 + i + 1);
                    return Ok(());
                }
                '\n' => break,
                _ => escaped = false,
            }
        }
        Err(self.error(start, start + 1, "unterminated string literal"))
    }
}
