//! Recursive-descent parser with precedence climbing for C-style expressions.
//!
//! Statement terminators: a `;` is expected after simple statements, but it
//! may be omitted when the next token is `}` or starts on a later line.

use thiserror::Error;

use super::ast::*;
use super::lexer::{Token, TokenKind};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse(tokens: &[Token]) -> Result<Ast, Vec<ParseError>> {
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
        next_id: 0,
    };
    let ast = p.program();
    if p.errors.is_empty() {
        Ok(ast)
    } else {
        Err(p.errors)
    }
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    errors: Vec<ParseError>,
    next_id: u32,
}

fn describe(tok: Option<&Token>) -> String {
    match tok {
        None => "end of input".to_owned(),
        Some(t) if t.kind == TokenKind::Raw => "raw text".to_owned(),
        Some(t) => format!("'{}'", t.lexeme),
    }
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn prev(&self) -> Option<&'t Token> {
        self.pos.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        t
    }

    fn eof_span(&self) -> SourceSpan {
        match self.tokens.last() {
            Some(t) => SourceSpan::new(t.span.end, t.span.end, t.span.line, t.span.column),
            None => SourceSpan::new(0, 0, 1, 1),
        }
    }

    fn here(&self) -> SourceSpan {
        self.peek().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn prev_span(&self) -> SourceSpan {
        self.prev().map(|t| t.span).unwrap_or_else(|| self.eof_span())
    }

    fn err(&self, expected: impl Into<String>) -> ParseError {
        ParseError {
            span: self.here(),
            expected: expected.into(),
            found: describe(self.peek()),
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_op(&self, op: &str) -> bool {
        self.peek().is_some_and(|t| t.is_op(op))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<&'t Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            Err(self.err(format!("'{p}'")))
        }
    }

    fn expect_ident(&mut self) -> PResult<Ident> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                self.pos += 1;
                Ok(Ident {
                    name: t.lexeme.clone(),
                    span: t.span,
                })
            }
            _ => Err(self.err("identifier")),
        }
    }

    /// `;`, or nothing when the statement is followed by `}`, end of input,
    /// or a token on a later line.
    fn terminator(&mut self) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        let prev_line = self.prev().map(|t| t.span.line).unwrap_or(0);
        match self.peek() {
            None => Ok(()),
            Some(t) if t.is_punct("}") || t.kind == TokenKind::SectionMarker => Ok(()),
            Some(t) if t.span.line > prev_line => Ok(()),
            _ => Err(self.err("';'")),
        }
    }

    fn new_id(&mut self) -> ExprId {
        let id = ExprId(self.next_id);
        self.next_id += 1;
        id
    }

    fn mk(&mut self, kind: ExprKind, span: SourceSpan) -> Expr {
        Expr {
            id: self.new_id(),
            kind,
            span,
        }
    }

    /// Skips to just past the next `;` or to the next unmatched `}`.
    fn recover(&mut self) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.kind == TokenKind::SectionMarker {
                return;
            }
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                if depth == 0 {
                    return;
                }
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    return;
                }
            } else if t.is_punct(";") && depth == 0 {
                self.pos += 1;
                return;
            }
            self.pos += 1;
        }
    }

    fn program(&mut self) -> Ast {
        let mut ast = Ast::default();
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::SectionMarker {
                self.pos += 1;
                if tok.lexeme == "@script:" {
                    let text = match self.peek() {
                        Some(t) if t.kind == TokenKind::Raw => {
                            self.pos += 1;
                            t.lexeme.clone()
                        }
                        _ => String::new(),
                    };
                    let end = self.prev_span();
                    ast.script = Some(Script {
                        text,
                        span: tok.span.to(end),
                    });
                }
                continue;
            }
            let before = self.pos;
            match self.top_item(&mut ast) {
                Ok(()) => {}
                Err(e) => {
                    self.errors.push(e);
                    self.recover();
                    if self.at_punct("}") {
                        self.pos += 1;
                    }
                    if self.pos == before {
                        self.pos += 1;
                    }
                }
            }
        }
        ast.expr_count = self.next_id;
        ast
    }

    fn top_item(&mut self, ast: &mut Ast) -> PResult<()> {
        let tok = self.peek().expect("caller checked");
        if tok.kind == TokenKind::Ident
            && self.peek_at(1).is_some_and(|t| t.is_op("="))
            && self.peek_at(2).is_some_and(|t| t.kind == TokenKind::Raw)
        {
            self.pos += 3;
            let raw = self.prev().unwrap();
            self.terminator()?;
            ast.settings.push(Setting {
                name: tok.lexeme.clone(),
                value: raw.lexeme.trim().to_owned(),
                span: tok.span.to(self.prev_span()),
            });
            return Ok(());
        }
        if tok.is_keyword("let") {
            let binding = self.let_binding()?;
            ast.items.push(TopItem::ConstLet(binding));
            return Ok(());
        }
        if tok.kind == TokenKind::Ident {
            let sig = self.signature()?;
            if self.at_punct("{") {
                let body = self.block()?;
                let span = sig.span.to(body.span);
                ast.items.push(TopItem::FnDef(FnDef { sig, body, span }));
            } else {
                self.terminator()?;
                let mut sig = sig;
                sig.span = sig.span.to(self.prev_span());
                ast.items.push(TopItem::FnDecl(sig));
            }
            return Ok(());
        }
        Err(self.err("function definition, declaration, or 'let'"))
    }

    fn signature(&mut self) -> PResult<FnSig> {
        let name = self.expect_ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            loop {
                let ty = self.expect_ident().map_err(|mut e| {
                    e.expected = "parameter type".into();
                    e
                })?;
                let pname = self.expect_ident().map_err(|mut e| {
                    e.expected = "parameter name".into();
                    e
                })?;
                params.push(Param {
                    span: ty.span.to(pname.span),
                    ty: DeclType::from_name(&ty.name),
                    name: pname,
                });
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        let close = self.expect_punct(")")?;
        Ok(FnSig {
            span: name.span.to(close.span),
            name,
            params,
        })
    }

    fn let_binding(&mut self) -> PResult<LetBinding> {
        let kw = self.bump();
        let name = self.expect_ident()?;
        if !self.at_op("=") {
            return Err(self.err("'='"));
        }
        self.pos += 1;
        let init = self.expr()?;
        self.terminator()?;
        Ok(LetBinding {
            name,
            init,
            span: kw.span.to(self.prev_span()),
        })
    }

    fn block(&mut self) -> PResult<Block> {
        let open = self.expect_punct("{")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.err("'}'")),
                Some(t) if t.kind == TokenKind::SectionMarker => return Err(self.err("'}'")),
                Some(t) if t.is_punct("}") => break,
                _ => {}
            }
            let before = self.pos;
            match self.stmt() {
                Ok(s) => stmts.push(s),
                Err(e) => {
                    self.errors.push(e);
                    self.recover();
                    if self.pos == before {
                        self.pos += 1;
                    }
                }
            }
        }
        let close = self.bump();
        Ok(Block {
            stmts,
            span: open.span.to(close.span),
        })
    }

    /// A braced block, or for `for`/`while` bodies a single statement.
    fn body(&mut self, allow_single: bool) -> PResult<Block> {
        if self.at_punct("{") || !allow_single {
            return self.block();
        }
        let stmt = self.stmt()?;
        Ok(Block {
            span: stmt.span,
            stmts: vec![stmt],
        })
    }

    fn paren_cond(&mut self) -> PResult<Expr> {
        self.expect_punct("(")?;
        let cond = self.expr()?;
        self.expect_punct(")")?;
        Ok(cond)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let tok = self.peek().ok_or_else(|| self.err("statement"))?;
        let start = tok.span;
        let kind = match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Keyword, "let") => StmtKind::Let(self.let_binding()?),
            (TokenKind::Keyword, "host") => {
                self.pos += 1;
                match self.peek() {
                    Some(raw) if raw.kind == TokenKind::Raw => {
                        self.pos += 1;
                        let inner = &raw.lexeme[1..raw.lexeme.len() - 1];
                        StmtKind::HostBlock(inner.to_owned())
                    }
                    _ => {
                        let type_name = self.expect_ident()?;
                        let name = self.expect_ident()?;
                        if !self.at_op("=") {
                            return Err(self.err("'='"));
                        }
                        self.pos += 1;
                        let init = self.expr()?;
                        self.terminator()?;
                        StmtKind::HostDecl {
                            type_name,
                            name,
                            init,
                        }
                    }
                }
            }
            (TokenKind::Keyword, "if") => {
                self.pos += 1;
                let cond = self.paren_cond()?;
                let then_block = self.block()?;
                let else_block = if self.at_keyword("else") {
                    self.pos += 1;
                    Some(self.else_body("if")?)
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_block,
                    else_block,
                }
            }
            (TokenKind::Keyword, "qif") => {
                self.pos += 1;
                let cond = self.paren_cond()?;
                let then_block = self.block()?;
                let else_block = if self.at_keyword("qelse") {
                    self.pos += 1;
                    Some(self.else_body("qif")?)
                } else {
                    None
                };
                StmtKind::QIf {
                    cond,
                    then_block,
                    else_block,
                }
            }
            (TokenKind::Keyword, "while") => {
                self.pos += 1;
                let cond = self.paren_cond()?;
                let body = self.body(true)?;
                StmtKind::While { cond, body }
            }
            (TokenKind::Keyword, "qwhile") => {
                self.pos += 1;
                let cond = self.paren_cond()?;
                let body = self.block()?;
                StmtKind::QWhile { cond, body }
            }
            (TokenKind::Keyword, "for") => {
                self.pos += 1;
                self.expect_punct("(")?;
                let var = self.expect_ident()?;
                if !self.at_op("=") {
                    return Err(self.err("'='"));
                }
                self.pos += 1;
                let lo = self.expr()?;
                self.expect_punct(":")?;
                let hi = self.expr()?;
                self.expect_punct(")")?;
                let body = self.body(true)?;
                StmtKind::For { var, lo, hi, body }
            }
            (TokenKind::Keyword, kw @ ("else" | "qelse")) => {
                return Err(ParseError {
                    span: start,
                    expected: "statement".into(),
                    found: format!("'{kw}' without a matching if"),
                })
            }
            (TokenKind::Punct, "{") => StmtKind::Block(self.block()?),
            (TokenKind::Ident, _)
                if self.peek_at(1).is_some_and(|t| t.kind == TokenKind::Ident)
                    && self.peek_at(2).is_some_and(|t| t.is_op("=")) =>
            {
                let ty = self.expect_ident()?;
                if !DeclType::is_builtin_name(&ty.name) {
                    return Err(ParseError {
                        span: ty.span,
                        expected: "a QRunes type name (use 'host' for host types)".into(),
                        found: format!("'{}'", ty.name),
                    });
                }
                let name = self.expect_ident()?;
                self.pos += 1;
                let init = self.expr()?;
                self.terminator()?;
                StmtKind::Decl {
                    ty: DeclType::from_name(&ty.name),
                    name,
                    init,
                }
            }
            _ => {
                let target = self.expr()?;
                let op = match self.peek() {
                    Some(t) if t.kind == TokenKind::Op => match t.lexeme.as_str() {
                        "=" => Some(AssignOp::Set),
                        "+=" => Some(AssignOp::Add),
                        "-=" => Some(AssignOp::Sub),
                        "*=" => Some(AssignOp::Mul),
                        _ => None,
                    },
                    _ => None,
                };
                let kind = if let Some(op) = op {
                    self.pos += 1;
                    let value = self.expr()?;
                    StmtKind::Assign { target, op, value }
                } else {
                    StmtKind::Expr(target)
                };
                self.terminator()?;
                kind
            }
        };
        let end = self.prev_span();
        Ok(Stmt {
            kind,
            span: start.to(end),
        })
    }

    /// Body after `else`/`qelse`: a block, or a chained `if`/`qif`.
    fn else_body(&mut self, chain_kw: &str) -> PResult<Block> {
        if self.at_keyword(chain_kw) {
            let stmt = self.stmt()?;
            return Ok(Block {
                span: stmt.span,
                stmts: vec![stmt],
            });
        }
        self.block()
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        self.binary(1)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Op)
            .and_then(|t| BinOp::from_symbol(&t.lexeme))
        {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.pos += 1;
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let op = match self.peek() {
            Some(t) if t.is_op("-") => Some(UnOp::Neg),
            Some(t) if t.is_op("!") => Some(UnOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            let start = self.bump().span;
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(self.mk(ExprKind::Unary(op, Box::new(operand)), span));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.at_punct("[") {
            self.pos += 1;
            let index = self.expr()?;
            if self.eat_punct(":") {
                let hi = self.expr()?;
                let close = self.expect_punct("]")?;
                let span = e.span.to(close.span);
                e = self.mk(ExprKind::Slice(Box::new(e), Box::new(index), Box::new(hi)), span);
            } else {
                let close = self.expect_punct("]")?;
                let span = e.span.to(close.span);
                e = self.mk(ExprKind::Index(Box::new(e), Box::new(index)), span);
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            return Err(self.err("expression"));
        };
        match tok.kind {
            TokenKind::Int => {
                self.pos += 1;
                let v = tok.lexeme.parse().expect("lexer validated");
                Ok(self.mk(ExprKind::Int(v), tok.span))
            }
            TokenKind::Float => {
                self.pos += 1;
                let v = tok.lexeme.parse().expect("lexer validated");
                Ok(self.mk(ExprKind::Float(v), tok.span))
            }
            TokenKind::Bool => {
                self.pos += 1;
                let v = matches!(tok.lexeme.as_str(), "true" | "True");
                Ok(self.mk(ExprKind::Bool(v), tok.span))
            }
            TokenKind::Ident => {
                self.pos += 1;
                if !self.at_punct("(") {
                    return Ok(self.mk(ExprKind::Ident(tok.lexeme.clone()), tok.span));
                }
                self.pos += 1;
                let mut args = Vec::new();
                if !self.at_punct(")") {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat_punct(",") {
                            break;
                        }
                    }
                }
                let close = self.expect_punct(")")?;
                let span = tok.span.to(close.span);
                if tok.lexeme == "len" {
                    if args.len() != 1 {
                        return Err(ParseError {
                            span,
                            expected: "exactly one argument to len".into(),
                            found: format!("{} arguments", args.len()),
                        });
                    }
                    let arg = args.pop().unwrap();
                    return Ok(self.mk(ExprKind::Len(Box::new(arg)), span));
                }
                let name = Ident {
                    name: tok.lexeme.clone(),
                    span: tok.span,
                };
                Ok(self.mk(ExprKind::Call(name, args), span))
            }
            TokenKind::Punct if tok.lexeme == "(" => {
                self.pos += 1;
                let mut inner = self.expr()?;
                let close = self.expect_punct(")")?;
                inner.span = tok.span.to(close.span);
                Ok(inner)
            }
            _ => Err(self.err("expression")),
        }
    }
}
