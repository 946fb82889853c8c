use std::collections::{HashMap, HashSet};

use super::profile::{fill, Profile};
use super::{CodegenError, EmitRequest, OutputFile, Target, TargetSourceText};
use crate::frontend::*;
use crate::semantics::{builtins, SemType, TypedAst};

/// Emits host-language source from a [`Profile`]; knows nothing about any
/// particular framework.
#[derive(Debug, Clone)]
pub struct ProfileEmitter {
    profile: Profile,
}

impl ProfileEmitter {
    pub fn new(profile: Profile) -> ProfileEmitter {
        ProfileEmitter { profile }
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }
}

impl Target for ProfileEmitter {
    fn name(&self) -> &str {
        &self.profile.name
    }

    fn languages(&self) -> &[String] {
        &self.profile.languages
    }

    fn emit(&self, req: &EmitRequest) -> Result<TargetSourceText, CodegenError> {
        let p = &self.profile;
        let ast = &req.program.ast;
        let stem_vars = [("stem", req.stem)];
        let header_name = p.files.header.as_ref().map(|h| fill(h, &stem_vars));

        let mut top = Vec::new();
        if req.autoimport && !p.autoimport.trim().is_empty() {
            top.push(p.autoimport.trim_matches('\n').to_owned());
        }

        let mut sections = top.clone();
        if let Some(h) = &header_name {
            push_nonempty(&mut sections, fill(&p.files.source_prelude, &[("header", h)]));
        } else {
            push_nonempty(&mut sections, p.files.source_prelude.clone());
        }
        let mut consts = Vec::new();
        let mut globals = Vec::new();
        for item in &ast.items {
            match item {
                TopItem::ConstLet(b) => {
                    let mut f = FnEmitter::new(p, req.program, &globals);
                    let value = f.expr(&b.init).0;
                    consts.push(fill(&p.syntax.constant, &[("name", &b.name.name), ("value", &value)]));
                    globals.push(b.name.name.clone());
                }
                TopItem::FnDef(def) => {
                    if !consts.is_empty() {
                        sections.push(consts.join("\n"));
                        consts.clear();
                    }
                    let mut f = FnEmitter::new(p, req.program, &globals);
                    f.function(def)?;
                    sections.push(f.lines.join("\n"));
                }
                TopItem::FnDecl(_) => {}
            }
        }
        if !consts.is_empty() {
            sections.push(consts.join("\n"));
        }
        let mut source = sections.join("\n\n");
        source.push('\n');
        if let Some(script) = &ast.script {
            source.push_str(&script.text);
            if !source.ends_with('\n') {
                source.push('\n');
            }
        }

        let mut files = Vec::new();
        if let Some(h) = header_name {
            let mut sections = top;
            push_nonempty(&mut sections, p.files.header_prelude.clone());
            let protos: Vec<String> = ast
                .functions()
                .map(|def| {
                    let f = FnEmitter::new(p, req.program, &[]);
                    fill(
                        &p.syntax.prototype,
                        &[("name", &def.sig.name.name), ("params", &f.params_text(&def.sig))],
                    )
                })
                .filter(|s| !s.is_empty())
                .collect();
            if !protos.is_empty() {
                sections.push(protos.join("\n"));
            }
            let mut text = sections.join("\n\n");
            text.push('\n');
            files.push(OutputFile { name: h, text });
        }
        files.push(OutputFile {
            name: fill(&p.files.source, &stem_vars),
            text: source,
        });
        Ok(TargetSourceText { files })
    }
}

fn push_nonempty(v: &mut Vec<String>, s: String) {
    if !s.is_empty() {
        v.push(s);
    }
}

const ATOM: u8 = 100;
const UNARY: u8 = 70;
const LOOSE_NOT: u8 = 25;

fn precedence(op: BinOp) -> u8 {
    op.precedence() * 10
}

#[derive(Default)]
struct NameFrame {
    /// QRunes name → (emitted name, is assist-classical)
    names: HashMap<String, (String, bool)>,
    barrier: bool,
}

struct FnEmitter<'a> {
    p: &'a Profile,
    typed: &'a TypedAst,
    lines: Vec<String>,
    depth: usize,
    progs: Vec<String>,
    prog_count: usize,
    frames: Vec<NameFrame>,
    /// Names declared per target-language scope.
    declared: Vec<HashSet<String>>,
}

impl<'a> FnEmitter<'a> {
    fn new(p: &'a Profile, typed: &'a TypedAst, globals: &[String]) -> FnEmitter<'a> {
        let mut root = NameFrame::default();
        for g in globals {
            root.names.insert(g.clone(), (g.clone(), true));
        }
        FnEmitter {
            p,
            typed,
            lines: Vec::new(),
            depth: 0,
            progs: vec!["prog".to_owned()],
            prog_count: 0,
            frames: vec![root],
            declared: vec![HashSet::new()],
        }
    }

    fn line(&mut self, text: String) {
        for l in text.split('\n') {
            if !l.is_empty() {
                self.lines.push(format!("{}{l}", self.p.indent.repeat(self.depth)));
            }
        }
    }

    fn prog(&self) -> &str {
        self.progs.last().expect("program variable")
    }

    fn insert(&mut self, op: String) {
        let text = fill(&self.p.syntax.insert, &[("prog", self.prog()), ("op", &op)]);
        self.line(text);
    }

    fn type_name(&self, ty: &DeclType) -> String {
        let t = &self.p.types;
        match ty {
            DeclType::Qubit => t.qubit.clone(),
            DeclType::QVec => t.qvec.clone(),
            DeclType::CBit => t.cbit.clone(),
            DeclType::CVec => t.cvec.clone(),
            DeclType::Int => t.int.clone(),
            DeclType::Double => t.double.clone(),
            DeclType::Bool => t.bool.clone(),
            DeclType::HostOpaque(n) => n.clone(),
        }
    }

    fn params_text(&self, sig: &FnSig) -> String {
        let params: Vec<String> = sig
            .params
            .iter()
            .map(|prm| fill(&self.p.syntax.param, &[("type", &self.type_name(&prm.ty)), ("name", &prm.name.name)]))
            .collect();
        params.join(", ")
    }

    fn reserved(name: &str) -> bool {
        name == "prog"
            || name
                .strip_prefix("prog_")
                .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()))
    }

    fn taken(&self, candidate: &str, shadows: bool) -> bool {
        Self::reserved(candidate)
            || shadows
            || self
                .frames
                .iter()
                .any(|f| f.names.contains_key(candidate) || f.names.values().any(|(e, _)| e == candidate))
            || (!self.p.syntax.redeclare_ok && self.declared.last().is_some_and(|d| d.contains(candidate)))
    }

    /// Declares `name`, renaming it when the target language would see a
    /// clash with a visible or same-scope name.
    fn declare(&mut self, name: &str, assist: bool) -> String {
        let shadows = self.frames.iter().any(|f| f.names.contains_key(name));
        let mut emitted = name.to_owned();
        let mut k = 0;
        while self.taken(&emitted, shadows && k == 0) {
            k += 1;
            emitted = format!("{name}_{k}");
        }
        self.frames
            .last_mut()
            .expect("frame")
            .names
            .insert(name.to_owned(), (emitted.clone(), assist));
        if let Some(d) = self.declared.last_mut() {
            d.insert(emitted.clone());
        }
        emitted
    }

    fn lookup(&self, name: &str) -> String {
        let mut crossed = false;
        for frame in self.frames.iter().rev() {
            if let Some((emitted, assist)) = frame.names.get(name) {
                if !(crossed && *assist) {
                    return emitted.clone();
                }
            }
            crossed |= frame.barrier;
        }
        name.to_owned()
    }

    fn function(&mut self, def: &FnDef) -> Result<(), CodegenError> {
        self.frames.push(NameFrame::default());
        self.declared.push(HashSet::new());
        let mut params = Vec::new();
        for prm in &def.sig.params {
            let assist = SemType::from_decl(&prm.ty).is_assist();
            let name = self.declare(&prm.name.name, assist);
            params.push(fill(&self.p.syntax.param, &[("type", &self.type_name(&prm.ty)), ("name", &name)]));
        }
        let open = fill(
            &self.p.syntax.function_open,
            &[("name", &def.sig.name.name), ("params", &params.join(", "))],
        );
        self.line(open);
        self.depth += 1;
        let new = fill(&self.p.syntax.program_new, &[("prog", "prog")]);
        self.line(new);
        self.stmts(&def.body.stmts)?;
        let ret = fill(&self.p.syntax.program_return, &[("prog", "prog")]);
        self.line(ret);
        self.depth -= 1;
        self.line(self.p.syntax.function_close.clone());
        Ok(())
    }

    fn stmts(&mut self, stmts: &[Stmt]) -> Result<(), CodegenError> {
        stmts.iter().try_for_each(|s| self.stmt(s))
    }

    /// An indented body of a target-language control statement.
    fn body(&mut self, block: &Block) -> Result<(), CodegenError> {
        self.frames.push(NameFrame::default());
        if self.p.syntax.scoped_blocks {
            self.declared.push(HashSet::new());
        }
        self.depth += 1;
        let before = self.lines.len();
        let r = self.stmts(&block.stmts);
        if self.lines.len() == before {
            self.line(self.p.syntax.empty_block.clone());
        }
        self.depth -= 1;
        if self.p.syntax.scoped_blocks {
            self.declared.pop();
        }
        self.frames.pop();
        r
    }

    /// A sub-program for a qif branch or qwhile body; returns its variable.
    fn subprogram(&mut self, block: &Block) -> Result<String, CodegenError> {
        self.prog_count += 1;
        let name = format!("prog_{}", self.prog_count);
        let new = fill(&self.p.syntax.program_new, &[("prog", &name)]);
        self.line(new);
        self.progs.push(name.clone());
        self.frames.push(NameFrame {
            barrier: true,
            ..NameFrame::default()
        });
        let r = self.stmts(&block.stmts);
        self.frames.pop();
        self.progs.pop();
        r.map(|_| name)
    }

    fn require(&self, template: &str, construct: &str, span: crate::span::SourceSpan) -> Result<(), CodegenError> {
        if template.is_empty() {
            return Err(CodegenError::Unsupported {
                target: self.p.name.clone(),
                construct: construct.to_owned(),
                span,
            });
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt) -> Result<(), CodegenError> {
        let syn = &self.p.syntax;
        match &stmt.kind {
            StmtKind::Let(b) => {
                let value = self.expr(&b.init).0;
                let name = self.declare(&b.name.name, true);
                self.line(fill(&syn.let_, &[("name", &name), ("value", &value)]));
            }
            StmtKind::Decl { ty, name, init } => {
                let value = self.expr(init).0;
                let assist = SemType::from_decl(ty).is_assist();
                let emitted = self.declare(&name.name, assist);
                let ty = self.type_name(ty);
                self.line(fill(&syn.decl, &[("type", &ty), ("name", &emitted), ("value", &value)]));
            }
            StmtKind::HostDecl { type_name, name, init } => {
                let value = self.expr(init).0;
                let emitted = self.declare(&name.name, true);
                self.line(fill(
                    &syn.decl,
                    &[("type", &type_name.name), ("name", &emitted), ("value", &value)],
                ));
            }
            StmtKind::HostBlock(raw) => {
                for l in dedent(raw) {
                    if l.is_empty() {
                        self.lines.push(String::new());
                    } else {
                        self.line(l);
                    }
                }
            }
            StmtKind::Assign { target, op, value } => {
                let t = self.expr(target).0;
                let v = self.expr(value);
                let classical = self.typed.type_of(target.id).is_some_and(|t| t.is_classical());
                if classical {
                    self.require(&syn.classical_assign, "classical assignment", stmt.span)?;
                    let rhs = match op.binary() {
                        Some(bin) => self.binary_text(bin, (t.clone(), ATOM), v, false),
                        None => v.0,
                    };
                    let op = fill(&self.p.syntax.classical_assign, &[("target", &t), ("value", &rhs)]);
                    self.insert(op);
                } else {
                    self.line(fill(&syn.assign, &[("target", &t), ("op", op.as_str()), ("value", &v.0)]));
                }
            }
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call(name, args) => {
                    let op = self.call(name, args);
                    self.insert(op);
                }
                _ => {
                    let text = self.expr(e).0;
                    self.line(fill(&syn.expr_stmt, &[("expr", &text)]));
                }
            },
            StmtKind::If { cond, then_block, else_block } => {
                self.require(&syn.if_open, "if", stmt.span)?;
                let c = self.expr(cond).0;
                self.line(fill(&syn.if_open, &[("cond", &c)]));
                self.body(then_block)?;
                let mut tail = else_block.as_ref();
                while let Some(b) = tail {
                    match b.stmts.as_slice() {
                        [Stmt {
                            kind: StmtKind::If { cond, then_block, else_block },
                            ..
                        }] => {
                            let c = self.expr(cond).0;
                            self.line(fill(&self.p.syntax.else_if, &[("cond", &c)]));
                            self.body(then_block)?;
                            tail = else_block.as_ref();
                        }
                        _ => {
                            self.line(self.p.syntax.else_.clone());
                            self.body(b)?;
                            tail = None;
                        }
                    }
                }
                self.line(self.p.syntax.block_close.clone());
            }
            StmtKind::While { cond, body } => {
                self.require(&syn.while_open, "while", stmt.span)?;
                let c = self.expr(cond).0;
                self.line(fill(&syn.while_open, &[("cond", &c)]));
                self.body(body)?;
                self.line(self.p.syntax.block_close.clone());
            }
            StmtKind::For { var, lo, hi, body } => {
                self.require(&syn.for_open, "for", stmt.span)?;
                let lo = self.expr(lo).0;
                let hi = self.expr(hi).0;
                self.frames.push(NameFrame::default());
                if self.p.syntax.scoped_blocks {
                    self.declared.push(HashSet::new());
                }
                let v = self.declare(&var.name, true);
                self.line(fill(&self.p.syntax.for_open, &[("var", &v), ("lo", &lo), ("hi", &hi)]));
                let r = self.body(body);
                if self.p.syntax.scoped_blocks {
                    self.declared.pop();
                }
                self.frames.pop();
                r?;
                self.line(self.p.syntax.block_close.clone());
            }
            StmtKind::QIf { cond, then_block, else_block } => {
                self.require(&syn.qif, "qif", stmt.span)?;
                let c = self.expr(cond).0;
                let then = self.subprogram(then_block)?;
                let op = match else_block {
                    Some(b) => {
                        let other = self.subprogram(b)?;
                        fill(&self.p.syntax.qif_else, &[("cond", &c), ("then", &then), ("else", &other)])
                    }
                    None => fill(&self.p.syntax.qif, &[("cond", &c), ("then", &then)]),
                };
                self.insert(op);
            }
            StmtKind::QWhile { cond, body } => {
                self.require(&syn.qwhile, "qwhile", stmt.span)?;
                let c = self.expr(cond).0;
                let b = self.subprogram(body)?;
                let op = fill(&self.p.syntax.qwhile, &[("cond", &c), ("body", &b)]);
                self.insert(op);
            }
            StmtKind::Block(b) => {
                if syn.block_open.is_empty() {
                    self.frames.push(NameFrame::default());
                    let r = self.stmts(&b.stmts);
                    self.frames.pop();
                    r?;
                } else {
                    self.line(syn.block_open.clone());
                    self.body(b)?;
                    self.line(self.p.syntax.block_close.clone());
                }
            }
        }
        Ok(())
    }

    fn call(&mut self, name: &Ident, args: &[Expr]) -> String {
        let args: Vec<String> = args.iter().map(|a| self.expr(a).0).collect();
        let callee = match builtins::lookup(&name.name) {
            Some(b) if self.typed.functions.get(&name.name).is_none() => {
                self.p.gates.get(b.name).cloned().unwrap_or_else(|| b.name.to_owned())
            }
            _ => name.name.clone(),
        };
        fill(&self.p.syntax.call, &[("name", &callee), ("args", &args.join(", "))])
    }

    fn binary_text(&self, op: BinOp, l: (String, u8), r: (String, u8), int_div: bool) -> String {
        let ex = &self.p.expressions;
        let prec = precedence(op);
        let chained = |s: &(String, u8)| ex.chained_comparisons && op.is_comparison() && (30..50).contains(&s.1);
        let wrap = |s: (String, u8), right: bool| {
            if s.1 < prec || (right && s.1 == prec) || chained(&s) {
                format!("({})", s.0)
            } else {
                s.0
            }
        };
        let (l, r) = (wrap(l, false), wrap(r, true));
        if int_div {
            return fill(&ex.int_div, &[("l", &l), ("r", &r)]);
        }
        let sym = match op {
            BinOp::And => ex.and.as_str(),
            BinOp::Or => ex.or.as_str(),
            _ => op.as_str(),
        };
        format!("{l} {sym} {r}")
    }

    fn expr(&mut self, e: &Expr) -> (String, u8) {
        let ex = &self.p.expressions;
        match &e.kind {
            ExprKind::Ident(n) => (self.lookup(n), ATOM),
            ExprKind::Int(i) => (i.to_string(), ATOM),
            ExprKind::Float(f) => (format!("{f:?}"), ATOM),
            ExprKind::Bool(b) => ((if *b { &ex.true_ } else { &ex.false_ }).clone(), ATOM),
            ExprKind::Index(b, i) => {
                let x = self.atom(b);
                let i = self.expr(i).0;
                (fill(&self.p.expressions.index, &[("x", &x), ("i", &i)]), ATOM)
            }
            ExprKind::Slice(b, lo, hi) => {
                let template = match self.typed.type_of(b.id) {
                    Some(SemType::CVec) => self.p.expressions.slice_cvec.clone(),
                    _ => self.p.expressions.slice_qvec.clone(),
                };
                let x = self.atom(b);
                let lo = self.expr(lo).0;
                let hi = self.expr(hi).0;
                (fill(&template, &[("x", &x), ("lo", &lo), ("hi", &hi)]), ATOM)
            }
            ExprKind::Len(x) => {
                let x = self.atom(x);
                (fill(&self.p.expressions.len, &[("x", &x)]), ATOM)
            }
            ExprKind::Call(name, args) => (self.call(name, args), ATOM),
            ExprKind::Unary(op, operand) => {
                let (prec, sym) = match op {
                    UnOp::Neg => (UNARY, "-".to_owned()),
                    UnOp::Not if ex.loose_not => (LOOSE_NOT, ex.not.clone()),
                    UnOp::Not => (UNARY, ex.not.clone()),
                };
                let (s, p) = self.expr(operand);
                let s = if p < prec || s.starts_with('-') || s.starts_with(&sym) {
                    format!("({s})")
                } else {
                    s
                };
                (format!("{sym}{s}"), prec)
            }
            ExprKind::Binary(op, l, r) => {
                let int_div = *op == BinOp::Div
                    && self.typed.type_of(e.id) == Some(&SemType::AssistInt)
                    && ex.int_div != "{l} / {r}";
                let l = self.expr(l);
                let r = self.expr(r);
                let text = self.binary_text(*op, l, r, int_div);
                (text, if int_div { ATOM } else { precedence(*op) })
            }
        }
    }

    fn atom(&mut self, e: &Expr) -> String {
        match self.expr(e) {
            (s, ATOM) => s,
            (s, _) => format!("({s})"),
        }
    }
}

/// Strips the common indentation and surrounding blank lines of host text.
fn dedent(raw: &str) -> Vec<String> {
    let lines: Vec<&str> = raw.lines().map(|l| l.trim_end()).collect();
    let first = lines.iter().position(|l| !l.trim().is_empty());
    let last = lines.iter().rposition(|l| !l.trim().is_empty());
    let (Some(first), Some(last)) = (first, last) else {
        return Vec::new();
    };
    let lines = &lines[first..=last];
    let margin = lines
        .iter()
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.len() - l.trim_start().len())
        .min()
        .unwrap_or(0);
    lines
        .iter()
        .map(|l| if l.trim().is_empty() { String::new() } else { l[margin..].to_owned() })
        .collect()
}
