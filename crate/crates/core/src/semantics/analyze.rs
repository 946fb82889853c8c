//! Type and scope checking.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::builtins::{self, ArgKind};
use super::scope::{Lookup, ScopeId, ScopeTree, Symbol, SymbolId, SymbolKind};
use super::types::{Family, SemType};
use crate::diagnostics::{sort_diagnostics, Code, Diagnostic};
use crate::frontend::*;
use crate::span::SourceSpan;

/// Signature of a user function, from its definition (or declaration when
/// no definition exists).
#[derive(Debug, Clone, PartialEq)]
pub struct FnInfo {
    pub name: String,
    pub params: Vec<(String, DeclType)>,
    pub span: SourceSpan,
    pub defined: bool,
    pub symbol: SymbolId,
}

impl FnInfo {
    pub fn signature(&self) -> String {
        let params: Vec<_> = self
            .params
            .iter()
            .map(|(n, t)| format!("{t} {n}"))
            .collect();
        format!("{}({})", self.name, params.join(", "))
    }
}

/// What a name at some source range refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    Symbol(SymbolId),
    Builtin(&'static builtins::Builtin),
}

/// An analyzed program.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedAst {
    pub ast: Ast,
    expr_types: Vec<Option<SemType>>,
    pub scopes: ScopeTree,
    pub functions: IndexMap<String, FnInfo>,
    /// Name occurrences (uses and definitions) with what they resolve to.
    pub references: Vec<(SourceSpan, Reference)>,
}

impl TypedAst {
    /// Semantic type of an expression. `None` for calls (quantum operations
    /// have no value) and for expressions that failed to type.
    pub fn type_of(&self, id: ExprId) -> Option<&SemType> {
        self.expr_types.get(id.0 as usize).and_then(Option::as_ref)
    }

    /// Innermost reference whose span contains `offset`.
    pub fn reference_at(&self, offset: usize) -> Option<(SourceSpan, Reference)> {
        self.references
            .iter()
            .filter(|(s, _)| s.start <= offset && offset < s.end.max(s.start + 1))
            .min_by_key(|(s, _)| s.len())
            .copied()
    }

    /// Symbols visible at `offset` under the scoping rules.
    pub fn visible_at(&self, offset: usize) -> Vec<&Symbol> {
        let scope = self.scopes.scope_at(offset);
        self.scopes
            .visible(scope, offset)
            .into_iter()
            .map(|id| self.scopes.symbol(id))
            .collect()
    }
}

/// Checks `ast`, returning the annotated program and diagnostics sorted by span.
/// Never aborts: the typed program is returned even when errors exist.
pub fn analyze(ast: Ast) -> (TypedAst, Vec<Diagnostic>) {
    let root_span = SourceSpan::new(0, usize::MAX / 2, 1, 1);
    let mut cx = Checker {
        scopes: ScopeTree::new(root_span),
        expr_types: vec![None; ast.expr_count as usize],
        diags: Vec::new(),
        functions: IndexMap::new(),
        references: Vec::new(),
        current_fn: None,
        declared_only: HashSet::new(),
    };
    cx.collect_functions(&ast);
    let root = cx.scopes.root();
    for item in &ast.items {
        match item {
            TopItem::ConstLet(binding) => {
                let ty = cx.let_init(binding, root);
                let id = cx.scopes.define(
                    root,
                    Symbol {
                        name: binding.name.name.clone(),
                        sem_type: ty,
                        kind: SymbolKind::TopConst,
                        def_span: binding.name.span,
                        visible_from: binding.span.end,
                        owner: None,
                    },
                );
                cx.references.push((binding.name.span, Reference::Symbol(id)));
            }
            TopItem::FnDef(def) => cx.function(def),
            TopItem::FnDecl(_) => {}
        }
    }
    let Checker {
        scopes,
        expr_types,
        mut diags,
        functions,
        references,
        ..
    } = cx;
    sort_diagnostics(&mut diags);
    (
        TypedAst {
            ast,
            expr_types,
            scopes,
            functions,
            references,
        },
        diags,
    )
}

/// Result of typing an expression.
#[derive(Debug, Clone, PartialEq)]
enum Ty {
    Val(SemType),
    /// A quantum operation (call); has no value.
    Op,
    /// Already reported.
    Err,
}

struct Checker {
    scopes: ScopeTree,
    expr_types: Vec<Option<SemType>>,
    diags: Vec<Diagnostic>,
    functions: IndexMap<String, FnInfo>,
    references: Vec<(SourceSpan, Reference)>,
    current_fn: Option<String>,
    declared_only: HashSet<String>,
}

impl Checker {
    fn report(&mut self, code: Code, span: SourceSpan, msg: impl Into<String>) {
        self.diags.push(Diagnostic::new(code, span, msg));
    }

    fn collect_functions(&mut self, ast: &Ast) {
        let root = self.scopes.root();
        let mut decls: Vec<&FnSig> = Vec::new();
        for item in &ast.items {
            match item {
                TopItem::FnDef(def) => {
                    let name = &def.sig.name;
                    if builtins::lookup(&name.name).is_some() {
                        self.report(
                            Code::E231,
                            name.span,
                            format!("'{}' redefines a builtin operation", name.name),
                        );
                        continue;
                    }
                    if self.functions.get(&name.name).is_some_and(|f| f.defined) {
                        self.report(
                            Code::E231,
                            name.span,
                            format!("function '{}' is defined more than once", name.name),
                        );
                        continue;
                    }
                    let symbol = self.scopes.define(
                        root,
                        Symbol {
                            name: name.name.clone(),
                            sem_type: None,
                            kind: SymbolKind::Function,
                            def_span: name.span,
                            visible_from: 0,
                            owner: None,
                        },
                    );
                    self.references.push((name.span, Reference::Symbol(symbol)));
                    self.functions.insert(
                        name.name.clone(),
                        FnInfo {
                            name: name.name.clone(),
                            params: def
                                .sig
                                .params
                                .iter()
                                .map(|p| (p.name.name.clone(), p.ty.clone()))
                                .collect(),
                            span: def.sig.span,
                            defined: true,
                            symbol,
                        },
                    );
                    let mut seen = HashMap::new();
                    for p in &def.sig.params {
                        if seen.insert(p.name.name.as_str(), ()).is_some() {
                            self.report(
                                Code::E231,
                                p.name.span,
                                format!("duplicate parameter '{}'", p.name.name),
                            );
                        }
                    }
                }
                TopItem::FnDecl(sig) => decls.push(sig),
                TopItem::ConstLet(_) => {}
            }
        }
        for sig in decls {
            let name = &sig.name.name;
            match self.functions.get(name).cloned() {
                Some(info) => {
                    let matches = info.params.len() == sig.params.len()
                        && info
                            .params
                            .iter()
                            .zip(&sig.params)
                            .all(|((_, t), p)| *t == p.ty);
                    if !matches {
                        let expected = info.signature();
                        self.report(
                            Code::E102,
                            sig.span,
                            format!("declaration of '{name}' does not match its definition {expected}"),
                        );
                    }
                    self.references
                        .push((sig.name.span, Reference::Symbol(info.symbol)));
                }
                None => {
                    self.declared_only.insert(name.clone());
                    self.report(
                        Code::E230,
                        sig.span,
                        format!("function '{name}' is declared but never defined"),
                    );
                }
            }
        }
    }

    fn function(&mut self, def: &FnDef) {
        if !self.functions.contains_key(&def.sig.name.name) {
            return;
        }
        self.current_fn = Some(def.sig.name.name.clone());
        let fn_scope = self.scopes.push_scope(self.scopes.root(), def.span, false);
        for p in &def.sig.params {
            let id = self.scopes.define(
                fn_scope,
                Symbol {
                    name: p.name.name.clone(),
                    sem_type: Some(SemType::from_decl(&p.ty)),
                    kind: SymbolKind::Param,
                    def_span: p.name.span,
                    visible_from: def.sig.span.start,
                    owner: self.current_fn.clone(),
                },
            );
            self.references.push((p.name.span, Reference::Symbol(id)));
        }
        self.block(&def.body, fn_scope, false);
        self.current_fn = None;
    }

    fn block(&mut self, block: &Block, parent: ScopeId, barrier: bool) {
        let scope = self.scopes.push_scope(parent, block.span, barrier);
        for stmt in &block.stmts {
            self.stmt(stmt, scope);
        }
    }

    fn define_local(
        &mut self,
        scope: ScopeId,
        name: &Ident,
        ty: Option<SemType>,
        kind: SymbolKind,
        visible_from: usize,
    ) {
        if kind == SymbolKind::LetBinding {
            if let Lookup::Found(prev) = self.scopes.lookup(scope, &name.name, name.span.start) {
                let prev = self.scopes.symbol(prev);
                if let Some(fam @ (Family::Quantum | Family::Classical)) = prev.family() {
                    if prev.kind != SymbolKind::Function {
                        self.report(
                            Code::W001,
                            name.span,
                            format!("'{}' shadows a {fam} binding", name.name),
                        );
                    }
                }
            }
        }
        let id = self.scopes.define(
            scope,
            Symbol {
                name: name.name.clone(),
                sem_type: ty,
                kind,
                def_span: name.span,
                visible_from,
                owner: self.current_fn.clone(),
            },
        );
        self.references.push((name.span, Reference::Symbol(id)));
    }

    /// Types a `let` initializer, which must be assist-classical.
    fn let_init(&mut self, binding: &LetBinding, scope: ScopeId) -> Option<SemType> {
        match self.expr(&binding.init, scope) {
            Ty::Val(t) if t.is_assist() => Some(t),
            Ty::Val(t) if t.is_classical() => {
                self.report(
                    Code::E201,
                    binding.span,
                    format!(
                        "cannot assign classical value to assist-classical '{}'",
                        binding.name.name
                    ),
                );
                None
            }
            Ty::Val(t) => {
                self.report(
                    Code::E102,
                    binding.init.span,
                    format!("'let' binds assist-classical values, found {t}; use '{t} {} = ...' to alias", binding.name.name),
                );
                None
            }
            Ty::Op => {
                self.report(
                    Code::E102,
                    binding.init.span,
                    "a quantum operation has no value",
                );
                None
            }
            Ty::Err => None,
        }
    }

    fn stmt(&mut self, stmt: &Stmt, scope: ScopeId) {
        match &stmt.kind {
            StmtKind::Let(binding) => {
                let ty = self.let_init(binding, scope);
                self.define_local(scope, &binding.name, ty, SymbolKind::LetBinding, stmt.span.end);
            }
            StmtKind::Decl { ty, name, init } => {
                let declared = SemType::from_decl(ty);
                let got = self.expr(init, scope);
                if declared.is_classical()
                    && got == Ty::Val(declared.clone())
                    && !matches!(init.kind, ExprKind::Ident(_) | ExprKind::Index(..) | ExprKind::Slice(..))
                {
                    self.report(
                        Code::E102,
                        init.span,
                        format!("{declared} declaration must alias an existing register"),
                    );
                } else {
                    self.check_decl_init(&declared, &got, name, init.span, stmt.span);
                }
                self.define_local(scope, name, Some(declared), SymbolKind::LetBinding, stmt.span.end);
            }
            StmtKind::HostDecl {
                type_name,
                name,
                init,
            } => {
                let declared = SemType::from_decl(&DeclType::from_name(&type_name.name));
                let got = self.expr(init, scope);
                self.check_decl_init(&declared, &got, name, init.span, stmt.span);
                self.define_local(scope, name, Some(declared), SymbolKind::LetBinding, stmt.span.end);
            }
            StmtKind::HostBlock(_) => {}
            StmtKind::Assign { target, op, value } => self.assign(stmt, target, *op, value, scope),
            StmtKind::Expr(e) => {
                if let ExprKind::Call(name, args) = &e.kind {
                    self.call(name, args, e.span, scope);
                } else {
                    self.expr(e, scope);
                }
            }
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                self.condition(cond, scope, Family::Assist, "if");
                self.block(then_block, scope, false);
                if let Some(b) = else_block {
                    self.block(b, scope, false);
                }
            }
            StmtKind::While { cond, body } => {
                self.condition(cond, scope, Family::Assist, "while");
                self.block(body, scope, false);
            }
            StmtKind::For { var, lo, hi, body } => {
                self.condition(lo, scope, Family::Assist, "for");
                self.condition(hi, scope, Family::Assist, "for");
                let loop_scope = self.scopes.push_scope(scope, body.span, false);
                self.define_local(
                    loop_scope,
                    var,
                    Some(SemType::AssistInt),
                    SymbolKind::LoopVar,
                    body.span.start,
                );
                self.block(body, loop_scope, false);
            }
            StmtKind::QIf {
                cond,
                then_block,
                else_block,
            } => {
                self.condition(cond, scope, Family::Classical, "qif");
                self.block(then_block, scope, true);
                if let Some(b) = else_block {
                    self.block(b, scope, true);
                }
            }
            StmtKind::QWhile { cond, body } => {
                self.condition(cond, scope, Family::Classical, "qwhile");
                self.block(body, scope, true);
            }
            StmtKind::Block(b) => self.block(b, scope, false),
        }
    }

    fn check_decl_init(
        &mut self,
        declared: &SemType,
        got: &Ty,
        name: &Ident,
        init_span: SourceSpan,
        stmt_span: SourceSpan,
    ) {
        let got = match got {
            Ty::Err => return,
            Ty::Op => {
                self.report(Code::E102, init_span, "a quantum operation has no value");
                return;
            }
            Ty::Val(t) => t,
        };
        let ok = match declared.family() {
            Family::Quantum | Family::Classical => got == declared,
            Family::Assist => got.is_assist(),
        };
        if ok {
            return;
        }
        if declared.is_assist() && got.is_classical() {
            self.report(
                Code::E201,
                stmt_span,
                format!(
                    "cannot assign classical value to assist-classical '{}'",
                    name.name
                ),
            );
        } else {
            self.report(
                Code::E102,
                init_span,
                format!("'{}' is declared {declared} but initialized with {got}", name.name),
            );
        }
    }

    fn condition(&mut self, cond: &Expr, scope: ScopeId, want: Family, stmt: &str) {
        let ty = self.expr(cond, scope);
        let ok_scalar = |t: &SemType| match want {
            Family::Assist => t.is_assist(),
            Family::Classical => *t == SemType::CBit,
            Family::Quantum => false,
        };
        match ty {
            Ty::Val(t) if ok_scalar(&t) => {}
            Ty::Val(t) => {
                let hint = match want {
                    Family::Assist if t.is_classical() => {
                        " (classical conditions need 'qif'/'qwhile')"
                    }
                    Family::Classical if t.is_assist() => {
                        " (compile-time conditions need 'if'/'while')"
                    }
                    _ => "",
                };
                let want_desc = match want {
                    Family::Classical => "a classical",
                    _ => "an assist-classical",
                };
                self.report(
                    Code::E220,
                    cond.span,
                    format!("'{stmt}' requires {want_desc} expression, found {} ({t}){hint}", t.family()),
                );
            }
            Ty::Op => self.report(Code::E102, cond.span, "a quantum operation has no value"),
            Ty::Err => {}
        }
    }

    fn assign(&mut self, stmt: &Stmt, target: &Expr, op: AssignOp, value: &Expr, scope: ScopeId) {
        // Resolve the target first so a blocked name is reported on the whole assignment.
        let target_ty = match &target.kind {
            ExprKind::Ident(name) => match self.resolve(name, target.span, scope) {
                Ok(id) => {
                    let sym = self.scopes.symbol(id);
                    if sym.kind == SymbolKind::TopConst {
                        self.report(
                            Code::E204,
                            target.span,
                            format!("cannot assign to top-level constant '{name}'"),
                        );
                        Ty::Err
                    } else if sym.kind == SymbolKind::Function {
                        self.report(Code::E102, target.span, format!("'{name}' is a function"));
                        Ty::Err
                    } else {
                        let t = sym.sem_type.clone();
                        self.set_type(target.id, t.clone());
                        t.map(Ty::Val).unwrap_or(Ty::Err)
                    }
                }
                Err(Some(_)) => {
                    let span = target.span.to(value.span);
                    self.report(
                        Code::E210,
                        span,
                        format!("assist-classical '{name}' is not visible inside quantum control flow"),
                    );
                    Ty::Err
                }
                Err(None) => {
                    self.report(Code::E101, target.span, format!("unknown identifier '{name}'"));
                    Ty::Err
                }
            },
            ExprKind::Index(..) => self.expr(target, scope),
            _ => {
                self.expr(target, scope);
                self.report(Code::E102, target.span, "invalid assignment target");
                Ty::Err
            }
        };
        let value_ty = self.expr(value, scope);
        let (Ty::Val(t), v) = (target_ty, value_ty) else {
            return;
        };
        let v = match v {
            Ty::Val(v) => v,
            Ty::Op => {
                self.report(Code::E102, value.span, "a quantum operation has no value");
                return;
            }
            Ty::Err => return,
        };
        let name = match &target.kind {
            ExprKind::Ident(n) => n.clone(),
            _ => "element".to_owned(),
        };
        match t.family() {
            Family::Quantum => self.report(
                Code::E203,
                stmt.span,
                format!("quantum binding '{name}' cannot be reassigned"),
            ),
            Family::Classical => {
                if t == SemType::CVec {
                    self.report(
                        Code::E102,
                        target.span,
                        "whole-vector classical assignment is not supported; assign elements",
                    );
                } else if v.is_quantum() {
                    let code = if op == AssignOp::Set { Code::E102 } else { Code::E202 };
                    self.report(code, value.span, format!("quantum value ({v}) cannot be assigned to a register"));
                } else if v == SemType::AssistFloat || v == SemType::CVec {
                    self.report(
                        Code::E102,
                        value.span,
                        format!("classical registers hold integers, found {v}"),
                    );
                }
            }
            Family::Assist => {
                if v.is_classical() {
                    self.report(
                        Code::E201,
                        stmt.span,
                        format!("cannot assign classical value to assist-classical '{name}'"),
                    );
                } else if v.is_quantum() {
                    let code = if op == AssignOp::Set { Code::E102 } else { Code::E202 };
                    self.report(code, value.span, format!("quantum value ({v}) cannot be assigned to '{name}'"));
                }
            }
        }
    }

    /// `Err(Some(id))` when the only match is hidden by a barrier.
    fn resolve(&mut self, name: &str, span: SourceSpan, scope: ScopeId) -> Result<SymbolId, Option<SymbolId>> {
        match self.scopes.lookup(scope, name, span.start) {
            Lookup::Found(id) => {
                self.references.push((span, Reference::Symbol(id)));
                Ok(id)
            }
            Lookup::Blocked(id) => Err(Some(id)),
            Lookup::NotFound => Err(None),
        }
    }

    fn set_type(&mut self, id: ExprId, ty: Option<SemType>) {
        if let Some(slot) = self.expr_types.get_mut(id.0 as usize) {
            *slot = ty;
        }
    }

    fn expr(&mut self, e: &Expr, scope: ScopeId) -> Ty {
        let ty = self.expr_inner(e, scope);
        if let Ty::Val(t) = &ty {
            self.set_type(e.id, Some(t.clone()));
        }
        ty
    }

    fn expr_inner(&mut self, e: &Expr, scope: ScopeId) -> Ty {
        match &e.kind {
            ExprKind::Int(_) => Ty::Val(SemType::AssistInt),
            ExprKind::Float(_) => Ty::Val(SemType::AssistFloat),
            ExprKind::Bool(_) => Ty::Val(SemType::AssistBool),
            ExprKind::Ident(name) => match self.resolve(name, e.span, scope) {
                Ok(id) => {
                    let sym = self.scopes.symbol(id);
                    if sym.kind == SymbolKind::Function {
                        self.report(
                            Code::E102,
                            e.span,
                            format!("function '{name}' used as a value"),
                        );
                        return Ty::Err;
                    }
                    sym.sem_type.clone().map(Ty::Val).unwrap_or(Ty::Err)
                }
                Err(Some(_)) => {
                    self.report(
                        Code::E210,
                        e.span,
                        format!("assist-classical '{name}' is not visible inside quantum control flow"),
                    );
                    Ty::Err
                }
                Err(None) => {
                    self.report(Code::E101, e.span, format!("unknown identifier '{name}'"));
                    Ty::Err
                }
            },
            ExprKind::Index(base, index) => {
                let b = self.expr(base, scope);
                self.index_operand(index, scope);
                match b {
                    Ty::Val(SemType::QVec) => Ty::Val(SemType::Qubit),
                    Ty::Val(SemType::CVec) => Ty::Val(SemType::CBit),
                    Ty::Val(t) => {
                        self.report(Code::E102, base.span, format!("cannot index a value of type {t}"));
                        Ty::Err
                    }
                    Ty::Op => {
                        self.report(Code::E102, base.span, "a quantum operation has no value");
                        Ty::Err
                    }
                    Ty::Err => Ty::Err,
                }
            }
            ExprKind::Slice(base, lo, hi) => {
                let b = self.expr(base, scope);
                self.index_operand(lo, scope);
                self.index_operand(hi, scope);
                match b {
                    Ty::Val(t @ (SemType::QVec | SemType::CVec)) => Ty::Val(t),
                    Ty::Val(t) => {
                        self.report(Code::E102, base.span, format!("cannot slice a value of type {t}"));
                        Ty::Err
                    }
                    Ty::Op => {
                        self.report(Code::E102, base.span, "a quantum operation has no value");
                        Ty::Err
                    }
                    Ty::Err => Ty::Err,
                }
            }
            ExprKind::Len(arg) => match self.expr(arg, scope) {
                Ty::Val(SemType::QVec | SemType::CVec) => Ty::Val(SemType::AssistInt),
                Ty::Val(t) => {
                    self.report(Code::E102, arg.span, format!("len expects qvec or cvec, found {t}"));
                    Ty::Err
                }
                Ty::Op => {
                    self.report(Code::E102, arg.span, "a quantum operation has no value");
                    Ty::Err
                }
                Ty::Err => Ty::Err,
            },
            ExprKind::Call(name, args) => {
                self.call(name, args, e.span, scope);
                Ty::Op
            }
            ExprKind::Unary(op, operand) => match self.expr(operand, scope) {
                Ty::Val(t) if t.is_quantum() => {
                    self.report(
                        Code::E202,
                        e.span,
                        format!("quantum value ({t}) cannot appear in arithmetic"),
                    );
                    Ty::Err
                }
                Ty::Val(SemType::CVec) => {
                    self.report(Code::E102, e.span, "cannot apply an operator to a whole cvec");
                    Ty::Err
                }
                Ty::Val(t) if t.is_classical() => Ty::Val(SemType::CBit),
                Ty::Val(t) => Ty::Val(match (op, t) {
                    (UnOp::Not, _) => SemType::AssistBool,
                    (UnOp::Neg, SemType::AssistBool) => SemType::AssistInt,
                    (UnOp::Neg, t) => t,
                }),
                Ty::Op => {
                    self.report(Code::E102, operand.span, "a quantum operation has no value");
                    Ty::Err
                }
                Ty::Err => Ty::Err,
            },
            ExprKind::Binary(op, l, r) => {
                let lt = self.expr(l, scope);
                let rt = self.expr(r, scope);
                self.binary(*op, lt, rt, e.span, l.span, r.span)
            }
        }
    }

    fn index_operand(&mut self, index: &Expr, scope: ScopeId) {
        match self.expr(index, scope) {
            Ty::Val(t) if t.is_assist_integral() => {}
            Ty::Val(t) if t.is_classical() => self.report(
                Code::E102,
                index.span,
                "index must be assist-classical (known when the program is built), found a classical register",
            ),
            Ty::Val(t) => self.report(Code::E102, index.span, format!("index must be an integer, found {t}")),
            Ty::Op => self.report(Code::E102, index.span, "a quantum operation has no value"),
            Ty::Err => {}
        }
    }

    fn binary(&mut self, op: BinOp, l: Ty, r: Ty, span: SourceSpan, lspan: SourceSpan, rspan: SourceSpan) -> Ty {
        let (l, r) = match (l, r) {
            (Ty::Val(l), Ty::Val(r)) => (l, r),
            (Ty::Op, _) => {
                self.report(Code::E102, lspan, "a quantum operation has no value");
                return Ty::Err;
            }
            (_, Ty::Op) => {
                self.report(Code::E102, rspan, "a quantum operation has no value");
                return Ty::Err;
            }
            _ => return Ty::Err,
        };
        if l.is_quantum() || r.is_quantum() {
            let q = if l.is_quantum() { &l } else { &r };
            self.report(
                Code::E202,
                span,
                format!("quantum value ({q}) cannot appear in arithmetic"),
            );
            return Ty::Err;
        }
        if l == SemType::CVec || r == SemType::CVec {
            self.report(Code::E102, span, "cannot apply an operator to a whole cvec");
            return Ty::Err;
        }
        if l.is_classical() || r.is_classical() {
            let other = if l.is_classical() { &r } else { &l };
            if *other == SemType::AssistFloat {
                self.report(
                    Code::E102,
                    span,
                    "classical expressions are integer-valued; found a double operand",
                );
                return Ty::Err;
            }
            return Ty::Val(SemType::CBit);
        }
        if op.is_comparison() || op.is_logical() {
            return Ty::Val(SemType::AssistBool);
        }
        Ty::Val(match (&l, &r) {
            (SemType::HostOpaque(n), _) | (_, SemType::HostOpaque(n)) => SemType::HostOpaque(n.clone()),
            (SemType::AssistFloat, _) | (_, SemType::AssistFloat) => SemType::AssistFloat,
            _ => SemType::AssistInt,
        })
    }

    fn call(&mut self, name: &Ident, args: &[Expr], span: SourceSpan, scope: ScopeId) {
        let arg_tys: Vec<Ty> = args.iter().map(|a| self.expr(a, scope)).collect();
        if let Some(info) = self.functions.get(&name.name).cloned() {
            self.references.push((name.span, Reference::Symbol(info.symbol)));
            if info.params.len() != args.len() {
                self.report(
                    Code::E102,
                    span,
                    format!(
                        "'{}' expects {} argument(s), found {}",
                        info.name,
                        info.params.len(),
                        args.len()
                    ),
                );
                return;
            }
            for ((pname, pty), (arg, aty)) in info.params.iter().zip(args.iter().zip(&arg_tys)) {
                let Ty::Val(at) = aty else { continue };
                let ok = match pty {
                    DeclType::Qubit => *at == SemType::Qubit,
                    DeclType::QVec => *at == SemType::QVec,
                    DeclType::CBit => *at == SemType::CBit && is_register_ref(arg),
                    DeclType::CVec => *at == SemType::CVec,
                    DeclType::Int | DeclType::Bool => at.is_assist_integral(),
                    DeclType::Double | DeclType::HostOpaque(_) => at.is_assist(),
                };
                if ok {
                    continue;
                }
                if at.is_classical() && !matches!(pty, DeclType::CBit | DeclType::CVec) {
                    self.report(
                        Code::E201,
                        arg.span,
                        format!("cannot pass classical value to assist-classical parameter '{pname}'"),
                    );
                } else {
                    self.report(
                        Code::E102,
                        arg.span,
                        format!("parameter '{pname}' of '{}' expects {pty}, found {at}", info.name),
                    );
                }
            }
            return;
        }
        if let Some(b) = builtins::lookup(&name.name) {
            self.references.push((name.span, Reference::Builtin(b)));
            if b.args.len() != args.len() {
                self.report(
                    Code::E102,
                    span,
                    format!("{} expects {} argument(s), found {}", b.signature(), b.args.len(), args.len()),
                );
                return;
            }
            for ((kind, arg), aty) in b.args.iter().zip(args).zip(&arg_tys) {
                let Ty::Val(at) = aty else { continue };
                let ok = match kind {
                    ArgKind::Qubit => *at == SemType::Qubit,
                    ArgKind::QVec => *at == SemType::QVec,
                    ArgKind::CBit => *at == SemType::CBit && is_register_ref(arg),
                    ArgKind::CVec => *at == SemType::CVec,
                    ArgKind::Numeric => at.is_assist() || *at == SemType::CBit,
                };
                if !ok {
                    self.report(
                        Code::E102,
                        arg.span,
                        format!("{} expects {} here, found {at}", b.name, kind.name()),
                    );
                }
            }
            return;
        }
        match self.scopes.lookup(scope, &name.name, span.start) {
            Lookup::Found(_) | Lookup::Blocked(_) => self.report(
                Code::E102,
                name.span,
                format!("'{}' is not a function", name.name),
            ),
            Lookup::NotFound if self.declared_only.contains(&name.name) => {}
            Lookup::NotFound => self.report(
                Code::E101,
                name.span,
                format!("unknown function '{}'", name.name),
            ),
        }
    }
}

/// Register arguments must name storage, not compute a value.
fn is_register_ref(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Ident(_) | ExprKind::Index(..))
}
