use std::collections::HashMap;

use indexmap::IndexMap;

use super::ir::{CExpr, Elaboration, Gate, GateKind, Node, QProgIR};
use super::value::{self, Value};
use crate::diagnostics::{Code, Diagnostic};
use crate::frontend::*;
use crate::semantics::{builtins, BuiltinKind, TypedAst};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ElabLimits {
    /// Maximum number of statements executed while elaborating.
    pub max_unroll: usize,
}

impl Default for ElabLimits {
    fn default() -> Self {
        ElabLimits {
            max_unroll: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Qubit(usize),
    QVec(Vec<usize>),
    CBit(usize),
    CVec(Vec<usize>),
    Assist(Value),
}

impl Binding {
    fn is_assist(&self) -> bool {
        matches!(self, Binding::Assist(_))
    }
}

#[derive(Debug, Clone, Default)]
struct Frame {
    vars: HashMap<String, Binding>,
    barrier: bool,
}

/// Name bindings during elaboration, with the same barrier rule as the
/// checker: assist names outside a qif/qwhile body are not found from inside.
#[derive(Debug, Clone, Default)]
pub struct BindingEnv {
    frames: Vec<Frame>,
}

impl BindingEnv {
    pub fn new() -> BindingEnv {
        BindingEnv {
            frames: vec![Frame::default()],
        }
    }

    pub fn bind(&mut self, name: impl Into<String>, binding: Binding) {
        self.frames
            .last_mut()
            .expect("at least one frame")
            .vars
            .insert(name.into(), binding);
    }

    pub fn get(&self, name: &str) -> Option<&Binding> {
        let mut crossed = false;
        for frame in self.frames.iter().rev() {
            if let Some(b) = frame.vars.get(name) {
                if !(crossed && b.is_assist()) {
                    return Some(b);
                }
            }
            crossed |= frame.barrier;
        }
        None
    }

    fn get_mut(&mut self, name: &str) -> Option<&mut Binding> {
        let mut crossed = false;
        for frame in self.frames.iter_mut().rev() {
            match frame.vars.get_mut(name) {
                Some(b) if !(crossed && b.is_assist()) => return Some(b),
                _ => {}
            }
            crossed |= frame.barrier;
        }
        None
    }

    fn push(&mut self, barrier: bool) {
        self.frames.push(Frame {
            vars: HashMap::new(),
            barrier,
        });
    }

    fn pop(&mut self) {
        self.frames.pop();
    }
}

/// Result of evaluating an expression at elaboration time.
#[derive(Debug, Clone, PartialEq)]
enum EVal {
    Assist(Value),
    Qubit(usize),
    QVec(Vec<usize>),
    CBit(usize),
    CVec(Vec<usize>),
    Classical(CExpr),
}

impl EVal {
    fn from_binding(b: &Binding) -> EVal {
        match b {
            Binding::Qubit(q) => EVal::Qubit(*q),
            Binding::QVec(v) => EVal::QVec(v.clone()),
            Binding::CBit(r) => EVal::CBit(*r),
            Binding::CVec(v) => EVal::CVec(v.clone()),
            Binding::Assist(v) => EVal::Assist(*v),
        }
    }
}

type Result<T> = std::result::Result<T, Diagnostic>;

fn internal(span: SourceSpan, what: &str) -> Diagnostic {
    Diagnostic::new(Code::E247, span, format!("internal: {what} (was the program checked?)"))
}

/// Evaluates an assist-classical expression.
pub fn eval_assist(expr: &Expr, env: &BindingEnv) -> Result<Value> {
    match eval(expr, env)? {
        EVal::Assist(v) => Ok(v),
        _ => Err(internal(expr.span, "expected an assist-classical value")),
    }
}

fn eval(expr: &Expr, env: &BindingEnv) -> Result<EVal> {
    Ok(match &expr.kind {
        ExprKind::Int(i) => EVal::Assist(Value::Int(*i)),
        ExprKind::Float(f) => EVal::Assist(Value::Float(*f)),
        ExprKind::Bool(b) => EVal::Assist(Value::Bool(*b)),
        ExprKind::Ident(name) => EVal::from_binding(
            env.get(name)
                .ok_or_else(|| internal(expr.span, &format!("unbound name '{name}'")))?,
        ),
        ExprKind::Index(base, index) => {
            let b = eval(base, env)?;
            let i = index_value(index, env)?;
            match b {
                EVal::QVec(v) => EVal::Qubit(pick(&v, i, expr.span)?),
                EVal::CVec(v) => EVal::CBit(pick(&v, i, expr.span)?),
                _ => return Err(internal(base.span, "indexing a non-vector")),
            }
        }
        ExprKind::Slice(base, lo, hi) => {
            let b = eval(base, env)?;
            let lo = index_value(lo, env)?;
            let hi = index_value(hi, env)?;
            let cut = |v: &[usize]| -> Result<Vec<usize>> {
                if lo < 0 || hi < lo || hi as usize > v.len() {
                    return Err(Diagnostic::new(
                        Code::E244,
                        expr.span,
                        format!("slice [{lo}:{hi}] is out of range for a vector of size {}", v.len()),
                    ));
                }
                Ok(v[lo as usize..hi as usize].to_vec())
            };
            match b {
                EVal::QVec(v) => EVal::QVec(cut(&v)?),
                EVal::CVec(v) => EVal::CVec(cut(&v)?),
                _ => return Err(internal(base.span, "slicing a non-vector")),
            }
        }
        ExprKind::Len(arg) => match eval(arg, env)? {
            EVal::QVec(v) | EVal::CVec(v) => EVal::Assist(Value::Int(v.len() as i64)),
            _ => return Err(internal(arg.span, "len of a non-vector")),
        },
        ExprKind::Call(..) => return Err(internal(expr.span, "call used as a value")),
        ExprKind::Unary(op, operand) => match eval(operand, env)? {
            EVal::Assist(v) => EVal::Assist(value::unary(*op, v)),
            other => EVal::Classical(CExpr::Unary(*op, Box::new(to_cexpr(other, operand.span)?))),
        },
        ExprKind::Binary(op, l, r) => {
            let lv = eval(l, env)?;
            if let (EVal::Assist(a), BinOp::And | BinOp::Or) = (&lv, op) {
                if a.truthy() == (*op == BinOp::Or) {
                    return Ok(EVal::Assist(Value::Bool(a.truthy())));
                }
            }
            let rv = eval(r, env)?;
            match (lv, rv) {
                (EVal::Assist(a), EVal::Assist(b)) => EVal::Assist(
                    value::binary(*op, a, b).map_err(|_| division_by_zero(expr.span))?,
                ),
                (lv, rv) => EVal::Classical(CExpr::binary(
                    *op,
                    to_cexpr(lv, l.span)?,
                    to_cexpr(rv, r.span)?,
                )),
            }
        }
    })
}

fn division_by_zero(span: SourceSpan) -> Diagnostic {
    Diagnostic::new(Code::E246, span, "division by zero")
}

fn index_value(index: &Expr, env: &BindingEnv) -> Result<i64> {
    eval_assist(index, env)?.as_int().ok_or_else(|| {
        Diagnostic::new(Code::E244, index.span, "index must be an integer")
    })
}

fn pick(v: &[usize], i: i64, span: SourceSpan) -> Result<usize> {
    usize::try_from(i)
        .ok()
        .and_then(|i| v.get(i).copied())
        .ok_or_else(|| {
            Diagnostic::new(
                Code::E244,
                span,
                format!("index {i} is out of range for a vector of size {}", v.len()),
            )
        })
}

fn to_cexpr(v: EVal, span: SourceSpan) -> Result<CExpr> {
    match v {
        EVal::Classical(e) => Ok(e),
        EVal::CBit(r) => Ok(CExpr::Reg(r)),
        EVal::Assist(v) => v
            .as_int()
            .map(CExpr::Const)
            .ok_or_else(|| Diagnostic::new(Code::E102, span, "classical expressions are integer-valued")),
        _ => Err(internal(span, "non-classical operand in a classical expression")),
    }
}

/// Elaborates `entry` with concrete arguments into IR.
///
/// `args` maps each parameter to its size (qvec/cvec; 1 for qubit/cbit) or
/// its value (int/double/bool).
pub fn elaborate(
    program: &TypedAst,
    entry: &str,
    args: &IndexMap<String, Value>,
    limits: &ElabLimits,
) -> Result<Elaboration> {
    let def = program
        .ast
        .function(entry)
        .ok_or_else(|| Diagnostic::new(Code::E247, SourceSpan::default(), format!("entry function '{entry}' is not defined")))?;
    let mut el = Elaborator {
        program,
        limits: *limits,
        steps: 0,
        stack: Vec::new(),
        consts: Frame::default(),
    };
    let mut const_env = BindingEnv::new();
    for item in &program.ast.items {
        if let TopItem::ConstLet(binding) = item {
            let v = eval_assist(&binding.init, &const_env)?;
            const_env.bind(binding.name.name.clone(), Binding::Assist(v));
        }
    }
    el.consts = const_env.frames.pop().unwrap_or_default();

    for key in args.keys() {
        if !def.sig.params.iter().any(|p| &p.name.name == key) {
            return Err(Diagnostic::new(
                Code::E247,
                def.sig.span,
                format!("'{entry}' has no parameter named '{key}'"),
            ));
        }
    }
    let mut qubits = Vec::new();
    let mut registers = Vec::new();
    let mut params = Frame::default();
    for p in &def.sig.params {
        let name = &p.name.name;
        let arg = *args.get(name).ok_or_else(|| {
            Diagnostic::new(Code::E247, p.span, format!("missing argument for parameter '{name}'"))
        })?;
        let bad = |want: &str| {
            Diagnostic::new(
                Code::E247,
                p.span,
                format!("argument for '{name}' ({}) must be {want}, found {arg}", p.ty),
            )
        };
        let size = || match arg {
            Value::Int(n) if n >= 0 => Ok(n as usize),
            _ => Err(bad("a non-negative size")),
        };
        let binding = match &p.ty {
            DeclType::Qubit | DeclType::CBit if arg != Value::Int(1) => return Err(bad("1")),
            DeclType::Qubit => {
                qubits.push(name.clone());
                Binding::Qubit(qubits.len() - 1)
            }
            DeclType::CBit => {
                registers.push(name.clone());
                Binding::CBit(registers.len() - 1)
            }
            DeclType::QVec => {
                let n = size()?;
                let start = qubits.len();
                qubits.extend((0..n).map(|i| format!("{name}[{i}]")));
                Binding::QVec((start..start + n).collect())
            }
            DeclType::CVec => {
                let n = size()?;
                let start = registers.len();
                registers.extend((0..n).map(|i| format!("{name}[{i}]")));
                Binding::CVec((start..start + n).collect())
            }
            DeclType::Int => Binding::Assist(Value::Int(arg.as_int().ok_or_else(|| bad("an integer"))?)),
            DeclType::Double => Binding::Assist(Value::Float(arg.as_f64())),
            DeclType::Bool => match arg {
                Value::Bool(_) => Binding::Assist(arg),
                _ => return Err(bad("a boolean")),
            },
            DeclType::HostOpaque(t) => {
                return Err(Diagnostic::new(
                    Code::E243,
                    p.span,
                    format!("parameter '{name}' has host type '{t}', which cannot be bound for IR elaboration"),
                ))
            }
        };
        params.vars.insert(name.clone(), binding);
    }

    let mut nodes = Vec::new();
    el.stack.push(def.sig.name.name.clone());
    el.body(def, params, &mut nodes)?;
    Ok(Elaboration {
        ir: QProgIR::new(nodes),
        qubits,
        registers,
    })
}

struct Elaborator<'a> {
    program: &'a TypedAst,
    limits: ElabLimits,
    steps: usize,
    stack: Vec<String>,
    consts: Frame,
}

impl Elaborator<'_> {
    fn body(&mut self, def: &FnDef, params: Frame, out: &mut Vec<Node>) -> Result<()> {
        let mut env = BindingEnv {
            frames: vec![self.consts.clone(), params],
        };
        self.stmts(&def.body.stmts, &mut env, out)
    }

    fn step(&mut self, span: SourceSpan) -> Result<()> {
        self.steps += 1;
        if self.steps > self.limits.max_unroll {
            return Err(Diagnostic::new(
                Code::E241,
                span,
                format!("elaboration exceeded {} statements", self.limits.max_unroll),
            ));
        }
        Ok(())
    }

    fn block(&mut self, block: &Block, env: &mut BindingEnv, barrier: bool, out: &mut Vec<Node>) -> Result<()> {
        env.push(barrier);
        let r = self.stmts(&block.stmts, env, out);
        env.pop();
        r
    }

    fn stmts(&mut self, stmts: &[Stmt], env: &mut BindingEnv, out: &mut Vec<Node>) -> Result<()> {
        for s in stmts {
            self.stmt(s, env, out)?;
        }
        Ok(())
    }

    fn stmt(&mut self, stmt: &Stmt, env: &mut BindingEnv, out: &mut Vec<Node>) -> Result<()> {
        self.step(stmt.span)?;
        match &stmt.kind {
            StmtKind::Let(b) => {
                let v = eval_assist(&b.init, env)?;
                env.bind(b.name.name.clone(), Binding::Assist(v));
            }
            StmtKind::Decl { ty, name, init } => {
                let binding = match (ty, eval(init, env)?) {
                    (DeclType::Qubit, EVal::Qubit(q)) => Binding::Qubit(q),
                    (DeclType::QVec, EVal::QVec(v)) => Binding::QVec(v),
                    (DeclType::CBit, EVal::CBit(r)) => Binding::CBit(r),
                    (DeclType::CVec, EVal::CVec(v)) => Binding::CVec(v),
                    (DeclType::Int, EVal::Assist(v)) => Binding::Assist(Value::Int(v.to_int())),
                    (DeclType::Double, EVal::Assist(v)) => Binding::Assist(Value::Float(v.as_f64())),
                    (DeclType::Bool, EVal::Assist(v)) => Binding::Assist(Value::Bool(v.truthy())),
                    _ => return Err(internal(stmt.span, "declaration does not match its initializer")),
                };
                env.bind(name.name.clone(), binding);
            }
            StmtKind::HostDecl { .. } | StmtKind::HostBlock(_) => {
                return Err(Diagnostic::new(
                    Code::E243,
                    stmt.span,
                    "host constructs are target-language text and cannot be elaborated to IR",
                ))
            }
            StmtKind::Assign { target, op, value } => self.assign(stmt, target, *op, value, env, out)?,
            StmtKind::Expr(e) => match &e.kind {
                ExprKind::Call(name, args) => self.call(name, args, e.span, env, out)?,
                _ => {
                    eval(e, env)?;
                }
            },
            StmtKind::If {
                cond,
                then_block,
                else_block,
            } => {
                if eval_assist(cond, env)?.truthy() {
                    self.block(then_block, env, false, out)?;
                } else if let Some(b) = else_block {
                    self.block(b, env, false, out)?;
                }
            }
            StmtKind::While { cond, body } => {
                while eval_assist(cond, env)?.truthy() {
                    self.step(stmt.span)?;
                    self.block(body, env, false, out)?;
                }
            }
            StmtKind::For { var, lo, hi, body } => {
                let bound = |e: &Expr, env: &BindingEnv| -> Result<i64> {
                    eval_assist(e, env)?
                        .as_int()
                        .ok_or_else(|| Diagnostic::new(Code::E102, e.span, "loop bounds must be integers"))
                };
                let lo = bound(lo, env)?;
                let hi = bound(hi, env)?;
                for i in lo..hi {
                    self.step(stmt.span)?;
                    env.push(false);
                    env.bind(var.name.clone(), Binding::Assist(Value::Int(i)));
                    let r = self.block(body, env, false, out);
                    env.pop();
                    r?;
                }
            }
            StmtKind::QIf {
                cond,
                then_block,
                else_block,
            } => {
                let cond = to_cexpr(eval(cond, env)?, cond.span)?;
                let mut then = Vec::new();
                self.block(then_block, env, true, &mut then)?;
                let mut otherwise = Vec::new();
                if let Some(b) = else_block {
                    self.block(b, env, true, &mut otherwise)?;
                }
                out.push(Node::QIf {
                    cond,
                    then: QProgIR::new(then),
                    otherwise: QProgIR::new(otherwise),
                    span: stmt.span,
                });
            }
            StmtKind::QWhile { cond, body } => {
                let cond = to_cexpr(eval(cond, env)?, cond.span)?;
                let mut nodes = Vec::new();
                self.block(body, env, true, &mut nodes)?;
                out.push(Node::QWhile {
                    cond,
                    body: QProgIR::new(nodes),
                    span: stmt.span,
                });
            }
            StmtKind::Block(b) => self.block(b, env, false, out)?,
        }
        Ok(())
    }

    fn assign(
        &mut self,
        stmt: &Stmt,
        target: &Expr,
        op: AssignOp,
        value: &Expr,
        env: &mut BindingEnv,
        out: &mut Vec<Node>,
    ) -> Result<()> {
        let rhs = eval(value, env)?;
        match eval(target, env)? {
            EVal::CBit(reg) => {
                let rhs = to_cexpr(rhs, value.span)?;
                let rhs = match op.binary() {
                    Some(bin) => CExpr::binary(bin, CExpr::Reg(reg), rhs),
                    None => rhs,
                };
                out.push(Node::Classical {
                    reg,
                    rhs,
                    span: stmt.span,
                });
            }
            EVal::Assist(old) => {
                let ExprKind::Ident(name) = &target.kind else {
                    return Err(internal(target.span, "assignment target"));
                };
                let EVal::Assist(new) = rhs else {
                    return Err(internal(value.span, "classical value assigned to assist variable"));
                };
                let mut v = match op.binary() {
                    Some(bin) => value::binary(bin, old, new).map_err(|_| division_by_zero(stmt.span))?,
                    None => new,
                };
                let slot = env
                    .get_mut(name)
                    .ok_or_else(|| internal(target.span, "unbound assignment target"))?;
                // keep the declared kind of the variable
                if let Binding::Assist(cur) = slot {
                    v = match cur {
                        Value::Int(_) => Value::Int(v.to_int()),
                        Value::Float(_) => Value::Float(v.as_f64()),
                        Value::Bool(_) if matches!(v, Value::Bool(_)) => v,
                        Value::Bool(_) => Value::Int(v.to_int()),
                    };
                    *cur = v;
                }
            }
            _ => return Err(internal(target.span, "assignment to a quantum binding")),
        }
        Ok(())
    }

    fn call(
        &mut self,
        name: &Ident,
        args: &[Expr],
        span: SourceSpan,
        env: &mut BindingEnv,
        out: &mut Vec<Node>,
    ) -> Result<()> {
        let values = args.iter().map(|a| eval(a, env)).collect::<Result<Vec<_>>>()?;
        if let Some(def) = self.program.ast.function(&name.name) {
            return self.inline(def, name, values, span, out);
        }
        let builtin = builtins::lookup(&name.name)
            .ok_or_else(|| internal(name.span, &format!("unknown function '{}'", name.name)))?;
        match builtin.kind {
            BuiltinKind::Measure => match values.as_slice() {
                [EVal::Qubit(q), EVal::CBit(r)] => out.push(Node::Measure { qubit: *q, reg: *r }),
                _ => return Err(internal(span, "Measure arguments")),
            },
            BuiltinKind::MeasureAll => match values.as_slice() {
                [EVal::QVec(qs), EVal::CVec(rs)] => {
                    if qs.len() != rs.len() {
                        return Err(Diagnostic::new(
                            Code::E240,
                            span,
                            format!(
                                "Qubits and cbits must have same sizes (qvec has {}, cvec has {})",
                                qs.len(),
                                rs.len()
                            ),
                        ));
                    }
                    out.extend(qs.iter().zip(rs).map(|(&qubit, &reg)| Node::Measure { qubit, reg }));
                }
                _ => return Err(internal(span, "MeasureAll arguments")),
            },
            BuiltinKind::Gate => {
                let kind = GateKind::from_name(builtin.name).expect("builtin gate");
                let mut qubits = Vec::new();
                let mut params = Vec::new();
                for (v, a) in values.into_iter().zip(args) {
                    match v {
                        EVal::Qubit(q) => qubits.push(q),
                        EVal::Assist(x) => params.push(x.as_f64()),
                        EVal::CBit(_) | EVal::Classical(_) => {
                            return Err(Diagnostic::new(
                                Code::E248,
                                a.span,
                                format!("{} angle must be known at compile time to elaborate to IR", kind.name()),
                            ))
                        }
                        _ => return Err(internal(a.span, "gate operand")),
                    }
                }
                if qubits.len() == 2 && qubits[0] == qubits[1] {
                    return Err(Diagnostic::new(
                        Code::E245,
                        span,
                        format!("{} operands must be distinct qubits", kind.name()),
                    ));
                }
                out.push(Node::Gate(Gate { kind, qubits, params }));
            }
        }
        Ok(())
    }

    fn inline(&mut self, def: &FnDef, name: &Ident, values: Vec<EVal>, span: SourceSpan, out: &mut Vec<Node>) -> Result<()> {
        if self.stack.contains(&def.sig.name.name) {
            return Err(Diagnostic::new(
                Code::E242,
                span,
                format!("recursive call: {} -> {}", self.stack.join(" -> "), name.name),
            ));
        }
        if values.len() != def.sig.params.len() {
            return Err(internal(span, "argument count"));
        }
        let mut params = Frame::default();
        for (p, v) in def.sig.params.iter().zip(values) {
            let binding = match (&p.ty, v) {
                (DeclType::Qubit, EVal::Qubit(q)) => Binding::Qubit(q),
                (DeclType::QVec, EVal::QVec(v)) => Binding::QVec(v),
                (DeclType::CBit, EVal::CBit(r)) => Binding::CBit(r),
                (DeclType::CVec, EVal::CVec(v)) => Binding::CVec(v),
                (DeclType::Int, EVal::Assist(v)) => Binding::Assist(Value::Int(v.to_int())),
                (DeclType::Double, EVal::Assist(v)) => Binding::Assist(Value::Float(v.as_f64())),
                (DeclType::Bool, EVal::Assist(v)) => Binding::Assist(Value::Bool(v.truthy())),
                (DeclType::HostOpaque(_), _) => {
                    return Err(Diagnostic::new(
                        Code::E243,
                        p.span,
                        "host-typed parameters cannot be elaborated to IR",
                    ))
                }
                _ => return Err(Diagnostic::new(Code::E247, span, format!("bad argument for parameter '{}'", p.name.name))),
            };
            params.vars.insert(p.name.name.clone(), binding);
        }
        self.stack.push(def.sig.name.name.clone());
        let r = self.body(def, params, out);
        self.stack.pop();
        r
    }
}
