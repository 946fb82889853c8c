//! Syntax tree. Every node carries the span of the tokens it was parsed from.

use std::fmt;

use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ast {
    pub settings: Vec<Setting>,
    pub items: Vec<TopItem>,
    pub script: Option<Script>,
    /// Number of expression ids handed out; ids are dense in `0..expr_count`.
    pub expr_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Setting {
    pub name: String,
    pub value: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Script {
    /// Everything after `@script:`, byte for byte.
    pub text: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TopItem {
    ConstLet(LetBinding),
    FnDecl(FnSig),
    FnDef(FnDef),
}

impl TopItem {
    pub fn span(&self) -> SourceSpan {
        match self {
            TopItem::ConstLet(l) => l.span,
            TopItem::FnDecl(s) => s.span,
            TopItem::FnDef(d) => d.span,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LetBinding {
    pub name: Ident,
    pub init: Expr,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DeclType {
    Qubit,
    QVec,
    CBit,
    CVec,
    Int,
    Double,
    Bool,
    HostOpaque(String),
}

impl DeclType {
    pub fn from_name(name: &str) -> DeclType {
        match name {
            "qubit" => DeclType::Qubit,
            "qvec" => DeclType::QVec,
            "cbit" => DeclType::CBit,
            "cvec" => DeclType::CVec,
            "int" => DeclType::Int,
            "double" => DeclType::Double,
            "bool" => DeclType::Bool,
            other => DeclType::HostOpaque(other.to_owned()),
        }
    }

    pub fn is_builtin_name(name: &str) -> bool {
        !matches!(DeclType::from_name(name), DeclType::HostOpaque(_))
    }

    pub fn name(&self) -> &str {
        match self {
            DeclType::Qubit => "qubit",
            DeclType::QVec => "qvec",
            DeclType::CBit => "cbit",
            DeclType::CVec => "cvec",
            DeclType::Int => "int",
            DeclType::Double => "double",
            DeclType::Bool => "bool",
            DeclType::HostOpaque(n) => n,
        }
    }
}

impl fmt::Display for DeclType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Ident,
    pub ty: DeclType,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnSig {
    pub name: Ident,
    pub params: Vec<Param>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FnDef {
    pub sig: FnSig,
    pub body: Block,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Set,
    Add,
    Sub,
    Mul,
}

impl AssignOp {
    pub fn as_str(self) -> &'static str {
        match self {
            AssignOp::Set => "=",
            AssignOp::Add => "+=",
            AssignOp::Sub => "-=",
            AssignOp::Mul => "*=",
        }
    }

    /// The arithmetic a compound assignment applies, if any.
    pub fn binary(self) -> Option<BinOp> {
        match self {
            AssignOp::Set => None,
            AssignOp::Add => Some(BinOp::Add),
            AssignOp::Sub => Some(BinOp::Sub),
            AssignOp::Mul => Some(BinOp::Mul),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Let(LetBinding),
    /// `qubit a = q;`, `qvec s = qs[0:3];`, `int n = 2;` and friends.
    Decl {
        ty: DeclType,
        name: Ident,
        init: Expr,
    },
    HostDecl {
        type_name: Ident,
        name: Ident,
        init: Expr,
    },
    /// Contents of `host { ... }` without the outer braces.
    HostBlock(String),
    Assign {
        target: Expr,
        op: AssignOp,
        value: Expr,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    While {
        cond: Expr,
        body: Block,
    },
    For {
        var: Ident,
        lo: Expr,
        hi: Expr,
        body: Block,
    },
    QIf {
        cond: Expr,
        then_block: Block,
        else_block: Option<Block>,
    },
    QWhile {
        cond: Expr,
        body: Block,
    },
    /// A brace-delimited nested block.
    Block(Block),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(pub u32);

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: ExprId,
    pub kind: ExprKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Int(i64),
    Float(f64),
    Bool(bool),
    Index(Box<Expr>, Box<Expr>),
    Slice(Box<Expr>, Box<Expr>, Box<Expr>),
    Call(Ident, Vec<Expr>),
    Len(Box<Expr>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

impl UnOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnOp::Neg => "-",
            UnOp::Not => "!",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn from_symbol(op: &str) -> Option<BinOp> {
        Some(match op {
            "+" => BinOp::Add,
            "-" => BinOp::Sub,
            "*" => BinOp::Mul,
            "/" => BinOp::Div,
            "%" => BinOp::Rem,
            "==" => BinOp::Eq,
            "!=" => BinOp::Ne,
            "<" => BinOp::Lt,
            "<=" => BinOp::Le,
            ">" => BinOp::Gt,
            ">=" => BinOp::Ge,
            "&&" => BinOp::And,
            "||" => BinOp::Or,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Rem => "%",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// C binding power; higher binds tighter. All binary operators are left-associative.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne => 3,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul | BinOp::Div | BinOp::Rem => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

impl Ast {
    pub fn functions(&self) -> impl Iterator<Item = &FnDef> {
        self.items.iter().filter_map(|i| match i {
            TopItem::FnDef(d) => Some(d),
            _ => None,
        })
    }

    pub fn function(&self, name: &str) -> Option<&FnDef> {
        self.functions().find(|f| f.sig.name.name == name)
    }

    pub fn setting(&self, name: &str) -> Option<&str> {
        self.settings
            .iter()
            .rev()
            .find(|s| s.name.eq_ignore_ascii_case(name))
            .map(|s| s.value.as_str())
    }
}
