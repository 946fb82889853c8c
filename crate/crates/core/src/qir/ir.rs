use crate::frontend::{BinOp, UnOp};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    Y,
    Not,
    Cnot,
    Rx,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Y => "Y",
            GateKind::Not => "NOT",
            GateKind::Cnot => "CNOT",
            GateKind::Rx => "RX",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        Some(match name.to_ascii_uppercase().as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "Y" => GateKind::Y,
            "NOT" => GateKind::Not,
            "CNOT" => GateKind::Cnot,
            "RX" => GateKind::Rx,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot => 2,
            _ => 1,
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx => 1,
            _ => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>) -> Gate {
        Gate {
            kind,
            qubits,
            params: Vec::new(),
        }
    }

    pub fn rx(qubit: usize, theta: f64) -> Gate {
        Gate {
            kind: GateKind::Rx,
            qubits: vec![qubit],
            params: vec![theta],
        }
    }
}

/// Run-time expression over classical registers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CExpr {
    Reg(usize),
    Const(i64),
    Unary(UnOp, Box<CExpr>),
    Binary(BinOp, Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    pub fn binary(op: BinOp, l: CExpr, r: CExpr) -> CExpr {
        CExpr::Binary(op, Box::new(l), Box::new(r))
    }

    pub fn registers(&self, out: &mut Vec<usize>) {
        match self {
            CExpr::Reg(r) => out.push(*r),
            CExpr::Const(_) => {}
            CExpr::Unary(_, e) => e.registers(out),
            CExpr::Binary(_, l, r) => {
                l.registers(out);
                r.registers(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Gate(Gate),
    Measure {
        qubit: usize,
        reg: usize,
    },
    Classical {
        reg: usize,
        rhs: CExpr,
        span: SourceSpan,
    },
    QIf {
        cond: CExpr,
        then: QProgIR,
        otherwise: QProgIR,
        span: SourceSpan,
    },
    QWhile {
        cond: CExpr,
        body: QProgIR,
        span: SourceSpan,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QProgIR {
    pub nodes: Vec<Node>,
}

impl QProgIR {
    pub fn new(nodes: Vec<Node>) -> QProgIR {
        QProgIR { nodes }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Visits every node, depth first, including both branches of each qif.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Node)) {
        for node in &self.nodes {
            f(node);
            match node {
                Node::QIf { then, otherwise, .. } => {
                    then.walk(f);
                    otherwise.walk(f);
                }
                Node::QWhile { body, .. } => body.walk(f),
                _ => {}
            }
        }
    }

    pub fn gate_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |node| {
            if matches!(node, Node::Gate(_)) {
                n += 1;
            }
        });
        n
    }

    /// Highest qubit index used plus one.
    pub fn qubit_span(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |node| match node {
            Node::Gate(g) => n = g.qubits.iter().fold(n, |m, &q| m.max(q + 1)),
            Node::Measure { qubit, .. } => n = n.max(qubit + 1),
            _ => {}
        });
        n
    }

    /// Highest register index used plus one.
    pub fn register_span(&self) -> usize {
        let mut regs = Vec::new();
        self.walk(&mut |node| match node {
            Node::Measure { reg, .. } => regs.push(*reg),
            Node::Classical { reg, rhs, .. } => {
                regs.push(*reg);
                rhs.registers(&mut regs);
            }
            Node::QIf { cond, .. } | Node::QWhile { cond, .. } => cond.registers(&mut regs),
            Node::Gate(_) => {}
        });
        regs.into_iter().max().map_or(0, |m| m + 1)
    }
}

/// An elaborated entry point: the IR plus names for its qubits and registers.
#[derive(Debug, Clone, PartialEq)]
pub struct Elaboration {
    pub ir: QProgIR,
    pub qubits: Vec<String>,
    pub registers: Vec<String>,
}
