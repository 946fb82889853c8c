//! Canonical line-oriented IR text.
//!
//! ```text
//! H q0
//! CNOT q0, q1
//! RX(1.5707963267948966) q2
//! MEASURE q0 -> r0
//! r1 = r1 + 1
//! QIF r0
//!   H q0
//! QELSE
//!   NOT q0
//! END
//! QWHILE r0
//!   ...
//! END
//! ```

use super::ir::{CExpr, Node, QProgIR};

pub fn ir_to_text(ir: &QProgIR) -> String {
    let mut lines = Vec::new();
    write_nodes(ir, 0, &mut lines);
    lines.join("\n")
}

fn write_nodes(ir: &QProgIR, depth: usize, out: &mut Vec<String>) {
    let pad = "  ".repeat(depth);
    for node in &ir.nodes {
        match node {
            Node::Gate(g) => {
                let qubits: Vec<_> = g.qubits.iter().map(|q| format!("q{q}")).collect();
                let params = if g.params.is_empty() {
                    String::new()
                } else {
                    let ps: Vec<_> = g.params.iter().map(|p| format!("{p:?}")).collect();
                    format!("({})", ps.join(", "))
                };
                out.push(format!("{pad}{}{params} {}", g.kind.name(), qubits.join(", ")));
            }
            Node::Measure { qubit, reg } => out.push(format!("{pad}MEASURE q{qubit} -> r{reg}")),
            Node::Classical { reg, rhs, .. } => out.push(format!("{pad}r{reg} = {}", cexpr_text(rhs))),
            Node::QIf {
                cond,
                then,
                otherwise,
                ..
            } => {
                out.push(format!("{pad}QIF {}", cexpr_text(cond)));
                write_nodes(then, depth + 1, out);
                if !otherwise.is_empty() {
                    out.push(format!("{pad}QELSE"));
                    write_nodes(otherwise, depth + 1, out);
                }
                out.push(format!("{pad}END"));
            }
            Node::QWhile { cond, body, .. } => {
                out.push(format!("{pad}QWHILE {}", cexpr_text(cond)));
                write_nodes(body, depth + 1, out);
                out.push(format!("{pad}END"));
            }
        }
    }
}

pub fn cexpr_text(e: &CExpr) -> String {
    match e {
        CExpr::Reg(r) => format!("r{r}"),
        CExpr::Const(c) => c.to_string(),
        CExpr::Unary(op, inner) => format!("{}{}", op.as_str(), operand(inner)),
        CExpr::Binary(op, l, r) => format!("{} {} {}", operand(l), op.as_str(), operand(r)),
    }
}

fn operand(e: &CExpr) -> String {
    match e {
        CExpr::Binary(..) => format!("({})", cexpr_text(e)),
        CExpr::Const(c) if *c < 0 => format!("({c})"),
        _ => cexpr_text(e),
    }
}
