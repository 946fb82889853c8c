//! Compile-time elaboration of a checked program into a flat quantum IR.
//!
//! Assist-classical code runs here: loops unroll, constants fold, calls
//! inline. `qif`/`qwhile` stay as nodes with register conditions.

mod elaborate;
mod ir;
mod text;
pub mod value;

pub use elaborate::{elaborate, eval_assist, Binding, BindingEnv, ElabLimits};
pub use ir::{CExpr, Elaboration, Gate, GateKind, Node, QProgIR};
pub use text::{cexpr_text, ir_to_text};
pub use value::Value;
