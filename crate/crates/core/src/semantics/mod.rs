//! Scopes, symbol tables, and the QRunes typing rules.

mod analyze;
pub mod builtins;
pub mod scope;
mod types;

pub use analyze::{analyze, FnInfo, Reference, TypedAst};
pub use builtins::{Builtin, BuiltinKind, BUILTINS};
pub use scope::{Lookup, Scope, ScopeId, ScopeTree, Symbol, SymbolId, SymbolKind};
pub use types::{Family, SemType};
