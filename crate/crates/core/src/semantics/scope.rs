//! Scope tree with the quantum-control-flow barrier.
//!
//! Lookup walks from a scope to its ancestors. Once the walk leaves a scope
//! opened by a `qif`/`qwhile` body, assist-classical symbols are skipped;
//! quantum and classical symbols stay visible.

use indexmap::IndexSet;

use super::types::{Family, SemType};
use crate::span::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScopeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    Param,
    LetBinding,
    LoopVar,
    TopConst,
    Function,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub name: String,
    /// `None` for functions and for bindings whose initializer failed to type.
    pub sem_type: Option<SemType>,
    pub kind: SymbolKind,
    pub def_span: SourceSpan,
    /// Byte offset from which the symbol can be referenced.
    pub visible_from: usize,
    /// Enclosing function, if any.
    pub owner: Option<String>,
}

impl Symbol {
    pub fn is_assist(&self) -> bool {
        self.sem_type.as_ref().is_some_and(SemType::is_assist)
    }

    pub fn family(&self) -> Option<Family> {
        self.sem_type.as_ref().map(SemType::family)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scope {
    pub parent: Option<ScopeId>,
    pub barrier: bool,
    pub span: SourceSpan,
    pub symbols: Vec<SymbolId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Found(SymbolId),
    /// Only an assist-classical symbol hidden by a qif/qwhile barrier matched.
    Blocked(SymbolId),
    NotFound,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScopeTree {
    scopes: Vec<Scope>,
    symbols: Vec<Symbol>,
}

impl ScopeTree {
    pub fn new(root_span: SourceSpan) -> Self {
        ScopeTree {
            scopes: vec![Scope {
                parent: None,
                barrier: false,
                span: root_span,
                symbols: Vec::new(),
            }],
            symbols: Vec::new(),
        }
    }

    pub fn root(&self) -> ScopeId {
        ScopeId(0)
    }

    pub fn push_scope(&mut self, parent: ScopeId, span: SourceSpan, barrier: bool) -> ScopeId {
        let id = ScopeId(self.scopes.len() as u32);
        self.scopes.push(Scope {
            parent: Some(parent),
            barrier,
            span,
            symbols: Vec::new(),
        });
        id
    }

    pub fn define(&mut self, scope: ScopeId, symbol: Symbol) -> SymbolId {
        let id = SymbolId(self.symbols.len() as u32);
        self.symbols.push(symbol);
        self.scopes[scope.0 as usize].symbols.push(id);
        id
    }

    pub fn scope(&self, id: ScopeId) -> &Scope {
        &self.scopes[id.0 as usize]
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id.0 as usize]
    }

    pub fn symbols(&self) -> impl Iterator<Item = (SymbolId, &Symbol)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (SymbolId(i as u32), s))
    }

    /// Resolves `name` as seen from `scope` at byte offset `at`.
    pub fn lookup(&self, scope: ScopeId, name: &str, at: usize) -> Lookup {
        let mut blocked = None;
        let mut crossed_barrier = false;
        let mut cur = Some(scope);
        while let Some(id) = cur {
            let s = self.scope(id);
            for &sym_id in s.symbols.iter().rev() {
                let sym = self.symbol(sym_id);
                if sym.name != name || sym.visible_from > at {
                    continue;
                }
                if crossed_barrier && sym.is_assist() {
                    blocked.get_or_insert(sym_id);
                    continue;
                }
                return Lookup::Found(sym_id);
            }
            crossed_barrier |= s.barrier;
            cur = s.parent;
        }
        match blocked {
            Some(id) => Lookup::Blocked(id),
            None => Lookup::NotFound,
        }
    }

    /// Every symbol resolvable from `scope` at `at`, in definition order of
    /// their names, innermost first.
    pub fn visible(&self, scope: ScopeId, at: usize) -> Vec<SymbolId> {
        let mut names = IndexSet::new();
        let mut cur = Some(scope);
        while let Some(id) = cur {
            let s = self.scope(id);
            for &sym_id in &s.symbols {
                names.insert(self.symbol(sym_id).name.as_str());
            }
            cur = s.parent;
        }
        names
            .into_iter()
            .filter_map(|n| match self.lookup(scope, n, at) {
                Lookup::Found(id) => Some(id),
                _ => None,
            })
            .collect()
    }

    /// Innermost scope whose span contains `offset`.
    pub fn scope_at(&self, offset: usize) -> ScopeId {
        let mut best = self.root();
        let mut best_len = usize::MAX;
        for (i, s) in self.scopes.iter().enumerate() {
            // Later scopes are nested inside earlier ones when spans tie.
            if s.span.contains(offset) && s.span.len() <= best_len {
                best = ScopeId(i as u32);
                best_len = s.span.len();
            }
        }
        best
    }

    /// True when some scope between `scope` and the root is a barrier.
    pub fn inside_barrier(&self, scope: ScopeId) -> bool {
        let mut cur = Some(scope);
        while let Some(id) = cur {
            let s = self.scope(id);
            if s.barrier {
                return true;
            }
            cur = s.parent;
        }
        false
    }
}
