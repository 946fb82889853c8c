//! Built-in gates and measurements. Names resolve case-insensitively.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Qubit,
    QVec,
    CBit,
    CVec,
    /// Assist-classical or classical number.
    Numeric,
}

impl ArgKind {
    pub fn name(self) -> &'static str {
        match self {
            ArgKind::Qubit => "qubit",
            ArgKind::QVec => "qvec",
            ArgKind::CBit => "cbit",
            ArgKind::CVec => "cvec",
            ArgKind::Numeric => "double",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    Gate,
    Measure,
    MeasureAll,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Builtin {
    /// Canonical spelling.
    pub name: &'static str,
    pub args: &'static [ArgKind],
    pub kind: BuiltinKind,
}

impl Builtin {
    pub fn signature(&self) -> String {
        let args: Vec<_> = self.args.iter().map(|a| a.name()).collect();
        format!("{}({})", self.name, args.join(", "))
    }

    pub fn description(&self) -> &'static str {
        match self.kind {
            BuiltinKind::Gate => "builtin gate",
            BuiltinKind::Measure | BuiltinKind::MeasureAll => "builtin measurement",
        }
    }
}

use ArgKind::*;

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "H", args: &[Qubit], kind: BuiltinKind::Gate },
    Builtin { name: "X", args: &[Qubit], kind: BuiltinKind::Gate },
    Builtin { name: "Y", args: &[Qubit], kind: BuiltinKind::Gate },
    Builtin { name: "NOT", args: &[Qubit], kind: BuiltinKind::Gate },
    Builtin { name: "CNOT", args: &[Qubit, Qubit], kind: BuiltinKind::Gate },
    Builtin { name: "RX", args: &[Qubit, Numeric], kind: BuiltinKind::Gate },
    Builtin { name: "Measure", args: &[Qubit, CBit], kind: BuiltinKind::Measure },
    Builtin { name: "MeasureAll", args: &[QVec, CVec], kind: BuiltinKind::MeasureAll },
];

pub fn lookup(name: &str) -> Option<&'static Builtin> {
    BUILTINS.iter().find(|b| b.name.eq_ignore_ascii_case(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_insensitive() {
        assert_eq!(lookup("measure").unwrap().name, "Measure");
        assert_eq!(lookup("cnot").unwrap().args.len(), 2);
        assert_eq!(lookup("h").unwrap().signature(), "H(qubit)");
        assert!(lookup("Toffoli").is_none());
    }
}
