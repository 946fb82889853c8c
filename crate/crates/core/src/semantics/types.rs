use std::fmt;

use crate::frontend::DeclType;

/// Semantic type of a name or expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SemType {
    Qubit,
    QVec,
    /// A classical register. Measurement writes 0/1 but it holds any integer.
    CBit,
    CVec,
    AssistInt,
    AssistFloat,
    AssistBool,
    HostOpaque(String),
}

/// Where a value lives: device qubits, control-device registers, or the host
/// computer at program-construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Quantum,
    Classical,
    Assist,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Quantum => "quantum",
            Family::Classical => "classical",
            Family::Assist => "assist-classical",
        })
    }
}

impl SemType {
    pub fn family(&self) -> Family {
        match self {
            SemType::Qubit | SemType::QVec => Family::Quantum,
            SemType::CBit | SemType::CVec => Family::Classical,
            SemType::AssistInt
            | SemType::AssistFloat
            | SemType::AssistBool
            | SemType::HostOpaque(_) => Family::Assist,
        }
    }

    pub fn is_assist(&self) -> bool {
        self.family() == Family::Assist
    }

    pub fn is_classical(&self) -> bool {
        self.family() == Family::Classical
    }

    pub fn is_quantum(&self) -> bool {
        self.family() == Family::Quantum
    }

    /// Assist values usable where an integer is required (indices, bounds).
    pub fn is_assist_integral(&self) -> bool {
        matches!(
            self,
            SemType::AssistInt | SemType::AssistBool | SemType::HostOpaque(_)
        )
    }

    pub fn from_decl(ty: &DeclType) -> SemType {
        match ty {
            DeclType::Qubit => SemType::Qubit,
            DeclType::QVec => SemType::QVec,
            DeclType::CBit => SemType::CBit,
            DeclType::CVec => SemType::CVec,
            DeclType::Int => SemType::AssistInt,
            DeclType::Double => SemType::AssistFloat,
            DeclType::Bool => SemType::AssistBool,
            DeclType::HostOpaque(n) => SemType::HostOpaque(n.clone()),
        }
    }

    /// The source-level type name.
    pub fn type_name(&self) -> &str {
        match self {
            SemType::Qubit => "qubit",
            SemType::QVec => "qvec",
            SemType::CBit => "cbit",
            SemType::CVec => "cvec",
            SemType::AssistInt => "int",
            SemType::AssistFloat => "double",
            SemType::AssistBool => "bool",
            SemType::HostOpaque(n) => n,
        }
    }
}

impl fmt::Display for SemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.type_name())
    }
}
