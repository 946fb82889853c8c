//! Statevector execution of elaborated programs with classical feedback.

mod run;
mod state;

pub use run::{bitstring, eval_classical, run_once, run_shots, shot_rng, RegisterStats, RunConfig, RunResult, ShotOutcome};
pub use state::{SimState, MAX_QUBITS};

use thiserror::Error;

use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("program needs {n} qubits; the simulator supports at most {MAX_QUBITS}")]
    TooManyQubits { n: usize },
    #[error("qubit index {qubit} is out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("register index {reg} is out of range for {n} registers")]
    RegisterOutOfRange { reg: usize, n: usize },
    #[error("gate operands must be distinct (qubit {qubit} repeated)")]
    DuplicateTarget { qubit: usize },
    #[error("{gate} applied to the wrong number of operands")]
    Arity { gate: &'static str },
    #[error("division by zero in a classical expression")]
    DivisionByZero { span: Option<SourceSpan> },
    #[error("qwhile exceeded {limit} iterations")]
    QWhileLimitExceeded { limit: u64, span: SourceSpan },
    #[error("shots must be at least 1")]
    NoShots,
}

impl SimError {
    fn at(self, span: SourceSpan) -> SimError {
        match self {
            SimError::DivisionByZero { span: None } => SimError::DivisionByZero { span: Some(span) },
            e => e,
        }
    }

    /// Source location of the failing construct, when known.
    pub fn span(&self) -> Option<SourceSpan> {
        match self {
            SimError::DivisionByZero { span } => *span,
            SimError::QWhileLimitExceeded { span, .. } => Some(*span),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SimError::TooManyQubits { .. } => "TooManyQubits",
            SimError::QubitOutOfRange { .. } | SimError::RegisterOutOfRange { .. } => "IndexOutOfRange",
            SimError::DuplicateTarget { .. } => "DuplicateTarget",
            SimError::Arity { .. } => "Arity",
            SimError::DivisionByZero { .. } => "DivisionByZero",
            SimError::QWhileLimitExceeded { .. } => "QWhileLimitExceeded",
            SimError::NoShots => "NoShots",
        }
    }
}
