use indexmap::IndexMap;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

use super::state::SimState;
use super::SimError;
use crate::qir::value::int_binary;
use crate::qir::value::int_unary;
use crate::qir::{CExpr, Elaboration, Node, QProgIR};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub shots: u64,
    pub seed: u64,
    pub max_qwhile_iters: u64,
}

impl RunConfig {
    pub const DEFAULT_MAX_QWHILE_ITERS: u64 = 100_000;

    pub fn new(shots: u64, seed: u64) -> RunConfig {
        RunConfig {
            shots,
            seed,
            max_qwhile_iters: Self::DEFAULT_MAX_QWHILE_ITERS,
        }
    }
}

/// Evaluates a register expression with C integer semantics.
pub fn eval_classical(expr: &CExpr, registers: &[i64]) -> Result<i64, SimError> {
    Ok(match expr {
        CExpr::Reg(r) => *registers
            .get(*r)
            .ok_or(SimError::RegisterOutOfRange { reg: *r, n: registers.len() })?,
        CExpr::Const(c) => *c,
        CExpr::Unary(op, e) => int_unary(*op, eval_classical(e, registers)?),
        CExpr::Binary(op, l, r) => {
            let a = eval_classical(l, registers)?;
            if op.is_logical() && (a != 0) == (*op == crate::frontend::BinOp::Or) {
                return Ok((a != 0) as i64);
            }
            let b = eval_classical(r, registers)?;
            int_binary(*op, a, b).map_err(|_| SimError::DivisionByZero { span: None })?
        }
    })
}

/// Runs `ir` once on `state`, mutating it in place.
pub fn run_once(ir: &QProgIR, config: &RunConfig, state: &mut SimState, rng: &mut ChaCha8Rng) -> Result<(), SimError> {
    for node in &ir.nodes {
        match node {
            Node::Gate(g) => state.apply_gate(g)?,
            Node::Measure { qubit, reg } => {
                state.measure_qubit(*qubit, *reg, rng)?;
            }
            Node::Classical { reg, rhs, span } => {
                let v = eval_classical(rhs, &state.registers).map_err(|e| e.at(*span))?;
                let n = state.registers.len();
                *state
                    .registers
                    .get_mut(*reg)
                    .ok_or(SimError::RegisterOutOfRange { reg: *reg, n })? = v;
            }
            Node::QIf {
                cond,
                then,
                otherwise,
                span,
            } => {
                if eval_classical(cond, &state.registers).map_err(|e| e.at(*span))? != 0 {
                    run_once(then, config, state, rng)?;
                } else {
                    run_once(otherwise, config, state, rng)?;
                }
            }
            Node::QWhile { cond, body, span } => {
                let mut iters = 0u64;
                while eval_classical(cond, &state.registers).map_err(|e| e.at(*span))? != 0 {
                    iters += 1;
                    if iters > config.max_qwhile_iters {
                        return Err(SimError::QWhileLimitExceeded {
                            limit: config.max_qwhile_iters,
                            span: *span,
                        });
                    }
                    run_once(body, config, state, rng)?;
                }
            }
        }
    }
    Ok(())
}

/// The random stream used for shot `k`.
pub fn shot_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotOutcome {
    /// One character per register, most significant (last declared) first.
    pub bitstring: String,
    pub registers: Vec<i64>,
}

pub fn bitstring(registers: &[i64]) -> String {
    registers
        .iter()
        .rev()
        .map(|&r| if r != 0 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegisterStats {
    pub mean: f64,
    pub min: i64,
    pub max: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub histogram: BTreeMap<String, u64>,
    pub registers: IndexMap<String, RegisterStats>,
    pub shots: u64,
    pub seed: u64,
}

/// Executes `config.shots` independent shots, in parallel. The result is the
/// same as running them in order.
pub fn run_shots(program: &Elaboration, config: &RunConfig) -> Result<RunResult, SimError> {
    if config.shots == 0 {
        return Err(SimError::NoShots);
    }
    let n_qubits = program.qubits.len().max(program.ir.qubit_span());
    let n_regs = program.registers.len().max(program.ir.register_span());
    let fresh = SimState::new(n_qubits, n_regs)?;
    let outcomes: Vec<Result<ShotOutcome, SimError>> = (0..config.shots)
        .into_par_iter()
        .map(|k| {
            let mut state = fresh.clone();
            let mut rng = shot_rng(config.seed, k);
            run_once(&program.ir, config, &mut state, &mut rng)?;
            Ok(ShotOutcome {
                bitstring: bitstring(&state.registers[..program.registers.len()]),
                registers: state.registers,
            })
        })
        .collect();

    let mut histogram = BTreeMap::new();
    let names = &program.registers;
    let mut sums = vec![0f64; names.len()];
    let mut mins = vec![i64::MAX; names.len()];
    let mut maxs = vec![i64::MIN; names.len()];
    for outcome in outcomes {
        let outcome = outcome?;
        for (i, &v) in outcome.registers.iter().take(names.len()).enumerate() {
            sums[i] += v as f64;
            mins[i] = mins[i].min(v);
            maxs[i] = maxs[i].max(v);
        }
        *histogram.entry(outcome.bitstring).or_insert(0) += 1;
    }
    let registers = names
        .iter()
        .enumerate()
        .map(|(i, name)| {
            (
                name.clone(),
                RegisterStats {
                    mean: sums[i] / config.shots as f64,
                    min: mins[i],
                    max: maxs[i],
                },
            )
        })
        .collect();
    Ok(RunResult {
        histogram,
        registers,
        shots: config.shots,
        seed: config.seed,
    })
}
