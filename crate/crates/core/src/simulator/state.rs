use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use super::SimError;
use crate::qir::{Gate, GateKind};

/// Largest statevector the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

type Matrix = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Statevector plus classical registers. Qubit 0 is the least significant
/// bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub n_qubits: usize,
    pub amps: Vec<Complex64>,
    pub registers: Vec<i64>,
}

impl SimState {
    /// |0…0⟩ with zeroed registers.
    pub fn new(n_qubits: usize, n_registers: usize) -> Result<SimState, SimError> {
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits { n: n_qubits });
        }
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(SimState {
            n_qubits,
            amps,
            registers: vec![0; n_registers],
        })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<(), SimError> {
        if q >= self.n_qubits {
            return Err(SimError::QubitOutOfRange { qubit: q, n: self.n_qubits });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), SimError> {
        for &q in &gate.qubits {
            self.check_qubit(q)?;
        }
        if gate.qubits.len() != gate.kind.arity() {
            return Err(SimError::Arity { gate: gate.kind.name() });
        }
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let m: Matrix = match gate.kind {
            GateKind::H => [[h, h], [h, -h]],
            GateKind::X | GateKind::Not => [[ZERO, ONE], [ONE, ZERO]],
            GateKind::Y => [[ZERO, -I], [I, ZERO]],
            GateKind::Rx => {
                let theta = *gate.params.first().ok_or(SimError::Arity { gate: "RX" })?;
                let c = Complex64::new((theta / 2.0).cos(), 0.0);
                let s = Complex64::new(0.0, -(theta / 2.0).sin());
                [[c, s], [s, c]]
            }
            GateKind::Cnot => {
                let (c, t) = (gate.qubits[0], gate.qubits[1]);
                if c == t {
                    return Err(SimError::DuplicateTarget { qubit: c });
                }
                self.cnot(c, t);
                return Ok(());
            }
        };
        self.apply_1q(gate.qubits[0], &m);
        Ok(())
    }

    fn apply_1q(&mut self, q: usize, m: &Matrix) {
        let bit = 1 << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a, b) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = m[0][0] * a + m[0][1] * b;
                self.amps[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (c, t) = (1 << control, 1 << target);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Probabilities of reading 0 and 1 on qubit `q`.
    pub fn probabilities(&self, q: usize) -> Result<(f64, f64), SimError> {
        self.check_qubit(q)?;
        let bit = 1 << q;
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if i & bit == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok((p0, p1))
    }

    /// Samples qubit `q`, collapses the state and stores the outcome in
    /// register `r`.
    pub fn measure_qubit(&mut self, q: usize, r: usize, rng: &mut impl Rng) -> Result<u8, SimError> {
        if r >= self.registers.len() {
            return Err(SimError::RegisterOutOfRange { reg: r, n: self.registers.len() });
        }
        let (p0, p1) = self.probabilities(q)?;
        let total = p0 + p1;
        let u: f64 = rng.random::<f64>() * total;
        let outcome = u8::from(u < p1);
        let keep = if outcome == 1 { p1 } else { p0 };
        let scale = 1.0 / keep.sqrt();
        let bit = 1 << q;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = ZERO;
            }
        }
        self.registers[r] = outcome as i64;
        Ok(outcome)
    }
}
