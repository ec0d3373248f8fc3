//! Dense statevector simulation.

use num_complex::Complex64;

use crate::circuit::{Circuit, GateInstance, Violation};
use crate::gates::{gate_matrix, DefinitionError};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("{requested} qubits exceeds the simulator limit of {cap}")]
    QubitCap { requested: usize, cap: usize },
    #[error("register must have at least one qubit")]
    EmptyRegister,
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit state")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("invalid circuit: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    InvalidCircuit(Vec<Violation>),
    #[error(transparent)]
    Definition(#[from] DefinitionError),
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("expected {expected} amplitudes, got {found}")]
    BadLength { expected: usize, found: usize },
    #[error("amplitudes must be finite")]
    NonFinite,
    #[error("state has zero norm")]
    ZeroNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|0…0⟩` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        Self::zero_with_cap(n_qubits, MAX_QUBITS)
    }

    pub fn zero_with_cap(n_qubits: usize, cap: usize) -> Result<Self, SimError> {
        let cap = cap.min(MAX_QUBITS);
        if n_qubits == 0 {
            return Err(SimError::EmptyRegister);
        }
        if n_qubits > cap {
            return Err(SimError::QubitCap {
                requested: n_qubits,
                cap,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n_qubits, amps })
    }

    /// Wraps raw amplitudes without renormalizing.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        if n_qubits == 0 {
            return Err(SimError::EmptyRegister);
        }
        if n_qubits > MAX_QUBITS {
            return Err(SimError::QubitCap {
                requested: n_qubits,
                cap: MAX_QUBITS,
            });
        }
        if amps.len() != 1 << n_qubits {
            return Err(SimError::BadLength {
                expected: 1 << n_qubits,
                found: amps.len(),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(SimError::NonFinite);
        }
        Ok(StateVector { n_qubits, amps })
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but scales to unit norm.
    pub fn normalized(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self, SimError> {
        let mut state = Self::from_amplitudes(n_qubits, amps)?;
        let norm = state.norm();
        if norm == 0.0 {
            return Err(SimError::ZeroNorm);
        }
        state.amps.iter_mut().for_each(|a| *a /= norm);
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amps[index].norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        StateVector {
            n_qubits: self.n_qubits,
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Applies `gate` in place by strided iteration over the amplitude array.
    pub fn apply(&mut self, gate: &GateInstance) -> Result<(), SimError> {
        let n = self.n_qubits;
        if let Some(&qubit) = gate.qubits.iter().find(|&&q| q >= n) {
            return Err(SimError::QubitOutOfRange { qubit, n_qubits: n });
        }
        let probe = Circuit::with_gates(n, vec![gate.clone()]);
        let violations = probe.validate();
        if !violations.is_empty() {
            return Err(SimError::InvalidCircuit(violations));
        }
        let matrix = gate_matrix(gate.kind, &gate.params)?;
        let k = gate.qubits.len();
        let dim = 1usize << k;

        // offsets[l] is the global index displacement of local basis state l;
        // operand 0 is the most significant local bit.
        let masks: Vec<usize> = gate.qubits.iter().map(|&q| 1usize << (n - 1 - q)).collect();
        let operand_mask: usize = masks.iter().sum();
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| l >> (k - 1 - j) & 1 == 1)
                    .map(|(_, m)| m)
                    .sum()
            })
            .collect();

        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & operand_mask != 0 {
                continue;
            }
            for (slot, off) in local.iter_mut().zip(&offsets) {
                *slot = self.amps[base | off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, v) in local.iter().enumerate() {
                    acc += matrix[(r, col)] * v;
                }
                self.amps[base | off] = acc;
            }
        }
        Ok(())
    }
}

/// Returns `gate` applied to `state`, leaving the input untouched.
pub fn apply_gate(state: &StateVector, gate: &GateInstance) -> Result<StateVector, SimError> {
    let mut next = state.clone();
    next.apply(gate)?;
    Ok(next)
}

/// Simulates `circuit` from `|0…0⟩`.
pub fn run(circuit: &Circuit) -> Result<StateVector, SimError> {
    run_with_cap(circuit, MAX_QUBITS)
}

pub fn run_with_cap(circuit: &Circuit, cap: usize) -> Result<StateVector, SimError> {
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(SimError::InvalidCircuit(violations));
    }
    let mut state = StateVector::zero_with_cap(circuit.n_qubits, cap)?;
    for gate in &circuit.gates {
        state.apply(gate)?;
    }
    Ok(state)
}

/// `⟨a|b⟩ = Σ conj(a_i)·b_i`.
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64, SimError> {
    if a.n_qubits != b.n_qubits {
        return Err(SimError::DimensionMismatch {
            left: a.n_qubits,
            right: b.n_qubits,
        });
    }
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// Index of a basis label such as `"10"` (`|q0 q1⟩`); `None` if the label
/// has the wrong length or a character other than `0`/`1`.
pub fn basis_index(label: &str, n_qubits: usize) -> Option<usize> {
    let label = label
        .trim()
        .trim_start_matches('|')
        .trim_end_matches('⟩')
        .trim_end_matches('>');
    if label.len() != n_qubits {
        return None;
    }
    label.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Some(acc << 1),
        '1' => Some(acc << 1 | 1),
        _ => None,
    })
}

/// Inverse of [`basis_index`].
pub fn basis_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|k| {
            if index >> (n_qubits - 1 - k) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}
