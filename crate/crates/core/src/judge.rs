//! Acceptance rules for a simulated output state.

use std::collections::BTreeSet;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::sim::{basis_label, overlap, SimError, StateVector};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseMode {
    /// A global phase other than 1 makes the state wrong.
    Sensitive,
    /// States equal up to global phase are accepted.
    Ignored,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    ExactState {
        reference: StateVector,
        phase_mode: PhaseMode,
    },
    /// Constrains which basis states carry amplitude; values are otherwise free.
    SupportPredicate {
        n_qubits: usize,
        required_nonzero: BTreeSet<usize>,
        required_zero: BTreeSet<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct JudgeSpec {
    pub criterion: Criterion,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JudgeError {
    #[error("reference state is not unit-norm (norm {0})")]
    NotNormalized(f64),
    #[error("basis index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("basis state |{0}⟩ is required to be both zero and nonzero")]
    Overlapping(String),
    #[error("tolerance must be in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("output has {output} qubits but the problem expects {expected}")]
    DimensionMismatch { output: usize, expected: usize },
}

impl JudgeSpec {
    pub fn exact(reference: StateVector, phase_mode: PhaseMode) -> Result<Self, JudgeError> {
        let norm = reference.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(JudgeError::NotNormalized(norm));
        }
        Ok(JudgeSpec {
            criterion: Criterion::ExactState {
                reference,
                phase_mode,
            },
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn support(
        n_qubits: usize,
        required_nonzero: impl IntoIterator<Item = usize>,
        required_zero: impl IntoIterator<Item = usize>,
    ) -> Result<Self, JudgeError> {
        let required_nonzero: BTreeSet<usize> = required_nonzero.into_iter().collect();
        let required_zero: BTreeSet<usize> = required_zero.into_iter().collect();
        let dim = 1usize << n_qubits;
        if let Some(&index) = required_nonzero
            .iter()
            .chain(&required_zero)
            .find(|&&i| i >= dim)
        {
            return Err(JudgeError::IndexOutOfRange { index, n_qubits });
        }
        if let Some(&index) = required_nonzero.intersection(&required_zero).next() {
            return Err(JudgeError::Overlapping(basis_label(index, n_qubits)));
        }
        Ok(JudgeSpec {
            criterion: Criterion::SupportPredicate {
                n_qubits,
                required_nonzero,
                required_zero,
            },
            tolerance: DEFAULT_TOLERANCE,
        })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, JudgeError> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(JudgeError::BadTolerance(tolerance));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        match &self.criterion {
            Criterion::ExactState { reference, .. } => reference.n_qubits(),
            Criterion::SupportPredicate { n_qubits, .. } => *n_qubits,
        }
    }

    pub fn phase_mode(&self) -> Option<PhaseMode> {
        match &self.criterion {
            Criterion::ExactState { phase_mode, .. } => Some(*phase_mode),
            Criterion::SupportPredicate { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeOutcome {
    pub matched: bool,
    /// `|⟨ref|out⟩|²` for exact-state criteria.
    pub fidelity: Option<f64>,
    pub diagnostic: String,
}

/// Decides whether `output` satisfies `spec`.
pub fn judge_state(output: &StateVector, spec: &JudgeSpec) -> Result<JudgeOutcome, JudgeError> {
    let expected = spec.n_qubits();
    if output.n_qubits() != expected {
        return Err(JudgeError::DimensionMismatch {
            output: output.n_qubits(),
            expected,
        });
    }
    let tol = spec.tolerance;
    match &spec.criterion {
        Criterion::ExactState {
            reference,
            phase_mode,
        } => {
            let inner = overlap(reference, output).map_err(|e| match e {
                SimError::DimensionMismatch { left, right } => JudgeError::DimensionMismatch {
                    output: right,
                    expected: left,
                },
                other => unreachable!("overlap only fails on dimensions: {other}"),
            })?;
            let fidelity = inner.norm_sqr();
            let (matched, diagnostic) = match phase_mode {
                PhaseMode::Ignored => {
                    let matched = inner.norm() >= 1.0 - tol;
                    (
                        matched,
                        format!("fidelity {fidelity:.9} (global phase ignored)"),
                    )
                }
                PhaseMode::Sensitive => {
                    let distance = (inner - Complex64::new(1.0, 0.0)).norm();
                    let matched = distance < (2.0 * tol).sqrt();
                    (
                        matched,
                        format!("fidelity {fidelity:.9}, phase-sensitive distance {distance:.9}"),
                    )
                }
            };
            Ok(JudgeOutcome {
                matched,
                fidelity: Some(fidelity),
                diagnostic,
            })
        }
        Criterion::SupportPredicate {
            n_qubits,
            required_nonzero,
            required_zero,
        } => {
            for &i in required_zero {
                let p = output.probability(i);
                if p >= tol {
                    return Ok(JudgeOutcome {
                        matched: false,
                        fidelity: None,
                        diagnostic: format!(
                            "basis state |{}⟩ has probability {p:.9}, expected zero",
                            basis_label(i, *n_qubits)
                        ),
                    });
                }
            }
            for &i in required_nonzero {
                let p = output.probability(i);
                if p < tol {
                    return Ok(JudgeOutcome {
                        matched: false,
                        fidelity: None,
                        diagnostic: format!(
                            "basis state |{}⟩ has probability {p:.9}, expected nonzero",
                            basis_label(i, *n_qubits)
                        ),
                    });
                }
            }
            Ok(JudgeOutcome {
                matched: true,
                fidelity: None,
                diagnostic: "all support constraints satisfied".into(),
            })
        }
    }
}
