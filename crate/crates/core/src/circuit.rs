//! Circuit intermediate representation.
//!
//! Basis labels are written `|q0 q1 … q(n-1)⟩` and qubit `k` owns bit
//! `n - 1 - k` of the amplitude index, so qubit 0 is the most significant bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Every gate the engine knows how to define, simulate and decompose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    P,
    U,
    Cx,
    Cz,
    Ch,
    Cry,
    Crz,
    Cp,
    Ccx,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 21] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::P,
        GateKind::U,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Ch,
        GateKind::Cry,
        GateKind::Crz,
        GateKind::Cp,
        GateKind::Ccx,
        GateKind::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::P => "p",
            GateKind::U => "u",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Ch => "ch",
            GateKind::Cry => "cry",
            GateKind::Crz => "crz",
            GateKind::Cp => "cp",
            GateKind::Ccx => "ccx",
            GateKind::Swap => "swap",
        }
    }

    /// Number of qubit operands.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx
            | GateKind::Cz
            | GateKind::Ch
            | GateKind::Cry
            | GateKind::Crz
            | GateKind::Cp
            | GateKind::Swap => 2,
            GateKind::Ccx => 3,
            _ => 1,
        }
    }

    /// Number of angle parameters.
    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx
            | GateKind::Ry
            | GateKind::Rz
            | GateKind::P
            | GateKind::Cry
            | GateKind::Crz
            | GateKind::Cp => 1,
            GateKind::U => 3,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown gate `{0}`")]
pub struct UnknownGate(pub String);

impl FromStr for GateKind {
    type Err = UnknownGate;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownGate(s.to_string()))
    }
}

/// One application of a gate. For controlled gates the controls come first
/// and the target last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateInstance {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
}

impl GateInstance {
    pub fn new(kind: GateKind, qubits: impl Into<Vec<usize>>, params: impl Into<Vec<f64>>) -> Self {
        GateInstance {
            kind,
            qubits: qubits.into(),
            params: params.into(),
        }
    }
}

impl fmt::Display for GateInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if !self.params.is_empty() {
            let params: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", params.join(","))?;
        }
        let qubits: Vec<String> = self.qubits.iter().map(|q| format!("q{q}")).collect();
        write!(f, " {}", qubits.join(","))
    }
}

/// A problem with a single gate inside a circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    QubitOutOfRange {
        position: usize,
        qubit: usize,
        n_qubits: usize,
    },
    DuplicateOperand {
        position: usize,
        qubit: usize,
    },
    WrongArity {
        position: usize,
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    WrongParamCount {
        position: usize,
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    NonFiniteParam {
        position: usize,
        kind: GateKind,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::QubitOutOfRange {
                position,
                qubit,
                n_qubits,
            } => write!(
                f,
                "gate {position}: qubit {qubit} out of range for a {n_qubits}-qubit register"
            ),
            Violation::DuplicateOperand { position, qubit } => {
                write!(f, "gate {position}: duplicate operand q{qubit}")
            }
            Violation::WrongArity {
                position,
                kind,
                expected,
                found,
            } => write!(
                f,
                "gate {position}: `{kind}` takes {expected} qubit(s), got {found}"
            ),
            Violation::WrongParamCount {
                position,
                kind,
                expected,
                found,
            } => write!(
                f,
                "gate {position}: `{kind}` takes {expected} parameter(s), got {found}"
            ),
            Violation::NonFiniteParam { position, kind } => {
                write!(f, "gate {position}: `{kind}` has a non-finite parameter")
            }
        }
    }
}

/// Qubit count plus gates in execution order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<GateInstance>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn with_gates(n_qubits: usize, gates: Vec<GateInstance>) -> Self {
        Circuit { n_qubits, gates }
    }

    pub fn push(&mut self, gate: GateInstance) -> &mut Self {
        self.gates.push(gate);
        self
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Every invariant violation in the circuit; empty means well-formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (position, gate) in self.gates.iter().enumerate() {
            let kind = gate.kind;
            if gate.qubits.len() != kind.arity() {
                out.push(Violation::WrongArity {
                    position,
                    kind,
                    expected: kind.arity(),
                    found: gate.qubits.len(),
                });
            }
            if gate.params.len() != kind.param_count() {
                out.push(Violation::WrongParamCount {
                    position,
                    kind,
                    expected: kind.param_count(),
                    found: gate.params.len(),
                });
            }
            if gate.params.iter().any(|p| !p.is_finite()) {
                out.push(Violation::NonFiniteParam { position, kind });
            }
            for (i, &qubit) in gate.qubits.iter().enumerate() {
                if qubit >= self.n_qubits {
                    out.push(Violation::QubitOutOfRange {
                        position,
                        qubit,
                        n_qubits: self.n_qubits,
                    });
                }
                if gate.qubits[..i].contains(&qubit) {
                    out.push(Violation::DuplicateOperand { position, qubit });
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }
}

macro_rules! fixed_gates {
    ($($method:ident => $kind:ident ( $($q:ident),+ )),* $(,)?) => {
        impl Circuit {
            $(
                pub fn $method(&mut self, $($q: usize),+) -> &mut Self {
                    self.push(GateInstance::new(GateKind::$kind, vec![$($q),+], Vec::new()))
                }
            )*
        }
    };
}

macro_rules! rotation_gates {
    ($($method:ident => $kind:ident ( $($q:ident),+ )),* $(,)?) => {
        impl Circuit {
            $(
                pub fn $method(&mut self, theta: f64, $($q: usize),+) -> &mut Self {
                    self.push(GateInstance::new(GateKind::$kind, vec![$($q),+], vec![theta]))
                }
            )*
        }
    };
}

fixed_gates! {
    h => H(q),
    x => X(q),
    y => Y(q),
    z => Z(q),
    s => S(q),
    sdg => Sdg(q),
    t => T(q),
    tdg => Tdg(q),
    cx => Cx(control, target),
    cz => Cz(control, target),
    ch => Ch(control, target),
    ccx => Ccx(control1, control2, target),
    swap => Swap(a, b),
}

rotation_gates! {
    rx => Rx(q),
    ry => Ry(q),
    rz => Rz(q),
    p => P(q),
    cry => Cry(control, target),
    crz => Crz(control, target),
    cp => Cp(control, target),
}

impl Circuit {
    pub fn u(&mut self, theta: f64, phi: f64, lambda: f64, q: usize) -> &mut Self {
        self.push(GateInstance::new(
            GateKind::U,
            vec![q],
            vec![theta, phi, lambda],
        ))
    }
}
