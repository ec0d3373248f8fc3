use std::fmt::Write;

use super::SourceProgram;
use crate::circuit::Circuit;

/// Renders `circuit` in the submission dialect with a single register `q`.
/// Angles use the shortest decimal that parses back to the same `f64`.
pub fn emit(circuit: &Circuit) -> SourceProgram {
    let mut text = format!("OPENQASM 2.0;\nqreg q[{}];\n", circuit.n_qubits);
    for gate in &circuit.gates {
        text.push_str(gate.kind.name());
        if !gate.params.is_empty() {
            let params: Vec<String> = gate.params.iter().map(|p| format!("{p:?}")).collect();
            write!(text, "({})", params.join(",")).unwrap();
        }
        let operands: Vec<String> = gate.qubits.iter().map(|q| format!("q[{q}]")).collect();
        writeln!(text, " {};", operands.join(",")).unwrap();
    }
    SourceProgram::native(text)
}
