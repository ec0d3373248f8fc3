//! Frontend for the restricted OpenQASM 2.0 dialect accepted as submissions.
//!
//! See `docs/qasm-dialect.md` for the grammar. Besides plain gate
//! statements the parser recognises a handful of state-injection
//! instructions (`initialize` and friends). They are not gates; they are
//! carried through as [`ForeignInstruction`]s so the gate-set check can
//! reject them.

mod emit;
mod lexer;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;

pub use emit::emit;

/// Instruction names that prepare or inject state without being gates.
pub const FOREIGN_INSTRUCTIONS: &[&str] = &[
    "initialize",
    "prepare_state",
    "state_preparation",
    "unitary",
    "isometry",
];

/// The only include file accepted.
pub const ALLOWED_INCLUDE: &str = "qelib1.inc";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    NativeQasm,
    AdapterExport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceProgram {
    pub text: String,
    pub origin: Origin,
}

impl SourceProgram {
    pub fn native(text: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: Origin::NativeQasm,
        }
    }

    pub fn adapter_export(text: impl Into<String>) -> Self {
        SourceProgram {
            text: text.into(),
            origin: Origin::AdapterExport,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCategory {
    Lex,
    Parse,
    Semantic,
    UnsupportedConstruct,
}

/// Which construct triggered an [`ErrorCategory::UnsupportedConstruct`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construct {
    Measure,
    Creg,
    If,
    Reset,
    Opaque,
    Barrier,
    GateDefinition,
    Include(String),
    Foreign(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
pub struct FrontendError {
    pub category: ErrorCategory,
    pub line: usize,
    pub message: String,
    pub construct: Option<Construct>,
}

impl FrontendError {
    pub(crate) fn new(category: ErrorCategory, line: usize, message: impl Into<String>) -> Self {
        FrontendError {
            category,
            line: line.max(1),
            message: message.into(),
            construct: None,
        }
    }

    pub(crate) fn unsupported(
        line: usize,
        construct: Construct,
        message: impl Into<String>,
    ) -> Self {
        FrontendError {
            construct: Some(construct),
            ..FrontendError::new(ErrorCategory::UnsupportedConstruct, line, message)
        }
    }

    /// True when the error is an `include` of anything but the allowlisted file.
    pub fn is_disallowed_include(&self) -> bool {
        matches!(self.construct, Some(Construct::Include(_)))
    }
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// A non-gate instruction such as `initialize`, kept for the gate check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForeignInstruction {
    pub name: String,
    pub qubits: Vec<usize>,
    pub line: usize,
    /// Number of gates that precede it in the circuit.
    pub position: usize,
}

/// Parse result that keeps foreign instructions alongside the circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub circuit: Circuit,
    pub foreign: Vec<ForeignInstruction>,
}

/// Parses source into a circuit plus any foreign instructions.
pub fn parse_program(source: &SourceProgram) -> Result<Program, FrontendError> {
    parser::Parser::new(lexer::tokenize(&source.text)?).program()
}

/// Parses source into a circuit; foreign instructions are an error here.
pub fn parse(source: &SourceProgram) -> Result<Circuit, FrontendError> {
    let program = parse_program(source)?;
    if let Some(f) = program.foreign.first() {
        return Err(FrontendError::unsupported(
            f.line,
            Construct::Foreign(f.name.clone()),
            format!("`{}` is not a gate", f.name),
        ));
    }
    Ok(program.circuit)
}
