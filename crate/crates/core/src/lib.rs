//! Evaluation engine for quantum state-preparation programs.
//!
//! A submission is parsed from QASM ([`qasm`]), checked against the
//! problem's gate set and depth limit ([`transpile`]), simulated
//! ([`sim`]) and judged against the problem's acceptance rule ([`judge`]).
//! [`eval`] strings those stages together and produces the report and
//! feedback text; [`bank`] loads problem definitions.

pub mod bank;
pub mod circuit;
pub mod eval;
pub mod gates;
pub mod judge;
pub mod qasm;
pub mod sim;
pub mod transpile;

pub use circuit::{Circuit, GateInstance, GateKind};
pub use eval::{evaluate, EvaluationReport, Verdict};
pub use sim::StateVector;
