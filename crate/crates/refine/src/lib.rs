//! Iterative refinement: a generator proposes a program, the engine
//! evaluates it, and the verdict is turned into feedback for the next round.

pub mod generator;
pub mod log;
pub mod metrics;
pub mod session;

pub use generator::{Generator, GeneratorError, GeneratorSpec};
pub use metrics::{compute_metrics, success_curve, MetricsError, MetricsTable};
pub use session::{
    run_session, run_session_with, Attempt, Outcome, RefinementSession, SessionEvent,
};
