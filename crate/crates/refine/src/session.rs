use serde::{Deserialize, Serialize};

use qjudge_core::bank::ProblemSpec;
use qjudge_core::eval::render_feedback;
use qjudge_core::qasm::SourceProgram;
use qjudge_core::{evaluate, EvaluationReport, Verdict};

use crate::generator::Generator;

pub const DEFAULT_MAX_ROUNDS: usize = 3;
pub const MAX_ROUNDS_LIMIT: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    Exhausted,
    GeneratorFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    /// 1-based.
    pub round: usize,
    pub prompt: String,
    pub source: String,
    pub report: EvaluationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementSession {
    pub problem_id: String,
    pub max_rounds: usize,
    pub attempts: Vec<Attempt>,
    pub outcome: Outcome,
    #[serde(default)]
    pub generator_error: Option<String>,
}

impl RefinementSession {
    pub fn verdicts(&self) -> Vec<Verdict> {
        self.attempts.iter().map(|a| a.report.verdict).collect()
    }

    /// Round of the first accepted attempt.
    pub fn solved_at(&self) -> Option<usize> {
        self.attempts
            .iter()
            .find(|a| a.report.verdict == Verdict::AC)
            .map(|a| a.round)
    }
}

/// Progress notifications, in order: one `Started`, one `Attempted` per
/// round, one `Finished`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Started {
        problem_id: String,
        max_rounds: usize,
    },
    Attempted(Attempt),
    Finished {
        outcome: Outcome,
        generator_error: Option<String>,
    },
}

/// Prompt for the round after `previous`: the baseline followed by the
/// previous source and its verdict sentence.
pub fn refinement_prompt(baseline: &str, previous: &Attempt) -> String {
    match render_feedback(&previous.report, &previous.source) {
        Ok(feedback) => format!("{baseline}\n\n{feedback}"),
        Err(_) => baseline.to_string(),
    }
}

/// Runs up to `max_rounds` rounds, evaluating QASM sources natively.
pub fn run_session(
    problem: &ProblemSpec,
    generator: &mut dyn Generator,
    max_rounds: usize,
) -> RefinementSession {
    run_session_with(
        problem,
        generator,
        max_rounds,
        |source| evaluate(&SourceProgram::native(source), problem),
        |_| {},
    )
}

/// [`run_session`] with a custom evaluator and an event observer.
///
/// # Panics
///
/// If `max_rounds` is zero.
pub fn run_session_with(
    problem: &ProblemSpec,
    generator: &mut dyn Generator,
    max_rounds: usize,
    mut evaluator: impl FnMut(&str) -> EvaluationReport,
    mut observer: impl FnMut(&SessionEvent),
) -> RefinementSession {
    assert!(max_rounds >= 1, "max_rounds must be at least 1");
    observer(&SessionEvent::Started {
        problem_id: problem.id.clone(),
        max_rounds,
    });
    let baseline = problem.render_prompt();
    let mut attempts: Vec<Attempt> = Vec::new();
    let mut generator_error = None;
    let mut outcome = Outcome::Exhausted;
    for round in 1..=max_rounds {
        let prompt = match attempts.last() {
            None => baseline.clone(),
            Some(previous) => refinement_prompt(&baseline, previous),
        };
        let source = match generator.generate(&prompt) {
            Ok(s) => s,
            Err(e) => {
                generator_error = Some(e.to_string());
                outcome = Outcome::GeneratorFailed;
                break;
            }
        };
        let report = evaluator(&source);
        let accepted = report.verdict == Verdict::AC;
        let attempt = Attempt {
            round,
            prompt,
            source,
            report,
        };
        observer(&SessionEvent::Attempted(attempt.clone()));
        attempts.push(attempt);
        if accepted {
            outcome = Outcome::Solved;
            break;
        }
    }
    observer(&SessionEvent::Finished {
        outcome,
        generator_error: generator_error.clone(),
    });
    RefinementSession {
        problem_id: problem.id.clone(),
        max_rounds,
        attempts,
        outcome,
        generator_error,
    }
}
