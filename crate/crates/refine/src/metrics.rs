//! Success and failure-category rates over sets of sessions.

use std::fmt;

use serde::{Deserialize, Serialize};

use qjudge_core::Verdict;

use crate::session::RefinementSession;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("metrics are undefined for an empty session set")]
    NoSessions,
    #[error("rounds are numbered from 1")]
    ZeroRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Success,
    RuntimeError,
    GateViolation,
    ModuleViolation,
    DepthViolation,
    WrongOutput,
}

impl Category {
    pub fn of(verdict: Verdict) -> Self {
        match verdict {
            Verdict::AC => Category::Success,
            Verdict::RE => Category::RuntimeError,
            Verdict::UGE => Category::GateViolation,
            Verdict::UME => Category::ModuleViolation,
            Verdict::DLE => Category::DepthViolation,
            Verdict::WA => Category::WrongOutput,
        }
    }
}

/// A session's standing after `round` rounds. Sessions with no attempts
/// (the generator failed immediately) count as runtime errors.
pub fn category_at(session: &RefinementSession, round: usize) -> Category {
    if session.solved_at().is_some_and(|r| r <= round) {
        return Category::Success;
    }
    let shown = round.min(session.attempts.len());
    match shown.checked_sub(1).and_then(|i| session.attempts.get(i)) {
        Some(attempt) => Category::of(attempt.report.verdict),
        None => Category::RuntimeError,
    }
}

/// Percentages over all sessions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsTable {
    pub at_round: usize,
    pub sessions: usize,
    pub success: f64,
    pub runtime_error: f64,
    pub gate_violation: f64,
    pub module_violation: f64,
    pub depth_violation: f64,
    pub wrong_output: f64,
    /// Element `r - 1` is the success rate at round `r`, for `r` up to `at_round`.
    pub success_by_iteration: Vec<f64>,
}

/// The coarser four-column breakdown that folds gate and module
/// violations into runtime errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseBreakdown {
    pub success: f64,
    pub runtime_error: f64,
    pub depth_violation: f64,
    pub wrong_output: f64,
}

impl MetricsTable {
    pub fn total(&self) -> f64 {
        self.success
            + self.runtime_error
            + self.gate_violation
            + self.module_violation
            + self.depth_violation
            + self.wrong_output
    }

    pub fn coarse(&self) -> CoarseBreakdown {
        CoarseBreakdown {
            success: self.success,
            runtime_error: self.runtime_error + self.gate_violation + self.module_violation,
            depth_violation: self.depth_violation,
            wrong_output: self.wrong_output,
        }
    }
}

fn pct(count: usize, total: usize) -> f64 {
    100.0 * count as f64 / total as f64
}

pub fn compute_metrics(
    sessions: &[RefinementSession],
    at_round: usize,
) -> Result<MetricsTable, MetricsError> {
    if sessions.is_empty() {
        return Err(MetricsError::NoSessions);
    }
    if at_round == 0 {
        return Err(MetricsError::ZeroRound);
    }
    let n = sessions.len();
    let count = |c: Category| {
        sessions
            .iter()
            .filter(|s| category_at(s, at_round) == c)
            .count()
    };
    Ok(MetricsTable {
        at_round,
        sessions: n,
        success: pct(count(Category::Success), n),
        runtime_error: pct(count(Category::RuntimeError), n),
        gate_violation: pct(count(Category::GateViolation), n),
        module_violation: pct(count(Category::ModuleViolation), n),
        depth_violation: pct(count(Category::DepthViolation), n),
        wrong_output: pct(count(Category::WrongOutput), n),
        success_by_iteration: success_curve(sessions, at_round),
    })
}

/// Success rate at rounds `1..=max_round`; empty for an empty session set.
pub fn success_curve(sessions: &[RefinementSession], max_round: usize) -> Vec<f64> {
    if sessions.is_empty() {
        return Vec::new();
    }
    (1..=max_round)
        .map(|r| {
            pct(
                sessions
                    .iter()
                    .filter(|s| s.solved_at().is_some_and(|at| at <= r))
                    .count(),
                sessions.len(),
            )
        })
        .collect()
}

impl fmt::Display for MetricsTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sessions: {}  round: {}", self.sessions, self.at_round)?;
        for (name, value) in [
            ("success", self.success),
            ("runtime_error", self.runtime_error),
            ("gate_violation", self.gate_violation),
            ("module_violation", self.module_violation),
            ("depth_violation", self.depth_violation),
            ("wrong_output", self.wrong_output),
        ] {
            writeln!(f, "{name:<18}{value:>7.2}%")?;
        }
        let curve: Vec<String> = self
            .success_by_iteration
            .iter()
            .map(|v| format!("{v:.2}%"))
            .collect();
        write!(f, "success_by_iteration: [{}]", curve.join(", "))
    }
}
