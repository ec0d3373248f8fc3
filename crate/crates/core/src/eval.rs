//! Staged evaluation of a submission against a problem.
//!
//! Stages run in order of severity and stop at the first failure:
//! parse (RE, or UME for a disallowed include), gate set (UGE), depth
//! (DLE), then simulation and judging (WA or AC).

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::bank::ProblemSpec;
use crate::judge::{judge_state, JudgeError};
use crate::qasm::{parse_program, SourceProgram};
use crate::sim::{StateVector, MAX_QUBITS};
use crate::transpile::{check_depth_with_policy, check_gates};
use crate::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    /// Accepted.
    AC,
    /// Runtime (parse or semantic) error.
    RE,
    /// Unauthorized module.
    UME,
    /// Unauthorized gate.
    UGE,
    /// Depth limit exceeded.
    DLE,
    /// Wrong output state.
    WA,
}

impl Verdict {
    pub const ALL: [Verdict; 6] = [
        Verdict::AC,
        Verdict::RE,
        Verdict::UME,
        Verdict::UGE,
        Verdict::DLE,
        Verdict::WA,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Verdict::AC => "AC",
            Verdict::RE => "RE",
            Verdict::UME => "UME",
            Verdict::UGE => "UGE",
            Verdict::DLE => "DLE",
            Verdict::WA => "WA",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Verdict::ALL
            .into_iter()
            .find(|v| v.code().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown verdict `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub verdict: Verdict,
    pub runtime_error: bool,
    pub gate_violation: bool,
    pub depth_violation: bool,
    pub state_match: bool,
    /// Set only for UME; rendered after the four standard keys.
    #[serde(default)]
    pub module_violation: bool,
    pub measured_depth: Option<usize>,
    pub error_text: Option<String>,
    /// Per-stage outcome, `; `-separated.
    pub diagnostic: String,
    /// Informational; excluded from equality checks in tests.
    pub sim_wall_time: Duration,
}

impl EvaluationReport {
    fn failed(verdict: Verdict, error_text: Option<String>, stages: &[(&str, String)]) -> Self {
        let mut report = EvaluationReport {
            verdict,
            runtime_error: verdict == Verdict::RE,
            gate_violation: verdict == Verdict::UGE,
            depth_violation: verdict == Verdict::DLE,
            state_match: false,
            module_violation: verdict == Verdict::UME,
            measured_depth: None,
            error_text,
            diagnostic: String::new(),
            sim_wall_time: Duration::ZERO,
        };
        report.diagnostic = render_stages(stages);
        report
    }

    /// A runtime-error report for failures outside the engine (adapter
    /// crashes, timeouts).
    pub fn runtime_error(error_text: impl Into<String>) -> Self {
        let text = error_text.into();
        EvaluationReport::failed(
            Verdict::RE,
            Some(text.clone()),
            &[("parse", format!("failed ({text})"))],
        )
    }

    /// An unauthorized-module report for failures detected outside the engine.
    pub fn module_violation(error_text: impl Into<String>) -> Self {
        let text = error_text.into();
        EvaluationReport::failed(
            Verdict::UME,
            Some(text.clone()),
            &[("parse", format!("failed ({text})"))],
        )
    }

    pub fn is_accepted(&self) -> bool {
        self.verdict == Verdict::AC
    }

    /// The report with its timing field zeroed, for comparisons.
    pub fn without_timing(&self) -> Self {
        EvaluationReport {
            sim_wall_time: Duration::ZERO,
            ..self.clone()
        }
    }

    /// Single-line report text; see [`report_json`].
    pub fn to_json(&self) -> String {
        report_json(self)
    }
}

const STAGES: [&str; 4] = ["parse", "gates", "depth", "state"];

fn render_stages(done: &[(&str, String)]) -> String {
    STAGES
        .iter()
        .map(|stage| match done.iter().find(|(s, _)| s == stage) {
            Some((_, status)) => format!("{stage}: {status}"),
            None => format!("{stage}: unevaluated"),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalOptions {
    /// Registers larger than this are reported as RE.
    pub qubit_cap: usize,
    /// Simulation stops with RE once this instant passes; checked between gates.
    pub deadline: Option<Instant>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            qubit_cap: MAX_QUBITS,
            deadline: None,
        }
    }
}

impl EvalOptions {
    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }
}

fn simulate(
    circuit: &Circuit,
    cap: usize,
    deadline: Option<Instant>,
) -> Result<StateVector, String> {
    let mut state = StateVector::zero_with_cap(circuit.n_qubits, cap).map_err(|e| e.to_string())?;
    for gate in &circuit.gates {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Err("evaluation timed out".to_string());
        }
        state.apply(gate).map_err(|e| e.to_string())?;
    }
    Ok(state)
}

/// Evaluates `source` against `problem` with default options.
pub fn evaluate(source: &SourceProgram, problem: &ProblemSpec) -> EvaluationReport {
    evaluate_with(source, problem, &EvalOptions::default())
}

pub fn evaluate_with(
    source: &SourceProgram,
    problem: &ProblemSpec,
    options: &EvalOptions,
) -> EvaluationReport {
    let program = match parse_program(source) {
        Ok(p) => p,
        Err(e) => {
            let text = e.to_string();
            let verdict = if e.is_disallowed_include() {
                Verdict::UME
            } else {
                Verdict::RE
            };
            return EvaluationReport::failed(
                verdict,
                Some(text.clone()),
                &[("parse", format!("failed ({text})"))],
            );
        }
    };
    let circuit = &program.circuit;
    let cap = options.qubit_cap.min(MAX_QUBITS);
    if circuit.n_qubits > cap {
        let text = format!(
            "circuit declares {} qubits; the simulator supports at most {cap}",
            circuit.n_qubits
        );
        return EvaluationReport::failed(
            Verdict::RE,
            Some(text.clone()),
            &[("parse", format!("failed ({text})"))],
        );
    }
    let mut stages = vec![("parse", "passed".to_string())];

    let mut offending: Vec<String> = program
        .foreign
        .iter()
        .map(|f| format!("`{}` on line {} is not a gate", f.name, f.line))
        .collect();
    offending.extend(
        check_gates(circuit, &problem.gate_policy)
            .into_iter()
            .map(|pos| format!("gate {pos} `{}` is not allowed", circuit.gates[pos].kind)),
    );
    if !offending.is_empty() {
        stages.push(("gates", format!("failed ({})", offending.join(", "))));
        return EvaluationReport::failed(Verdict::UGE, None, &stages);
    }
    stages.push(("gates", "passed".to_string()));

    let depth = check_depth_with_policy(circuit, &problem.gate_policy, problem.depth_limit);
    if depth.violated {
        stages.push((
            "depth",
            format!(
                "failed (depth {} exceeds limit {})",
                depth.depth,
                depth.limit.unwrap_or_default()
            ),
        ));
        let mut report = EvaluationReport::failed(Verdict::DLE, None, &stages);
        report.measured_depth = Some(depth.depth);
        return report;
    }
    stages.push((
        "depth",
        match depth.limit {
            Some(limit) => format!("passed (depth {} within limit {limit})", depth.depth),
            None => format!("passed (depth {}, no limit)", depth.depth),
        },
    ));

    let started = Instant::now();
    let state = match simulate(circuit, cap, options.deadline) {
        Ok(s) => s,
        Err(text) => {
            stages.push(("state", format!("failed ({text})")));
            let mut report = EvaluationReport::failed(Verdict::RE, Some(text), &stages);
            report.measured_depth = Some(depth.depth);
            return report;
        }
    };
    let sim_wall_time = started.elapsed();

    let (matched, detail) = match judge_state(&state, &problem.judge) {
        Ok(outcome) => (outcome.matched, outcome.diagnostic),
        Err(JudgeError::DimensionMismatch { output, expected }) => (
            false,
            format!("register has {output} qubits, problem expects {expected}"),
        ),
        Err(e) => (false, e.to_string()),
    };
    stages.push((
        "state",
        format!("{} ({detail})", if matched { "passed" } else { "failed" }),
    ));
    let verdict = if matched { Verdict::AC } else { Verdict::WA };
    EvaluationReport {
        verdict,
        runtime_error: false,
        gate_violation: false,
        depth_violation: false,
        state_match: matched,
        module_violation: false,
        measured_depth: Some(depth.depth),
        error_text: None,
        diagnostic: render_stages(&stages),
        sim_wall_time,
    }
}

/// The single-line report: the four standard keys in fixed order, plus a
/// trailing `module_violation` key only when it is set.
pub fn report_json(report: &EvaluationReport) -> String {
    let mut out = format!(
        "{{ \"runtime_error\": {}, \"gate_violation\": {}, \"depth_violation\": {}, \"state_match\": {}",
        report.runtime_error, report.gate_violation, report.depth_violation, report.state_match
    );
    if report.module_violation {
        out.push_str(", \"module_violation\": true");
    }
    out.push_str(" }");
    out
}

pub const WA_FEEDBACK: &str = "This is wrong. Try again.";
pub const DLE_FEEDBACK: &str =
    "The circuit depth exceeded the given constraint. Please revise your implementation to improve efficiency. Try again.";
pub const UME_FEEDBACK: &str = "Unauthorized modules has been used. Try again.";
pub const UGE_FEEDBACK: &str = "An unauthorized quantum gate has been used. Try again.";

/// The verdict-specific sentence appended to refinement prompts.
pub fn feedback_sentence(report: &EvaluationReport) -> Option<String> {
    Some(match report.verdict {
        Verdict::AC => return None,
        Verdict::WA => WA_FEEDBACK.to_string(),
        Verdict::DLE => DLE_FEEDBACK.to_string(),
        Verdict::UME => UME_FEEDBACK.to_string(),
        Verdict::UGE => UGE_FEEDBACK.to_string(),
        Verdict::RE => format!(
            "The occurring error is: {}. Try again.",
            report.error_text.as_deref().unwrap_or("unknown error")
        ),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("no feedback for an accepted submission")]
pub struct AcceptedFeedbackError;

/// Refinement feedback: the previous source in a fenced block followed by
/// the verdict sentence.
pub fn render_feedback(
    report: &EvaluationReport,
    previous_source: &str,
) -> Result<String, AcceptedFeedbackError> {
    let sentence = feedback_sentence(report).ok_or(AcceptedFeedbackError)?;
    let fence_lang = if previous_source.trim_start().starts_with("OPENQASM") {
        "qasm"
    } else {
        "python"
    };
    Ok(format!(
        "Your answer was\n```{fence_lang}\n{}\n```\n{sentence}",
        previous_source.trim_end_matches('\n')
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::judge::{JudgeSpec, PhaseMode};
    use crate::sim::StateVector;
    use crate::transpile::GateSetPolicy;
    use crate::GateKind;
    use num_complex::Complex64;

    fn qpc001_a4() -> ProblemSpec {
        ProblemSpec {
            id: "QPC001-A4".into(),
            statement: "three-way split".into(),
            n_qubits: 2,
            gate_policy: GateSetPolicy::all(),
            depth_limit: None,
            judge: JudgeSpec::support(2, [0, 1, 2], [3]).unwrap(),
            code_template: String::new(),
        }
    }

    fn restricted(limit: usize) -> ProblemSpec {
        ProblemSpec {
            gate_policy: GateSetPolicy::strict([GateKind::H, GateKind::Cx, GateKind::Ry]),
            depth_limit: Some(limit),
            ..qpc001_a4()
        }
    }

    fn eval(text: &str, problem: &ProblemSpec) -> EvaluationReport {
        evaluate(&SourceProgram::native(text), problem)
    }

    const REFERENCE: &str = "OPENQASM 2.0;\nqreg q[2];\nh q[0];\nch q[0],q[1];\ncx q[1],q[0];\n";

    #[test]
    fn reference_is_accepted() {
        let r = eval(REFERENCE, &qpc001_a4());
        assert_eq!(r.verdict, Verdict::AC, "{}", r.diagnostic);
        assert_eq!(r.measured_depth, Some(3));
        assert_eq!(
            report_json(&r),
            r#"{ "runtime_error": false, "gate_violation": false, "depth_violation": false, "state_match": true }"#
        );
    }

    #[test]
    fn initialize_is_a_gate_violation() {
        let r = eval(
            "OPENQASM 2.0;\nqreg q[2];\ninitialize(0.5773502691896258,0.5773502691896258,0.5773502691896258,0) q[0],q[1];\n",
            &qpc001_a4(),
        );
        assert_eq!(r.verdict, Verdict::UGE);
        assert!(r.gate_violation && !r.state_match);
        assert!(
            r.diagnostic.contains("state: unevaluated"),
            "{}",
            r.diagnostic
        );
        assert!(r.diagnostic.contains("depth: unevaluated"));
        assert_eq!(r.measured_depth, None);
    }

    #[test]
    fn wrong_state() {
        let r = eval(
            "OPENQASM 2.0;\nqreg q[2];\nh q[0];\nh q[1];\n",
            &qpc001_a4(),
        );
        assert_eq!(r.verdict, Verdict::WA);
        assert!(!r.state_match && !r.runtime_error && !r.gate_violation && !r.depth_violation);
        assert!(r.diagnostic.contains("|11⟩"));
    }

    #[test]
    fn parse_failure_is_runtime_error() {
        let r = eval("garbage", &qpc001_a4());
        assert_eq!(r.verdict, Verdict::RE);
        assert!(r.runtime_error);
        assert!(r.error_text.as_deref().unwrap().contains("line 1"));
        assert_eq!(
            report_json(&r),
            r#"{ "runtime_error": true, "gate_violation": false, "depth_violation": false, "state_match": false }"#
        );
    }

    #[test]
    fn disallowed_include_is_module_violation() {
        let r = eval(
            "OPENQASM 2.0;\ninclude \"numpy.inc\";\nqreg q[2];\n",
            &qpc001_a4(),
        );
        assert_eq!(r.verdict, Verdict::UME);
        assert!(r.module_violation && !r.runtime_error && !r.gate_violation);
        assert_eq!(
            report_json(&r),
            r#"{ "runtime_error": false, "gate_violation": false, "depth_violation": false, "state_match": false, "module_violation": true }"#
        );
    }

    #[test]
    fn severity_ordering() {
        // ch is forbidden and the depth of 3 exceeds the limit of 1.
        let r = eval(REFERENCE, &restricted(1));
        assert_eq!(r.verdict, Verdict::UGE);
        let mut allowed = restricted(1);
        allowed.gate_policy = GateSetPolicy::strict([GateKind::H, GateKind::Cx, GateKind::Ch]);
        let r = eval(REFERENCE, &allowed);
        assert_eq!(r.verdict, Verdict::DLE);
        assert!(r.depth_violation && !r.state_match);
        assert_eq!(r.measured_depth, Some(3));
        assert_eq!(
            report_json(&r),
            r#"{ "runtime_error": false, "gate_violation": false, "depth_violation": true, "state_match": false }"#
        );
    }

    #[test]
    fn register_size_mismatch_is_wrong_answer() {
        let r = eval("OPENQASM 2.0;\nqreg q[3];\nh q[0];\n", &qpc001_a4());
        assert_eq!(r.verdict, Verdict::WA);
        assert!(r.diagnostic.contains("3 qubits"));
    }

    #[test]
    fn qubit_cap_is_runtime_error() {
        let r = eval("OPENQASM 2.0;\nqreg q[21];\nh q[0];\n", &qpc001_a4());
        assert_eq!(r.verdict, Verdict::RE);
        assert!(r.error_text.unwrap().contains("at most 20"));
        let r = evaluate_with(
            &SourceProgram::native("OPENQASM 2.0;\nqreg q[3];\nh q[0];\n"),
            &qpc001_a4(),
            &EvalOptions {
                qubit_cap: 2,
                ..EvalOptions::default()
            },
        );
        assert_eq!(r.verdict, Verdict::RE);
    }

    #[test]
    fn expired_deadline_is_runtime_error() {
        let options = EvalOptions {
            deadline: Some(Instant::now()),
            ..EvalOptions::default()
        };
        let r = evaluate_with(&SourceProgram::native(REFERENCE), &qpc001_a4(), &options);
        assert_eq!(r.verdict, Verdict::RE);
        assert!(r.error_text.unwrap().contains("timed out"));
        let options = EvalOptions::default().with_timeout(Duration::from_secs(60));
        assert_eq!(
            evaluate_with(&SourceProgram::native(REFERENCE), &qpc001_a4(), &options).verdict,
            Verdict::AC
        );
    }

    #[test]
    fn phase_sensitive_problem() {
        let reference = StateVector::from_amplitudes(
            1,
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        )
        .unwrap();
        let problem = ProblemSpec {
            n_qubits: 1,
            judge: JudgeSpec::exact(reference, PhaseMode::Sensitive).unwrap(),
            ..qpc001_a4()
        };
        assert_eq!(
            eval("OPENQASM 2.0; qreg q[1]; x q[0]; s q[0];", &problem).verdict,
            Verdict::AC
        );
        assert_eq!(
            eval("OPENQASM 2.0; qreg q[1]; y q[0];", &problem).verdict,
            Verdict::AC
        );
        assert_eq!(
            eval("OPENQASM 2.0; qreg q[1]; x q[0];", &problem).verdict,
            Verdict::WA
        );
    }

    #[test]
    fn deterministic_modulo_timing() {
        let a = eval(REFERENCE, &qpc001_a4());
        let b = eval(REFERENCE, &qpc001_a4());
        assert_eq!(a.without_timing(), b.without_timing());
        assert_eq!(report_json(&a), report_json(&b));
    }

    #[test]
    fn flags_match_verdict() {
        for r in [
            eval(REFERENCE, &qpc001_a4()),
            eval("x", &qpc001_a4()),
            eval(REFERENCE, &restricted(1)),
            eval("OPENQASM 2.0;\nqreg q[2];\nh q[0];\n", &qpc001_a4()),
        ] {
            let ac = !r.runtime_error && !r.gate_violation && !r.depth_violation && r.state_match;
            assert_eq!(ac, r.verdict == Verdict::AC);
        }
    }

    #[test]
    fn feedback_sentences() {
        let wa = eval("OPENQASM 2.0;\nqreg q[2];\nh q[0];\n", &qpc001_a4());
        let text = render_feedback(&wa, "OPENQASM 2.0;\nqreg q[2];\nh q[0];\n").unwrap();
        assert!(text.starts_with("Your answer was\n```qasm\nOPENQASM 2.0;"));
        assert!(text.ends_with("This is wrong. Try again."));

        let mut re = EvaluationReport::runtime_error("name 'math' is not defined");
        assert!(render_feedback(&re, "def solve(): ...")
            .unwrap()
            .contains("The occurring error is: name 'math' is not defined. Try again."));
        assert!(render_feedback(&re, "def solve(): ...")
            .unwrap()
            .contains("```python"));
        re.verdict = Verdict::AC;
        assert_eq!(render_feedback(&re, ""), Err(AcceptedFeedbackError));

        let uge = eval(REFERENCE, &restricted(1));
        assert!(render_feedback(&uge, REFERENCE)
            .unwrap()
            .contains("An unauthorized quantum gate has been used."));
        let ume = EvaluationReport::module_violation("os");
        assert!(render_feedback(&ume, "")
            .unwrap()
            .ends_with("Unauthorized modules has been used. Try again."));
    }

    #[test]
    fn verdict_codes() {
        for v in Verdict::ALL {
            assert_eq!(v.code().parse::<Verdict>().unwrap(), v);
        }
        assert!("TLE".parse::<Verdict>().is_err());
    }
}
