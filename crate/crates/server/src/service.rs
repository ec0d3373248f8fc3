//! Request handling shared by the HTTP service and the CLI.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use qjudge_core::bank::{Bank, BankError, ProblemSpec};
use qjudge_core::eval::{evaluate_with, render_feedback, report_json, EvalOptions};
use qjudge_core::qasm::SourceProgram;
use qjudge_core::{EvaluationReport, Verdict};

use crate::adapter::{AdapterClient, AdapterError};
use crate::config::ServiceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Language {
    #[default]
    Qasm,
    QiskitPython,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluateRequest {
    pub problem_id: String,
    #[serde(default)]
    pub language: Language,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluateResponse {
    pub report: EvaluationReport,
    /// Present iff the verdict is not AC.
    pub feedback: Option<String>,
}

impl EvaluateResponse {
    pub fn new(report: EvaluationReport, source: &str) -> Self {
        let feedback = render_feedback(&report, source).ok();
        EvaluateResponse { report, feedback }
    }

    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }

    /// Response body. The `report` member is the single-line report text
    /// exactly; no timing fields are included.
    pub fn to_json(&self) -> String {
        let text = |s: &str| serde_json::to_string(s).expect("strings serialize");
        format!(
            "{{\"verdict\":{},\"report\":{},\"feedback\":{},\"measured_depth\":{},\"diagnostic\":{}}}",
            text(self.report.verdict.code()),
            report_json(&self.report),
            self.feedback.as_deref().map_or("null".to_string(), text),
            self.report.measured_depth.map_or("null".to_string(), |d| d.to_string()),
            text(&self.report.diagnostic),
        )
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("malformed request: {0}")]
    BadRequest(String),
    #[error("python submissions need the adapter: {0}")]
    AdapterUnavailable(String),
    #[error("missing or wrong shared secret")]
    Unauthorized,
}

/// What clients may see about a problem; never includes reference data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSummary {
    pub id: String,
    pub statement: String,
    pub n_qubits: usize,
    pub constraints: Vec<String>,
    pub code_template: String,
}

impl From<&ProblemSpec> for ProblemSummary {
    fn from(p: &ProblemSpec) -> Self {
        ProblemSummary {
            id: p.id.clone(),
            statement: p.statement.clone(),
            n_qubits: p.n_qubits,
            constraints: p.constraint_lines(),
            code_template: p.code_template.clone(),
        }
    }
}

/// Immutable evaluation context; cheap to share behind an `Arc`.
#[derive(Debug)]
pub struct Engine {
    pub bank: Bank,
    pub options: EvalOptions,
    pub adapter: Option<AdapterClient>,
    pub timeout: Duration,
}

impl Engine {
    pub fn new(bank: Bank) -> Self {
        Engine {
            bank,
            options: EvalOptions::default(),
            adapter: None,
            timeout: Duration::from_secs(10),
        }
    }

    pub fn from_config(config: &ServiceConfig) -> Result<Self, BankError> {
        let bank = Bank::load(&config.bank)?;
        Ok(Engine {
            bank,
            options: EvalOptions {
                qubit_cap: config.qubit_cap,
                ..EvalOptions::default()
            },
            adapter: config
                .adapter
                .as_deref()
                .and_then(|c| AdapterClient::from_command_line(c, config.timeout())),
            timeout: config.timeout(),
        })
    }

    pub fn problems(&self) -> Vec<ProblemSummary> {
        self.bank
            .entries()
            .map(|e| ProblemSummary::from(&e.spec))
            .collect()
    }

    pub fn problem(&self, id: &str) -> Result<&ProblemSpec, ServiceError> {
        self.bank
            .problem(id)
            .ok_or_else(|| ServiceError::UnknownProblem(id.to_string()))
    }

    pub fn evaluate_source(
        &self,
        problem: &ProblemSpec,
        language: Language,
        source: &str,
    ) -> Result<EvaluationReport, ServiceError> {
        let options = self.options.with_timeout(self.timeout);
        match language {
            Language::Qasm => Ok(evaluate_with(
                &SourceProgram::native(source),
                problem,
                &options,
            )),
            Language::QiskitPython => {
                let adapter = self.adapter.as_ref().ok_or_else(|| {
                    ServiceError::AdapterUnavailable("no adapter is configured".into())
                })?;
                adapter
                    .evaluate(source, problem, &options)
                    .map_err(|e| match e {
                        AdapterError::Unavailable { .. } => {
                            ServiceError::AdapterUnavailable(e.to_string())
                        }
                        AdapterError::Protocol(_) => {
                            ServiceError::AdapterUnavailable(e.to_string())
                        }
                    })
            }
        }
    }

    pub fn evaluate(&self, request: &EvaluateRequest) -> Result<EvaluateResponse, ServiceError> {
        let problem = self.problem(&request.problem_id)?;
        let report = self.evaluate_source(problem, request.language, &request.source)?;
        Ok(EvaluateResponse::new(report, &request.source))
    }
}
