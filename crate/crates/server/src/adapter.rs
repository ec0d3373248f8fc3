//! Client side of the Python adapter protocol.
//!
//! The adapter is a separate program. It reads a submission on stdin and
//! writes one JSON line on stdout:
//! `{"status": "ok" | "runtime_error" | "module_violation", "qasm": ..., "error_text": ...}`.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use qjudge_core::bank::ProblemSpec;
use qjudge_core::eval::{evaluate_with, EvalOptions};
use qjudge_core::qasm::SourceProgram;
use qjudge_core::EvaluationReport;

pub const ENV_IMPORT_ALLOWLIST: &str = "QJUDGE_IMPORT_ALLOWLIST";
pub const DEFAULT_ALLOWLIST: [&str; 4] = ["qiskit", "math", "cmath", "numpy"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterStatus {
    Ok,
    RuntimeError,
    ModuleViolation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdapterResult {
    pub status: AdapterStatus,
    #[serde(default)]
    pub qasm: Option<String>,
    #[serde(default)]
    pub error_text: Option<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum AdapterError {
    #[error("adapter `{program}` could not be started: {source}")]
    Unavailable {
        program: String,
        source: std::io::Error,
    },
    #[error("adapter protocol violation: {0}")]
    Protocol(String),
}

impl AdapterResult {
    pub fn parse(line: &str) -> Result<Self, AdapterError> {
        let result: AdapterResult = serde_json::from_str(line.trim())
            .map_err(|e| AdapterError::Protocol(format!("{e} in {line:?}")))?;
        let consistent = match result.status {
            AdapterStatus::Ok => result.qasm.is_some() && result.error_text.is_none(),
            _ => result.qasm.is_none() && result.error_text.is_some(),
        };
        if !consistent {
            return Err(AdapterError::Protocol(format!(
                "inconsistent fields for status {:?}",
                result.status
            )));
        }
        Ok(result)
    }
}

#[derive(Debug, Clone)]
pub struct AdapterClient {
    pub program: String,
    pub args: Vec<String>,
    pub timeout: Duration,
    pub allowlist: Vec<String>,
}

impl AdapterClient {
    /// Splits `command_line` on whitespace.
    pub fn from_command_line(command_line: &str, timeout: Duration) -> Option<Self> {
        let mut words = command_line.split_whitespace().map(str::to_string);
        Some(AdapterClient {
            program: words.next()?,
            args: words.collect(),
            timeout,
            allowlist: DEFAULT_ALLOWLIST.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Runs the adapter on `source`. A run that outlives the timeout is
    /// killed and reported as a runtime error.
    pub fn execute(&self, source: &str) -> Result<AdapterResult, AdapterError> {
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .env(ENV_IMPORT_ALLOWLIST, self.allowlist.join(","))
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| AdapterError::Unavailable {
                program: self.program.clone(),
                source,
            })?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let input = source.to_string();
        std::thread::spawn(move || {
            let _ = stdin.write_all(input.as_bytes());
        });
        let mut stdout = child.stdout.take().expect("stdout is piped");
        let reader = std::thread::spawn(move || {
            let mut out = String::new();
            stdout.read_to_string(&mut out).map(|_| out)
        });
        let deadline = Instant::now() + self.timeout;
        loop {
            match child.try_wait() {
                Ok(Some(_)) => break,
                Ok(None) if Instant::now() >= deadline => {
                    let _ = child.kill();
                    let _ = child.wait();
                    return Ok(AdapterResult {
                        status: AdapterStatus::RuntimeError,
                        qasm: None,
                        error_text: Some(format!(
                            "execution timed out after {} ms",
                            self.timeout.as_millis()
                        )),
                    });
                }
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
                Err(e) => return Err(AdapterError::Protocol(e.to_string())),
            }
        }
        let out = reader
            .join()
            .map_err(|_| AdapterError::Protocol("stdout reader panicked".into()))?
            .map_err(|e| AdapterError::Protocol(e.to_string()))?;
        let line = out
            .lines()
            .find(|l| !l.trim().is_empty())
            .ok_or_else(|| AdapterError::Protocol("adapter produced no output".into()))?;
        AdapterResult::parse(line)
    }

    /// Executes a Python submission and evaluates the exported circuit.
    pub fn evaluate(
        &self,
        source: &str,
        problem: &ProblemSpec,
        options: &EvalOptions,
    ) -> Result<EvaluationReport, AdapterError> {
        let result = self.execute(source)?;
        let text = result.error_text.unwrap_or_default();
        Ok(match result.status {
            AdapterStatus::Ok => evaluate_with(
                &SourceProgram::adapter_export(result.qasm.unwrap_or_default()),
                problem,
                options,
            ),
            AdapterStatus::RuntimeError => EvaluationReport::runtime_error(text),
            AdapterStatus::ModuleViolation => EvaluationReport::module_violation(text),
        })
    }
}
