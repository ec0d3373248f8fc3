//! Append-only JSON-lines session logs.
//!
//! Each line is one [`SessionEvent`] plus a `timestamp_ms` field.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::session::{Outcome, RefinementSession, SessionEvent};

pub const LOG_EXTENSION: &str = "jsonl";

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub timestamp_ms: u128,
    #[serde(flatten)]
    pub event: SessionEvent,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or_default()
}

pub struct SessionLog {
    path: PathBuf,
    file: File,
}

impl SessionLog {
    /// Creates a fresh log named after the problem in `dir`; never reuses
    /// an existing file.
    pub fn create_in(dir: &Path, problem_id: &str) -> Result<Self, LogError> {
        let io = |source| LogError::Io {
            path: dir.to_path_buf(),
            source,
        };
        std::fs::create_dir_all(dir).map_err(io)?;
        let stamp = now_ms();
        for n in 0.. {
            let path = dir.join(format!("{problem_id}-{stamp}-{n}.{LOG_EXTENSION}"));
            match OpenOptions::new().append(true).create_new(true).open(&path) {
                Ok(file) => return Ok(SessionLog { path, file }),
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(LogError::Io { path, source: e }),
            }
        }
        unreachable!()
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, event: &SessionEvent) -> Result<(), LogError> {
        let line = LogLine {
            timestamp_ms: now_ms(),
            event: event.clone(),
        };
        let mut text = serde_json::to_string(&line).expect("events serialize");
        text.push('\n');
        self.file
            .write_all(text.as_bytes())
            .and_then(|_| self.file.flush())
            .map_err(|source| LogError::Io {
                path: self.path.clone(),
                source,
            })
    }
}

/// Writes a finished session as a new log file.
pub fn write_session(dir: &Path, session: &RefinementSession) -> Result<PathBuf, LogError> {
    let mut log = SessionLog::create_in(dir, &session.problem_id)?;
    log.append(&SessionEvent::Started {
        problem_id: session.problem_id.clone(),
        max_rounds: session.max_rounds,
    })?;
    for attempt in &session.attempts {
        log.append(&SessionEvent::Attempted(attempt.clone()))?;
    }
    log.append(&SessionEvent::Finished {
        outcome: session.outcome,
        generator_error: session.generator_error.clone(),
    })?;
    Ok(log.path)
}

/// Rebuilds a session from its log. A log without a `finished` line is
/// read as exhausted.
pub fn read_session(path: &Path) -> Result<RefinementSession, LogError> {
    let file = File::open(path).map_err(|source| LogError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let format = |line: usize, message: String| LogError::Format {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut session: Option<RefinementSession> = None;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|source| LogError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: LogLine =
            serde_json::from_str(&line).map_err(|e| format(i + 1, e.to_string()))?;
        match (parsed.event, session.as_mut()) {
            (
                SessionEvent::Started {
                    problem_id,
                    max_rounds,
                },
                None,
            ) => {
                session = Some(RefinementSession {
                    problem_id,
                    max_rounds,
                    attempts: Vec::new(),
                    outcome: Outcome::Exhausted,
                    generator_error: None,
                });
            }
            (SessionEvent::Attempted(attempt), Some(s)) => s.attempts.push(attempt),
            (
                SessionEvent::Finished {
                    outcome,
                    generator_error,
                },
                Some(s),
            ) => {
                s.outcome = outcome;
                s.generator_error = generator_error;
            }
            (SessionEvent::Started { .. }, Some(_)) => {
                return Err(format(i + 1, "second `started` event".into()))
            }
            (_, None) => return Err(format(i + 1, "event before `started`".into())),
        }
    }
    session.ok_or_else(|| format(0, "empty log".into()))
}

/// Every `*.jsonl` log in `dir`, sorted by file name.
pub fn load_sessions(dir: &Path) -> Result<Vec<RefinementSession>, LogError> {
    let io = |source| LogError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.extension().is_some_and(|e| e == LOG_EXTENSION) {
            paths.push(path);
        }
    }
    paths.sort();
    paths.iter().map(|p| read_session(p)).collect()
}
