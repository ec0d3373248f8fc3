//! Sources of candidate programs.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum GeneratorError {
    #[error("scripted generator has no source left after {served} rounds")]
    Exhausted { served: usize },
    #[error("failed to read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("scripted generator needs at least one source")]
    EmptyScript,
    #[error("failed to run `{program}`: {source}")]
    Spawn {
        program: String,
        source: std::io::Error,
    },
    #[error("`{program}` exited with {status}: {stderr}")]
    Exit {
        program: String,
        status: String,
        stderr: String,
    },
    #[error("environment variable {0} is not set")]
    MissingKey(String),
    #[error("request failed: {0}")]
    Http(String),
    #[error("unexpected response: {0}")]
    Response(String),
    #[error(
        "invalid generator spec `{0}`: expected scripted:<path>, command:<program>, or http:<url>"
    )]
    BadSpec(String),
}

/// Produces a program for each prompt.
pub trait Generator {
    fn generate(&mut self, prompt: &str) -> Result<String, GeneratorError>;
}

impl<F> Generator for F
where
    F: FnMut(&str) -> Result<String, GeneratorError>,
{
    fn generate(&mut self, prompt: &str) -> Result<String, GeneratorError> {
        self(prompt)
    }
}

/// Returns the body of the first fenced code block, or the whole text.
pub fn extract_code(text: &str) -> String {
    let mut lines = text.lines();
    if lines.by_ref().any(|l| l.trim_start().starts_with("```")) {
        let body: Vec<&str> = lines
            .take_while(|l| !l.trim_start().starts_with("```"))
            .collect();
        return body.join("\n") + "\n";
    }
    text.to_string()
}

/// Replays a fixed list of sources in order.
#[derive(Debug, Clone)]
pub struct Scripted {
    sources: Vec<String>,
    served: usize,
    repeat_last: bool,
}

impl Scripted {
    pub fn new(sources: Vec<String>) -> Self {
        Scripted {
            sources,
            served: 0,
            repeat_last: false,
        }
    }

    /// Always returns `source`.
    pub fn constant(source: impl Into<String>) -> Self {
        Scripted {
            sources: vec![source.into()],
            served: 0,
            repeat_last: true,
        }
    }

    /// Keeps returning the final source once the script runs out.
    pub fn repeating_last(mut self) -> Self {
        self.repeat_last = true;
        self
    }

    pub fn from_files(paths: &[PathBuf]) -> Result<Self, GeneratorError> {
        let sources = paths
            .iter()
            .map(|p| {
                std::fs::read_to_string(p).map_err(|source| GeneratorError::Read {
                    path: p.clone(),
                    source,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if sources.is_empty() {
            return Err(GeneratorError::EmptyScript);
        }
        Ok(Scripted::new(sources))
    }

    /// Files in `dir` sorted by name; a plain file is a one-item script.
    pub fn from_path(path: &Path) -> Result<Self, GeneratorError> {
        let read_err = |source| GeneratorError::Read {
            path: path.to_path_buf(),
            source,
        };
        if path.is_file() {
            return Scripted::from_files(&[path.to_path_buf()]);
        }
        let mut files = Vec::new();
        for entry in std::fs::read_dir(path).map_err(read_err)? {
            let p = entry.map_err(read_err)?.path();
            if p.is_file() {
                files.push(p);
            }
        }
        files.sort();
        Scripted::from_files(&files)
    }
}

impl Generator for Scripted {
    fn generate(&mut self, _prompt: &str) -> Result<String, GeneratorError> {
        let index = if self.repeat_last {
            self.served.min(self.sources.len().saturating_sub(1))
        } else {
            self.served
        };
        let source = self
            .sources
            .get(index)
            .cloned()
            .ok_or(GeneratorError::Exhausted {
                served: self.served,
            })?;
        self.served += 1;
        Ok(source)
    }
}

/// Runs an external program: prompt on stdin, source on stdout.
#[derive(Debug, Clone)]
pub struct CommandGenerator {
    pub program: String,
    pub args: Vec<String>,
}

impl CommandGenerator {
    pub fn new(program: impl Into<String>, args: Vec<String>) -> Self {
        CommandGenerator {
            program: program.into(),
            args,
        }
    }

    /// Splits on whitespace; the first word is the program.
    pub fn parse(command_line: &str) -> Option<Self> {
        let mut words = command_line.split_whitespace().map(str::to_string);
        let program = words.next()?;
        Some(CommandGenerator {
            program,
            args: words.collect(),
        })
    }
}

impl Generator for CommandGenerator {
    fn generate(&mut self, prompt: &str) -> Result<String, GeneratorError> {
        let spawn_err = |source| GeneratorError::Spawn {
            program: self.program.clone(),
            source,
        };
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(spawn_err)?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let prompt = prompt.to_string();
        let writer = std::thread::spawn(move || {
            // The child may exit without reading; a broken pipe is not our failure.
            let _ = stdin.write_all(prompt.as_bytes());
        });
        let mut stdout = String::new();
        child
            .stdout
            .take()
            .expect("stdout is piped")
            .read_to_string(&mut stdout)
            .map_err(spawn_err)?;
        let mut stderr = String::new();
        child
            .stderr
            .take()
            .expect("stderr is piped")
            .read_to_string(&mut stderr)
            .map_err(spawn_err)?;
        let status = child.wait().map_err(spawn_err)?;
        let _ = writer.join();
        if !status.success() {
            return Err(GeneratorError::Exit {
                program: self.program.clone(),
                status: status.to_string(),
                stderr: stderr.trim().to_string(),
            });
        }
        Ok(extract_code(&stdout))
    }
}

pub const DEFAULT_KEY_VAR: &str = "QJUDGE_API_KEY";
pub const DEFAULT_MODEL_VAR: &str = "QJUDGE_MODEL";

/// Posts the prompt to a chat-completions style endpoint.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the bearer token.
    pub key_var: String,
}

impl HttpGenerator {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        HttpGenerator {
            endpoint: endpoint.into(),
            model: model.into(),
            key_var: DEFAULT_KEY_VAR.to_string(),
        }
    }

    pub fn request_body(&self, prompt: &str) -> Value {
        json!({
            "model": self.model,
            "messages": [{ "role": "user", "content": prompt }],
        })
    }

    /// Pulls the first choice's message text out of a response body.
    pub fn parse_response(body: &str) -> Result<String, GeneratorError> {
        let value: Value =
            serde_json::from_str(body).map_err(|e| GeneratorError::Response(e.to_string()))?;
        value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(extract_code)
            .ok_or_else(|| GeneratorError::Response("missing choices[0].message.content".into()))
    }
}

impl Generator for HttpGenerator {
    fn generate(&mut self, prompt: &str) -> Result<String, GeneratorError> {
        let key = std::env::var(&self.key_var)
            .map_err(|_| GeneratorError::MissingKey(self.key_var.clone()))?;
        let mut response = ureq::post(&self.endpoint)
            .header("Authorization", &format!("Bearer {key}"))
            .header("Content-Type", "application/json")
            .send(self.request_body(prompt).to_string())
            .map_err(|e| GeneratorError::Http(e.to_string()))?;
        let body = response
            .body_mut()
            .read_to_string()
            .map_err(|e| GeneratorError::Http(e.to_string()))?;
        HttpGenerator::parse_response(&body)
    }
}

/// Textual generator selection, as accepted on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorSpec {
    Scripted(PathBuf),
    Command(String),
    Http(String),
}

impl FromStr for GeneratorSpec {
    type Err = GeneratorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GeneratorError::BadSpec(s.to_string());
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        if rest.trim().is_empty() {
            return Err(bad());
        }
        match kind {
            "scripted" => Ok(GeneratorSpec::Scripted(PathBuf::from(rest))),
            "command" => Ok(GeneratorSpec::Command(rest.to_string())),
            "http" => Ok(GeneratorSpec::Http(rest.to_string())),
            _ => Err(bad()),
        }
    }
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Box<dyn Generator>, GeneratorError> {
        Ok(match self {
            GeneratorSpec::Scripted(path) => Box::new(Scripted::from_path(path)?),
            GeneratorSpec::Command(line) => Box::new(
                CommandGenerator::parse(line)
                    .ok_or_else(|| GeneratorError::BadSpec(line.clone()))?,
            ),
            GeneratorSpec::Http(url) => {
                let model =
                    std::env::var(DEFAULT_MODEL_VAR).unwrap_or_else(|_| "gpt-4o-mini".to_string());
                Box::new(HttpGenerator::new(url.clone(), model))
            }
        })
    }
}
