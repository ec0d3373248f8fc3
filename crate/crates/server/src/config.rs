use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use qjudge_core::sim::MAX_QUBITS;

pub const ENV_BANK: &str = "QJUDGE_BANK";
pub const ENV_BIND: &str = "QJUDGE_BIND";
pub const ENV_PORT: &str = "QJUDGE_PORT";
pub const ENV_QUBIT_CAP: &str = "QJUDGE_QUBIT_CAP";
pub const ENV_TIMEOUT_MS: &str = "QJUDGE_TIMEOUT_MS";
pub const ENV_ADAPTER: &str = "QJUDGE_ADAPTER";
pub const ENV_SHARED_SECRET: &str = "QJUDGE_SHARED_SECRET";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{var}: {message}")]
    Env { var: &'static str, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bank: PathBuf,
    pub bind: String,
    pub port: u16,
    pub qubit_cap: usize,
    pub timeout_ms: u64,
    /// Command line of the Python adapter; Python submissions are refused
    /// when unset.
    pub adapter: Option<String>,
    /// When set, requests must carry it in the `x-qjudge-secret` header.
    pub shared_secret: Option<String>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bank: PathBuf::from("problems"),
            bind: "127.0.0.1".into(),
            port: 8080,
            qubit_cap: MAX_QUBITS,
            timeout_ms: 10_000,
            adapter: None,
            shared_secret: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        ServiceConfig::from_toml(&text, path)
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }

    /// Applies `QJUDGE_*` overrides read through `lookup`.
    pub fn with_overrides(
        mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ConfigError> {
        fn number<T: std::str::FromStr>(var: &'static str, value: &str) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            value.parse().map_err(|e: T::Err| ConfigError::Env {
                var,
                message: e.to_string(),
            })
        }
        if let Some(v) = lookup(ENV_BANK) {
            self.bank = PathBuf::from(v);
        }
        if let Some(v) = lookup(ENV_BIND) {
            self.bind = v;
        }
        if let Some(v) = lookup(ENV_PORT) {
            self.port = number(ENV_PORT, &v)?;
        }
        if let Some(v) = lookup(ENV_QUBIT_CAP) {
            self.qubit_cap = number(ENV_QUBIT_CAP, &v)?;
        }
        if let Some(v) = lookup(ENV_TIMEOUT_MS) {
            self.timeout_ms = number(ENV_TIMEOUT_MS, &v)?;
        }
        if let Some(v) = lookup(ENV_ADAPTER) {
            self.adapter = Some(v).filter(|s| !s.trim().is_empty());
        }
        if let Some(v) = lookup(ENV_SHARED_SECRET) {
            self.shared_secret = Some(v).filter(|s| !s.is_empty());
        }
        Ok(self)
    }

    pub fn with_env(self) -> Result<Self, ConfigError> {
        self.with_overrides(|k| std::env::var(k).ok())
    }
}
