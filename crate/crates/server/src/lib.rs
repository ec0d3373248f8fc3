//! Evaluation over HTTP.
//!
//! Routes: `POST /evaluate` takes `{problem_id, language, source}` and
//! returns the verdict, the single-line report and refinement feedback;
//! `GET /problems` lists problem statements and constraints.

pub mod adapter;
pub mod config;
pub mod http;
pub mod service;

pub use config::ServiceConfig;
pub use service::{Engine, EvaluateRequest, EvaluateResponse, Language, ServiceError};
