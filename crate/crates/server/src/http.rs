use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::json;
use tokio::net::TcpListener;

use qjudge_core::EvaluationReport;

use crate::service::{Engine, EvaluateRequest, EvaluateResponse, ServiceError};

pub const SECRET_HEADER: &str = "x-qjudge-secret";

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownProblem(_) => StatusCode::NOT_FOUND,
            ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::AdapterUnavailable(_) => StatusCode::SERVICE_UNAVAILABLE,
            ServiceError::Unauthorized => StatusCode::UNAUTHORIZED,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Clone)]
struct AppState {
    engine: Arc<Engine>,
    secret: Option<Arc<str>>,
}

fn json_body(text: String) -> Response {
    (
        [(
            header::CONTENT_TYPE,
            HeaderValue::from_static("application/json"),
        )],
        text,
    )
        .into_response()
}

async fn evaluate(State(state): State<AppState>, body: Bytes) -> Result<Response, ServiceError> {
    let request: EvaluateRequest =
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
    let engine = state.engine.clone();
    let timeout = engine.timeout;
    let source = request.source.clone();
    let task = tokio::task::spawn_blocking(move || engine.evaluate(&request));
    let response = match tokio::time::timeout(timeout, task).await {
        Ok(joined) => {
            joined.map_err(|e| ServiceError::BadRequest(format!("evaluation aborted: {e}")))??
        }
        Err(_) => EvaluateResponse::new(
            EvaluationReport::runtime_error(format!(
                "evaluation timed out after {} ms",
                timeout.as_millis()
            )),
            &source,
        ),
    };
    Ok(json_body(response.to_json()))
}

async fn problems(State(state): State<AppState>) -> Response {
    Json(state.engine.problems()).into_response()
}

async fn require_secret(State(state): State<AppState>, request: Request, next: Next) -> Response {
    if let Some(secret) = &state.secret {
        let given = request
            .headers()
            .get(SECRET_HEADER)
            .and_then(|v| v.to_str().ok());
        if given != Some(secret.as_ref()) {
            return ServiceError::Unauthorized.into_response();
        }
    }
    next.run(request).await
}

pub fn router(engine: Arc<Engine>, shared_secret: Option<String>) -> Router {
    let state = AppState {
        engine,
        secret: shared_secret.map(Arc::from),
    };
    Router::new()
        .route("/evaluate", post(evaluate))
        .route("/problems", get(problems))
        .layer(middleware::from_fn_with_state(
            state.clone(),
            require_secret,
        ))
        .with_state(state)
}

/// Binds `addr` and serves until the task is dropped. Returns the bound
/// address, which differs from `addr` when port 0 was requested.
pub async fn spawn(
    engine: Arc<Engine>,
    shared_secret: Option<String>,
    addr: SocketAddr,
) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<std::io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let app = router(engine, shared_secret);
    Ok((
        local,
        tokio::spawn(async move { axum::serve(listener, app).await }),
    ))
}
