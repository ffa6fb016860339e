//! HTTP check service for editor integration.
//!
//! `POST /v1/check` takes `{code, filename?, specs?}` and answers
//! `{diagnostics, analysisMs}`; `GET /v1/health` reports the number of
//! loaded specifications.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::conformance::Diagnostic;
use crate::pipeline::{check_source, AnalysisOptions};
use crate::spec_model::{load_spec, SpecDatabase};

#[derive(Debug, Clone)]
pub struct ServiceState {
    pub database: Arc<SpecDatabase>,
    pub options: AnalysisOptions,
}

impl ServiceState {
    pub fn new(database: SpecDatabase, options: AnalysisOptions) -> Self {
        ServiceState {
            database: Arc::new(database),
            options,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct CheckServiceRequest {
    pub code: String,
    #[serde(default)]
    pub filename: Option<String>,
    #[serde(default)]
    pub specs: Option<Vec<Value>>,
}

pub const DEFAULT_FILENAME: &str = "input.js";

type Reply = (StatusCode, Json<Value>);

fn bad_request(msg: impl Into<String>) -> Reply {
    (StatusCode::BAD_REQUEST, Json(json!({"error": msg.into()})))
}

/// Runs one check request against `state`. Inline specs replace the loaded
/// specs of their hosts for this request only.
pub fn handle_check(state: &ServiceState, req: CheckServiceRequest) -> Result<Vec<Diagnostic>, String> {
    let filename = req.filename.unwrap_or_else(|| DEFAULT_FILENAME.to_string());
    let inline = req.specs.unwrap_or_default();
    let diagnostics = if inline.is_empty() {
        check_source(&req.code, &filename, &state.database, &state.options)
    } else {
        let mut overrides = SpecDatabase::new();
        for (i, doc) in inline.iter().enumerate() {
            let spec = load_spec(doc, &format!("inline{i}")).map_err(|e| format!("specs[{i}]: {e}"))?;
            overrides.insert(spec);
        }
        let db = state.database.shadowed_by(&overrides);
        check_source(&req.code, &filename, &db, &state.options)
    };
    Ok(diagnostics)
}

async fn check(State(state): State<ServiceState>, body: Bytes) -> Reply {
    let req: CheckServiceRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return bad_request(format!("invalid request body: {e}")),
    };
    let started = Instant::now();
    let result = tokio::task::spawn_blocking(move || handle_check(&state, req)).await;
    match result {
        Ok(Ok(diags)) => {
            let diagnostics: Vec<Value> = diags.iter().map(Diagnostic::to_json).collect();
            let ms = started.elapsed().as_millis() as u64;
            (StatusCode::OK, Json(json!({"diagnostics": diagnostics, "analysisMs": ms})))
        }
        Ok(Err(msg)) => bad_request(msg),
        Err(e) => (
            StatusCode::INTERNAL_SERVER_ERROR,
            Json(json!({"error": format!("analysis failed: {e}")})),
        ),
    }
}

async fn health(State(state): State<ServiceState>) -> Json<Value> {
    Json(json!({"status": "ok", "specs": state.database.len()}))
}

pub fn router(state: ServiceState) -> Router {
    Router::new()
        .route("/v1/check", post(check))
        .route("/v1/health", get(health))
        .with_state(state)
}

/// Binds `addr` and serves until the process ends. Bind errors are returned
/// before any request is accepted.
pub async fn serve(addr: SocketAddr, state: ServiceState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
