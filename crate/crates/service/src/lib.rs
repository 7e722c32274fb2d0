//! Stateless HTTP API over a single form specification.
//!
//! | method | path            | body                          |
//! |--------|-----------------|-------------------------------|
//! | GET    | `/api/schema`   |                               |
//! | GET    | `/api/analysis` |                               |
//! | POST   | `/api/fill`     | `{"values": {id: value}}`     |
//! | POST   | `/api/check`    | `{"provided": [id], "mode"?}` |
//!
//! The spec and every response that depends only on it are computed once
//! at startup and shared read-only between requests.

pub mod payload;

use std::io;
use std::path::Path;
use std::sync::Arc;

use autofill_core::form::{spec_report, FormSpec};
use axum::body::Bytes;
use axum::extract::State;
use axum::http::header::{self, HeaderValue};
use axum::http::{request, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::de::DeserializeOwned;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;
use tower_http::trace::TraceLayer;

pub use payload::{ApiError, CheckPayload, ErrorCode, SchemaPayload};

struct AppState {
    spec: FormSpec,
    schema: String,
    analysis: String,
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self.code {
            ErrorCode::UnknownField | ErrorCode::TypeError | ErrorCode::ParseError => StatusCode::BAD_REQUEST,
            ErrorCode::Internal => StatusCode::UNPROCESSABLE_ENTITY,
        }
    }
}

fn json_response(status: StatusCode, body: String) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], body).into_response()
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        json_response(self.status(), payload::to_json(&self))
    }
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::parse(format!("invalid request body: {e}")))
}

async fn schema(State(state): State<Arc<AppState>>) -> Response {
    json_response(StatusCode::OK, state.schema.clone())
}

async fn analysis(State(state): State<Arc<AppState>>) -> Response {
    json_response(StatusCode::OK, state.analysis.clone())
}

async fn fill(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let request: payload::FillRequest = parse_body(&body)?;
    let report = payload::fill_json(&state.spec, &request.values)?;
    Ok(json_response(StatusCode::OK, payload::to_json(&report)))
}

async fn check(State(state): State<Arc<AppState>>, body: Bytes) -> Result<Response, ApiError> {
    let request: payload::CheckRequest = parse_body(&body)?;
    let result = payload::check(&state.spec, &request.provided, request.mode)?;
    Ok(json_response(StatusCode::OK, payload::to_json(&result)))
}

fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else {
        return false;
    };
    let Some(rest) = origin.strip_prefix("http://").or_else(|| origin.strip_prefix("https://")) else {
        return false;
    };
    let host = rest.rsplit_once(':').map_or(rest, |(host, port)| {
        if port.chars().all(|c| c.is_ascii_digit()) {
            host
        } else {
            rest
        }
    });
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

fn local_cors() -> CorsLayer {
    CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin: &HeaderValue, _: &request::Parts| {
            is_local_origin(origin)
        }))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE])
}

/// The API routes for `spec`, with request logging and CORS for local
/// origins.
pub fn router(spec: FormSpec) -> Router {
    let state = AppState {
        schema: payload::to_json(&payload::schema_payload(&spec)),
        analysis: payload::to_json(&spec_report(&spec)),
        spec,
    };
    Router::new()
        .route("/api/schema", get(schema))
        .route("/api/analysis", get(analysis))
        .route("/api/fill", post(fill))
        .route("/api/check", post(check))
        .with_state(Arc::new(state))
        .layer(local_cors())
        .layer(TraceLayer::new_for_http())
}

/// [`router`] plus static files from `dir` for every other path.
pub fn router_with_static(spec: FormSpec, dir: &Path) -> Router {
    router(spec).fallback_service(ServeDir::new(dir))
}

/// Serves `app` on `listener` until the process receives Ctrl-C.
pub async fn serve(listener: tokio::net::TcpListener, app: Router) -> io::Result<()> {
    if let Ok(addr) = listener.local_addr() {
        tracing::info!("listening on http://{addr}");
    }
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
            tracing::info!("shutting down");
        })
        .await
}
