//! HTTP+JSON front end for reformulation sessions.
//!
//! Routes:
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/api/projects/{p}/versions/{v}/sessions` | report |
//! | GET | `/api/sessions/{id}` | |
//! | POST | `/api/sessions/{id}/feedback` | `[{kind, class_name}]` |
//! | POST | `/api/sessions/{id}/confirm` | `{file_id}` |
//! | GET | `/api/health` | |
//!
//! Errors are `{code, message, retriable}`.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::http::{header, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use faultline_core::corpus::FileId;
use faultline_core::ltr::RankedFile;
use faultline_core::query::{Feedback, Query};
use faultline_core::session::{ReportPayload, Session, SessionManager};
use faultline_core::Error;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    pub retriable: bool,
    #[serde(skip)]
    status: u16,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            code: code.into(),
            message: message.into(),
            retriable: false,
            status: status.as_u16(),
        }
    }

    pub fn status(&self) -> StatusCode {
        StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match &e {
            Error::UnknownCorpus { .. } | Error::SessionNotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            Error::SessionBusy(_) => (StatusCode::CONFLICT, "busy"),
            Error::SessionClosed { .. } | Error::SessionExhausted { .. } => (StatusCode::CONFLICT, "conflict"),
            Error::InvalidFeedback(_)
            | Error::InvalidReport { .. }
            | Error::InvalidTimestamp(_)
            | Error::NotInTopTen(_)
            | Error::Config(_)
            | Error::EmptyQueryAfterValidation => (StatusCode::UNPROCESSABLE_ENTITY, "validation"),
            Error::Provider { .. } | Error::ReplyUnparseable => (StatusCode::BAD_GATEWAY, "provider"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        let mut out = ApiError::new(status, code, e.to_string());
        out.retriable = e.is_retriable() || matches!(e, Error::SessionBusy(_));
        out
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "validation", r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

/// A session plus its latest query and top files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionView {
    #[serde(flatten)]
    pub session: Session,
    pub query: Query,
    pub ranking: Vec<RankedFile>,
}

impl From<Session> for SessionView {
    fn from(session: Session) -> Self {
        SessionView {
            query: session.current_query().clone(),
            ranking: session.top().to_vec(),
            session,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfirmRequest {
    pub file_id: FileId,
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Run a blocking session operation off the async workers.
async fn blocking<T, F>(manager: &Arc<SessionManager>, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&SessionManager) -> faultline_core::Result<T> + Send + 'static,
{
    let m = Arc::clone(manager);
    match tokio::task::spawn_blocking(move || f(&m)).await {
        Ok(r) => r.map_err(ApiError::from),
        Err(e) => Err(ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            "internal",
            e.to_string(),
        )),
    }
}

async fn create_session(
    State(m): State<Arc<SessionManager>>,
    Path((project, version)): Path<(String, String)>,
    body: Result<Json<ReportPayload>, JsonRejection>,
) -> ApiResult<SessionView> {
    let Json(payload) = body?;
    let s = blocking(&m, move |m| m.create(&project, &version, payload)).await?;
    Ok(Json(s.into()))
}

async fn get_session(State(m): State<Arc<SessionManager>>, Path(id): Path<String>) -> ApiResult<SessionView> {
    let s = blocking(&m, move |m| m.get(&id)).await?;
    Ok(Json(s.into()))
}

async fn post_feedback(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    body: Result<Json<Vec<Feedback>>, JsonRejection>,
) -> ApiResult<SessionView> {
    let Json(feedback) = body?;
    let s = blocking(&m, move |m| m.feedback(&id, feedback)).await?;
    Ok(Json(s.into()))
}

async fn post_confirm(
    State(m): State<Arc<SessionManager>>,
    Path(id): Path<String>,
    body: Result<Json<ConfirmRequest>, JsonRejection>,
) -> ApiResult<SessionView> {
    let Json(req) = body?;
    let s = blocking(&m, move |m| m.confirm(&id, req.file_id)).await?;
    Ok(Json(s.into()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub sessions: usize,
    pub corpora: Vec<String>,
}

async fn health(State(m): State<Arc<SessionManager>>) -> Json<Health> {
    Json(Health {
        status: "ok".into(),
        sessions: m.session_count(),
        corpora: m.corpora().keys().map(|(p, v)| format!("{p}/{v}")).collect(),
    })
}

async fn not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
}

/// Serve a file under `root` for `GET` requests outside `/api`; `/` maps to `index.html`.
async fn static_file(root: Arc<PathBuf>, uri: Uri) -> Response {
    let rel = uri.path().trim_start_matches('/');
    let rel = if rel.is_empty() { "index.html" } else { rel };
    if rel.starts_with("api/") || rel.split('/').any(|part| part == ".." || part.is_empty()) {
        return not_found().await.into_response();
    }
    let path = root.join(rel);
    match tokio::fs::read(&path).await {
        Ok(bytes) => {
            let mime = match path.extension().and_then(|e| e.to_str()) {
                Some("html") => "text/html; charset=utf-8",
                Some("js") | Some("mjs") => "text/javascript",
                Some("css") => "text/css",
                Some("json") => "application/json",
                Some("svg") => "image/svg+xml",
                _ => "application/octet-stream",
            };
            ([(header::CONTENT_TYPE, mime)], bytes).into_response()
        }
        Err(_) => not_found().await.into_response(),
    }
}

/// The API router. With `static_dir`, files under it are served at `/`.
pub fn router(manager: Arc<SessionManager>, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/health", get(health))
        .route(
            "/api/projects/{project}/versions/{version}/sessions",
            post(create_session),
        )
        .route("/api/sessions/{id}", get(get_session))
        .route("/api/sessions/{id}/feedback", post(post_feedback))
        .route("/api/sessions/{id}/confirm", post(post_confirm))
        .with_state(manager);
    match static_dir {
        Some(dir) => {
            let root = Arc::new(dir);
            api.fallback(move |uri: Uri| static_file(Arc::clone(&root), uri))
        }
        None => api.fallback(not_found),
    }
}

/// Serve until the process is stopped.
pub async fn serve(addr: SocketAddr, app: Router) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app).await
}
