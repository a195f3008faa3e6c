//! HTTP JSON API for the two-phase annotation protocol.
//!
//! | method | path | body / query | success |
//! |---|---|---|---|
//! | GET | `/api/tasks/next` | `?annotator=ID` | 200 `{task_id, phase, sentence}` or 204 |
//! | POST | `/api/annotators` | `{annotator_id}` | 201 |
//! | POST | `/api/scores` | annotation record | 201 `{replaced}` |
//! | GET | `/api/stats` | | 200 per-annotator and average means |
//! | GET | `/api/export` | | 200 JSON lines |
//! | POST | `/api/kappa` | `{a, b}` label arrays | 200 `{kappa}` |
//!
//! Errors are `{"error": message}` with an optional `field`.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hokmix::annotation::{
    cohen_kappa, AgreementLabel, AnnotationRecord, AnnotationStore, KappaError, ScoreSummary,
    StoreError,
};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<&'static str>,
}

pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, error: impl ToString) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error: error.to_string(),
                field: None,
            },
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(rejection: JsonRejection) -> Self {
        ApiError::new(rejection.status(), rejection.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(rejection: QueryRejection) -> Self {
        ApiError::new(rejection.status(), rejection.body_text())
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        let status = match &err {
            StoreError::UnknownAnnotator(_) => StatusCode::FORBIDDEN,
            StoreError::UnknownTask(_) => StatusCode::NOT_FOUND,
            StoreError::PhaseLocked { .. } => StatusCode::CONFLICT,
            StoreError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            StoreError::Io { .. } | StoreError::Log { .. } => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let field = match &err {
            StoreError::Invalid(e) => Some(e.field()),
            _ => None,
        };
        ApiError {
            status,
            body: ErrorBody {
                error: err.to_string(),
                field,
            },
        }
    }
}

#[derive(Debug, Deserialize)]
struct NextQuery {
    annotator: String,
}

#[derive(Debug, Deserialize)]
struct Registration {
    annotator_id: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Accepted {
    pub replaced: bool,
}

/// A rater label: one of the three agreement labels or an already binarized
/// boolean.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum LabelInput {
    Label(AgreementLabel),
    Binary(bool),
}

impl LabelInput {
    fn binarize(self) -> bool {
        match self {
            LabelInput::Label(l) => l.binarize(),
            LabelInput::Binary(b) => b,
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct KappaRequest {
    pub a: Vec<LabelInput>,
    pub b: Vec<LabelInput>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KappaResponse {
    pub kappa: f64,
}

async fn next_task(
    State(store): State<Arc<AnnotationStore>>,
    query: Result<Query<NextQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let Query(q) = query?;
    Ok(match store.next_task(&q.annotator)? {
        Some(task) => Json(task).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn register(
    State(store): State<Arc<AnnotationStore>>,
    body: Result<Json<Registration>, JsonRejection>,
) -> Result<StatusCode, ApiError> {
    let Json(reg) = body?;
    store.register(&reg.annotator_id).map_err(|e| {
        let mut err = ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, &e);
        err.body.field = Some(e.field());
        err
    })?;
    Ok(StatusCode::CREATED)
}

async fn record_score(
    State(store): State<Arc<AnnotationStore>>,
    body: Result<Json<AnnotationRecord>, JsonRejection>,
) -> Result<(StatusCode, Json<Accepted>), ApiError> {
    let Json(record) = body?;
    // appends fsync the log, so keep them off the async workers
    let accepted = tokio::task::spawn_blocking(move || store.record_score(record))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))??;
    Ok((
        StatusCode::CREATED,
        Json(Accepted {
            replaced: accepted.replaced,
        }),
    ))
}

async fn stats(State(store): State<Arc<AnnotationStore>>) -> Json<ScoreSummary> {
    Json(store.stats())
}

async fn export(State(store): State<Arc<AnnotationStore>>) -> impl IntoResponse {
    (
        [(header::CONTENT_TYPE, "application/x-ndjson; charset=utf-8")],
        store.export_jsonl(),
    )
}

async fn kappa(
    body: Result<Json<KappaRequest>, JsonRejection>,
) -> Result<Json<KappaResponse>, ApiError> {
    let Json(req) = body?;
    let bin = |v: &[LabelInput]| v.iter().map(|l| l.binarize()).collect::<Vec<_>>();
    let kappa = cohen_kappa(&bin(&req.a), &bin(&req.b)).map_err(|e| {
        let status = match e {
            KappaError::Degenerate => StatusCode::UNPROCESSABLE_ENTITY,
            KappaError::LengthMismatch(..) | KappaError::Empty => StatusCode::BAD_REQUEST,
        };
        ApiError::new(status, e)
    })?;
    Ok(Json(KappaResponse { kappa }))
}

/// Routes with permissive CORS so a browser frontend on another origin can
/// call them.
pub fn router(store: Arc<AnnotationStore>) -> Router {
    Router::new()
        .route("/api/tasks/next", get(next_task))
        .route("/api/annotators", post(register))
        .route("/api/scores", post(record_score))
        .route("/api/stats", get(stats))
        .route("/api/export", get(export))
        .route("/api/kappa", post(kappa))
        .layer(CorsLayer::permissive())
        .with_state(store)
}

/// Serves until the process is stopped.
pub async fn serve(store: Arc<AnnotationStore>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(store)).await
}
