//! Read-only HTTP service over a fixed set of models.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use tower_http::cors::CorsLayer;

use rww_core::domain::Rubric;
use rww_core::interface::{ModelRegistry, PredictRequest};
use rww_core::Error;

#[derive(Clone)]
pub struct AppState {
    pub registry: Arc<ModelRegistry>,
    pub rubric: Arc<Rubric>,
}

#[derive(Serialize)]
struct ModelSummary {
    id: String,
    name: String,
    terms: usize,
    r2: f64,
    adj_r2: f64,
    n: usize,
    intervals: bool,
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(ErrorBody { error: self.1 })).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownModel(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError(status, e.to_string())
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/rubric", get(rubric))
        .route("/models", get(models))
        .route("/models/{id}", get(model))
        .route("/models/{id}/predict", post(predict))
        .route("/models/{id}/whatif", post(whatif))
        // read-only and unauthenticated, so any origin may call it
        .layer(CorsLayer::permissive())
        .with_state(state)
}

async fn rubric(State(s): State<AppState>) -> Json<Rubric> {
    Json((*s.rubric).clone())
}

async fn models(State(s): State<AppState>) -> Json<Vec<ModelSummary>> {
    let list = s
        .registry
        .ids()
        .map(|id| {
            let m = s.registry.get(id).expect("listed ids resolve");
            ModelSummary {
                id: id.to_string(),
                name: m.name.clone(),
                terms: m.terms.len(),
                r2: m.stats.r2,
                adj_r2: m.stats.adj_r2,
                n: m.stats.n,
                intervals: m.design.is_some() && m.stats.residual_sigma.is_some(),
            }
        })
        .collect();
    Json(list)
}

async fn model(State(s): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(s.registry.get(&id)?.clone()).into_response())
}

fn parse_request(body: &[u8]) -> Result<PredictRequest, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, format!("malformed request: {e}")))
}

async fn predict(State(s): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    s.registry.get(&id)?;
    let request = parse_request(&body)?;
    Ok(Json(s.registry.predict(&id, &request)?).into_response())
}

async fn whatif(State(s): State<AppState>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    s.registry.get(&id)?;
    let request = parse_request(&body)?;
    Ok(Json(s.registry.whatif(&id, &request)?).into_response())
}

pub async fn serve(port: u16, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
