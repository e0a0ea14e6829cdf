mod common;

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use tower::ServiceExt;

use common::{campaign, run_cli, write_json};
use rww_cli::server::{router, AppState};
use rww_core::domain::{Rating, Rubric};
use rww_core::interface::{ModelRegistry, PredictResponse, WhatIfResponse};

fn app() -> axum::Router {
    router(AppState {
        registry: Arc::new(ModelRegistry::with_bundled()),
        rubric: Arc::new(Rubric::bundled()),
    })
}

async fn call(method: &str, uri: &str, body: Option<String>) -> (StatusCode, serde_json::Value) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap())
}

fn body(level: Rating) -> String {
    serde_json::to_string(&campaign(level)).unwrap()
}

#[tokio::test]
async fn predict_endpoint() {
    let (status, v) = call("POST", "/models/paper-baseline/predict", Some(body(Rating::Full))).await;
    assert_eq!(status, StatusCode::OK);
    let r: PredictResponse = serde_json::from_value(v).unwrap();
    assert!((r.ln_amount - 9.85).abs() <= 1e-12);
    assert_eq!(r.per_term_contributions.len(), 15);
}

#[tokio::test]
async fn whatif_endpoint() {
    let (status, v) = call("POST", "/models/paper-baseline/whatif", Some(body(Rating::None))).await;
    assert_eq!(status, StatusCode::OK);
    let w: WhatIfResponse = serde_json::from_value(v).unwrap();
    assert_eq!(w.entries[0].question.to_string(), "Q01");
    assert!((w.entries[0].delta_ln_amount - 1.045).abs() <= 1e-12);
}

#[tokio::test]
async fn listing_endpoints() {
    let (status, v) = call("GET", "/models", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v[0]["id"], "paper-baseline");
    assert_eq!(v[0]["intervals"], false);

    let (status, v) = call("GET", "/models/paper-baseline", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["name"], "paper-baseline");
    assert_eq!(v["terms"].as_array().unwrap().len(), 15);

    let (status, v) = call("GET", "/rubric", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(v["questions"].as_array().unwrap().len(), 26);
}

#[tokio::test]
async fn error_statuses() {
    let (status, v) = call("POST", "/models/nope/predict", Some(body(Rating::Full))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert!(v["error"].as_str().unwrap().contains("nope"));

    let (status, v) = call("POST", "/models/paper-baseline/predict", Some("{not json".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().starts_with("malformed request"));

    let (status, _) = call("POST", "/models/paper-baseline/predict", Some(r#"{"extra": 1}"#.into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let mut req = campaign(Rating::Full);
    req.ratings.remove(&"Q08".parse().unwrap());
    let (status, v) = call("POST", "/models/paper-baseline/predict", Some(serde_json::to_string(&req).unwrap())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].as_str().unwrap().contains("ratings.Q08"));

    let mut req = campaign(Rating::Full);
    req.controls.goal = 0.0;
    let (status, _) = call("POST", "/models/paper-baseline/predict", Some(serde_json::to_string(&req).unwrap())).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, _) = call("GET", "/models/nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn cli_and_http_agree() {
    let dir = tempfile::tempdir().unwrap();
    for level in Rating::ALL {
        let path = dir.path().join("c.json");
        write_json(&path, &campaign(level));
        let (code, out, _) = run_cli(&["--format", "json", "predict", "--campaign", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let cli: PredictResponse = serde_json::from_str(&out).unwrap();
        let (_, v) = call("POST", "/models/paper-baseline/predict", Some(body(level))).await;
        let http: PredictResponse = serde_json::from_value(v).unwrap();
        assert!((cli.ln_amount - http.ln_amount).abs() <= 1e-12);
    }
}

#[tokio::test]
async fn cross_origin_requests_allowed() {
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/models/paper-baseline/predict")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .header("access-control-request-headers", "content-type")
        .body(Body::empty())
        .unwrap();
    let resp = app().oneshot(req).await.unwrap();
    assert!(resp.status().is_success());
    assert_eq!(resp.headers()["access-control-allow-origin"], "*");
}
