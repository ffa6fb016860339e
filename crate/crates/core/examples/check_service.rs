//! Sends one request to the check service in process and prints the reply.
//!
//! cargo run --example check_service

use std::path::Path;

use axum::body::Body;
use axum::http::Request;
use http_body_util::BodyExt;
use tower::ServiceExt;

use wac::pipeline::AnalysisOptions;
use wac::service::{router, ServiceState};
use wac::spec_model::SpecDatabase;

#[tokio::main]
async fn main() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("specs/instagram");
    let db = SpecDatabase::load_dir(&dir).expect("spec directory").database;
    let app = router(ServiceState::new(db, AnalysisOptions::default()));
    let body = serde_json::json!({
        "filename": "editor.js",
        "code": "$.ajax({ url: \"https://api.instagram.com/v1/users/\" + id, type: \"PUT\" });\n",
    });
    let req = Request::post("/v1/check")
        .header("content-type", "application/json")
        .body(Body::from(body.to_string()))
        .unwrap();
    let resp = app.oneshot(req).await.unwrap();
    println!("status {}", resp.status());
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    println!("{}", String::from_utf8_lossy(&bytes));
}
