use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use gstats_core::atlas::{build_atlas, decode_graph6, BuildOptions};
use gstats_core::Graph;
use gstats_service::{router, AppState};

fn app_with(orders: &[usize]) -> (tempfile::TempDir, Router) {
    let dir = tempfile::tempdir().unwrap();
    for &n in orders {
        build_atlas(dir.path(), n, BuildOptions::default()).unwrap();
    }
    let app = router(AppState::new(dir.path()));
    (dir, app)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(v) => Body::from(v.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    let json = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, json, bytes)
}

#[tokio::test]
async fn lists_atlases() {
    let (_dir, app) = app_with(&[4, 5, 6]);
    let (status, body, _) = call(&app, "GET", "/api/atlases", None).await;
    assert_eq!(status, StatusCode::OK);
    let counts: Vec<u64> = body.as_array().unwrap().iter().map(|e| e["count"].as_u64().unwrap()).collect();
    assert_eq!(counts, [11, 34, 156]);
    assert!(body[1]["apl_ref"].as_f64().unwrap() > 0.0);

    let (_dir, empty) = app_with(&[]);
    let (status, body, _) = call(&empty, "GET", "/api/atlases", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, json!([]));
}

#[tokio::test]
async fn correlations_truth_and_overlay() {
    let (_dir, app) = app_with(&[5, 6]);
    let (status, body, _) = call(&app, "GET", "/api/atlases/6/correlations", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["truth"]["sample_size"], 156);
    assert_eq!(body["truth_scatter"]["total"], 156);
    assert!(body["overlay"].is_null());
    assert_eq!(body["truth"]["values"][0][0], 1.0);

    let uri = "/api/atlases/6/correlations?source=er-half&rate=0.5&seed=3";
    let (status, body, first) = call(&app, "GET", uri, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["overlay"]["count"], 78);
    assert_eq!(body["overlay"]["scatter"]["points"].as_array().unwrap().len(), 78);
    let (_, _, second) = call(&app, "GET", uri, None).await;
    assert_eq!(first, second, "identical requests must give identical bytes");
}

#[tokio::test]
async fn missing_atlas_is_404() {
    let (_dir, app) = app_with(&[4]);
    let (status, body, _) = call(&app, "GET", "/api/atlases/99/correlations", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "MissingAtlas");
    assert_eq!(body["status"], 404);
    assert!(body["message"].is_string());
    let (status, _, _) = call(&app, "POST", "/api/atlases/7/query", Some(json!({"vary": "den"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn query_slots_with_adjacency() {
    let (_dir, app) = app_with(&[5]);
    let (status, body, _) = call(&app, "POST", "/api/atlases/5/query", Some(json!({"constraints": [], "vary": "den"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["total_matches"], 34);
    let slots = body["slots"].as_array().unwrap();
    assert_eq!(slots.len(), 10);
    for s in slots.iter().filter(|s| s["count"].as_u64().unwrap() > 0) {
        let g = decode_graph6(s["exemplar"].as_str().unwrap()).unwrap();
        let adj: Vec<Vec<usize>> = serde_json::from_value(s["adjacency"].clone()).unwrap();
        let rebuilt = Graph::from_edge_list(adj.len(), adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().map(move |&v| (u, v)))).unwrap();
        assert_eq!(rebuilt, g);
    }

    let body = json!({"constraints": [{"stat": "den", "min": 0, "max": 0}], "vary": "gcc"});
    let (_, res, _) = call(&app, "POST", "/api/atlases/5/query", Some(body)).await;
    assert_eq!(res["total_matches"], 1);
}

#[tokio::test]
async fn bad_queries_are_400() {
    let (_dir, app) = app_with(&[5]);
    let cases = [
        json!({"constraints": [{"stat": "gcc", "min": 0.8, "max": 0.2}], "vary": "r"}),
        json!({"constraints": [{"stat": "wiener", "min": 0, "max": 1}], "vary": "r"}),
        json!({"vary": "nope"}),
        json!({"constraints": "oops"}),
    ];
    for body in cases {
        let (status, res, _) = call(&app, "POST", "/api/atlases/5/query", Some(body)).await;
        assert_eq!(status, StatusCode::BAD_REQUEST);
        assert_eq!(res["code"], "BadQuery");
    }
    let (status, res, _) = call(&app, "GET", "/api/atlases/five/correlations", None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(res["code"], "BadQuery");
}

#[tokio::test]
async fn generate_examples() {
    let (_dir, app) = app_with(&[5]);
    let (status, body, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "ba", "n": 9, "count": 100, "seed": 1}))).await;
    assert_eq!(status, StatusCode::OK);
    let stats = body["stats"].as_array().unwrap();
    assert_eq!(stats.len(), 100);
    assert!(stats.iter().all(|s| [8, 14, 18, 20].contains(&s["m"].as_u64().unwrap())));
    assert!(body["coverage"].is_null());

    let (_, body, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "er", "n": 9, "count": 1, "seed": 7, "params": {"p": 1}}))).await;
    let k9 = decode_graph6(body["graph6"][0].as_str().unwrap()).unwrap();
    assert_eq!(k9, Graph::complete(9).unwrap());

    let (status, body, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "gnm-population", "n": 5, "count": 50, "seed": 2}))).await;
    assert_eq!(status, StatusCode::OK);
    let cov = body["coverage"]["volume_ratio"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&cov));

    let (status, body, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "ba", "n": 9, "count": 1_000_000_000u64, "seed": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "BadQuery");
    let (status, body, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "ba", "n": 13, "count": 1, "seed": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "OrderTooLarge");
    let (status, _, _) = call(&app, "POST", "/api/generate", Some(json!({"model": "gnm-population", "n": 7, "count": 5, "seed": 1}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}
