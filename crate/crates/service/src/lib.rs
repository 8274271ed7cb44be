//! HTTP/JSON facade over atlases, generators, analysis and the finder.
//!
//! Atlases are read from a directory, loaded on first use and shared
//! read-only between requests.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use gstats_core::analysis::{bounding_box_ratio, correlation_matrix, normalize_all, CorrelationMatrix, CoverageReport};
use gstats_core::atlas::{decode_graph6, encode_graph6, list_atlases, load_atlas, Atlas};
use gstats_core::finder::{query, slotize, Constraint, FilterQuery, RtMode, SlotResult};
use gstats_core::generators::{count_for_rate, sample_batch, FixedParams, GeneratorConfig, Model, MAX_REQUEST_COUNT};
use gstats_core::{Error, NormalizedStatVector, StatVector, Statistic, MAX_ORDER};

/// Scatter payloads carry at most this many points per statistic pair.
pub const SCATTER_CAP: usize = 20_000;

#[derive(Debug, Serialize)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_query(message: impl Into<String>) -> Self {
        ApiError {
            status: 400,
            code: "BadQuery",
            message: message.into(),
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, code) = match e {
            Error::MissingAtlas(_) => (404, "MissingAtlas"),
            Error::OrderTooLarge { .. } => (400, "OrderTooLarge"),
            Error::BadQuery(_)
            | Error::BadParam(_)
            | Error::UnknownStatistic(_)
            | Error::MissingHistogram
            | Error::BadReference(_)
            | Error::OrderOutOfRange { .. }
            | Error::OrderTooSmall { .. }
            | Error::InvalidVertex { .. }
            | Error::SelfLoop(_)
            | Error::Codec(_) => (400, "BadQuery"),
            _ => (500, "Internal"),
        };
        ApiError {
            status,
            code,
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Clone)]
pub struct AppState {
    dir: PathBuf,
    atlases: Arc<Mutex<HashMap<usize, Arc<Atlas>>>>,
}

impl AppState {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        AppState {
            dir: dir.into(),
            atlases: Arc::default(),
        }
    }

    async fn atlas(&self, n: usize) -> Result<Arc<Atlas>, ApiError> {
        if let Some(a) = self.atlases.lock().expect("atlas cache poisoned").get(&n) {
            return Ok(a.clone());
        }
        let dir = self.dir.clone();
        let loaded = tokio::task::spawn_blocking(move || load_atlas(&dir, n))
            .await
            .map_err(|e| ApiError {
                status: 500,
                code: "Internal",
                message: e.to_string(),
            })??;
        let atlas = Arc::new(loaded);
        self.atlases
            .lock()
            .expect("atlas cache poisoned")
            .entry(n)
            .or_insert_with(|| atlas.clone());
        Ok(atlas)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/atlases", get(atlases))
        .route("/api/atlases/:n/correlations", get(correlations))
        .route("/api/atlases/:n/query", post(run_query))
        .route("/api/generate", post(generate))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(dir: PathBuf, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(AppState::new(dir))).await
}

fn parse_order(raw: &str) -> Result<usize, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::bad_query(format!("order must be an integer, got {raw:?}")))
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_query(format!("invalid body: {e}")))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AtlasEntry {
    pub n: usize,
    pub count: usize,
    pub apl_ref: f64,
}

async fn atlases(State(state): State<AppState>) -> ApiResult<Vec<AtlasEntry>> {
    let manifests = list_atlases(&state.dir)?;
    Ok(Json(
        manifests
            .into_iter()
            .map(|m| AtlasEntry {
                n: m.n,
                count: m.count,
                apl_ref: m.apl_ref,
            })
            .collect(),
    ))
}

#[derive(Debug, Deserialize)]
pub struct CorrelationParams {
    pub source: Option<String>,
    pub rate: Option<f64>,
    pub seed: Option<u64>,
}

/// Stride sample of normalized vectors, values in summary-statistic order.
#[derive(Debug, Serialize)]
pub struct Scatter {
    pub total: usize,
    pub stride: usize,
    pub points: Vec<[Option<f64>; 10]>,
}

impl Scatter {
    fn from(sample: &[NormalizedStatVector]) -> Self {
        let stride = sample.len().div_ceil(SCATTER_CAP).max(1);
        Scatter {
            total: sample.len(),
            stride,
            points: sample.iter().step_by(stride).map(|v| v.values()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Overlay {
    pub model: Model,
    pub count: usize,
    pub seed: u64,
    pub matrix: CorrelationMatrix,
    pub scatter: Scatter,
}

#[derive(Debug, Serialize)]
pub struct CorrelationResponse {
    pub n: usize,
    pub stat_names: Vec<String>,
    pub truth: CorrelationMatrix,
    pub truth_scatter: Scatter,
    pub overlay: Option<Overlay>,
}

async fn correlations(
    State(state): State<AppState>,
    Path(n): Path<String>,
    Query(params): Query<CorrelationParams>,
) -> ApiResult<CorrelationResponse> {
    let n = parse_order(&n)?;
    let atlas = state.atlas(n).await?;
    let source = params.source.unwrap_or_else(|| "atlas".into());
    let model = if source == "atlas" {
        None
    } else {
        Some(source.parse::<Model>()?)
    };
    let rate = params.rate.unwrap_or(0.01);
    let seed = params.seed.unwrap_or(0);
    let response = tokio::task::spawn_blocking(move || -> Result<CorrelationResponse, Error> {
        let stats: Vec<StatVector> = atlas.stats().cloned().collect();
        let truth = normalize_all(&stats, atlas.apl_ref)?;
        let overlay = match model {
            None => None,
            Some(model) => {
                let count = count_for_rate(rate, atlas.len())?;
                let config = GeneratorConfig::new(model, n, count, seed);
                let sample = sample_batch(&config, Some(&atlas.histogram))?;
                let normalized = normalize_all(&sample.stats, atlas.apl_ref)?;
                Some(Overlay {
                    model,
                    count,
                    seed,
                    matrix: correlation_matrix(&normalized),
                    scatter: Scatter::from(&normalized),
                })
            }
        };
        Ok(CorrelationResponse {
            n,
            stat_names: Statistic::SUMMARY.iter().map(|s| s.name().to_string()).collect(),
            truth: correlation_matrix(&truth),
            truth_scatter: Scatter::from(&truth),
            overlay,
        })
    })
    .await
    .map_err(|e| ApiError {
        status: 500,
        code: "Internal",
        message: e.to_string(),
    })??;
    Ok(Json(response))
}

#[derive(Debug, Deserialize)]
struct RawConstraint {
    stat: String,
    min: f64,
    max: f64,
}

#[derive(Debug, Deserialize)]
struct QueryBody {
    #[serde(default)]
    constraints: Vec<RawConstraint>,
    vary: String,
    #[serde(default)]
    rt_mode: Option<String>,
}

fn stat(name: &str) -> Result<Statistic, ApiError> {
    name.parse::<Statistic>()
        .map_err(|_| ApiError::bad_query(format!("unknown statistic {name:?}")))
}

#[derive(Debug, Serialize)]
pub struct SlotView {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub exemplar: Option<String>,
    /// Neighbor lists of the exemplar, for client-side layout.
    pub adjacency: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Serialize)]
pub struct QueryResponse {
    pub n: usize,
    pub vary: Statistic,
    pub rt_mode: RtMode,
    pub total_matches: usize,
    pub undefined: usize,
    pub slots: Vec<SlotView>,
}

fn adjacency(graph6: &str) -> Result<Vec<Vec<usize>>, Error> {
    let g = decode_graph6(graph6)?;
    (0..g.order()).map(|v| g.neighbors(v)).collect()
}

fn query_response(n: usize, res: SlotResult) -> Result<QueryResponse, Error> {
    let slots = res
        .slots
        .into_iter()
        .map(|s| {
            let adjacency = s.exemplar.as_deref().map(adjacency).transpose()?;
            Ok(SlotView {
                label: s.label,
                lo: s.lo,
                hi: s.hi,
                count: s.count,
                exemplar: s.exemplar,
                adjacency,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(QueryResponse {
        n,
        vary: res.vary,
        rt_mode: res.rt_mode,
        total_matches: res.total_matches,
        undefined: res.undefined,
        slots,
    })
}

async fn run_query(State(state): State<AppState>, Path(n): Path<String>, body: Bytes) -> ApiResult<QueryResponse> {
    let n = parse_order(&n)?;
    let body: QueryBody = parse_body(&body)?;
    let q = FilterQuery {
        n,
        constraints: body
            .constraints
            .iter()
            .map(|c| Ok(Constraint::new(stat(&c.stat)?, c.min, c.max)))
            .collect::<Result<_, ApiError>>()?,
        vary: stat(&body.vary)?,
        rt_mode: match body.rt_mode {
            Some(m) => m.parse()?,
            None => RtMode::Pairs,
        },
    };
    q.validate()?;
    let atlas = state.atlas(n).await?;
    let matches = query(&atlas, &q)?;
    let res = slotize(&matches, &q, atlas.apl_ref)?;
    Ok(Json(query_response(n, res)?))
}

#[derive(Debug, Deserialize)]
struct GenerateBody {
    model: String,
    n: usize,
    count: usize,
    seed: u64,
    #[serde(default)]
    params: FixedParams,
}

#[derive(Debug, Serialize)]
pub struct GenerateResponse {
    pub config: GeneratorConfig,
    pub graph6: Vec<String>,
    pub stats: Vec<StatVector>,
    /// Present when the atlas for this order is built.
    pub coverage: Option<CoverageReport>,
}

async fn generate(State(state): State<AppState>, body: Bytes) -> ApiResult<GenerateResponse> {
    let body: GenerateBody = parse_body(&body)?;
    if body.n > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n: body.n,
            max: MAX_ORDER,
        }
        .into());
    }
    if body.count > MAX_REQUEST_COUNT {
        return Err(ApiError::bad_query(format!(
            "count {} exceeds the request cap {MAX_REQUEST_COUNT}",
            body.count
        )));
    }
    let model: Model = body.model.parse()?;
    let config = GeneratorConfig::new(model, body.n, body.count, body.seed).with_params(body.params);
    let atlas = match state.atlas(body.n).await {
        Ok(a) => Some(a),
        Err(e) if e.code == "MissingAtlas" => None,
        Err(e) => return Err(e),
    };
    let response = tokio::task::spawn_blocking(move || -> Result<GenerateResponse, Error> {
        let sample = sample_batch(&config, atlas.as_deref().map(|a| &a.histogram))?;
        let coverage = match &atlas {
            Some(a) => Some(bounding_box_ratio(&sample.stats, &a.stats().cloned().collect::<Vec<_>>())?),
            None => None,
        };
        Ok(GenerateResponse {
            graph6: sample.graphs.iter().map(encode_graph6).collect(),
            stats: sample.stats,
            config: sample.config,
            coverage,
        })
    })
    .await
    .map_err(|e| ApiError {
        status: 500,
        code: "Internal",
        message: e.to_string(),
    })??;
    Ok(Json(response))
}
