//! JSON HTTP API over the scenario store.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use market_entry_core::{
    dynamics, grade_to_n, strategy_grid, FinancialStatements, RatingCategory, RatingsDataset, Side,
    StatementKind,
};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::scenario::{compare_methods, ScenarioDraft, UpdateRequest};
use crate::store::Store;

pub struct AppState {
    pub store: Store,
    pub ratings: RatingsDataset,
}

pub type SharedState = Arc<AppState>;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(self.body())).into_response()
    }
}

type ApiResult<T> = Result<T, ServiceError>;

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/api/scenarios", post(create_scenario).get(list_scenarios))
        .route(
            "/api/scenarios/{id}",
            get(get_scenario).put(update_scenario),
        )
        .route("/api/scenarios/{id}/evaluate", post(evaluate))
        .route("/api/scenarios/{id}/evaluations", get(evaluations))
        .route("/api/scenarios/{id}/compare", get(compare))
        .route("/api/statements", post(upload_statements))
        .route("/api/statements/{id}/items", get(statement_items))
        .route("/api/statements/{id}/dynamics", post(statement_dynamics))
        .route("/api/ratings/{country}/{category}", get(ratings))
        .route("/api/meta/strategy-grid", get(grid))
        .route("/api/meta/about", get(about))
        .with_state(state)
}

/// Rejections from malformed JSON bodies, in the service's error shape.
struct JsonBody<T>(T);

impl<S, T> axum::extract::FromRequest<S> for JsonBody<T>
where
    T: serde::de::DeserializeOwned,
    S: Send + Sync,
{
    type Rejection = ServiceError;

    async fn from_request(req: axum::extract::Request, state: &S) -> Result<Self, Self::Rejection> {
        let bytes = axum::body::Bytes::from_request(req, state)
            .await
            .map_err(|e| parse_error("body", e.to_string()))?;
        serde_json::from_slice(&bytes).map(JsonBody).map_err(|e| {
            parse_error(
                &format!("line {}, column {}", e.line(), e.column()),
                e.to_string(),
            )
        })
    }
}

fn parse_error(location: &str, reason: String) -> ServiceError {
    market_entry_core::EntryError::Parse {
        location: location.to_string(),
        reason,
    }
    .into()
}

async fn create_scenario(
    State(state): State<SharedState>,
    JsonBody(draft): JsonBody<ScenarioDraft>,
) -> ApiResult<impl IntoResponse> {
    let scenario = state.store.create_scenario(draft)?;
    Ok((StatusCode::CREATED, Json(scenario)))
}

#[derive(Deserialize)]
struct PageQuery {
    #[serde(default)]
    offset: usize,
    #[serde(default = "default_limit")]
    limit: usize,
}

fn default_limit() -> usize {
    50
}

async fn list_scenarios(
    State(state): State<SharedState>,
    Query(q): Query<PageQuery>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(
        state.store.list_scenarios(q.offset, q.limit.min(500))?,
    ))
}

async fn get_scenario(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.store.get_scenario(&id)?))
}

async fn update_scenario(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<UpdateRequest>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.store.update_scenario(
        &id,
        req.version,
        req.draft,
    )?))
}

async fn evaluate(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.store.evaluate(&id)?))
}

async fn evaluations(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(state.store.evaluations(&id)?))
}

async fn compare(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    let scenario = state.store.get_scenario(&id)?;
    let statements = state.store.statements_for(&scenario)?;
    let cmp = compare_methods(&scenario.draft, statements.as_ref())
        .map_err(|e| e.with_context(format!("scenario {id}")))?;
    Ok(Json(cmp))
}

async fn upload_statements(
    State(state): State<SharedState>,
    body: String,
) -> ApiResult<impl IntoResponse> {
    let statements = FinancialStatements::parse(&body)?;
    let summary = state.store.put_statements(&statements)?;
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Serialize)]
struct ItemInfo<'a> {
    item_id: &'a str,
    label: &'a str,
    statement: StatementKind,
    side: Side,
}

async fn statement_items(
    State(state): State<SharedState>,
    Path(id): Path<String>,
) -> ApiResult<Response> {
    let st = state.store.get_statements(&id)?;
    let items: Vec<ItemInfo> = st
        .items
        .iter()
        .map(|i| ItemInfo {
            item_id: &i.item_id,
            label: &i.label,
            statement: i.statement,
            side: i.side,
        })
        .collect();
    Ok(Json(items).into_response())
}

#[derive(Deserialize)]
struct DynamicsRequest {
    item_ids: Vec<String>,
}

async fn statement_dynamics(
    State(state): State<SharedState>,
    Path(id): Path<String>,
    JsonBody(req): JsonBody<DynamicsRequest>,
) -> ApiResult<impl IntoResponse> {
    let st = state.store.get_statements(&id)?;
    Ok(Json(dynamics(&st, &req.item_ids)?))
}

#[derive(Serialize)]
struct RatedEvent<'a> {
    #[serde(flatten)]
    event: &'a market_entry_core::RatingEvent,
    country_rating: f64,
}

async fn ratings(
    State(state): State<SharedState>,
    Path((country, category)): Path<(String, String)>,
) -> ApiResult<Response> {
    let category: RatingCategory = category.parse()?;
    let events = state.ratings.rating_history(&country, category)?;
    let body: Vec<RatedEvent> = events
        .iter()
        .map(|event| RatedEvent {
            event,
            country_rating: grade_to_n(&event.grade),
        })
        .collect();
    Ok(Json(body).into_response())
}

async fn grid() -> impl IntoResponse {
    Json(strategy_grid())
}

#[derive(Serialize)]
pub struct About {
    pub name: &'static str,
    pub version: &'static str,
    pub license: &'static str,
    pub description: &'static str,
}

pub fn about_info() -> About {
    About {
        name: "market-entry",
        version: env!("CARGO_PKG_VERSION"),
        license: env!("CARGO_PKG_LICENSE"),
        description: "Market-entry risk indicator and entry strategy recommendation",
    }
}

async fn about() -> impl IntoResponse {
    Json(about_info())
}
