use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::imaging::{encode_png, RasterImage};
use crate::rating::RatingCoordinator;
use crate::uglifier::{param_ranges, palette_presets, ManipulationSession, ScriptLabel, Step, StepKind};

use super::{ApiError, ServiceState, SharedState, SAVED_DIR};

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/v1/health", get(|| async { Json(json!({ "status": "ok" })) }))
        .route("/v1/engine", get(engine))
        .route("/v1/images", get(list_images))
        .route("/v1/images/{id}", get(image_png))
        .route("/v1/sessions", post(create_session))
        .route("/v1/sessions/{id}", get(session_info))
        .route("/v1/sessions/{id}/steps", post(apply))
        .route("/v1/sessions/{id}/undo", post(undo))
        .route("/v1/sessions/{id}/reset", post(reset))
        .route("/v1/sessions/{id}/preview", get(preview))
        .route("/v1/sessions/{id}/original", get(original))
        .route("/v1/sessions/{id}/save", post(save))
        .route("/v1/ratings", post(start_rating))
        .route("/v1/ratings/histograms", get(histograms))
        .route("/v1/ratings/{id}", get(progress))
        .route("/v1/ratings/{id}/next", post(next_image))
        .route("/v1/ratings/{id}/votes", post(vote))
        .route("/v1/ratings/{id}/votes/{image}", put(revise))
        .route("/v1/ratings/{id}/finish", post(finish))
        .with_state(state)
}

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid(format!("bad request body: {e}")))
}

fn png_response(img: &RasterImage, depth: usize) -> ApiResult<Response> {
    let bytes = encode_png(img).map_err(|e| ApiError::internal(e.to_string()))?;
    Ok((
        [
            (header::CONTENT_TYPE, "image/png".to_string()),
            (header::HeaderName::from_static("x-script-depth"), depth.to_string()),
        ],
        bytes,
    )
        .into_response())
}

/// Runs `f` on the session off the async workers; holding the session
/// lock serializes commands per session.
async fn with_session<T: Send + 'static>(
    state: &SharedState,
    id: &str,
    f: impl FnOnce(&mut ManipulationSession) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let session = state.session(id)?;
    tokio::task::spawn_blocking(move || f(&mut session.lock().unwrap()))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn engine(State(state): State<SharedState>) -> Json<Value> {
    Json(json!({
        "config": state.config,
        "stepKinds": StepKind::ALL,
        "paramRanges": param_ranges(),
        "palettes": palette_presets(),
    }))
}

async fn list_images(State(state): State<SharedState>) -> Json<Value> {
    Json(json!({ "images": state.manifest.sorted().entries }))
}

async fn image_png(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    let img = state.load(&id)?;
    png_response(&img, 0)
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateSession {
    image_id: String,
    label: ScriptLabel,
    author_id: String,
}

fn session_json(id: &str, s: &ManipulationSession) -> Value {
    json!({
        "sessionId": id,
        "imageId": s.source_image_id(),
        "label": s.label(),
        "depth": s.depth(),
        "steps": s.steps(),
    })
}

async fn create_session(State(state): State<SharedState>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: CreateSession = parse(&body)?;
    if req.label == ScriptLabel::AutoUglified {
        return Err(ApiError::invalid("studio sessions are UGLIFIED or BEAUTIFIED"));
    }
    let img = state.load(&req.image_id)?;
    let session = ManipulationSession::new(req.image_id, img, req.label, req.author_id, state.config.clone());
    let id = state.new_id("s");
    let out = session_json(&id, &session);
    state
        .sessions
        .lock()
        .unwrap()
        .insert(id, Arc::new(Mutex::new(session)));
    Ok((StatusCode::CREATED, Json(out)))
}

async fn session_info(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let key = id.clone();
    with_session(&state, &id, move |s| Ok(Json(session_json(&key, s)))).await
}

async fn apply(State(state): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Response> {
    let step: Step = parse(&body)?;
    with_session(&state, &id, move |s| {
        s.apply(step)?;
        png_response(s.preview(), s.depth())
    })
    .await
}

async fn undo(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&state, &id, |s| {
        let undone = s.undo()?;
        Ok(Json(json!({ "undone": undone, "depth": s.depth() })))
    })
    .await
}

async fn reset(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_session(&state, &id, |s| {
        s.reset();
        Ok(Json(json!({ "depth": 0 })))
    })
    .await
}

async fn preview(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    with_session(&state, &id, |s| png_response(s.preview(), s.depth())).await
}

async fn original(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Response> {
    with_session(&state, &id, |s| png_response(s.original(), 0)).await
}

/// Writes `saved/<scriptId>.png` and `.json`, then closes the session.
async fn save(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<(StatusCode, Json<Value>)> {
    let root = state.root.clone();
    let out = with_session(&state, &id, move |s| {
        let script = s.save()?;
        let script_id = script.script_id();
        let png = encode_png(s.preview()).map_err(|e| ApiError::internal(e.to_string()))?;
        let dir = root.join(SAVED_DIR);
        let io = |e: std::io::Error| ApiError::internal(e.to_string());
        std::fs::create_dir_all(&dir).map_err(io)?;
        std::fs::write(dir.join(format!("{script_id}.png")), &png).map_err(io)?;
        std::fs::write(dir.join(format!("{script_id}.json")), script.to_json_pretty() + "\n").map_err(io)?;
        Ok(json!({
            "scriptId": script_id,
            "script": script,
            "imagePath": format!("{SAVED_DIR}/{script_id}.png"),
            "previewSha256": hex::encode(Sha256::digest(&png)),
        }))
    })
    .await?;
    state.sessions.lock().unwrap().remove(&id);
    Ok((StatusCode::CREATED, Json(out)))
}

fn with_rating<T>(state: &ServiceState, f: impl FnOnce(&mut RatingCoordinator) -> ApiResult<T>) -> ApiResult<T> {
    let mut guard = state.rating.lock().unwrap();
    let coordinator = guard.as_mut().ok_or_else(|| {
        ApiError::new(
            StatusCode::SERVICE_UNAVAILABLE,
            "unavailable",
            "dataset too small for the rating protocol",
        )
    })?;
    f(coordinator)
}

#[derive(Deserialize, Default)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct StartRating {
    #[serde(default)]
    client_token: Option<String>,
}

async fn start_rating(State(state): State<SharedState>, body: Bytes) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: StartRating = if body.is_empty() { StartRating::default() } else { parse(&body)? };
    let progress = with_rating(&state, |c| {
        let id = c.start(req.client_token);
        Ok(c.progress(&id)?)
    })?;
    Ok((StatusCode::CREATED, Json(json!(progress))))
}

async fn progress(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_rating(&state, |c| Ok(Json(json!(c.progress(&id)?))))
}

async fn next_image(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_rating(&state, |c| Ok(Json(json!(c.next_image(&id)?))))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Vote {
    image_id: String,
    score: i64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Revision {
    score: i64,
}

async fn vote(State(state): State<SharedState>, Path(id): Path<String>, body: Bytes) -> ApiResult<Json<Value>> {
    let v: Vote = parse(&body)?;
    with_rating(&state, |c| Ok(Json(json!(c.vote(&id, &v.image_id, v.score)?))))
}

async fn revise(
    State(state): State<SharedState>,
    Path((id, image)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Json<Value>> {
    let r: Revision = parse(&body)?;
    with_rating(&state, |c| Ok(Json(json!(c.revise(&id, &image, r.score)?))))
}

async fn finish(State(state): State<SharedState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    with_rating(&state, |c| Ok(Json(json!(c.finish(&id)?))))
}

async fn histograms(State(state): State<SharedState>) -> ApiResult<Json<Value>> {
    with_rating(&state, |c| {
        Ok(Json(json!({ "histograms": c.histograms(), "events": c.log().len() })))
    })
}
