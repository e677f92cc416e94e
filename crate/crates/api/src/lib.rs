//! HTTP API over the journal.
//!
//! All bodies are JSON. Requests authenticate with `Authorization: Bearer
//! <token>` from `POST /sessions`, except in demo mode where every request
//! acts as the configured demo user.

pub mod auth;
pub mod config;
pub mod error;
pub mod startup;

use std::collections::BTreeSet;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection, QueryRejection};
use axum::extract::{FromRequestParts, Path, Query, State};
use axum::http::request::Parts;
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use chrono::{DateTime, NaiveTime, Utc};
use chrono_tz::Tz;
use moments_core::annotate::PolarityLabel;
use moments_core::insights::Window;
use moments_core::models::ModelSet;
use moments_core::service::Journal;
use moments_core::store::{MomentFilter, NewMoment, Page, ReminderOrigin};
use serde::{Deserialize, Serialize};

use crate::auth::Sessions;
use crate::config::{ApiConfig, AuthMode};
use crate::error::ApiError;
use crate::startup::StartupError;

pub const MAX_PAGE_SIZE: usize = 100;

pub type Clock = Arc<dyn Fn() -> DateTime<Utc> + Send + Sync>;

#[derive(Clone)]
pub struct AppState {
    pub journal: Arc<Journal>,
    pub config: Arc<ApiConfig>,
    pub sessions: Arc<Sessions>,
    pub clock: Clock,
}

impl AppState {
    pub fn new(journal: Journal, config: ApiConfig) -> Self {
        Self {
            journal: Arc::new(journal),
            config: Arc::new(config),
            sessions: Arc::new(Sessions::default()),
            clock: Arc::new(Utc::now),
        }
    }

    pub fn with_clock(mut self, clock: Clock) -> Self {
        self.clock = clock;
        self
    }

    fn now(&self) -> DateTime<Utc> {
        (self.clock)()
    }
}

/// The session user of a request.
pub struct User(pub String);

impl FromRequestParts<AppState> for User {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &AppState) -> Result<Self, Self::Rejection> {
        if state.config.auth.mode == AuthMode::Demo {
            return Ok(User(state.config.auth.demo_user.clone()));
        }
        let token = bearer(parts).ok_or_else(|| ApiError::new("unauthenticated", "missing bearer token"))?;
        state.sessions.resolve(token, state.now()).map(User)
    }
}

fn bearer(parts: &Parts) -> Option<&str> {
    parts
        .headers
        .get(header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
}

fn json<T>(r: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    r.map(|Json(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn query<T>(r: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    r.map(|Query(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn id(r: Result<Path<u64>, PathRejection>) -> Result<u64, ApiError> {
    r.map(|Path(id)| id).map_err(|_| ApiError::not_found())
}

/// Runs journal work off the async executor; writes fsync.
async fn blocking<T: Send + 'static>(
    state: &AppState,
    f: impl FnOnce(&Journal, DateTime<Utc>) -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    let journal = state.journal.clone();
    let now = state.now();
    tokio::task::spawn_blocking(move || f(&journal, now))
        .await
        .map_err(|e| ApiError::new("storage_io", format!("worker failed: {e}")))?
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    pub pipeline_version: String,
    pub models: ModelHashes,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelHashes {
    pub activity: String,
    pub values: String,
    pub polarity: String,
}

impl ModelHashes {
    fn of(m: &ModelSet) -> Self {
        Self {
            activity: m.activity.bundle_hash(),
            values: m.values.bundle_hash(),
            polarity: m.polarity.bundle_hash(),
        }
    }
}

async fn healthz(State(s): State<AppState>) -> Json<Health> {
    let annotator = s.journal.annotator();
    Json(Health {
        status: "ok".into(),
        pipeline_version: annotator.pipeline_version().to_string(),
        models: ModelHashes::of(annotator.models()),
    })
}

#[derive(Debug, Deserialize)]
struct LoginRequest {
    user_id: String,
    password: String,
}

async fn login(State(s): State<AppState>, body: Result<Json<LoginRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let req = json(body)?;
    let session = s.sessions.login(&s.config.auth, &req.user_id, &req.password, s.now())?;
    Ok((StatusCode::CREATED, Json(session)).into_response())
}

async fn logout(parts: Parts, State(s): State<AppState>) -> StatusCode {
    if let Some(t) = bearer(&parts) {
        s.sessions.logout(t);
    }
    StatusCode::NO_CONTENT
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileUpdate {
    timezone: Option<Tz>,
    notification_time: Option<NaiveTime>,
    notifications_enabled: Option<bool>,
}

async fn get_profile(State(s): State<AppState>, User(u): User) -> Result<Response, ApiError> {
    Ok(Json(s.journal.store().profile(&u)).into_response())
}

async fn put_profile(
    State(s): State<AppState>,
    User(u): User,
    body: Result<Json<ProfileUpdate>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = json(body)?;
    let p = blocking(&s, move |j, _| {
        let mut p = j.store().profile(&u);
        if let Some(tz) = req.timezone {
            p.timezone = tz;
        }
        if let Some(t) = req.notification_time {
            p.notification.local_time = t;
        }
        if let Some(e) = req.notifications_enabled {
            p.notification.enabled = e;
        }
        Ok(j.store().set_profile(p)?)
    })
    .await?;
    Ok(Json(p).into_response())
}

async fn post_moment(
    State(s): State<AppState>,
    User(u): User,
    body: Result<Json<NewMoment>, JsonRejection>,
) -> Result<Response, ApiError> {
    let new = json(body)?;
    if s.config.async_annotation {
        let user = u.clone();
        let moment = blocking(&s, move |j, now| Ok(j.record_moment(&user, new, now)?)).await?;
        let id = moment.id;
        let journal = s.journal.clone();
        let now = s.now();
        tokio::task::spawn_blocking(move || {
            let done = journal.annotate_moment(&u, id, now).and_then(|v| journal.respond(&u, &v, now));
            if let Err(e) = done {
                log::warn!("annotating moment {id}: {e}");
            }
        });
        let view = s.journal.moment(&moment.user_id, id).map_err(ApiError::from)?;
        let body = serde_json::json!({ "moment": view.moment, "annotation": null, "effective_tags": [], "feedback": [] });
        return Ok((StatusCode::ACCEPTED, Json(body)).into_response());
    }
    let posted = blocking(&s, move |j, now| Ok(j.post_moment(&u, new, now)?)).await?;
    Ok((StatusCode::CREATED, Json(posted)).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct TimelineQuery {
    q: Option<String>,
    value: Option<String>,
    polarity: Option<String>,
    from: Option<DateTime<Utc>>,
    to: Option<DateTime<Utc>>,
    page: Option<usize>,
    size: Option<usize>,
}

fn parse_polarity(p: &str) -> Result<PolarityLabel, ApiError> {
    match p.to_ascii_lowercase().as_str() {
        "positive" => Ok(PolarityLabel::Positive),
        "negative" => Ok(PolarityLabel::Negative),
        _ => Err(ApiError::bad_request(format!("polarity must be positive or negative, got {p:?}"))),
    }
}

async fn list_moments(
    State(s): State<AppState>,
    User(u): User,
    q: Result<Query<TimelineQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let q = query(q)?;
    let filter = MomentFilter {
        keyword: q.q.filter(|k| !k.trim().is_empty()),
        value: q.value,
        from: q.from,
        to: q.to,
        polarity: q.polarity.as_deref().map(parse_polarity).transpose()?,
    };
    let page = Page {
        page: q.page.unwrap_or(0),
        size: q.size.unwrap_or(Page::default().size).min(MAX_PAGE_SIZE),
    };
    Ok(Json(s.journal.timeline(&u, &filter, page)?).into_response())
}

async fn get_moment(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
) -> Result<Response, ApiError> {
    Ok(Json(s.journal.moment(&u, id(p)?)?).into_response())
}

async fn delete_moment(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
) -> Result<StatusCode, ApiError> {
    let id = id(p)?;
    blocking(&s, move |j, now| Ok(j.delete_moment(&u, id, now)?)).await?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
struct TagPatch {
    add: BTreeSet<String>,
    remove: BTreeSet<String>,
}

async fn patch_tags(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
    body: Result<Json<TagPatch>, JsonRejection>,
) -> Result<Response, ApiError> {
    let id = id(p)?;
    let patch = json(body)?;
    let tags = blocking(&s, move |j, now| Ok(j.edit_tags(&u, id, &patch.add, &patch.remove, now)?)).await?;
    Ok(Json(serde_json::json!({ "moment_id": id, "effective_tags": tags })).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct InsightsQuery {
    window: Option<String>,
    from: Option<DateTime<Utc>>,
    to: Option<DateTime<Utc>>,
}

async fn insights(
    State(s): State<AppState>,
    User(u): User,
    q: Result<Query<InsightsQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let q = query(q)?;
    let window = match (q.from, q.to) {
        (Some(from), Some(to)) => Window::range(from, to)?,
        (None, None) => match q.window {
            Some(w) => w.parse()?,
            None => Window::default(),
        },
        _ => return Err(ApiError::new("bad_window", "from and to must be given together")),
    };
    Ok(Json(s.journal.insights(&u, window, s.now())).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct AtQuery {
    at: Option<DateTime<Utc>>,
}

async fn weekly_activity(
    State(s): State<AppState>,
    User(u): User,
    q: Result<Query<AtQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let at = query(q)?.at.unwrap_or_else(|| s.now());
    Ok(Json(s.journal.weekly_activity_counts(&u, at)).into_response())
}

async fn get_goal(State(s): State<AppState>, User(u): User) -> Result<Response, ApiError> {
    Ok(Json(s.journal.goal(&u)?).into_response())
}

#[derive(Debug, Deserialize)]
struct GoalRequest {
    values: Vec<String>,
    weekly_target: u32,
}

async fn put_goal(
    State(s): State<AppState>,
    User(u): User,
    body: Result<Json<GoalRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = json(body)?;
    let goal = blocking(&s, move |j, now| Ok(j.set_goal(&u, &req.values, req.weekly_target, now)?)).await?;
    Ok(Json(goal).into_response())
}

async fn goal_progress(
    State(s): State<AppState>,
    User(u): User,
    q: Result<Query<AtQuery>, QueryRejection>,
) -> Result<Response, ApiError> {
    let at = query(q)?.at.unwrap_or_else(|| s.now());
    Ok(Json(s.journal.goal_progress(&u, at)?).into_response())
}

async fn list_reminders(State(s): State<AppState>, User(u): User) -> Result<Response, ApiError> {
    Ok(Json(serde_json::json!({ "buckets": s.journal.want_to_do(&u, s.now()) })).into_response())
}

#[derive(Debug, Deserialize)]
struct ReminderRequest {
    activity_text: String,
    desired_time: DateTime<Utc>,
    value: Option<String>,
    origin: Option<ReminderOrigin>,
}

async fn add_reminder(
    State(s): State<AppState>,
    User(u): User,
    body: Result<Json<ReminderRequest>, JsonRejection>,
) -> Result<Response, ApiError> {
    let req = json(body)?;
    let r = blocking(&s, move |j, now| {
        Ok(j.add_reminder(
            &u,
            &req.activity_text,
            req.desired_time,
            req.origin.unwrap_or(ReminderOrigin::UserAdded),
            req.value.as_deref(),
            now,
        )?)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(r)).into_response())
}

async fn complete_reminder(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
) -> Result<Response, ApiError> {
    let id = id(p)?;
    Ok(Json(blocking(&s, move |j, now| Ok(j.complete_reminder(&u, id, now)?)).await?).into_response())
}

async fn dismiss_reminder(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
) -> Result<Response, ApiError> {
    let id = id(p)?;
    Ok(Json(blocking(&s, move |j, now| Ok(j.dismiss_reminder(&u, id, now)?)).await?).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct PromptQuery {
    seed: Option<u64>,
}

async fn prompt(State(s): State<AppState>, q: Result<Query<PromptQuery>, QueryRejection>) -> Result<Response, ApiError> {
    Ok(Json(s.journal.prompt(query(q)?.seed)).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct SaveArticle {
    value: Option<String>,
}

async fn save_article(
    State(s): State<AppState>,
    User(u): User,
    p: Result<Path<u64>, PathRejection>,
    body: axum::body::Bytes,
) -> Result<Response, ApiError> {
    let id = id(p)?;
    let req: SaveArticle = if body.iter().all(u8::is_ascii_whitespace) {
        SaveArticle::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?
    };
    let saved = blocking(&s, move |j, now| Ok(j.save_article(&u, id, req.value.as_deref(), now)?)).await?;
    Ok((StatusCode::CREATED, Json(saved)).into_response())
}

async fn saved_articles(State(s): State<AppState>, User(u): User) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "articles": s.journal.saved_articles(&u) }))
}

async fn export(State(s): State<AppState>, User(u): User) -> Json<serde_json::Value> {
    Json(serde_json::json!({ "records": s.journal.store().export_records(&u) }))
}

async fn fallback() -> ApiError {
    ApiError::not_found()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/sessions", post(login).delete(logout))
        .route("/profile", get(get_profile).put(put_profile))
        .route("/moments", get(list_moments).post(post_moment))
        .route("/moments/{id}", get(get_moment).delete(delete_moment))
        .route("/moments/{id}/tags", patch(patch_tags))
        .route("/insights", get(insights))
        .route("/insights/weekly-activity", get(weekly_activity))
        .route("/goals", get(get_goal).put(put_goal))
        .route("/goals/progress", get(goal_progress))
        .route("/reminders", get(list_reminders).post(add_reminder))
        .route("/reminders/{id}/complete", post(complete_reminder))
        .route("/reminders/{id}/dismiss", post(dismiss_reminder))
        .route("/prompt", get(prompt))
        .route("/feedback/{id}/article/save", post(save_article))
        .route("/articles", get(saved_articles))
        .route("/export", get(export))
        .fallback(fallback)
        .with_state(state)
}

/// Periodically queues due journaling notifications.
pub fn spawn_notifier(state: AppState) -> Option<tokio::task::JoinHandle<()>> {
    let secs = state.config.notification_interval_secs;
    if secs == 0 {
        return None;
    }
    Some(tokio::spawn(async move {
        let mut tick = tokio::time::interval(std::time::Duration::from_secs(secs));
        loop {
            tick.tick().await;
            match blocking(&state, |j, now| Ok(j.notification_tick(now)?)).await {
                Ok(sent) if !sent.is_empty() => log::info!("queued {} notifications", sent.len()),
                Ok(_) => {}
                Err(e) => log::warn!("notification tick: {}", e.message),
            }
        }
    }))
}

/// Serves on an already-bound listener until `shutdown` resolves.
pub async fn serve_on(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), StartupError> {
    let notifier = spawn_notifier(state.clone());
    let result = axum::serve(listener, router(state)).with_graceful_shutdown(shutdown).await;
    if let Some(n) = notifier {
        n.abort();
    }
    result.map_err(StartupError::Serve)
}

/// Loads models, content and the journal, then serves until Ctrl-C.
pub async fn serve(config: ApiConfig) -> Result<(), StartupError> {
    let journal = startup::build_journal(&config)?;
    let addr = format!("{}:{}", config.bind, config.port);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|source| StartupError::Bind { addr: addr.clone(), source })?;
    let local: SocketAddr = listener.local_addr().map_err(StartupError::Serve)?;
    log::info!("listening on http://{local} (pipeline {})", journal.pipeline_version());
    serve_on(listener, AppState::new(journal, config), async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await
}
