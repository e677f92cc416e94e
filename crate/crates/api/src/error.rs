//! Error responses. Every failure becomes `{"error": {"code", "message"}}`
//! with one fixed status per code; [`ERROR_CODES`] is the full table.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use moments_core::feedback::FeedbackError;
use moments_core::insights::InsightsError;
use moments_core::service::JournalError;
use moments_core::store::StoreError;
use serde::{Deserialize, Serialize};

/// `(code, status)` for every error the API can return.
pub const ERROR_CODES: &[(&str, u16)] = &[
    ("invalid_input", 400),
    ("bad_request", 400),
    ("bad_window", 400),
    ("unauthenticated", 401),
    ("session_expired", 401),
    ("bad_credentials", 401),
    ("forbidden", 403),
    ("not_found", 404),
    ("unknown_moment", 404),
    ("unknown_reminder", 404),
    ("no_goal", 404),
    ("no_article", 404),
    ("illegal_transition", 409),
    ("unknown_value", 422),
    ("too_many_values", 422),
    ("storage_corrupt", 500),
    ("storage_io", 500),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    pub error: ErrorBody,
}

impl ApiError {
    /// Looks the status up in [`ERROR_CODES`].
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        let status = ERROR_CODES
            .iter()
            .find(|(c, _)| *c == code)
            .map(|&(_, s)| StatusCode::from_u16(s).expect("valid status"))
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("bad_request", message)
    }

    pub fn not_found() -> Self {
        Self::new("not_found", "no such route")
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let code = match &e {
            StoreError::Validation(_) => "invalid_input",
            StoreError::UnknownMoment(_) => "unknown_moment",
            StoreError::UnknownReminder(_) => "unknown_reminder",
            StoreError::UnknownValue(_) => "unknown_value",
            StoreError::TooManyValues(_) => "too_many_values",
            StoreError::IllegalTransition { .. } => "illegal_transition",
            StoreError::Forbidden => "forbidden",
            StoreError::Corrupt { .. } => "storage_corrupt",
            StoreError::Io(_) => "storage_io",
        };
        if code.starts_with("storage") {
            log::error!("store failure: {e}");
        }
        Self::new(code, e.to_string())
    }
}

impl From<InsightsError> for ApiError {
    fn from(e: InsightsError) -> Self {
        let code = match &e {
            InsightsError::BadWindow(_) | InsightsError::EmptyRange => "bad_window",
            InsightsError::NoGoal => "no_goal",
        };
        Self::new(code, e.to_string())
    }
}

impl From<FeedbackError> for ApiError {
    fn from(e: FeedbackError) -> Self {
        match &e {
            FeedbackError::UnknownValue(_) => Self::new("unknown_value", e.to_string()),
        }
    }
}

impl From<JournalError> for ApiError {
    fn from(e: JournalError) -> Self {
        match e {
            JournalError::Store(e) => e.into(),
            JournalError::Insights(e) => e.into(),
            JournalError::Feedback(e) => e.into(),
            JournalError::NoArticle(_) => Self::new("no_article", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorEnvelope {
            error: ErrorBody {
                code: self.code.to_string(),
                message: self.message,
            },
        };
        (self.status, Json(body)).into_response()
    }
}
