use std::collections::BTreeSet;

use axum::response::IntoResponse;
use moments_api::error::{ApiError, ErrorEnvelope, ERROR_CODES};
use moments_core::feedback::FeedbackError;
use moments_core::insights::InsightsError;
use moments_core::service::JournalError;
use moments_core::store::{ReminderStatus, StoreError};

// The matches below have no wildcard arm, so a new variant fails to compile
// here until it is listed.
fn store_errors() -> Vec<StoreError> {
    let all = vec![
        StoreError::Validation("x".into()),
        StoreError::UnknownMoment(1),
        StoreError::UnknownReminder(1),
        StoreError::UnknownValue("Fame".into()),
        StoreError::TooManyValues(4),
        StoreError::IllegalTransition { from: ReminderStatus::Done, to: ReminderStatus::Dismissed },
        StoreError::Forbidden,
        StoreError::Corrupt { line: 3, message: "eof".into() },
        StoreError::Io(std::io::Error::other("disk")),
    ];
    for e in &all {
        match e {
            StoreError::Validation(_)
            | StoreError::UnknownMoment(_)
            | StoreError::UnknownReminder(_)
            | StoreError::UnknownValue(_)
            | StoreError::TooManyValues(_)
            | StoreError::IllegalTransition { .. }
            | StoreError::Forbidden
            | StoreError::Corrupt { .. }
            | StoreError::Io(_) => {}
        }
    }
    all
}

fn insights_errors() -> Vec<InsightsError> {
    let all = vec![InsightsError::BadWindow("x".into()), InsightsError::EmptyRange, InsightsError::NoGoal];
    for e in &all {
        match e {
            InsightsError::BadWindow(_) | InsightsError::EmptyRange | InsightsError::NoGoal => {}
        }
    }
    all
}

fn feedback_errors() -> Vec<FeedbackError> {
    let all = vec![FeedbackError::UnknownValue("x".into())];
    for e in &all {
        match e {
            FeedbackError::UnknownValue(_) => {}
        }
    }
    all
}

fn journal_errors() -> Vec<JournalError> {
    let mut all: Vec<JournalError> = store_errors().into_iter().map(JournalError::from).collect();
    all.extend(insights_errors().into_iter().map(JournalError::from));
    all.extend(feedback_errors().into_iter().map(JournalError::from));
    all.push(JournalError::NoArticle(1));
    for e in &all {
        match e {
            JournalError::Store(_) | JournalError::Insights(_) | JournalError::Feedback(_) | JournalError::NoArticle(_) => {}
        }
    }
    all
}

fn status_of(code: &str) -> Option<u16> {
    ERROR_CODES.iter().find(|(c, _)| *c == code).map(|&(_, s)| s)
}

fn check(e: &ApiError) {
    let expected = status_of(e.code).unwrap_or_else(|| panic!("{} missing from table", e.code));
    assert_eq!(e.status.as_u16(), expected, "{}", e.code);
    assert!(!e.message.is_empty());
}

fn all_mapped() -> Vec<ApiError> {
    let mut out: Vec<ApiError> = store_errors().into_iter().map(ApiError::from).collect();
    out.extend(insights_errors().into_iter().map(ApiError::from));
    out.extend(feedback_errors().into_iter().map(ApiError::from));
    out.extend(journal_errors().into_iter().map(ApiError::from));
    out
}

#[test]
fn every_domain_error_maps_into_the_table() {
    for e in all_mapped() {
        check(&e);
    }
}

#[test]
fn journal_wrapping_preserves_code() {
    for e in store_errors() {
        let direct = ApiError::from(clone_store(&e));
        assert_eq!(ApiError::from(JournalError::Store(e)).code, direct.code);
    }
}

fn clone_store(e: &StoreError) -> StoreError {
    match e {
        StoreError::Io(io) => StoreError::Io(std::io::Error::new(io.kind(), io.to_string())),
        StoreError::Validation(s) => StoreError::Validation(s.clone()),
        StoreError::UnknownMoment(i) => StoreError::UnknownMoment(*i),
        StoreError::UnknownReminder(i) => StoreError::UnknownReminder(*i),
        StoreError::UnknownValue(s) => StoreError::UnknownValue(s.clone()),
        StoreError::TooManyValues(n) => StoreError::TooManyValues(*n),
        StoreError::IllegalTransition { from, to } => StoreError::IllegalTransition { from: *from, to: *to },
        StoreError::Forbidden => StoreError::Forbidden,
        StoreError::Corrupt { line, message } => StoreError::Corrupt { line: *line, message: message.clone() },
    }
}

#[test]
fn every_table_code_is_reachable() {
    let mut reached: BTreeSet<&str> = all_mapped().iter().map(|e| e.code).collect();
    // Raised by the HTTP layer itself rather than a domain error.
    for code in ["bad_request", "not_found", "unauthenticated", "session_expired", "bad_credentials"] {
        reached.insert(code);
    }
    let table: BTreeSet<&str> = ERROR_CODES.iter().map(|(c, _)| *c).collect();
    assert_eq!(reached, table);
    assert_eq!(table.len(), ERROR_CODES.len(), "duplicate code");
}

#[test]
fn unknown_code_is_a_server_error() {
    assert_eq!(ApiError::new("nonsense", "x").status.as_u16(), 500);
}

#[test]
fn envelope_shape() {
    let rt = tokio::runtime::Builder::new_current_thread().build().unwrap();
    for e in all_mapped() {
        let (code, status) = (e.code, e.status);
        let resp = e.into_response();
        assert_eq!(resp.status(), status);
        let bytes = rt.block_on(axum::body::to_bytes(resp.into_body(), 1 << 16)).unwrap();
        let env: ErrorEnvelope = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(env.error.code, code);
        let v: serde_json::Value = serde_json::from_slice(&bytes).unwrap();
        assert_eq!(v.as_object().unwrap().len(), 1);
        assert_eq!(v["error"].as_object().unwrap().len(), 2);
    }
}
