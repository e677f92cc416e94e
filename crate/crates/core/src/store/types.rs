use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::annotate::{Annotation, ValueTag};
use crate::scheduler::NotificationPolicy;

pub const MAX_TEXT_CHARS: usize = 2000;
pub const MAX_FOCUS_VALUES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserProfile {
    pub user_id: String,
    pub timezone: Tz,
    pub notification: NotificationPolicy,
}

impl UserProfile {
    pub fn new(user_id: &str, timezone: Tz) -> Self {
        Self {
            user_id: user_id.to_string(),
            timezone,
            notification: NotificationPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Moment {
    pub id: u64,
    pub user_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub photo_ref: Option<String>,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_prompt: Option<String>,
}

/// Input to [`super::Store::put_moment`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewMoment {
    pub text: String,
    #[serde(default)]
    pub photo_ref: Option<String>,
    #[serde(default)]
    pub source_prompt: Option<String>,
    /// Defaults to the time of the call.
    #[serde(default)]
    pub created_at: Option<DateTime<Utc>>,
}

impl NewMoment {
    pub fn text(text: &str) -> Self {
        Self {
            text: text.to_string(),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagEdit {
    pub moment_id: u64,
    pub added: BTreeSet<String>,
    pub removed: BTreeSet<String>,
    pub edited_at: DateTime<Utc>,
}

/// A moment as shown to its owner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentView {
    pub moment: Moment,
    pub annotation: Option<Annotation>,
    /// Pipeline tags after user edits, in taxonomy order.
    pub effective_tags: Vec<ValueTag>,
}

impl MomentView {
    pub fn has_tag(&self, value: &str) -> bool {
        self.effective_tags.iter().any(|t| t.value == value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Goal {
    pub user_id: String,
    pub focus_values: Vec<String>,
    /// Target number of moments per focus value per week.
    pub weekly_target: u32,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReminderOrigin {
    Suggested,
    UserAdded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReminderStatus {
    Open,
    Done,
    Dismissed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReminderItem {
    pub id: u64,
    pub user_id: String,
    pub activity_text: String,
    pub desired_time: DateTime<Utc>,
    pub origin: ReminderOrigin,
    pub status: ReminderStatus,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestionRecord {
    pub user_id: String,
    pub value: String,
    pub activity: String,
    pub suggested_at: DateTime<Utc>,
}

/// ISO week key, `(iso year, week number)`.
pub type WeekKey = (i32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongratulationRecord {
    pub user_id: String,
    pub value: String,
    pub week: WeekKey,
    pub at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavedArticle {
    pub user_id: String,
    pub moment_id: u64,
    pub value: String,
    pub title: String,
    pub url: String,
    pub saved_at: DateTime<Utc>,
}

/// Timeline filter; all present fields must match.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentFilter {
    /// Words that must all occur, compared by lemma.
    pub keyword: Option<String>,
    pub value: Option<String>,
    /// Inclusive lower bound on `created_at`.
    pub from: Option<DateTime<Utc>>,
    /// Exclusive upper bound on `created_at`.
    pub to: Option<DateTime<Utc>>,
    pub polarity: Option<crate::annotate::PolarityLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    /// 0-based.
    pub page: usize,
    pub size: usize,
}

impl Default for Page {
    fn default() -> Self {
        Self { page: 0, size: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelinePage {
    pub items: Vec<MomentView>,
    pub total: usize,
    pub page: usize,
    pub size: usize,
}

/// One exported journal entry: the corpus record format plus annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub id: String,
    pub text: String,
    pub labels: Vec<String>,
    pub created_at: DateTime<Utc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotation: Option<Annotation>,
}
