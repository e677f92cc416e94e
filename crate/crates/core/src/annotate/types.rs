use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolarityLabel {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolaritySource {
    /// The external analyzer reported negative sentiment; the trained
    /// classifier was not consulted.
    ExternalNegative,
    TrainedClassifier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExternalStatus {
    Ok,
    Unavailable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polarity {
    pub label: PolarityLabel,
    pub source: PolaritySource,
    pub confidence: f64,
    /// Whether the external analyzer answered. `Unavailable` means the
    /// label came from the trained classifier alone.
    pub external: ExternalStatus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TagOrigin {
    Keyword,
    Model,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueTag {
    pub value: String,
    pub origin: TagOrigin,
    pub confidence: f64,
}

impl ValueTag {
    pub fn user(value: &str) -> Self {
        Self {
            value: value.to_string(),
            origin: TagOrigin::User,
            confidence: 1.0,
        }
    }
}

/// The three tracked activity classes. Declaration order is the tie-break
/// order used when classifiers report equal confidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActivityClass {
    Exercise,
    Meals,
    Conversation,
}

impl ActivityClass {
    pub const ALL: [ActivityClass; 3] = [Self::Exercise, Self::Meals, Self::Conversation];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Exercise => "Exercise",
            Self::Meals => "Meals",
            Self::Conversation => "Conversation",
        }
    }
}

impl fmt::Display for ActivityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown activity class {0:?}")]
pub struct UnknownActivityClass(pub String);

impl FromStr for ActivityClass {
    type Err = UnknownActivityClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exercise" => Ok(Self::Exercise),
            "meals" | "meal" => Ok(Self::Meals),
            "conversation" | "conversations" => Ok(Self::Conversation),
            _ => Err(UnknownActivityClass(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attributes {
    /// Person mentions, as they appear in the text.
    pub people: Vec<String>,
    pub duration_minutes: Option<u32>,
    /// Raw distance phrase such as `5 mile`.
    pub distance: Option<String>,
    pub activity_term: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActivityAnnotation {
    pub class: ActivityClass,
    pub confidence: f64,
    pub attributes: Attributes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub moment_id: u64,
    pub polarity: Polarity,
    /// Value tags in taxonomy order, one per value.
    pub values: Vec<ValueTag>,
    pub activity: Option<ActivityAnnotation>,
    /// Person mentions found anywhere in the moment.
    pub people: Vec<String>,
    pub annotated_at: DateTime<Utc>,
    pub pipeline_version: String,
    /// Degraded-mode notes, e.g. an unreachable external analyzer.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl Annotation {
    pub fn has_value(&self, value: &str) -> bool {
        self.values.iter().any(|t| t.value == value)
    }

    pub fn is_positive(&self) -> bool {
        self.polarity.label == PolarityLabel::Positive
    }
}
