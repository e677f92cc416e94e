//! Moment annotation: polarity, value tags, activity and attributes.

mod activity;
mod attributes;
mod external;
mod pipeline;
mod polarity;
mod types;
mod values;

pub use activity::{argmax_activity, classify_activity, ActivityDecision, ACTIVITY_THRESHOLD};
pub use attributes::{extract_attributes, extract_people, parse_distance, parse_duration};
pub use external::{
    ExternalError, ExternalSentiment, HttpSentimentAdapter, MockSentimentAdapter, SentimentAdapter,
    UnavailableAdapter,
};
pub use pipeline::{Annotator, AnnotatorError, PipelineConfig, UserTagState, ValueTaggerMode};
pub use polarity::{classify_polarity, EXTERNAL_NEGATIVE_THRESHOLD};
pub use types::{
    ActivityAnnotation, ActivityClass, Annotation, Attributes, ExternalStatus, Polarity,
    PolarityLabel, PolaritySource, TagOrigin, UnknownActivityClass, ValueTag,
};
pub use values::{
    tag_values_model, KeywordValueTagger, ValueTaggerError, DEFAULT_MODEL_THRESHOLD, DEFAULT_TOP_K,
};
