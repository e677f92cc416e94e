use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use chrono::{DateTime, Utc};

use super::activity::{classify_activity, ACTIVITY_THRESHOLD};
use super::attributes::{extract_attributes, extract_people};
use super::external::SentimentAdapter;
use super::polarity::{classify_polarity, EXTERNAL_NEGATIVE_THRESHOLD};
use super::types::{ActivityAnnotation, ActivityClass, Annotation, ValueTag};
use super::values::{
    tag_values_model, KeywordValueTagger, ValueTaggerError, DEFAULT_MODEL_THRESHOLD, DEFAULT_TOP_K,
};
use crate::classifier::Scorer;
use crate::models::ModelSet;
use crate::taxonomy::ValueTaxonomy;
use crate::text::SeedLexicon;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueTaggerMode {
    /// Trained tagger, falling back to keywords when no model is loaded.
    Model,
    Keyword,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub activity_threshold: f64,
    pub value_top_k: usize,
    pub value_threshold: f64,
    pub external_negative_threshold: f64,
    pub value_tagger: ValueTaggerMode,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            activity_threshold: ACTIVITY_THRESHOLD,
            value_top_k: DEFAULT_TOP_K,
            value_threshold: DEFAULT_MODEL_THRESHOLD,
            external_negative_threshold: EXTERNAL_NEGATIVE_THRESHOLD,
            value_tagger: ValueTaggerMode::Model,
        }
    }
}

/// Net effect of a user's tag edits on one moment.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UserTagState {
    pub added: BTreeSet<String>,
    pub removed: BTreeSet<String>,
}

impl UserTagState {
    /// `(tags ∖ removed) ∪ added`, with added values as User tags, in
    /// taxonomy order.
    pub fn apply(&self, tags: Vec<ValueTag>, taxonomy: &ValueTaxonomy) -> Vec<ValueTag> {
        let mut out: Vec<ValueTag> = tags
            .into_iter()
            .filter(|t| !self.removed.contains(&t.value) && !self.added.contains(&t.value))
            .collect();
        out.extend(self.added.iter().map(|v| ValueTag::user(v)));
        out.sort_by_key(|t| taxonomy.rank(&t.value).unwrap_or(usize::MAX));
        out
    }
}

/// Loaded lexicons, models and adapter; cheap to share behind an `Arc`.
pub struct Annotator {
    taxonomy: ValueTaxonomy,
    keyword_tagger: KeywordValueTagger,
    activity_lexicons: BTreeMap<ActivityClass, SeedLexicon>,
    models: ModelSet,
    external: Arc<dyn SentimentAdapter>,
    config: PipelineConfig,
    version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum AnnotatorError {
    #[error(transparent)]
    ValueLexicons(#[from] ValueTaggerError),
    #[error("activity lexicon label {0:?} is not an activity class")]
    UnknownActivity(String),
    #[error("polarity bundle has no model")]
    NoPolarityModel,
}

impl Annotator {
    pub fn new(
        taxonomy: ValueTaxonomy,
        value_lexicons: &[SeedLexicon],
        activity_lexicons: &[SeedLexicon],
        models: ModelSet,
        external: Arc<dyn SentimentAdapter>,
        config: PipelineConfig,
    ) -> Result<Self, AnnotatorError> {
        let keyword_tagger = KeywordValueTagger::new(&taxonomy, value_lexicons)?;
        let mut by_class = BTreeMap::new();
        for lex in activity_lexicons {
            let class: ActivityClass = lex
                .label()
                .parse()
                .map_err(|_| AnnotatorError::UnknownActivity(lex.label().to_string()))?;
            by_class.insert(class, lex.clone());
        }
        if models.polarity_model().is_none() {
            return Err(AnnotatorError::NoPolarityModel);
        }
        let version = format!("{}+{}", env!("CARGO_PKG_VERSION"), models.fingerprint());
        Ok(Self {
            taxonomy,
            keyword_tagger,
            activity_lexicons: by_class,
            models,
            external,
            config,
            version,
        })
    }

    pub fn pipeline_version(&self) -> &str {
        &self.version
    }

    pub fn taxonomy(&self) -> &ValueTaxonomy {
        &self.taxonomy
    }

    pub fn keyword_tagger(&self) -> &KeywordValueTagger {
        &self.keyword_tagger
    }

    pub fn models(&self) -> &ModelSet {
        &self.models
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn polarity_scorer(&self) -> &dyn Scorer {
        self.models.polarity_model().expect("checked at construction")
    }

    /// Value tags before user edits, plus a note if the keyword fallback
    /// was used.
    pub fn tag_values(&self, text: &str) -> (Vec<ValueTag>, Option<String>) {
        if self.config.value_tagger == ValueTaggerMode::Keyword {
            return (self.keyword_tagger.tag(text), None);
        }
        match tag_values_model(
            text,
            Some(&self.models.values),
            &self.taxonomy,
            self.config.value_top_k,
            self.config.value_threshold,
        ) {
            Ok(mut tags) => {
                tags.sort_by_key(|t| self.taxonomy.rank(&t.value));
                (tags, None)
            }
            Err(e) => (self.keyword_tagger.tag(text), Some(format!("{e}; keyword tagger used"))),
        }
    }

    pub fn annotate(
        &self,
        moment_id: u64,
        text: &str,
        user_tags: &UserTagState,
        now: DateTime<Utc>,
    ) -> Annotation {
        let mut notes = Vec::new();
        let polarity = classify_polarity(
            text,
            self.external.as_ref(),
            self.polarity_scorer(),
            self.config.external_negative_threshold,
        );
        if polarity.external == super::types::ExternalStatus::Unavailable {
            notes.push("external sentiment unavailable; trained classifier only".to_string());
        }
        let (tags, note) = self.tag_values(text);
        notes.extend(note);
        let values = user_tags.apply(tags, &self.taxonomy);

        let scorers: Vec<(ActivityClass, Option<&dyn Scorer>)> = ActivityClass::ALL
            .iter()
            .map(|&c| (c, self.models.activity.get(c.as_str()).map(|m| m as &dyn Scorer)))
            .collect();
        let decision = classify_activity(text, &scorers, self.config.activity_threshold);
        for c in &decision.missing {
            notes.push(format!("no {c} model; class excluded"));
        }
        let activity = decision.best.map(|(class, confidence)| ActivityAnnotation {
            class,
            confidence,
            attributes: extract_attributes(text, self.activity_lexicons.get(&class)),
        });
        Annotation {
            moment_id,
            polarity,
            values,
            activity,
            people: extract_people(text),
            annotated_at: now,
            pipeline_version: self.version.clone(),
            notes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn user_state_application() {
        let t = ValueTaxonomy::default();
        let tags = vec![
            ValueTag { value: "Family".into(), origin: super::super::types::TagOrigin::Model, confidence: 0.9 },
            ValueTag { value: "Leisure".into(), origin: super::super::types::TagOrigin::Model, confidence: 0.6 },
        ];
        let state = UserTagState {
            added: ["Gratitude".to_string()].into(),
            removed: ["Family".to_string()].into(),
        };
        let out = state.apply(tags, &t);
        let names: Vec<&str> = out.iter().map(|t| t.value.as_str()).collect();
        assert_eq!(names, vec!["Gratitude", "Leisure"]);
        assert_eq!(out[0], ValueTag::user("Gratitude"));
    }
}
