//! Loads everything the service needs and fails with one diagnostic per
//! problem.

use std::sync::Arc;
use std::time::Duration;

use moments_core::annotate::{
    Annotator, AnnotatorError, HttpSentimentAdapter, MockSentimentAdapter, PipelineConfig, SentimentAdapter,
    UnavailableAdapter,
};
use moments_core::bundled;
use moments_core::feedback::{Content, ContentError};
use moments_core::models::{ModelSet, ModelSetError};
use moments_core::service::{Journal, JournalConfig};
use moments_core::store::{Store, StoreError};
use moments_core::taxonomy::ValueTaxonomy;
use moments_core::text::{load_lexicons, LexiconError, SeedLexicon};

use crate::config::{ApiConfig, ExternalMode};

pub const ACTIVITY_LEXICON_FILE: &str = "activities.toml";
pub const VALUE_LEXICON_FILE: &str = "values.toml";

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error(transparent)]
    Models(#[from] ModelSetError),
    #[error("opening journal: {0}")]
    Store(#[from] StoreError),
    #[error(transparent)]
    Lexicons(#[from] LexiconError),
    #[error("loading content: {0}")]
    Content(#[from] ContentError),
    #[error("building annotator: {0}")]
    Annotator(#[from] AnnotatorError),
    #[error("external sentiment: {0}")]
    External(String),
    #[error("binding {addr}: {source}")]
    Bind {
        addr: String,
        source: std::io::Error,
    },
    #[error("server: {0}")]
    Serve(std::io::Error),
}

fn lexicons(config: &ApiConfig) -> Result<(Vec<SeedLexicon>, Vec<SeedLexicon>), StartupError> {
    Ok(match &config.lexicon_dir {
        Some(dir) => (
            load_lexicons(&dir.join(VALUE_LEXICON_FILE))?,
            load_lexicons(&dir.join(ACTIVITY_LEXICON_FILE))?,
        ),
        None => (bundled::value_lexicons(), bundled::activity_lexicons()),
    })
}

pub fn external_adapter(config: &ApiConfig) -> Result<Arc<dyn SentimentAdapter>, StartupError> {
    let ext = &config.external;
    Ok(match ext.mode {
        ExternalMode::Off => Arc::new(UnavailableAdapter),
        ExternalMode::Http => {
            let url = ext
                .url
                .as_deref()
                .ok_or_else(|| StartupError::External("http mode needs external.url".into()))?;
            Arc::new(HttpSentimentAdapter::new(url, Duration::from_millis(ext.timeout_ms)))
        }
        ExternalMode::Mock => match &ext.mock_file {
            Some(path) => Arc::new(
                MockSentimentAdapter::from_jsonl(path, ext.mock_default_score)
                    .map_err(|e| StartupError::External(format!("{}: {e}", path.display())))?,
            ),
            None => Arc::new(MockSentimentAdapter::constant(ext.mock_default_score)),
        },
    })
}

pub fn load_annotator(config: &ApiConfig, taxonomy: &ValueTaxonomy) -> Result<Annotator, StartupError> {
    let models = ModelSet::load_dir(&config.model_dir)?;
    let (values, activities) = lexicons(config)?;
    Ok(Annotator::new(
        taxonomy.clone(),
        &values,
        &activities,
        models,
        external_adapter(config)?,
        PipelineConfig::default(),
    )?)
}

pub fn load_content(config: &ApiConfig, taxonomy: &ValueTaxonomy) -> Result<Content, StartupError> {
    Ok(match &config.content_dir {
        Some(dir) => Content::load_dir(dir, taxonomy)?,
        None => Content::bundled(taxonomy)?,
    })
}

/// Models first, so a fresh checkout without trained models fails before
/// anything is written.
pub fn build_journal(config: &ApiConfig) -> Result<Journal, StartupError> {
    let taxonomy = ValueTaxonomy::default();
    let annotator = load_annotator(config, &taxonomy)?;
    let content = load_content(config, &taxonomy)?;
    let store = Store::open(&config.journal_path(), taxonomy, config.default_timezone)?;
    Ok(Journal::new(
        store,
        annotator,
        content,
        JournalConfig {
            seed: config.seed,
            ..JournalConfig::default()
        },
    ))
}
