#![allow(dead_code)]

use std::sync::{Arc, OnceLock};

use chrono::{DateTime, TimeZone, Utc};
use moments_core::annotate::{Annotator, MockSentimentAdapter, PipelineConfig, SentimentAdapter};
use moments_core::bundled::{self, data_dir};
use moments_core::feedback::Content;
use moments_core::models::ModelSet;
use moments_core::service::{Journal, JournalConfig};
use moments_core::store::Store;
use moments_core::taxonomy::ValueTaxonomy;
use moments_core::trainer::harness::{train_all, DataLayout, HarnessConfig};

pub fn models() -> &'static ModelSet {
    static MODELS: OnceLock<ModelSet> = OnceLock::new();
    MODELS.get_or_init(|| {
        train_all(&DataLayout::new(&data_dir()), &ValueTaxonomy::default(), &HarnessConfig::with_seed(7)).unwrap()
    })
}

pub fn annotator(external: Arc<dyn SentimentAdapter>) -> Annotator {
    Annotator::new(
        ValueTaxonomy::default(),
        &bundled::value_lexicons(),
        &bundled::activity_lexicons(),
        models().clone(),
        external,
        PipelineConfig::default(),
    )
    .unwrap()
}

pub fn journal(store: Store) -> Journal {
    let taxonomy = ValueTaxonomy::default();
    Journal::new(
        store,
        annotator(Arc::new(MockSentimentAdapter::constant(0.3))),
        Content::bundled(&taxonomy).unwrap(),
        JournalConfig::default(),
    )
}

pub fn memory_journal() -> Journal {
    journal(Store::in_memory(ValueTaxonomy::default(), chrono_tz::UTC))
}

/// Wednesday noon UTC.
pub fn now() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2026, 6, 10, 12, 0, 0).unwrap()
}
