//! Training-data construction, model training and evaluation.

mod corpus;
mod crowd;
pub mod harness;
mod labeled;
mod metrics;
mod similarity;
mod train;
mod weak;

pub use corpus::{Corpus, CorpusEntry, CorpusError};
pub use crowd::{
    export_labeling_tasks, import_labels, read_jsonl, simulate_selections, task_id, write_jsonl,
    CrowdError, LabelingTask, SelectionRecord, NONE_OPTION,
};
pub use labeled::{Label, LabeledExample, LabeledSet, LabeledSetError, Provenance};
pub use metrics::{
    evaluate_binary, evaluate_single_label, evaluate_tagger, ClassMetrics, EvalError, Metrics,
    TaggerSummary,
};
pub use similarity::{SimilarityError, WordSimilarityTable};
pub use train::{
    augment_one_vs_rest, train_activity_models, train_classifier, train_polarity_classifier,
    train_value_models, value_hyperparams, TrainError,
};
pub use weak::{
    build_positive_set, build_training_set, expand_positive_set, trim_with_negative_seeds,
    StageSizes, WeakSupervisionConfig, WeakSupervisionError,
};
