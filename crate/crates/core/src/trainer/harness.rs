//! End-to-end training and evaluation over a data directory laid out like
//! the bundled `data/`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use super::corpus::{Corpus, CorpusError};
use super::crowd::{export_labeling_tasks, import_labels, simulate_selections, CrowdError};
use super::metrics::{evaluate_single_label, evaluate_tagger, EvalError, Metrics};
use super::similarity::{SimilarityError, WordSimilarityTable};
use super::train::{
    augment_one_vs_rest, train_activity_models, train_polarity_classifier, train_value_models,
    value_hyperparams, TrainError,
};
use super::weak::{StageSizes, WeakSupervisionConfig};
use crate::annotate::{
    classify_activity, classify_polarity, tag_values_model, ActivityClass, KeywordValueTagger,
    PolarityLabel, SentimentAdapter, ValueTaggerError, DEFAULT_MODEL_THRESHOLD, DEFAULT_TOP_K,
    EXTERNAL_NEGATIVE_THRESHOLD,
};
use crate::classifier::{ClassifierError, Hyperparams, Scorer};
use crate::models::{ModelBundle, ModelSet};
use crate::taxonomy::ValueTaxonomy;
use crate::text::{load_lexicons, LexiconError, SeedLexicon};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Corpus { path: PathBuf, source: CorpusError },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error(transparent)]
    Crowd(#[from] CrowdError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    ValueTagger(#[from] ValueTaggerError),
}

/// File locations relative to a data directory.
#[derive(Debug, Clone)]
pub struct DataLayout {
    pub root: PathBuf,
}

impl DataLayout {
    pub fn new(root: &Path) -> Self {
        Self { root: root.to_path_buf() }
    }

    pub fn corpus(&self) -> PathBuf {
        self.root.join("corpus/happy_moments.jsonl")
    }
    pub fn activity_gold(&self) -> PathBuf {
        self.root.join("corpus/activity_gold.jsonl")
    }
    pub fn values_gold(&self) -> PathBuf {
        self.root.join("corpus/values_gold.jsonl")
    }
    pub fn polarity_pos(&self) -> PathBuf {
        self.root.join("corpus/polarity_train_pos.jsonl")
    }
    pub fn polarity_neg(&self) -> PathBuf {
        self.root.join("corpus/polarity_train_neg.jsonl")
    }
    pub fn polarity_test(&self) -> PathBuf {
        self.root.join("corpus/polarity_test.jsonl")
    }
    pub fn polarity_external_mock(&self) -> PathBuf {
        self.root.join("corpus/polarity_external_mock.jsonl")
    }
    pub fn vectors(&self) -> PathBuf {
        self.root.join("vectors/word_vectors.txt")
    }
    pub fn activity_lexicons(&self) -> PathBuf {
        self.root.join("lexicons/activities.toml")
    }
    pub fn value_lexicons(&self) -> PathBuf {
        self.root.join("lexicons/values.toml")
    }

    pub fn load_corpus(&self, path: &Path) -> Result<Corpus, HarnessError> {
        Corpus::load(path).map_err(|source| HarnessError::Corpus { path: path.to_path_buf(), source })
    }
}

#[derive(Debug, Clone)]
pub struct HarnessConfig {
    pub seed: u64,
    pub weak: WeakSupervisionConfig,
    /// Chance that a simulated worker flips a candidate decision.
    pub crowd_noise: f64,
    /// Negatives per positive in each value's training set.
    pub value_negative_ratio: f64,
    pub trained_on: Option<String>,
}

impl HarnessConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            weak: WeakSupervisionConfig { seed, ..Default::default() },
            crowd_noise: 0.05,
            value_negative_ratio: 3.0,
            trained_on: None,
        }
    }
}

pub fn train_activity(
    layout: &DataLayout,
    cfg: &HarnessConfig,
) -> Result<(ModelBundle, BTreeMap<ActivityClass, StageSizes>), HarnessError> {
    let corpus = layout.load_corpus(&layout.corpus())?;
    let lexicons = load_lexicons(&layout.activity_lexicons())?;
    let sim = WordSimilarityTable::load(&layout.vectors())?;
    let hyper = Hyperparams { seed: cfg.seed, ..Hyperparams::default() };
    Ok(train_activity_models(&corpus, &lexicons, &sim, &cfg.weak, &hyper, cfg.trained_on.clone())?)
}

/// Activity predictions of a bundle for one text.
pub fn predict_activity(bundle: &ModelBundle, text: &str, tau: f64) -> Option<ActivityClass> {
    let scorers: Vec<(ActivityClass, Option<&dyn Scorer>)> = ActivityClass::ALL
        .iter()
        .map(|&c| (c, bundle.get(c.as_str()).map(|m| m as &dyn Scorer)))
        .collect();
    classify_activity(text, &scorers, tau).best.map(|(c, _)| c)
}

/// Per-class metrics of the activity bundle on entries labeled
/// `activity:<class>` (entries without one are gold "no activity").
pub fn evaluate_activity(bundle: &ModelBundle, gold: &Corpus, tau: f64) -> Result<Metrics, EvalError> {
    let preds: Vec<(Option<ActivityClass>, Option<ActivityClass>)> = gold
        .entries
        .iter()
        .map(|e| {
            let g = e.labels_of("activity").next().and_then(|l| l.parse().ok());
            (g, predict_activity(bundle, &e.text, tau))
        })
        .collect();
    let pairs: Vec<(Option<&str>, Option<&str>)> = preds
        .iter()
        .map(|(g, p)| (g.map(|c| c.as_str()), p.map(|c| c.as_str())))
        .collect();
    let classes: Vec<&str> = ActivityClass::ALL.iter().map(|c| c.as_str()).collect();
    evaluate_single_label(&classes, &pairs)
}

pub fn keyword_tagger(layout: &DataLayout, taxonomy: &ValueTaxonomy) -> Result<KeywordValueTagger, HarnessError> {
    let lexicons: Vec<SeedLexicon> = load_lexicons(&layout.value_lexicons())?;
    Ok(KeywordValueTagger::new(taxonomy, &lexicons)?)
}

/// Crowd loop over the corpus: export tasks, simulate workers against the
/// corpus's gold value labels, import, augment, train.
pub fn train_values(
    layout: &DataLayout,
    taxonomy: &ValueTaxonomy,
    cfg: &HarnessConfig,
) -> Result<ModelBundle, HarnessError> {
    let corpus = layout.load_corpus(&layout.corpus())?;
    let tagger = keyword_tagger(layout, taxonomy)?;
    let tasks = export_labeling_tasks(&corpus, &tagger, DEFAULT_TOP_K);
    let selections = simulate_selections(&tasks, &corpus, cfg.crowd_noise, cfg.seed);
    let sets = augment_one_vs_rest(&import_labels(&tasks, &selections)?, &tasks, cfg.value_negative_ratio, cfg.seed);
    Ok(train_value_models(&sets, &value_hyperparams(cfg.seed), cfg.trained_on.clone())?)
}

fn gold_values(gold: &Corpus) -> Vec<BTreeSet<String>> {
    gold.entries
        .iter()
        .map(|e| e.labels_of("value").map(str::to_string).collect())
        .collect()
}

fn names(tags: Vec<crate::annotate::ValueTag>) -> BTreeSet<String> {
    tags.into_iter().map(|t| t.value).collect()
}

pub fn evaluate_keyword_tagger(
    tagger: &KeywordValueTagger,
    taxonomy: &ValueTaxonomy,
    gold: &Corpus,
) -> Result<Metrics, EvalError> {
    let items: Vec<_> = gold_values(gold)
        .into_iter()
        .zip(&gold.entries)
        .map(|(g, e)| (g, names(tagger.tag(&e.text))))
        .collect();
    let classes: Vec<&str> = taxonomy.values().collect();
    evaluate_tagger(&classes, &items)
}

pub fn evaluate_model_tagger(
    bundle: &ModelBundle,
    taxonomy: &ValueTaxonomy,
    gold: &Corpus,
) -> Result<Metrics, HarnessError> {
    let mut items = Vec::new();
    for (g, e) in gold_values(gold).into_iter().zip(&gold.entries) {
        let tags = tag_values_model(&e.text, Some(bundle), taxonomy, DEFAULT_TOP_K, DEFAULT_MODEL_THRESHOLD)?;
        items.push((g, names(tags)));
    }
    let classes: Vec<&str> = taxonomy.values().collect();
    Ok(evaluate_tagger(&classes, &items)?)
}

/// Total tags emitted over a corpus by the keyword and model taggers.
pub fn tag_totals(
    tagger: &KeywordValueTagger,
    bundle: &ModelBundle,
    taxonomy: &ValueTaxonomy,
    corpus: &Corpus,
) -> Result<(usize, usize), HarnessError> {
    let mut keyword = 0;
    let mut model = 0;
    for e in &corpus.entries {
        keyword += tagger.tag(&e.text).len();
        model += tag_values_model(&e.text, Some(bundle), taxonomy, DEFAULT_TOP_K, DEFAULT_MODEL_THRESHOLD)?.len();
    }
    Ok((keyword, model))
}

pub fn train_polarity(layout: &DataLayout, cfg: &HarnessConfig) -> Result<ModelBundle, HarnessError> {
    let pos = layout.load_corpus(&layout.polarity_pos())?;
    let neg = layout.load_corpus(&layout.polarity_neg())?;
    let hyper = Hyperparams { seed: cfg.seed, ..Hyperparams::default() };
    let mut bundle = ModelBundle::new("polarity");
    bundle.insert(train_polarity_classifier(&pos, &neg, &hyper, cfg.trained_on.clone())?);
    Ok(bundle)
}

/// Cascade accuracy (percent) on entries labeled `polarity:positive` or
/// `polarity:negative`.
pub fn evaluate_polarity(
    model: &dyn Scorer,
    external: &dyn SentimentAdapter,
    test: &Corpus,
) -> Result<Metrics, EvalError> {
    let preds: Vec<(Option<&str>, Option<&str>)> = test
        .entries
        .iter()
        .filter_map(|e| {
            let gold = match e.labels_of("polarity").next()? {
                "positive" => "Positive",
                "negative" => "Negative",
                _ => return None,
            };
            let p = classify_polarity(&e.text, external, model, EXTERNAL_NEGATIVE_THRESHOLD);
            let pred = match p.label {
                PolarityLabel::Positive => "Positive",
                PolarityLabel::Negative => "Negative",
            };
            Some((Some(gold), Some(pred)))
        })
        .collect();
    evaluate_single_label(&["Positive", "Negative"], &preds)
}

/// Trains all three bundles.
pub fn train_all(layout: &DataLayout, taxonomy: &ValueTaxonomy, cfg: &HarnessConfig) -> Result<ModelSet, HarnessError> {
    let (activity, _) = train_activity(layout, cfg)?;
    Ok(ModelSet {
        activity,
        values: train_values(layout, taxonomy, cfg)?,
        polarity: train_polarity(layout, cfg)?,
    })
}
