//! Training entry points for the three model bundles.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::Corpus;
use super::crowd::LabelingTask;
use super::labeled::{Label, LabeledSet, Provenance};
use super::similarity::WordSimilarityTable;
use super::weak::{build_training_set, StageSizes, WeakSupervisionConfig, WeakSupervisionError};
use crate::annotate::ActivityClass;
use crate::classifier::{train_binary, ClassWeighting, ClassifierError, ClassifierModel, Hyperparams};
use crate::models::{ModelBundle, POLARITY_TARGET};
use crate::text::SeedLexicon;

#[derive(Debug, thiserror::Error)]
pub enum TrainError {
    #[error(transparent)]
    WeakSupervision(#[from] WeakSupervisionError),
    #[error(transparent)]
    Classifier(#[from] ClassifierError),
    #[error("no lexicon for activity class {0}")]
    MissingLexicon(ActivityClass),
}

/// Trains the target's binary classifier on a labeled set.
pub fn train_classifier(
    set: &LabeledSet,
    hyper: &Hyperparams,
    trained_on: Option<String>,
) -> Result<ClassifierModel, ClassifierError> {
    train_binary(set.target_class(), &set.training_pairs(), hyper, trained_on).map(|(m, _)| m)
}

/// Per-class weak supervision followed by training.
pub fn train_activity_models(
    corpus: &Corpus,
    lexicons: &[SeedLexicon],
    sim: &WordSimilarityTable,
    ws: &WeakSupervisionConfig,
    hyper: &Hyperparams,
    trained_on: Option<String>,
) -> Result<(ModelBundle, BTreeMap<ActivityClass, StageSizes>), TrainError> {
    let mut bundle = ModelBundle::new("activity");
    let mut sizes = BTreeMap::new();
    for class in ActivityClass::ALL {
        let lex = lexicons
            .iter()
            .find(|l| l.label().parse::<ActivityClass>().ok() == Some(class))
            .ok_or(TrainError::MissingLexicon(class))?;
        let (set, s) = build_training_set(corpus, lex, sim, ws)?;
        log::info!("{class}: {s:?}, {} negatives", set.count(Label::Negative));
        let mut set_named = LabeledSet::new(class.as_str()).with_seed_lemmas(set.seed_lemmas().clone());
        for e in set.examples() {
            set_named.push(&e.text, e.label, e.provenance.clone());
        }
        bundle.insert(train_classifier(&set_named, hyper, trained_on.clone())?);
        sizes.insert(class, s);
    }
    Ok((bundle, sizes))
}

/// Binary polarity model, target [`POLARITY_TARGET`]. Class imbalance is
/// handled by the weighting in `hyper` and recorded in the model metadata.
pub fn train_polarity_classifier(
    positives: &Corpus,
    negatives: &Corpus,
    hyper: &Hyperparams,
    trained_on: Option<String>,
) -> Result<ClassifierModel, ClassifierError> {
    let mut set = LabeledSet::new(POLARITY_TARGET);
    for (corpus, label) in [(positives, Label::Positive), (negatives, Label::Negative)] {
        for e in &corpus.entries {
            set.push(&e.text, label, Provenance::Gold { id: e.id.clone() });
        }
    }
    train_classifier(&set, hyper, trained_on)
}

/// Hyperparameters for value models: the per-value sets are small and the
/// tagger thresholds raw probabilities, so no class reweighting.
pub fn value_hyperparams(seed: u64) -> Hyperparams {
    Hyperparams {
        seed,
        class_weighting: ClassWeighting::None,
        ..Hyperparams::default()
    }
}

/// Adds, as negatives for each value, texts that workers chose for some
/// other value in tasks where this value was not displayed: up to
/// `negative_ratio` such negatives per positive, drawn with a fixed seed.
pub fn augment_one_vs_rest(
    sets: &BTreeMap<String, LabeledSet>,
    tasks: &[LabelingTask],
    negative_ratio: f64,
    seed: u64,
) -> BTreeMap<String, LabeledSet> {
    let by_id: HashMap<&str, &LabelingTask> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut chosen: Vec<(&LabelingTask, &str)> = sets
        .iter()
        .flat_map(|(value, set)| {
            set.positives().filter_map(move |e| match &e.provenance {
                Provenance::Crowd { task_id } => Some((task_id.as_str(), value.as_str())),
                _ => None,
            })
        })
        .filter_map(|(tid, v)| by_id.get(tid).map(|&t| (t, v)))
        .collect();
    chosen.sort_by(|a, b| (&a.0.task_id, a.1).cmp(&(&b.0.task_id, b.1)));
    let mut out = sets.clone();
    for (value, set) in out.iter_mut() {
        let mut seen = HashSet::new();
        let pool: Vec<(&LabelingTask, &str)> = chosen
            .iter()
            .filter(|(task, chosen_for)| {
                chosen_for != value
                    && !task.candidates.iter().any(|c| c == value)
                    && set.get(&task.text).is_none()
                    && seen.insert(task.text.as_str())
            })
            .copied()
            .collect();
        let wanted = ((set.count(Label::Positive) as f64 * negative_ratio).round() as usize).min(pool.len());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = rand::seq::index::sample(&mut rng, pool.len(), wanted).into_vec();
        picked.sort_unstable();
        for i in picked {
            let (task, chosen_for) = pool[i];
            set.push(
                &task.text,
                Label::Negative,
                Provenance::OneVsRest {
                    task_id: task.task_id.clone(),
                    value: chosen_for.to_string(),
                },
            );
        }
    }
    out
}

/// One model per value with enough data; the rest are listed as skipped.
pub fn train_value_models(
    sets: &BTreeMap<String, LabeledSet>,
    hyper: &Hyperparams,
    trained_on: Option<String>,
) -> Result<ModelBundle, ClassifierError> {
    let mut bundle = ModelBundle::new("values");
    for (value, set) in sets {
        match train_classifier(set, hyper, trained_on.clone()) {
            Ok(m) => bundle.insert(m),
            Err(ClassifierError::InsufficientData { positives, negatives, .. }) => {
                log::warn!("skipping value model {value}: {positives} positive / {negatives} negative");
                bundle.skipped.push(value.clone());
            }
            Err(e) => return Err(e),
        }
    }
    Ok(bundle)
}
