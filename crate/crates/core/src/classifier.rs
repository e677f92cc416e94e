//! Binary text classifier: L2-regularized logistic regression over lemma
//! unigram and bigram counts, trained by full-batch gradient descent.
//!
//! The default step size is `1 / L`, with `L` an upper bound on the
//! curvature of the loss computed from the training rows, which guarantees
//! a non-increasing loss at every epoch. Feature vectors can optionally be
//! scaled to unit length.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::text::lemmas;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Anything that assigns a text a confidence in `[0, 1]` for one target.
pub trait Scorer: Send + Sync {
    fn target(&self) -> &str;
    fn score(&self, text: &str) -> f64;
}

#[derive(Debug, thiserror::Error)]
pub enum ClassifierError {
    #[error("insufficient training data for {target:?}: {positives} positive / {negatives} negative, need {required} of each")]
    InsufficientData {
        target: String,
        positives: usize,
        negatives: usize,
        required: usize,
    },
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("model file is inconsistent: {0}")]
    Corrupt(String),
    #[error("model io: {0}")]
    Io(#[from] std::io::Error),
    #[error("model serialization: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassWeighting {
    None,
    InverseFrequency,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub epochs: usize,
    pub l2: f64,
    /// `None` picks `1 / L` from the data.
    pub learning_rate: Option<f64>,
    pub seed: u64,
    pub class_weighting: ClassWeighting,
    pub min_examples_per_class: usize,
    /// Scale each feature vector to unit length.
    #[serde(default)]
    pub normalize: bool,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            epochs: 300,
            l2: 0.01,
            learning_rate: None,
            seed: 7,
            class_weighting: ClassWeighting::InverseFrequency,
            min_examples_per_class: 20,
            normalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub unigrams: bool,
    pub bigrams: bool,
    pub normalization: String,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        Self {
            unigrams: true,
            bigrams: true,
            normalization: "none".into(),
        }
    }
}

impl FeatureSpec {
    /// Feature counts for a lemma sequence, keyed `u:<lemma>` / `b:<a> <b>`.
    pub fn features(&self, lemmas: &[String]) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        if self.unigrams {
            for l in lemmas {
                *out.entry(format!("u:{l}")).or_insert(0.0) += 1.0;
            }
        }
        if self.bigrams {
            for w in lemmas.windows(2) {
                *out.entry(format!("b:{} {}", w[0], w[1])).or_insert(0.0) += 1.0;
            }
        }
        out
    }

    /// Sparse vector over `index`. Under `l2` normalization the scale is the
    /// norm of all features, known or not.
    fn vectorize(&self, text: &str, index: &HashMap<String, usize>) -> Vec<(usize, f64)> {
        let feats = self.features(&lemmas(text));
        let norm = match self.normalization.as_str() {
            "l2" => feats.values().map(|c| c * c).sum::<f64>().sqrt(),
            _ => 1.0,
        };
        if feats.is_empty() || norm == 0.0 {
            return Vec::new();
        }
        let mut v: Vec<(usize, f64)> = feats
            .iter()
            .filter_map(|(k, c)| index.get(k).map(|&i| (i, c / norm)))
            .collect();
        v.sort_unstable_by_key(|&(i, _)| i);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMeta {
    pub corpus_hash: String,
    pub hyperparameters: Hyperparams,
    /// Calendar date of the training run; excluded from [`ClassifierModel::model_hash`].
    pub trained_on: Option<String>,
    pub positives: usize,
    pub negatives: usize,
    pub class_weights: [f64; 2],
    pub final_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelData {
    format_version: u32,
    target: String,
    feature_spec: FeatureSpec,
    vocabulary: Vec<String>,
    weights: Vec<f64>,
    bias: f64,
    training_meta: TrainingMeta,
}

/// A trained binary classifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelData", into = "ModelData")]
pub struct ClassifierModel {
    data: ModelData,
    index: HashMap<String, usize>,
}

impl PartialEq for ClassifierModel {
    fn eq(&self, other: &Self) -> bool {
        self.data == other.data
    }
}

impl TryFrom<ModelData> for ClassifierModel {
    type Error = ClassifierError;

    fn try_from(data: ModelData) -> Result<Self, Self::Error> {
        if data.format_version != MODEL_FORMAT_VERSION {
            return Err(ClassifierError::UnsupportedVersion(data.format_version));
        }
        if data.vocabulary.len() != data.weights.len() {
            return Err(ClassifierError::Corrupt(format!(
                "{} vocabulary entries but {} weights",
                data.vocabulary.len(),
                data.weights.len()
            )));
        }
        let index = data
            .vocabulary
            .iter()
            .enumerate()
            .map(|(i, f)| (f.clone(), i))
            .collect();
        Ok(Self { data, index })
    }
}

impl From<ClassifierModel> for ModelData {
    fn from(m: ClassifierModel) -> Self {
        m.data
    }
}

/// Per-epoch record of a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    /// Loss before each epoch's update, followed by the final loss.
    pub loss_history: Vec<f64>,
    pub learning_rate: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn hash_examples(target: &str, examples: &[(&str, bool)]) -> String {
    let mut h = Sha256::new();
    h.update(target.as_bytes());
    for (text, label) in examples {
        h.update([0u8, *label as u8]);
        h.update(text.as_bytes());
    }
    hex::encode(h.finalize())
}

struct Objective<'a> {
    rows: &'a [Vec<(usize, f64)>],
    labels: &'a [f64],
    sample_weights: &'a [f64],
    total_weight: f64,
    l2: f64,
}

impl Objective<'_> {
    fn loss_and_grad(&self, w: &[f64], b: f64, grad: &mut [f64]) -> (f64, f64) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut loss = 0.0;
        let mut grad_b = 0.0;
        for ((row, &y), &sw) in self.rows.iter().zip(self.labels).zip(self.sample_weights) {
            let z = b + row.iter().map(|&(j, x)| w[j] * x).sum::<f64>();
            loss += sw * (softplus(z) - y * z);
            let r = sw * (sigmoid(z) - y);
            grad_b += r;
            for &(j, x) in row {
                grad[j] += r * x;
            }
        }
        loss /= self.total_weight;
        grad_b /= self.total_weight;
        let mut reg = 0.0;
        for (g, &wj) in grad.iter_mut().zip(w) {
            *g = *g / self.total_weight + self.l2 * wj;
            reg += wj * wj;
        }
        (loss + 0.5 * self.l2 * reg, grad_b)
    }
}

/// Trains a binary classifier on `(text, is_positive)` pairs.
pub fn train_binary(
    target: &str,
    examples: &[(&str, bool)],
    hyper: &Hyperparams,
    trained_on: Option<String>,
) -> Result<(ClassifierModel, TrainingReport), ClassifierError> {
    let positives = examples.iter().filter(|(_, y)| *y).count();
    let negatives = examples.len() - positives;
    if positives < hyper.min_examples_per_class.max(1)
        || negatives < hyper.min_examples_per_class.max(1)
    {
        return Err(ClassifierError::InsufficientData {
            target: target.to_string(),
            positives,
            negatives,
            required: hyper.min_examples_per_class.max(1),
        });
    }

    let spec = FeatureSpec {
        normalization: if hyper.normalize { "l2" } else { "none" }.into(),
        ..FeatureSpec::default()
    };
    let feature_maps: Vec<BTreeMap<String, f64>> = examples
        .iter()
        .map(|(t, _)| spec.features(&lemmas(t)))
        .collect();
    let vocabulary: Vec<String> = feature_maps
        .iter()
        .flat_map(|m| m.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<String, usize> = vocabulary
        .iter()
        .enumerate()
        .map(|(i, f)| (f.clone(), i))
        .collect();
    let rows: Vec<Vec<(usize, f64)>> = examples.iter().map(|(t, _)| spec.vectorize(t, &index)).collect();

    let n = examples.len() as f64;
    let class_weights = match hyper.class_weighting {
        ClassWeighting::None => [1.0, 1.0],
        ClassWeighting::InverseFrequency => {
            [n / (2.0 * negatives as f64), n / (2.0 * positives as f64)]
        }
    };
    let labels: Vec<f64> = examples.iter().map(|(_, y)| if *y { 1.0 } else { 0.0 }).collect();
    let sample_weights: Vec<f64> = examples
        .iter()
        .map(|(_, y)| class_weights[*y as usize])
        .collect();
    let objective = Objective {
        rows: &rows,
        labels: &labels,
        sample_weights: &sample_weights,
        total_weight: sample_weights.iter().sum(),
        l2: hyper.l2,
    };

    let max_sq_norm = rows
        .iter()
        .map(|r| r.iter().map(|(_, x)| x * x).sum::<f64>())
        .fold(0.0, f64::max);
    let lipschitz = 0.25 * (max_sq_norm + 1.0) + hyper.l2;
    let lr = hyper.learning_rate.unwrap_or(1.0 / lipschitz);

    let mut w = vec![0.0; vocabulary.len()];
    let mut b = 0.0;
    let mut grad = vec![0.0; vocabulary.len()];
    let mut history = Vec::with_capacity(hyper.epochs + 1);
    for _ in 0..hyper.epochs {
        let (loss, grad_b) = objective.loss_and_grad(&w, b, &mut grad);
        history.push(loss);
        for (wj, g) in w.iter_mut().zip(&grad) {
            *wj -= lr * g;
        }
        b -= lr * grad_b;
    }
    let (final_loss, _) = objective.loss_and_grad(&w, b, &mut grad);
    history.push(final_loss);

    let data = ModelData {
        format_version: MODEL_FORMAT_VERSION,
        target: target.to_string(),
        feature_spec: spec,
        vocabulary,
        weights: w,
        bias: b,
        training_meta: TrainingMeta {
            corpus_hash: hash_examples(target, examples),
            hyperparameters: hyper.clone(),
            trained_on,
            positives,
            negatives,
            class_weights,
            final_loss,
        },
    };
    Ok((
        ClassifierModel { data, index },
        TrainingReport {
            loss_history: history,
            learning_rate: lr,
        },
    ))
}

impl ClassifierModel {
    pub fn target(&self) -> &str {
        &self.data.target
    }

    pub fn weights(&self) -> &[f64] {
        &self.data.weights
    }

    pub fn bias(&self) -> f64 {
        self.data.bias
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.data.vocabulary
    }

    pub fn feature_spec(&self) -> &FeatureSpec {
        &self.data.feature_spec
    }

    pub fn training_meta(&self) -> &TrainingMeta {
        &self.data.training_meta
    }

    /// Probability of the positive class.
    pub fn predict_proba(&self, text: &str) -> f64 {
        let x = self.data.feature_spec.vectorize(text, &self.index);
        let z = self.data.bias + x.iter().map(|&(j, v)| self.data.weights[j] * v).sum::<f64>();
        sigmoid(z)
    }

    /// Probability assigned to text with no known features.
    pub fn prior(&self) -> f64 {
        sigmoid(self.data.bias)
    }

    pub fn to_json(&self) -> Result<String, ClassifierError> {
        Ok(serde_json::to_string(&self.data)?)
    }

    pub fn from_json(s: &str) -> Result<Self, ClassifierError> {
        let data: ModelData = serde_json::from_str(s)?;
        Self::try_from(data)
    }

    /// SHA-256 over the serialized model with the training date blanked, so
    /// that identical data and seed give identical hashes on any day.
    pub fn model_hash(&self) -> String {
        let mut data = self.data.clone();
        data.training_meta.trained_on = None;
        let bytes = serde_json::to_vec(&data).expect("model data always serializes");
        hex::encode(Sha256::digest(bytes))
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

impl Scorer for ClassifierModel {
    fn target(&self) -> &str {
        &self.data.target
    }

    fn score(&self, text: &str) -> f64 {
        self.predict_proba(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> Vec<(String, bool)> {
        let mut v = Vec::new();
        for i in 0..25 {
            v.push((format!("went running in the park number{i}"), true));
            v.push((format!("read a quiet book at home number{i}"), false));
        }
        v
    }

    fn borrow(v: &[(String, bool)]) -> Vec<(&str, bool)> {
        v.iter().map(|(t, y)| (t.as_str(), *y)).collect()
    }

    #[test]
    fn separable_set_is_fit_perfectly() {
        let data = toy();
        let (m, _) = train_binary("Exercise", &borrow(&data), &Hyperparams::default(), None).unwrap();
        for (t, y) in &data {
            assert_eq!(m.predict_proba(t) >= 0.5, *y, "{t}");
        }
    }

    #[test]
    fn loss_never_increases() {
        let data = toy();
        let (_, report) = train_binary("Exercise", &borrow(&data), &Hyperparams::default(), None).unwrap();
        assert_eq!(report.loss_history.len(), 301);
        for w in report.loss_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
        assert!(report.loss_history.last().unwrap() < &report.loss_history[0]);
    }

    #[test]
    fn inverted_labels_negate_weights() {
        let data = toy();
        let inverted: Vec<(String, bool)> = data.iter().map(|(t, y)| (t.clone(), !y)).collect();
        let hp = Hyperparams::default();
        let (a, _) = train_binary("X", &borrow(&data), &hp, None).unwrap();
        let (b, _) = train_binary("X", &borrow(&inverted), &hp, None).unwrap();
        assert_eq!(a.vocabulary(), b.vocabulary());
        for (wa, wb) in a.weights().iter().zip(b.weights()) {
            assert!((wa + wb).abs() <= 1e-6);
        }
        assert!((a.bias() + b.bias()).abs() <= 1e-6);
    }

    #[test]
    fn insufficient_data() {
        let data = vec![("a b", true), ("c d", false)];
        assert!(matches!(
            train_binary("X", &data, &Hyperparams::default(), None),
            Err(ClassifierError::InsufficientData { .. })
        ));
        let one_class: Vec<(&str, bool)> = (0..30).map(|_| ("a b", true)).collect();
        assert!(train_binary("X", &one_class, &Hyperparams::default(), None).is_err());
    }

    #[test]
    fn reload_is_bit_identical() {
        let data = toy();
        let (m, _) = train_binary("X", &borrow(&data), &Hyperparams::default(), Some("2026-10-15".into())).unwrap();
        let back = ClassifierModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(m, back);
        for t in ["went running", "a book", "unknown words only"] {
            assert_eq!(m.predict_proba(t).to_bits(), back.predict_proba(t).to_bits());
        }
        assert_eq!(m.model_hash(), back.model_hash());
    }

    #[test]
    fn hash_ignores_training_date() {
        let data = toy();
        let hp = Hyperparams::default();
        let (a, _) = train_binary("X", &borrow(&data), &hp, Some("2026-01-01".into())).unwrap();
        let (b, _) = train_binary("X", &borrow(&data), &hp, Some("2026-01-02".into())).unwrap();
        assert_eq!(a.model_hash(), b.model_hash());
    }

    #[test]
    fn rejects_mismatched_weights() {
        let data = toy();
        let (m, _) = train_binary("X", &borrow(&data), &Hyperparams::default(), None).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&m.to_json().unwrap()).unwrap();
        v["weights"].as_array_mut().unwrap().pop();
        assert!(matches!(
            ClassifierModel::from_json(&v.to_string()),
            Err(ClassifierError::Corrupt(_))
        ));
    }
}
