//! Precision / recall / F1 reports, in percent.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::labeled::LabeledSet;
use crate::classifier::Scorer;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("test set is empty")]
    EmptyTestSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Gold items of this class.
    pub support: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl ClassMetrics {
    pub fn from_counts(class: &str, tp: usize, fp: usize, fn_: usize) -> Self {
        let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let precision = pct(tp, tp + fp);
        let recall = pct(tp, tp + fn_);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Self {
            class: class.to_string(),
            precision,
            recall,
            f1,
            support: tp + fn_,
            true_positives: tp,
            false_positives: fp,
            false_negatives: fn_,
        }
    }
}

/// Tagger-specific figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaggerSummary {
    /// Percent of items with at least one correct tag.
    pub at_least_one_correct: f64,
    /// Percent of emitted tags that are correct (micro-averaged).
    pub tag_precision: f64,
    pub total_tags: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub per_class: Vec<ClassMetrics>,
    pub items: usize,
    /// Percent of items whose prediction equals the gold label.
    pub accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tagger: Option<TaggerSummary>,
}

impl Metrics {
    pub fn class(&self, name: &str) -> Option<&ClassMetrics> {
        self.per_class.iter().find(|c| c.class == name)
    }

    /// Fixed-width table with one row per class.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:>9} {:>9} {:>9} {:>8}", "class", "precision", "recall", "F1", "support");
        for c in &self.per_class {
            let _ = writeln!(
                s,
                "{:<28} {:>9.1} {:>9.1} {:>9.1} {:>8}",
                c.class, c.precision, c.recall, c.f1, c.support
            );
        }
        let _ = writeln!(s, "items: {}  accuracy: {:.1}", self.items, self.accuracy);
        if let Some(t) = &self.tagger {
            let _ = writeln!(
                s,
                "at least one correct: {:.1}  tag precision: {:.1}  total tags: {}",
                t.at_least_one_correct, t.tag_precision, t.total_tags
            );
        }
        s
    }
}

/// Single-label evaluation where `None` means "no class". Every class in
/// `classes` gets a row even without support.
pub fn evaluate_single_label(
    classes: &[&str],
    pairs: &[(Option<&str>, Option<&str>)],
) -> Result<Metrics, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let per_class = classes
        .iter()
        .map(|&c| {
            let tp = pairs.iter().filter(|(g, p)| *g == Some(c) && *p == Some(c)).count();
            let fp = pairs.iter().filter(|(g, p)| *g != Some(c) && *p == Some(c)).count();
            let fn_ = pairs.iter().filter(|(g, p)| *g == Some(c) && *p != Some(c)).count();
            ClassMetrics::from_counts(c, tp, fp, fn_)
        })
        .collect();
    let correct = pairs.iter().filter(|(g, p)| g == p).count();
    Ok(Metrics {
        per_class,
        items: pairs.len(),
        accuracy: 100.0 * correct as f64 / pairs.len() as f64,
        tagger: None,
    })
}

/// Binary evaluation of a scorer on a labeled set at `threshold`.
pub fn evaluate_binary(
    model: &dyn Scorer,
    test: &LabeledSet,
    threshold: f64,
) -> Result<Metrics, EvalError> {
    let target = model.target().to_string();
    let preds: Vec<(bool, bool)> = test
        .examples()
        .iter()
        .map(|e| (e.label.is_positive(), model.score(&e.text) >= threshold))
        .collect();
    let pairs: Vec<(Option<&str>, Option<&str>)> = preds
        .iter()
        .map(|&(g, p)| (g.then_some(target.as_str()), p.then_some(target.as_str())))
        .collect();
    evaluate_single_label(&[target.as_str()], &pairs)
}

/// Multi-label evaluation of a value tagger: per-class figures plus the
/// at-least-one-correct rate (over items with a non-empty gold set), micro
/// tag precision and the total number of emitted tags.
pub fn evaluate_tagger(
    classes: &[&str],
    items: &[(BTreeSet<String>, BTreeSet<String>)],
) -> Result<Metrics, EvalError> {
    if items.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    let per_class = classes
        .iter()
        .map(|&c| {
            let (mut tp, mut fp, mut fn_) = (0, 0, 0);
            for (gold, pred) in items {
                match (gold.contains(c), pred.contains(c)) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    (false, false) => {}
                }
            }
            ClassMetrics::from_counts(c, tp, fp, fn_)
        })
        .collect();
    let with_gold: Vec<_> = items.iter().filter(|(g, _)| !g.is_empty()).collect();
    let hit = with_gold.iter().filter(|(g, p)| !g.is_disjoint(p)).count();
    let total_tags: usize = items.iter().map(|(_, p)| p.len()).sum();
    let correct_tags: usize = items.iter().map(|(g, p)| g.intersection(p).count()).sum();
    let exact = items.iter().filter(|(g, p)| g == p).count();
    let pct = |n: usize, d: usize| if d == 0 { 0.0 } else { 100.0 * n as f64 / d as f64 };
    Ok(Metrics {
        per_class,
        items: items.len(),
        accuracy: pct(exact, items.len()),
        tagger: Some(TaggerSummary {
            at_least_one_correct: pct(hit, with_gold.len()),
            tag_precision: pct(correct_tags, total_tags),
            total_tags,
        }),
    })
}
