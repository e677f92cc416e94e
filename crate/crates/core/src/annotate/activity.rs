use super::types::ActivityClass;
use crate::classifier::Scorer;

/// Default activity confidence threshold.
pub const ACTIVITY_THRESHOLD: f64 = 0.5;

/// Highest-scoring class when its score is at least `tau`. Equal scores
/// resolve to the earlier class in `ActivityClass` order.
pub fn argmax_activity(scores: &[(ActivityClass, f64)], tau: f64) -> Option<(ActivityClass, f64)> {
    let mut sorted = scores.to_vec();
    sorted.sort_by_key(|&(c, _)| c);
    let mut best: Option<(ActivityClass, f64)> = None;
    for (c, s) in sorted {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((c, s));
        }
    }
    best.filter(|&(_, s)| s >= tau)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityDecision {
    pub best: Option<(ActivityClass, f64)>,
    /// Score of every class whose model ran.
    pub scores: Vec<(ActivityClass, f64)>,
    /// Classes with no model; excluded from the argmax.
    pub missing: Vec<ActivityClass>,
}

/// Scores `text` with each available class model and applies
/// [`argmax_activity`].
pub fn classify_activity(
    text: &str,
    models: &[(ActivityClass, Option<&dyn Scorer>)],
    tau: f64,
) -> ActivityDecision {
    let mut scores = Vec::new();
    let mut missing = Vec::new();
    for &(class, model) in models {
        match model {
            Some(m) => scores.push((class, m.score(text))),
            None => missing.push(class),
        }
    }
    ActivityDecision {
        best: argmax_activity(&scores, tau),
        scores,
        missing,
    }
}
