use super::external::SentimentAdapter;
use super::types::{ExternalStatus, Polarity, PolarityLabel, PolaritySource};
use crate::classifier::Scorer;

/// External scores at or below this count as negative sentiment.
pub const EXTERNAL_NEGATIVE_THRESHOLD: f64 = -0.25;

/// Two-stage polarity decision. A negative external verdict ends the
/// decision without consulting `model`; otherwise the trained classifier
/// decides at probability 0.5. When the external analyzer is unreachable
/// the trained classifier decides alone and the result says so.
pub fn classify_polarity(
    text: &str,
    external: &dyn SentimentAdapter,
    model: &dyn Scorer,
    negative_threshold: f64,
) -> Polarity {
    let status = match external.analyze(text) {
        Ok(s) if s.score <= negative_threshold => {
            return Polarity {
                label: PolarityLabel::Negative,
                source: PolaritySource::ExternalNegative,
                confidence: 0.5 + 0.5 * s.score.abs().min(1.0),
                external: ExternalStatus::Ok,
            };
        }
        Ok(_) => ExternalStatus::Ok,
        Err(e) => {
            log::warn!("polarity falling back to trained classifier: {e}");
            ExternalStatus::Unavailable
        }
    };
    let p = model.score(text);
    let (label, confidence) = if p >= 0.5 {
        (PolarityLabel::Positive, p)
    } else {
        (PolarityLabel::Negative, 1.0 - p)
    };
    Polarity {
        label,
        source: PolaritySource::TrainedClassifier,
        confidence,
        external: status,
    }
}
