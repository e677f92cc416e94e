use super::types::{TagOrigin, ValueTag};
use crate::models::ModelBundle;
use crate::taxonomy::ValueTaxonomy;
use crate::text::{match_lemmas, tokenize, HitKind, SeedLexicon};

pub const DEFAULT_TOP_K: usize = 3;
pub const DEFAULT_MODEL_THRESHOLD: f64 = 0.4;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ValueTaggerError {
    #[error("lexicon label {0:?} is not a taxonomy value")]
    UnknownLabel(String),
    #[error("no lexicon for values: {}", .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("value model unavailable")]
    ModelMissing,
}

/// Tags a moment with every value whose lexicon has a positive hit and no
/// negative hit.
#[derive(Debug, Clone)]
pub struct KeywordValueTagger {
    /// In taxonomy order, labels canonical.
    lexicons: Vec<SeedLexicon>,
}

impl KeywordValueTagger {
    /// Every taxonomy value needs a lexicon and every lexicon label must
    /// resolve to a taxonomy value.
    pub fn new(taxonomy: &ValueTaxonomy, lexicons: &[SeedLexicon]) -> Result<Self, ValueTaggerError> {
        let mut by_value = Vec::new();
        for lex in lexicons {
            let v = taxonomy
                .canonical(lex.label())
                .ok_or_else(|| ValueTaggerError::UnknownLabel(lex.label().to_string()))?;
            by_value.push((v.to_string(), lex));
        }
        let mut ordered = Vec::new();
        let mut uncovered = Vec::new();
        for v in taxonomy.values() {
            match by_value.iter().find(|(name, _)| name == v) {
                Some((_, lex)) => ordered.push(
                    SeedLexicon::new(
                        v,
                        lex.keywords().iter().map(|p| p.join(" ")),
                        lex.negative_keywords().iter().map(|p| p.join(" ")),
                    )
                    .expect("relabelled lexicon stays valid"),
                ),
                None => uncovered.push(v.to_string()),
            }
        }
        if !uncovered.is_empty() {
            return Err(ValueTaggerError::Uncovered(uncovered));
        }
        Ok(Self { lexicons: ordered })
    }

    pub fn lexicons(&self) -> &[SeedLexicon] {
        &self.lexicons
    }

    /// Tags in taxonomy order. Confidence grows with the number of
    /// distinct positive hits: `1 - 0.5^hits`.
    pub fn tag(&self, text: &str) -> Vec<ValueTag> {
        let toks = tokenize(text);
        let lemmas: Vec<&str> = toks.iter().map(|t| t.lemma.as_str()).collect();
        let mut out = Vec::new();
        for lex in &self.lexicons {
            let hits = match_lemmas(&lemmas, lex);
            if hits.iter().any(|h| h.kind == HitKind::Negative) {
                continue;
            }
            let n = hits.len();
            if n > 0 {
                out.push(ValueTag {
                    value: lex.label().to_string(),
                    origin: TagOrigin::Keyword,
                    confidence: 1.0 - 0.5f64.powi(n as i32),
                });
            }
        }
        out
    }

    /// The `k` most confident tags; ties keep taxonomy order.
    pub fn top_k(&self, text: &str, k: usize) -> Vec<ValueTag> {
        let mut tags = self.tag(text);
        tags.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
        tags.truncate(k);
        tags
    }
}

/// Up to `k` values whose model confidence is at least `theta`, most
/// confident first (ties in taxonomy order).
pub fn tag_values_model(
    text: &str,
    bundle: Option<&ModelBundle>,
    taxonomy: &ValueTaxonomy,
    k: usize,
    theta: f64,
) -> Result<Vec<ValueTag>, ValueTaggerError> {
    let bundle = bundle.filter(|b| !b.models.is_empty()).ok_or(ValueTaggerError::ModelMissing)?;
    let mut tags: Vec<ValueTag> = taxonomy
        .values()
        .filter_map(|v| {
            let p = bundle.get(v)?.predict_proba(text);
            (p >= theta).then(|| ValueTag {
                value: v.to_string(),
                origin: TagOrigin::Model,
                confidence: p,
            })
        })
        .collect();
    tags.sort_by(|a, b| b.confidence.total_cmp(&a.confidence));
    tags.truncate(k);
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tagger() -> KeywordValueTagger {
        let t = ValueTaxonomy::default();
        let lexicons: Vec<SeedLexicon> = t
            .values()
            .map(|v| match v {
                "Family" => SeedLexicon::new(v, ["kid", "parent", "mom"], Vec::<&str>::new()),
                "Mindfulness" => SeedLexicon::new(v, ["foliage", "meditate"], Vec::<&str>::new()),
                "Leisure" => SeedLexicon::new(v, ["park", "frisbee"], ["work"]),
                _ => SeedLexicon::new(v, [format!("zz{}", v.len())], Vec::<String>::new()),
            })
            .collect::<Result<_, _>>()
            .unwrap();
        KeywordValueTagger::new(&t, &lexicons).unwrap()
    }

    fn values(tags: &[ValueTag]) -> Vec<&str> {
        tags.iter().map(|t| t.value.as_str()).collect()
    }

    #[test]
    fn keyword_tags() {
        let t = tagger();
        let tags = t.tag("I had a great time playing frisbee with my kids in the park");
        assert_eq!(values(&tags), vec!["Family", "Leisure"]);
        assert_eq!(tags[1].confidence, 0.75);
        assert!(t.tag("asdf qwerty").is_empty());
        assert_eq!(values(&t.tag("walked in the park after work")), Vec::<&str>::new());
    }

    #[test]
    fn top_k_orders_by_confidence() {
        let t = tagger();
        let top = t.top_k("my mom and kids at the park with a frisbee", 1);
        assert_eq!(top.len(), 1);
        assert_eq!(top[0].value, "Family");
    }

    #[test]
    fn coverage_required() {
        let t = ValueTaxonomy::default();
        let one = vec![SeedLexicon::new("Family", ["mom"], Vec::<&str>::new()).unwrap()];
        assert!(matches!(KeywordValueTagger::new(&t, &one), Err(ValueTaggerError::Uncovered(v)) if v.len() == 15));
        let bad = vec![SeedLexicon::new("Fame", ["star"], Vec::<&str>::new()).unwrap()];
        assert_eq!(KeywordValueTagger::new(&t, &bad).unwrap_err(), ValueTaggerError::UnknownLabel("Fame".into()));
    }

    #[test]
    fn model_missing() {
        let t = ValueTaxonomy::default();
        assert_eq!(tag_values_model("x", None, &t, 3, 0.4), Err(ValueTaggerError::ModelMissing));
    }
}
