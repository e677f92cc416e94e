use std::collections::BTreeSet;
use std::ops::Range;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lemma::lemmatize;
use super::tokenize::Token;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("lexicon {label:?} has no keywords")]
    NoKeywords { label: String },
    #[error("lexicon {label:?}: {phrase:?} is both a keyword and a negative keyword")]
    Overlap { label: String, phrase: String },
    #[error("lexicon {label:?}: phrase {phrase:?} must have 1 to 3 words")]
    PhraseLength { label: String, phrase: String },
    #[error("duplicate lexicon label {0:?}")]
    DuplicateLabel(String),
    #[error("reading lexicon file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing lexicon file: {0}")]
    Parse(#[from] toml::de::Error),
}

/// A phrase of one to three lemmas.
pub type Phrase = Vec<String>;

/// Keyword lists for one label (a life value or an activity class).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeedLexicon {
    label: String,
    keywords: BTreeSet<Phrase>,
    negative_keywords: BTreeSet<Phrase>,
}

/// Raw on-disk form of one lexicon entry.
#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct LexiconEntry {
    pub label: String,
    pub keywords: Vec<String>,
    #[serde(default)]
    pub negative_keywords: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct LexiconFile {
    #[serde(default)]
    lexicon: Vec<LexiconEntry>,
}

fn to_phrase(label: &str, raw: &str) -> Result<Phrase, LexiconError> {
    let words: Vec<&str> = raw.split_whitespace().collect();
    if words.is_empty() || words.len() > 3 {
        return Err(LexiconError::PhraseLength {
            label: label.to_string(),
            phrase: raw.to_string(),
        });
    }
    let phrase: Phrase = words.iter().map(|w| lemmatize(w)).collect();
    let original: Vec<String> = words.iter().map(|w| w.to_string()).collect();
    if phrase != original {
        log::warn!(
            "lexicon {label:?}: {raw:?} is not in lemma form, using {:?}",
            phrase.join(" ")
        );
    }
    Ok(phrase)
}

impl SeedLexicon {
    /// Builds a lexicon, lemmatizing every phrase.
    pub fn new<K, N>(label: &str, keywords: K, negative_keywords: N) -> Result<Self, LexiconError>
    where
        K: IntoIterator,
        K::Item: AsRef<str>,
        N: IntoIterator,
        N::Item: AsRef<str>,
    {
        let keywords = keywords
            .into_iter()
            .map(|k| to_phrase(label, k.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let negative_keywords = negative_keywords
            .into_iter()
            .map(|k| to_phrase(label, k.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if keywords.is_empty() {
            return Err(LexiconError::NoKeywords {
                label: label.to_string(),
            });
        }
        if let Some(p) = keywords.intersection(&negative_keywords).next() {
            return Err(LexiconError::Overlap {
                label: label.to_string(),
                phrase: p.join(" "),
            });
        }
        Ok(Self {
            label: label.to_string(),
            keywords,
            negative_keywords,
        })
    }

    pub fn from_entry(entry: &LexiconEntry) -> Result<Self, LexiconError> {
        Self::new(&entry.label, &entry.keywords, &entry.negative_keywords)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn keywords(&self) -> &BTreeSet<Phrase> {
        &self.keywords
    }

    pub fn negative_keywords(&self) -> &BTreeSet<Phrase> {
        &self.negative_keywords
    }

    /// Single-lemma keywords, the terms similarity expansion works from.
    pub fn keyword_lemmas(&self) -> impl Iterator<Item = &str> {
        self.keywords
            .iter()
            .filter(|p| p.len() == 1)
            .map(|p| p[0].as_str())
    }

    pub fn contains(&self, phrase: &[String]) -> bool {
        self.keywords.iter().any(|k| k.as_slice() == phrase)
            || self.negative_keywords.iter().any(|k| k.as_slice() == phrase)
    }
}

/// Parses a lexicon document:
///
/// ```toml
/// [[lexicon]]
/// label = "Exercise"
/// keywords = ["run", "yoga"]
/// negative_keywords = ["watch"]
/// ```
pub fn parse_lexicons(doc: &str) -> Result<Vec<SeedLexicon>, LexiconError> {
    let file: LexiconFile = toml::from_str(doc)?;
    let mut seen = BTreeSet::new();
    file.lexicon
        .iter()
        .map(|e| {
            if !seen.insert(e.label.clone()) {
                return Err(LexiconError::DuplicateLabel(e.label.clone()));
            }
            SeedLexicon::from_entry(e)
        })
        .collect()
}

pub fn load_lexicons(path: &Path) -> Result<Vec<SeedLexicon>, LexiconError> {
    let doc = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_lexicons(&doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitKind {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordHit {
    pub label: String,
    pub matched_phrase: Phrase,
    /// Token index range.
    pub span: Range<usize>,
    pub kind: HitKind,
}

/// Longest-first, non-overlapping scan of `lemmas` for any of `phrases`.
/// Returns `(span, phrase, tag)` triples in span order.
pub fn find_phrases<'p, T: Copy>(
    lemmas: &[&str],
    phrases: &[(&'p Phrase, T)],
) -> Vec<(Range<usize>, &'p Phrase, T)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < lemmas.len() {
        let best = phrases
            .iter()
            .filter(|(p, _)| {
                i + p.len() <= lemmas.len() && p.iter().zip(&lemmas[i..]).all(|(a, b)| a == b)
            })
            .max_by_key(|(p, _)| p.len());
        match best {
            Some(&(p, tag)) => {
                out.push((i..i + p.len(), p, tag));
                i += p.len();
            }
            None => i += 1,
        }
    }
    out
}

/// Matches the lexicon's keyword and negative-keyword phrases against the
/// token lemmas. Both kinds are reported; callers decide what a negative
/// hit means.
pub fn match_lexicon(tokens: &[Token<'_>], lexicon: &SeedLexicon) -> Vec<KeywordHit> {
    let lemmas: Vec<&str> = tokens.iter().map(|t| t.lemma.as_str()).collect();
    match_lemmas(&lemmas, lexicon)
}

pub fn match_lemmas(lemmas: &[&str], lexicon: &SeedLexicon) -> Vec<KeywordHit> {
    let phrases: Vec<(&Phrase, HitKind)> = lexicon
        .keywords
        .iter()
        .map(|p| (p, HitKind::Positive))
        .chain(lexicon.negative_keywords.iter().map(|p| (p, HitKind::Negative)))
        .collect();
    find_phrases(lemmas, &phrases)
        .into_iter()
        .map(|(span, phrase, kind)| KeywordHit {
            label: lexicon.label.clone(),
            matched_phrase: phrase.clone(),
            span,
            kind,
        })
        .collect()
}
