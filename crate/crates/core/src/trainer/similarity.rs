//! Lemma similarity from a plain-text word-vector file or an explicit
//! pair table.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use crate::text::lemmatize;

#[derive(Debug, thiserror::Error)]
pub enum SimilarityError {
    #[error("line {line}: expected {expected} components, found {found}")]
    Dimension {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: bad number {token:?}")]
    Number { line: usize, token: String },
    #[error("similarity for ({0}, {1}) outside [0, 1]")]
    Range(String, String),
    #[error("no vectors")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone)]
enum Backing {
    /// Unit-length vectors.
    Vectors(HashMap<String, Vec<f32>>),
    /// Unordered pair → similarity, keyed with the smaller lemma first.
    Pairs(HashMap<(String, String), f64>),
}

/// Similarity in `[0, 1]` between lemmas. `similarity(w, w) = 1` and the
/// relation is symmetric; out-of-vocabulary pairs score 0.
#[derive(Debug, Clone)]
pub struct WordSimilarityTable {
    vocabulary: BTreeSet<String>,
    backing: Backing,
}

impl WordSimilarityTable {
    /// Parses whitespace-separated `word v1 v2 ...` lines. An optional first
    /// line `count dim` is skipped. Keys are lemmatized; when two keys share
    /// a lemma the first one wins.
    pub fn parse_vectors(doc: &str) -> Result<Self, SimilarityError> {
        let mut vectors: HashMap<String, Vec<f32>> = HashMap::new();
        let mut dim = None;
        for (i, line) in doc.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let rest: Vec<&str> = parts.collect();
            if i == 0 && rest.len() == 1 && word.parse::<usize>().is_ok() {
                continue;
            }
            let mut v = Vec::with_capacity(rest.len());
            for t in rest {
                v.push(t.parse::<f32>().map_err(|_| SimilarityError::Number {
                    line: i + 1,
                    token: t.to_string(),
                })?);
            }
            let expected = *dim.get_or_insert(v.len());
            if v.len() != expected || expected == 0 {
                return Err(SimilarityError::Dimension {
                    line: i + 1,
                    expected,
                    found: v.len(),
                });
            }
            let norm = v.iter().map(|x| x * x).sum::<f32>().sqrt();
            if norm > 0.0 {
                v.iter_mut().for_each(|x| *x /= norm);
            }
            vectors.entry(lemmatize(word)).or_insert(v);
        }
        if vectors.is_empty() {
            return Err(SimilarityError::Empty);
        }
        Ok(Self {
            vocabulary: vectors.keys().cloned().collect(),
            backing: Backing::Vectors(vectors),
        })
    }

    pub fn load(path: &Path) -> Result<Self, SimilarityError> {
        Self::parse_vectors(&std::fs::read_to_string(path)?)
    }

    /// Explicit table; unspecified pairs of distinct lemmas score 0.
    pub fn from_pairs(pairs: &[(&str, &str, f64)]) -> Result<Self, SimilarityError> {
        let mut vocabulary = BTreeSet::new();
        let mut map = HashMap::new();
        for &(a, b, s) in pairs {
            let (a, b) = (lemmatize(a), lemmatize(b));
            if !(0.0..=1.0).contains(&s) {
                return Err(SimilarityError::Range(a, b));
            }
            vocabulary.insert(a.clone());
            vocabulary.insert(b.clone());
            map.insert(ordered(a, b), s);
        }
        Ok(Self {
            vocabulary,
            backing: Backing::Pairs(map),
        })
    }

    pub fn vocabulary(&self) -> &BTreeSet<String> {
        &self.vocabulary
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.vocabulary.contains(lemma)
    }

    pub fn similarity(&self, a: &str, b: &str) -> f64 {
        if a == b {
            return 1.0;
        }
        match &self.backing {
            Backing::Vectors(v) => match (v.get(a), v.get(b)) {
                (Some(x), Some(y)) => {
                    let dot: f32 = x.iter().zip(y).map(|(p, q)| p * q).sum();
                    (dot as f64).clamp(0.0, 1.0)
                }
                _ => 0.0,
            },
            Backing::Pairs(p) => p
                .get(&ordered(a.to_string(), b.to_string()))
                .copied()
                .unwrap_or(0.0),
        }
    }

    /// For every vocabulary lemma, the most similar of `seeds` (first in
    /// iteration order on ties) when that similarity is at least `sigma`.
    pub fn nearest_seeds<'s>(
        &self,
        seeds: impl IntoIterator<Item = &'s str> + Clone,
        sigma: f64,
    ) -> HashMap<String, (String, f64)> {
        let mut out = HashMap::new();
        for w in &self.vocabulary {
            let mut best: Option<(&str, f64)> = None;
            for s in seeds.clone() {
                let sim = self.similarity(w, s);
                if best.is_none_or(|(_, b)| sim > b) {
                    best = Some((s, sim));
                }
            }
            if let Some((s, sim)) = best.filter(|&(_, sim)| sim >= sigma) {
                out.insert(w.clone(), (s.to_string(), sim));
            }
        }
        out
    }
}

fn ordered(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
