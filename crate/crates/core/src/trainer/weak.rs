//! Training-set construction from seed lexicons: seed match, similarity
//! expansion, negative-seed trimming.

use std::collections::HashSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::corpus::Corpus;
use super::labeled::{Label, LabeledSet, Provenance};
use super::similarity::WordSimilarityTable;
use crate::text::{find_phrases, lemmas, Phrase, SeedLexicon};

#[derive(Debug, thiserror::Error)]
pub enum WeakSupervisionError {
    #[error("no corpus entry matches any seed for {0:?}")]
    EmptyResult(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakSupervisionConfig {
    /// Sampled negatives per seed positive.
    pub negative_ratio: f64,
    /// Expansion similarity threshold.
    pub sigma: f64,
    pub seed: u64,
}

impl Default for WeakSupervisionConfig {
    fn default() -> Self {
        Self {
            negative_ratio: 1.0,
            sigma: 0.7,
            seed: 7,
        }
    }
}

/// Positive-example counts after each stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct StageSizes {
    pub built: usize,
    pub expanded: usize,
    pub trimmed: usize,
}

fn first_phrase_hit<'p>(lemmas: &[String], phrases: &[(&'p Phrase, ())]) -> Option<&'p Phrase> {
    let refs: Vec<&str> = lemmas.iter().map(String::as_str).collect();
    find_phrases(&refs, phrases).into_iter().next().map(|(_, p, _)| p)
}

/// Positives are entries containing a seed keyword phrase (lemma match);
/// negatives are drawn uniformly, with a fixed seed, from entries that
/// match none. Duplicate texts are kept once.
pub fn build_positive_set(
    corpus: &Corpus,
    seeds: &SeedLexicon,
    negative_ratio: f64,
    seed: u64,
) -> Result<LabeledSet, WeakSupervisionError> {
    let phrases: Vec<(&Phrase, ())> = seeds.keywords().iter().map(|p| (p, ())).collect();
    let single: Vec<String> = seeds
        .keywords()
        .iter()
        .filter(|p| p.len() == 1)
        .map(|p| p[0].clone())
        .collect();
    let mut set = LabeledSet::new(seeds.label()).with_seed_lemmas(single);
    let mut seen = HashSet::new();
    let mut pool = Vec::new();
    for e in &corpus.entries {
        if !seen.insert(e.text.as_str()) {
            continue;
        }
        match first_phrase_hit(&lemmas(&e.text), &phrases) {
            Some(p) => {
                set.push(&e.text, Label::Positive, Provenance::Seed { phrase: p.join(" ") });
            }
            None => pool.push(e.text.as_str()),
        }
    }
    let positives = set.len();
    if positives == 0 {
        return Err(WeakSupervisionError::EmptyResult(seeds.label().to_string()));
    }
    let wanted = ((positives as f64 * negative_ratio).round() as usize).min(pool.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, pool.len(), wanted).into_vec();
    picked.sort_unstable();
    for i in picked {
        set.push(pool[i], Label::Negative, Provenance::Sampled);
    }
    Ok(set)
}

/// Adds every corpus entry containing a lemma whose best similarity to a
/// seed lemma of `current` is at least `sigma`. Sampled negatives that
/// qualify become positives. The triggering lemma is recorded.
pub fn expand_positive_set(
    corpus: &Corpus,
    current: &LabeledSet,
    sim: &WordSimilarityTable,
    sigma: f64,
) -> LabeledSet {
    let mut out = current.clone();
    let near = sim.nearest_seeds(current.seed_lemmas().iter().map(String::as_str), sigma);
    for e in &corpus.entries {
        if out.get(&e.text).is_some_and(|x| x.label == Label::Positive) {
            continue;
        }
        let hit = lemmas(&e.text).into_iter().find_map(|l| {
            let (s, v) = near.get(&l)?;
            Some((l, s.clone(), *v))
        });
        if let Some((lemma, seed, similarity)) = hit {
            out.set(
                &e.text,
                Label::Positive,
                Provenance::Expansion {
                    lemma,
                    seed,
                    similarity,
                },
            );
        }
    }
    out
}

/// Turns every positive that contains a negative-seed phrase into a
/// negative example, recording the triggering phrase.
pub fn trim_with_negative_seeds<'a>(
    set: &LabeledSet,
    negative_seeds: impl IntoIterator<Item = &'a Phrase>,
) -> LabeledSet {
    let phrases: Vec<(&Phrase, ())> = negative_seeds.into_iter().map(|p| (p, ())).collect();
    let mut out = set.clone();
    if phrases.is_empty() {
        return out;
    }
    let hits: Vec<(String, String)> = set
        .positives()
        .filter_map(|e| {
            first_phrase_hit(&lemmas(&e.text), &phrases).map(|p| (e.text.clone(), p.join(" ")))
        })
        .collect();
    for (text, lemma) in hits {
        log::debug!("trimmed from {}: {text:?} ({lemma})", set.target_class());
        out.set(&text, Label::Negative, Provenance::Trimmed { lemma });
    }
    out
}

/// Runs the three stages with the lexicon's own negative keywords.
pub fn build_training_set(
    corpus: &Corpus,
    lexicon: &SeedLexicon,
    sim: &WordSimilarityTable,
    config: &WeakSupervisionConfig,
) -> Result<(LabeledSet, StageSizes), WeakSupervisionError> {
    let built = build_positive_set(corpus, lexicon, config.negative_ratio, config.seed)?;
    let expanded = expand_positive_set(corpus, &built, sim, config.sigma);
    let trimmed = trim_with_negative_seeds(&expanded, lexicon.negative_keywords());
    let sizes = StageSizes {
        built: built.count(Label::Positive),
        expanded: expanded.count(Label::Positive),
        trimmed: trimmed.count(Label::Positive),
    };
    Ok((trimmed, sizes))
}
