//! Deterministic text primitives shared by every classifier and by search.

mod lemma;
mod lexicon;
mod tokenize;

pub use lemma::lemmatize;
pub use lexicon::{
    find_phrases, load_lexicons, match_lemmas, match_lexicon, parse_lexicons, HitKind,
    KeywordHit, LexiconEntry, LexiconError, Phrase, SeedLexicon,
};
pub use tokenize::{lemmas, tokenize, Token};
