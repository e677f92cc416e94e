//! Data files shipped with the crate.

use std::path::PathBuf;

use crate::text::{parse_lexicons, SeedLexicon};

pub const ACTIVITY_LEXICONS: &str = include_str!("../../../data/lexicons/activities.toml");
pub const VALUE_LEXICONS: &str = include_str!("../../../data/lexicons/values.toml");
pub const PROMPTS: &str = include_str!("../../../data/content/prompts.toml");
pub const ARTICLES: &str = include_str!("../../../data/content/articles.toml");
pub const POOLS: &str = include_str!("../../../data/content/pools.toml");

/// The repository's `data/` directory (corpora, vectors, lexicons, content).
pub fn data_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

pub fn activity_lexicons() -> Vec<SeedLexicon> {
    parse_lexicons(ACTIVITY_LEXICONS).expect("bundled activity lexicons are valid")
}

pub fn value_lexicons() -> Vec<SeedLexicon> {
    parse_lexicons(VALUE_LEXICONS).expect("bundled value lexicons are valid")
}
