//! Life-value taxonomy.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum TaxonomyError {
    #[error("value {0:?} appears more than once")]
    DuplicateValue(String),
    #[error("taxonomy has no values")]
    Empty,
    #[error("reading taxonomy: {0}")]
    Io(#[from] std::io::Error),
    #[error("parsing taxonomy: {0}")]
    Parse(#[from] toml::de::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCategory {
    pub name: String,
    pub values: Vec<String>,
}

/// Life values grouped by category. Value names are unique across the
/// taxonomy and the enumeration order is the canonical display order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueTaxonomy {
    categories: Vec<ValueCategory>,
    #[serde(default)]
    aliases: BTreeMap<String, String>,
}

const DEFAULT: &[(&str, &[&str])] = &[
    ("Connection", &["Socializing", "Teamwork", "Emotional Intimacy", "Romance", "Family"]),
    ("Humanity", &["Self-compassion", "Compassion for others", "Gratitude"]),
    ("Growth", &["Mindfulness", "Learning", "Be creative", "Important accomplishment"]),
    ("Healthy Lifestyle", &["Leisure", "Laugh", "Physical well-being", "Exciting experiences"]),
];

impl Default for ValueTaxonomy {
    fn default() -> Self {
        let categories = DEFAULT
            .iter()
            .map(|(name, values)| ValueCategory {
                name: name.to_string(),
                values: values.iter().map(|v| v.to_string()).collect(),
            })
            .collect();
        let aliases = [("achievement", "Important accomplishment")]
            .into_iter()
            .map(|(a, v)| (a.to_string(), v.to_string()))
            .collect();
        Self { categories, aliases }
    }
}

impl ValueTaxonomy {
    pub fn new(categories: Vec<ValueCategory>) -> Result<Self, TaxonomyError> {
        let t = Self {
            categories,
            aliases: BTreeMap::new(),
        };
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<(), TaxonomyError> {
        let mut seen = std::collections::BTreeSet::new();
        for v in self.values() {
            if !seen.insert(v.to_lowercase()) {
                return Err(TaxonomyError::DuplicateValue(v.to_string()));
            }
        }
        if seen.is_empty() {
            return Err(TaxonomyError::Empty);
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TaxonomyError> {
        let t: Self = toml::from_str(&std::fs::read_to_string(path)?)?;
        t.validate()?;
        Ok(t)
    }

    pub fn categories(&self) -> &[ValueCategory] {
        &self.categories
    }

    /// All values in canonical order.
    pub fn values(&self) -> impl Iterator<Item = &str> {
        self.categories
            .iter()
            .flat_map(|c| c.values.iter().map(String::as_str))
    }

    pub fn len(&self) -> usize {
        self.values().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, value: &str) -> bool {
        self.values().any(|v| v == value)
    }

    /// Resolves a user-supplied name (case-insensitive, aliases allowed) to
    /// the canonical value name.
    pub fn canonical(&self, name: &str) -> Option<&str> {
        let wanted = name.trim().to_lowercase();
        if let Some(v) = self.values().find(|v| v.to_lowercase() == wanted) {
            return Some(v);
        }
        let target = self.aliases.get(&wanted)?;
        self.values().find(|v| v == target)
    }

    /// Position of `value` in canonical order.
    pub fn rank(&self, value: &str) -> Option<usize> {
        self.values().position(|v| v == value)
    }

    pub fn category_of(&self, value: &str) -> Option<&str> {
        self.categories
            .iter()
            .find(|c| c.values.iter().any(|v| v == value))
            .map(|c| c.name.as_str())
    }
}
