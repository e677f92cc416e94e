//! Named groups of classifiers stored as one JSON file each.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{ClassifierError, ClassifierModel, MODEL_FORMAT_VERSION};

pub const ACTIVITY_FILE: &str = "activity.model.json";
pub const VALUES_FILE: &str = "values.model.json";
pub const POLARITY_FILE: &str = "polarity.model.json";

/// Key of the single model in a polarity bundle.
pub const POLARITY_TARGET: &str = "Positive";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub kind: String,
    pub models: BTreeMap<String, ClassifierModel>,
    /// Targets that had too little data to train.
    #[serde(default)]
    pub skipped: Vec<String>,
}

impl ModelBundle {
    pub fn new(kind: &str) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            kind: kind.to_string(),
            models: BTreeMap::new(),
            skipped: Vec::new(),
        }
    }

    pub fn insert(&mut self, model: ClassifierModel) {
        self.models.insert(model.target().to_string(), model);
    }

    pub fn get(&self, target: &str) -> Option<&ClassifierModel> {
        self.models.get(target)
    }

    /// SHA-256 over the kind and each member's model hash.
    pub fn bundle_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.kind.as_bytes());
        for (name, m) in &self.models {
            h.update([0]);
            h.update(name.as_bytes());
            h.update([0]);
            h.update(m.model_hash().as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn to_json(&self) -> Result<String, ClassifierError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), ClassifierError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ClassifierError> {
        let b: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if b.format_version != MODEL_FORMAT_VERSION {
            return Err(ClassifierError::UnsupportedVersion(b.format_version));
        }
        Ok(b)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelSetError {
    #[error("missing model files: {}", .0.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "))]
    Missing(Vec<PathBuf>),
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        source: ClassifierError,
    },
}

/// Everything the annotation pipeline loads from a models directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    pub activity: ModelBundle,
    pub values: ModelBundle,
    pub polarity: ModelBundle,
}

impl ModelSet {
    pub fn paths(dir: &Path) -> [PathBuf; 3] {
        [ACTIVITY_FILE, VALUES_FILE, POLARITY_FILE].map(|f| dir.join(f))
    }

    /// Loads the three bundles; reports every missing file at once.
    pub fn load_dir(dir: &Path) -> Result<Self, ModelSetError> {
        let paths = Self::paths(dir);
        let missing: Vec<PathBuf> = paths.iter().filter(|p| !p.is_file()).cloned().collect();
        if !missing.is_empty() {
            return Err(ModelSetError::Missing(missing));
        }
        let load = |p: &PathBuf| {
            ModelBundle::load(p).map_err(|source| ModelSetError::Invalid {
                path: p.clone(),
                source,
            })
        };
        Ok(Self {
            activity: load(&paths[0])?,
            values: load(&paths[1])?,
            polarity: load(&paths[2])?,
        })
    }

    pub fn save_dir(&self, dir: &Path) -> Result<(), ClassifierError> {
        let paths = Self::paths(dir);
        self.activity.save(&paths[0])?;
        self.values.save(&paths[1])?;
        self.polarity.save(&paths[2])
    }

    pub fn polarity_model(&self) -> Option<&ClassifierModel> {
        self.polarity.get(POLARITY_TARGET)
    }

    /// Short digest identifying this model set.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for b in [&self.activity, &self.values, &self.polarity] {
            h.update(b.bundle_hash().as_bytes());
        }
        hex::encode(h.finalize())[..12].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_files_all_listed() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join(VALUES_FILE), "{}").unwrap();
        match ModelSet::load_dir(dir.path()) {
            Err(ModelSetError::Missing(m)) => {
                assert_eq!(m.len(), 2);
                let msg = ModelSetError::Missing(m).to_string();
                assert!(msg.contains(ACTIVITY_FILE) && msg.contains(POLARITY_FILE));
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
