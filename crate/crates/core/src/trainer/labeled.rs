use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// How an example entered its set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Matched a seed keyword phrase.
    Seed { phrase: String },
    /// Contains `lemma`, similar to seed `seed`.
    Expansion {
        lemma: String,
        seed: String,
        similarity: f64,
    },
    /// Random draw from entries that matched no seed.
    Sampled,
    /// Was positive until it matched negative seed `lemma`.
    Trimmed { lemma: String },
    /// Chosen or rejected in a labeling task.
    Crowd { task_id: String },
    /// Chosen for another value in a labeling task.
    OneVsRest { task_id: String, value: String },
    /// Taken from a labeled corpus file.
    Gold { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub label: Label,
    pub provenance: Provenance,
}

#[derive(Debug, thiserror::Error)]
pub enum LabeledSetError {
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error("missing header line")]
    MissingHeader,
    #[error("duplicate text {0:?}")]
    DuplicateText(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Binary training examples for one target class. Texts are unique.
#[derive(Debug, Clone, Default)]
pub struct LabeledSet {
    target_class: String,
    seed_lemmas: BTreeSet<String>,
    examples: Vec<LabeledExample>,
    index: HashMap<String, usize>,
}

impl PartialEq for LabeledSet {
    fn eq(&self, other: &Self) -> bool {
        self.target_class == other.target_class
            && self.seed_lemmas == other.seed_lemmas
            && self.examples == other.examples
    }
}

#[derive(Serialize, Deserialize)]
struct Header {
    target_class: String,
    #[serde(default)]
    seed_lemmas: BTreeSet<String>,
}

impl LabeledSet {
    pub fn new(target_class: &str) -> Self {
        Self {
            target_class: target_class.to_string(),
            ..Default::default()
        }
    }

    pub fn with_seed_lemmas(mut self, lemmas: impl IntoIterator<Item = String>) -> Self {
        self.seed_lemmas = lemmas.into_iter().collect();
        self
    }

    pub fn target_class(&self) -> &str {
        &self.target_class
    }

    /// Single-lemma seed keywords the set was built from; expansion
    /// measures similarity against these.
    pub fn seed_lemmas(&self) -> &BTreeSet<String> {
        &self.seed_lemmas
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn get(&self, text: &str) -> Option<&LabeledExample> {
        self.index.get(text).map(|&i| &self.examples[i])
    }

    /// Adds an example; returns false and changes nothing if the text is
    /// already present.
    pub fn push(&mut self, text: &str, label: Label, provenance: Provenance) -> bool {
        if self.index.contains_key(text) {
            return false;
        }
        self.index.insert(text.to_string(), self.examples.len());
        self.examples.push(LabeledExample {
            text: text.to_string(),
            label,
            provenance,
        });
        true
    }

    /// Relabels an existing example, or adds it.
    pub fn set(&mut self, text: &str, label: Label, provenance: Provenance) {
        match self.index.get(text) {
            Some(&i) => {
                self.examples[i].label = label;
                self.examples[i].provenance = provenance;
            }
            None => {
                self.push(text, label, provenance);
            }
        }
    }

    pub fn count(&self, label: Label) -> usize {
        self.examples.iter().filter(|e| e.label == label).count()
    }

    pub fn positives(&self) -> impl Iterator<Item = &LabeledExample> {
        self.examples.iter().filter(|e| e.label == Label::Positive)
    }

    pub fn negatives(&self) -> impl Iterator<Item = &LabeledExample> {
        self.examples.iter().filter(|e| e.label == Label::Negative)
    }

    /// `(text, is_positive)` pairs in insertion order.
    pub fn training_pairs(&self) -> Vec<(&str, bool)> {
        self.examples
            .iter()
            .map(|e| (e.text.as_str(), e.label.is_positive()))
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let header = Header {
            target_class: self.target_class.clone(),
            seed_lemmas: self.seed_lemmas.clone(),
        };
        serde_json::to_writer(&mut out, &header)?;
        out.write_all(b"\n")?;
        for e in &self.examples {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_jsonl(&mut w)?;
        w.flush()
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self, LabeledSetError> {
        let mut set: Option<LabeledSet> = None;
        for (i, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parse = |source| LabeledSetError::Parse { line: i + 1, source };
            match set.as_mut() {
                None => {
                    let h: Header = serde_json::from_str(&line).map_err(parse)?;
                    set = Some(LabeledSet::new(&h.target_class).with_seed_lemmas(h.seed_lemmas));
                }
                Some(s) => {
                    let e: LabeledExample = serde_json::from_str(&line).map_err(parse)?;
                    if !s.push(&e.text, e.label, e.provenance) {
                        return Err(LabeledSetError::DuplicateText(e.text));
                    }
                }
            }
        }
        set.ok_or(LabeledSetError::MissingHeader)
    }

    pub fn load(path: &Path) -> Result<Self, LabeledSetError> {
        Self::read_jsonl(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}
