//! Line-record corpora: one JSON object per line with `id`, `text` and
//! optional `labels`.

use std::collections::HashSet;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("entry {0:?} has empty text")]
    EmptyText(String),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub text: String,
    /// Gold labels as `kind:name`, e.g. `activity:Meals`, `value:Family`,
    /// `polarity:positive`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
}

impl CorpusEntry {
    pub fn new(id: &str, text: &str) -> Self {
        Self {
            id: id.to_string(),
            text: text.to_string(),
            labels: Vec::new(),
        }
    }

    /// Label names with the given `kind:` prefix.
    pub fn labels_of<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        self.labels.iter().filter_map(move |l| {
            l.split_once(':')
                .filter(|(k, _)| *k == kind)
                .map(|(_, v)| v)
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    /// Where the entries came from, e.g. a file path.
    pub provenance: String,
}

impl Corpus {
    pub fn new(entries: Vec<CorpusEntry>, provenance: &str) -> Result<Self, CorpusError> {
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(CorpusError::DuplicateId(e.id.clone()));
            }
            if e.text.trim().is_empty() {
                return Err(CorpusError::EmptyText(e.id.clone()));
            }
        }
        Ok(Self {
            entries,
            provenance: provenance.to_string(),
        })
    }

    /// Builds a corpus from bare texts with generated ids.
    pub fn from_texts<S: AsRef<str>>(texts: &[S], provenance: &str) -> Result<Self, CorpusError> {
        let entries = texts
            .iter()
            .enumerate()
            .map(|(i, t)| CorpusEntry::new(&format!("t-{i:05}"), t.as_ref()))
            .collect();
        Self::new(entries, provenance)
    }

    pub fn parse_jsonl(doc: &str, provenance: &str) -> Result<Self, CorpusError> {
        let mut entries = Vec::new();
        for (i, line) in doc.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let e: CorpusEntry = serde_json::from_str(line).map_err(|source| CorpusError::Parse {
                line: i + 1,
                source,
            })?;
            entries.push(e);
        }
        Self::new(entries, provenance)
    }

    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut doc = String::new();
        for line in file.lines() {
            doc.push_str(&line?);
            doc.push('\n');
        }
        Self::parse_jsonl(&doc, &path.display().to_string())
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.entries {
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

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// SHA-256 over ids and texts in order; labels are excluded.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.entries {
            h.update(e.id.as_bytes());
            h.update([0]);
            h.update(e.text.as_bytes());
            h.update([0]);
        }
        hex::encode(h.finalize())
    }

    /// Entries carrying a label with the given `kind:` prefix.
    pub fn with_label_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a CorpusEntry> {
        self.entries
            .iter()
            .filter(move |e| e.labels_of(kind).next().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let doc = "{\"id\":\"a\",\"text\":\"I ran\",\"labels\":[\"activity:Exercise\"]}\n\n{\"id\":\"b\",\"text\":\"lunch\"}\n";
        let c = Corpus::parse_jsonl(doc, "inline").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.entries[0].labels_of("activity").collect::<Vec<_>>(), vec!["Exercise"]);
        assert_eq!(c.entries[1].labels_of("activity").count(), 0);
        let mut buf = Vec::new();
        c.write_jsonl(&mut buf).unwrap();
        let back = Corpus::parse_jsonl(std::str::from_utf8(&buf).unwrap(), "inline").unwrap();
        assert_eq!(back, c);
        assert_eq!(back.content_hash(), c.content_hash());
    }

    #[test]
    fn invariants_enforced() {
        let dup = vec![CorpusEntry::new("a", "x"), CorpusEntry::new("a", "y")];
        assert!(matches!(Corpus::new(dup, ""), Err(CorpusError::DuplicateId(_))));
        let empty = vec![CorpusEntry::new("a", "  ")];
        assert!(matches!(Corpus::new(empty, ""), Err(CorpusError::EmptyText(_))));
        assert!(matches!(
            Corpus::parse_jsonl("{not json", ""),
            Err(CorpusError::Parse { line: 1, .. })
        ));
    }
}
