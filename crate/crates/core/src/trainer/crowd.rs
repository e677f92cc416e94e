//! Labeling-task export and import. Workers see a moment with up to `k`
//! candidate values from the keyword tagger and pick the accurate ones, or
//! "none of these".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::corpus::Corpus;
use super::labeled::{Label, LabeledSet, Provenance};
use crate::annotate::KeywordValueTagger;

pub const NONE_OPTION: &str = "none of these";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelingTask {
    pub task_id: String,
    pub text: String,
    pub candidates: Vec<String>,
    pub none_option: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub task_id: String,
    pub selection: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum CrowdError {
    #[error("selection for unknown task {0:?}")]
    UnknownTaskId(String),
    #[error("malformed selection for {task_id:?}: {reason}")]
    MalformedSelection { task_id: String, reason: String },
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn task_id(entry_id: &str) -> String {
    format!("task-{entry_id}")
}

/// One task per corpus entry, candidates being the tagger's top `k`.
pub fn export_labeling_tasks(corpus: &Corpus, tagger: &KeywordValueTagger, k: usize) -> Vec<LabelingTask> {
    corpus
        .entries
        .iter()
        .map(|e| LabelingTask {
            task_id: task_id(&e.id),
            text: e.text.clone(),
            candidates: tagger.top_k(&e.text, k).into_iter().map(|t| t.value).collect(),
            none_option: NONE_OPTION.to_string(),
            selection: None,
        })
        .collect()
}

pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(input: R) -> Result<Vec<T>, CrowdError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|source| CrowdError::Parse { line: i + 1, source })?);
    }
    Ok(out)
}

fn check_selection(task: &LabelingTask, selection: &[String]) -> Result<(), CrowdError> {
    let bad = |reason: String| CrowdError::MalformedSelection {
        task_id: task.task_id.clone(),
        reason,
    };
    if selection.is_empty() {
        return Err(bad("empty selection".into()));
    }
    let none = selection.contains(&task.none_option);
    if none && selection.len() > 1 {
        return Err(bad(format!("{:?} combined with values", task.none_option)));
    }
    for s in selection {
        if *s != task.none_option && !task.candidates.contains(s) {
            return Err(bad(format!("{s:?} was not a displayed candidate")));
        }
    }
    let unique: BTreeSet<&String> = selection.iter().collect();
    if unique.len() != selection.len() {
        return Err(bad("repeated choice".into()));
    }
    Ok(())
}

/// Per-value labeled sets: chosen candidates are positives, displayed but
/// unchosen candidates negatives. Selections come from `selections` or,
/// failing that, from the task's own `selection` field; tasks with neither
/// are skipped. A later selection record for a task replaces an earlier one.
pub fn import_labels(
    tasks: &[LabelingTask],
    selections: &[SelectionRecord],
) -> Result<BTreeMap<String, LabeledSet>, CrowdError> {
    let by_id: HashMap<&str, &LabelingTask> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut chosen: HashMap<&str, &[String]> = HashMap::new();
    for r in selections {
        let task = by_id
            .get(r.task_id.as_str())
            .ok_or_else(|| CrowdError::UnknownTaskId(r.task_id.clone()))?;
        check_selection(task, &r.selection)?;
        chosen.insert(task.task_id.as_str(), &r.selection);
    }
    let mut sets: BTreeMap<String, LabeledSet> = BTreeMap::new();
    for task in tasks {
        let selection = match (chosen.get(task.task_id.as_str()), &task.selection) {
            (Some(s), _) => *s,
            (None, Some(s)) => {
                check_selection(task, s)?;
                s.as_slice()
            }
            (None, None) => continue,
        };
        for c in &task.candidates {
            let label = if selection.contains(c) { Label::Positive } else { Label::Negative };
            sets.entry(c.clone()).or_insert_with(|| LabeledSet::new(c)).push(
                &task.text,
                label,
                Provenance::Crowd {
                    task_id: task.task_id.clone(),
                },
            );
        }
    }
    Ok(sets)
}

/// Stand-in for human workers: picks the candidates that are among the
/// entry's gold `value:` labels, flipping each decision with probability
/// `noise`. Tasks whose entry has no gold labels are left unanswered.
pub fn simulate_selections(tasks: &[LabelingTask], gold: &Corpus, noise: f64, seed: u64) -> Vec<SelectionRecord> {
    let gold_by_task: HashMap<String, BTreeSet<&str>> = gold
        .entries
        .iter()
        .map(|e| (task_id(&e.id), e.labels_of("value").collect()))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for t in tasks {
        let Some(g) = gold_by_task.get(&t.task_id).filter(|g| !g.is_empty()) else { continue };
        let mut picked: Vec<String> = t
            .candidates
            .iter()
            .filter(|c| g.contains(c.as_str()) != rng.gen_bool(noise))
            .cloned()
            .collect();
        if picked.is_empty() {
            picked.push(t.none_option.clone());
        }
        out.push(SelectionRecord {
            task_id: t.task_id.clone(),
            selection: picked,
        });
    }
    out
}
