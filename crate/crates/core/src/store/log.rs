//! Append-only event journal. Each event is one JSON line, flushed and
//! synced before it is applied in memory.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::types::*;
use super::StoreError;
use crate::annotate::Annotation;
use crate::scheduler::OutboxRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub(crate) enum Event {
    Profile(UserProfile),
    MomentPut(Moment),
    MomentDeleted { id: u64, at: DateTime<Utc> },
    Annotated(Annotation),
    TagsEdited(TagEdit),
    GoalSet(Goal),
    ReminderAdded(ReminderItem),
    ReminderStatus {
        id: u64,
        status: ReminderStatus,
        at: DateTime<Utc>,
    },
    Suggested(SuggestionRecord),
    Congratulated(CongratulationRecord),
    ArticleSaved(SavedArticle),
    /// A queued notification; also stamps the user's `last_sent`.
    Notified(OutboxRecord),
    /// Outbox entry without side effects, written by compaction.
    Outbox(OutboxRecord),
}

pub(crate) struct EventLog {
    path: PathBuf,
    file: File,
}

impl EventLog {
    /// Opens (creating if needed) and replays the journal. A torn final
    /// line, left by a crash mid-append, is cut off.
    pub fn open(path: &Path) -> Result<(Self, Vec<Event>), StoreError> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        let mut file = OpenOptions::new().create(true).truncate(false).read(true).write(true).open(path)?;
        let mut buf = Vec::new();
        file.read_to_end(&mut buf)?;
        let complete = buf.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        if complete < buf.len() {
            log::warn!(
                "{}: dropping {} bytes of incomplete trailing record",
                path.display(),
                buf.len() - complete
            );
            file.set_len(complete as u64)?;
            file.sync_data()?;
        }
        let mut events = Vec::new();
        for (i, line) in buf[..complete].split(|&b| b == b'\n').enumerate() {
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let e = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
                line: i + 1,
                message: e.to_string(),
            })?;
            events.push(e);
        }
        file.seek(SeekFrom::End(0))?;
        Ok((
            Self {
                path: path.to_path_buf(),
                file,
            },
            events,
        ))
    }

    pub fn append(&mut self, events: &[Event]) -> Result<(), StoreError> {
        let mut buf = Vec::new();
        for e in events {
            serde_json::to_writer(&mut buf, e).map_err(std::io::Error::from)?;
            buf.push(b'\n');
        }
        self.file.write_all(&buf)?;
        self.file.flush()?;
        self.file.sync_data()?;
        Ok(())
    }

    /// Atomically replaces the journal with `events`.
    pub fn rewrite(&mut self, events: &[Event]) -> Result<(), StoreError> {
        let tmp = self.path.with_extension("compact.tmp");
        {
            let mut f = File::create(&tmp)?;
            let mut buf = Vec::new();
            for e in events {
                serde_json::to_writer(&mut buf, e).map_err(std::io::Error::from)?;
                buf.push(b'\n');
            }
            f.write_all(&buf)?;
            f.sync_all()?;
        }
        std::fs::rename(&tmp, &self.path)?;
        self.file = OpenOptions::new().append(true).read(true).open(&self.path)?;
        Ok(())
    }
}
