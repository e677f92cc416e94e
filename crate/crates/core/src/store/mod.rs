//! Durable journal state: moments, annotations, tag edits, goals,
//! reminders and feedback history, kept in memory and persisted as an
//! append-only event journal.
//!
//! Writes are serialized through one writer lock and hit the journal before
//! they become visible; reads take a shared lock on the in-memory state and
//! so always see a consistent snapshot.

mod log;
mod types;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;
use std::sync::{Mutex, RwLock};

use chrono::{DateTime, Utc};
use chrono_tz::Tz;

pub use types::*;

use self::log::{Event, EventLog};
use crate::annotate::{Annotation, PolarityLabel, UserTagState, ValueTag};
use crate::scheduler::OutboxRecord;
use crate::taxonomy::ValueTaxonomy;
use crate::text::lemmas;
use crate::trainer::Corpus;

pub const JOURNAL_FILE: &str = "journal.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("unknown moment {0}")]
    UnknownMoment(u64),
    #[error("unknown reminder {0}")]
    UnknownReminder(u64),
    #[error("unknown value {0:?}")]
    UnknownValue(String),
    #[error("a goal has at most {MAX_FOCUS_VALUES} values, got {0}")]
    TooManyValues(usize),
    #[error("cannot move reminder from {from:?} to {to:?}")]
    IllegalTransition {
        from: ReminderStatus,
        to: ReminderStatus,
    },
    #[error("entity belongs to another user")]
    Forbidden,
    #[error("journal line {line} unreadable: {message}")]
    Corrupt { line: usize, message: String },
    #[error("journal io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Default, Clone)]
struct State {
    profiles: BTreeMap<String, UserProfile>,
    moments: BTreeMap<u64, Moment>,
    deleted: BTreeMap<u64, DateTime<Utc>>,
    lemma_index: HashMap<u64, HashSet<String>>,
    annotations: HashMap<u64, Annotation>,
    edits: HashMap<u64, Vec<TagEdit>>,
    goals: BTreeMap<String, Goal>,
    reminders: BTreeMap<u64, ReminderItem>,
    suggestions: Vec<SuggestionRecord>,
    congratulations: Vec<CongratulationRecord>,
    saved_articles: Vec<SavedArticle>,
    outbox: Vec<OutboxRecord>,
}

impl State {
    fn apply(&mut self, e: &Event) {
        match e {
            Event::Profile(p) => {
                self.profiles.insert(p.user_id.clone(), p.clone());
            }
            Event::MomentPut(m) => {
                self.lemma_index.insert(m.id, lemmas(&m.text).into_iter().collect());
                self.moments.insert(m.id, m.clone());
            }
            Event::MomentDeleted { id, at } => {
                self.deleted.insert(*id, *at);
            }
            Event::Annotated(a) => {
                self.annotations.insert(a.moment_id, a.clone());
            }
            Event::TagsEdited(t) => self.edits.entry(t.moment_id).or_default().push(t.clone()),
            Event::GoalSet(g) => {
                self.goals.insert(g.user_id.clone(), g.clone());
            }
            Event::ReminderAdded(r) => {
                self.reminders.insert(r.id, r.clone());
            }
            Event::ReminderStatus { id, status, .. } => {
                if let Some(r) = self.reminders.get_mut(id) {
                    r.status = *status;
                }
            }
            Event::Suggested(s) => self.suggestions.push(s.clone()),
            Event::Congratulated(c) => self.congratulations.push(c.clone()),
            Event::ArticleSaved(a) => self.saved_articles.push(a.clone()),
            Event::Notified(o) => {
                if let Some(p) = self.profiles.get_mut(&o.user_id) {
                    p.notification.last_sent = Some(o.due_at);
                }
                self.outbox.push(o.clone());
            }
            Event::Outbox(o) => self.outbox.push(o.clone()),
        }
    }

    fn next_moment_id(&self) -> u64 {
        self.moments.keys().next_back().map_or(1, |k| k + 1)
    }

    fn next_reminder_id(&self) -> u64 {
        self.reminders.keys().next_back().map_or(1, |k| k + 1)
    }

    fn live_moment(&self, user: &str, id: u64) -> Result<&Moment, StoreError> {
        let m = self
            .moments
            .get(&id)
            .filter(|_| !self.deleted.contains_key(&id))
            .ok_or(StoreError::UnknownMoment(id))?;
        if m.user_id != user {
            return Err(StoreError::Forbidden);
        }
        Ok(m)
    }

    /// Net add/remove state; for each value the latest edit wins.
    fn tag_state(&self, moment_id: u64) -> UserTagState {
        let mut s = UserTagState::default();
        for e in self.edits.get(&moment_id).into_iter().flatten() {
            for v in &e.added {
                s.removed.remove(v);
                s.added.insert(v.clone());
            }
            for v in &e.removed {
                s.added.remove(v);
                s.removed.insert(v.clone());
            }
        }
        s
    }

    fn view(&self, m: &Moment, taxonomy: &ValueTaxonomy) -> MomentView {
        let annotation = self.annotations.get(&m.id).cloned();
        let pipeline = annotation.as_ref().map(|a| a.values.clone()).unwrap_or_default();
        MomentView {
            effective_tags: self.tag_state(m.id).apply(pipeline, taxonomy),
            annotation,
            moment: m.clone(),
        }
    }

    fn snapshot_events(&self) -> Vec<Event> {
        let mut out: Vec<Event> = self.profiles.values().cloned().map(Event::Profile).collect();
        out.extend(self.moments.values().cloned().map(Event::MomentPut));
        out.extend(self.deleted.iter().map(|(&id, &at)| Event::MomentDeleted { id, at }));
        let mut ann: Vec<&Annotation> = self.annotations.values().collect();
        ann.sort_by_key(|a| a.moment_id);
        out.extend(ann.into_iter().cloned().map(Event::Annotated));
        let mut edit_ids: Vec<&u64> = self.edits.keys().collect();
        edit_ids.sort();
        for id in edit_ids {
            out.extend(self.edits[id].iter().cloned().map(Event::TagsEdited));
        }
        out.extend(self.goals.values().cloned().map(Event::GoalSet));
        out.extend(self.reminders.values().cloned().map(Event::ReminderAdded));
        out.extend(self.suggestions.iter().cloned().map(Event::Suggested));
        out.extend(self.congratulations.iter().cloned().map(Event::Congratulated));
        out.extend(self.saved_articles.iter().cloned().map(Event::ArticleSaved));
        out.extend(self.outbox.iter().cloned().map(Event::Outbox));
        out
    }
}

fn validate_text(text: &str) -> Result<String, StoreError> {
    let t = text.trim();
    if t.is_empty() {
        return Err(StoreError::Validation("text is empty".into()));
    }
    let n = t.chars().count();
    if n > MAX_TEXT_CHARS {
        return Err(StoreError::Validation(format!(
            "text has {n} characters, limit is {MAX_TEXT_CHARS}"
        )));
    }
    Ok(t.to_string())
}

pub struct Store {
    state: RwLock<State>,
    log: Mutex<Option<EventLog>>,
    taxonomy: ValueTaxonomy,
    default_tz: Tz,
}

impl Store {
    /// A store with no journal; everything is lost on drop.
    pub fn in_memory(taxonomy: ValueTaxonomy, default_tz: Tz) -> Self {
        Self {
            state: RwLock::new(State::default()),
            log: Mutex::new(None),
            taxonomy,
            default_tz,
        }
    }

    /// Opens the journal at `path`, replaying it.
    pub fn open(path: &Path, taxonomy: ValueTaxonomy, default_tz: Tz) -> Result<Self, StoreError> {
        let (log, events) = EventLog::open(path)?;
        let mut state = State::default();
        for e in &events {
            state.apply(e);
        }
        Ok(Self {
            state: RwLock::new(state),
            log: Mutex::new(Some(log)),
            taxonomy,
            default_tz,
        })
    }

    pub fn taxonomy(&self) -> &ValueTaxonomy {
        &self.taxonomy
    }

    fn read<R>(&self, f: impl FnOnce(&State) -> R) -> R {
        f(&self.state.read().unwrap_or_else(|e| e.into_inner()))
    }

    /// Builds events against the current state, journals them, then
    /// applies them. Holding the writer lock throughout serializes writes.
    fn commit<R>(
        &self,
        build: impl FnOnce(&State) -> Result<(Vec<Event>, R), StoreError>,
    ) -> Result<R, StoreError> {
        let mut log = self.log.lock().unwrap_or_else(|e| e.into_inner());
        let (events, out) = self.read(build)?;
        if let Some(log) = log.as_mut() {
            log.append(&events)?;
        }
        let mut state = self.state.write().unwrap_or_else(|e| e.into_inner());
        for e in &events {
            state.apply(e);
        }
        Ok(out)
    }

    /// Rewrites the journal as the minimal event sequence for the current
    /// state.
    pub fn compact(&self) -> Result<(), StoreError> {
        let mut log = self.log.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(log) = log.as_mut() {
            log.rewrite(&self.read(|s| s.snapshot_events()))?;
        }
        Ok(())
    }

    fn canonical_values(&self, names: &BTreeSet<String>) -> Result<BTreeSet<String>, StoreError> {
        names
            .iter()
            .map(|n| {
                self.taxonomy
                    .canonical(n)
                    .map(str::to_string)
                    .ok_or_else(|| StoreError::UnknownValue(n.clone()))
            })
            .collect()
    }

    // Profiles

    /// The user's profile; users without one get the default timezone.
    pub fn profile(&self, user: &str) -> UserProfile {
        self.read(|s| s.profiles.get(user).cloned())
            .unwrap_or_else(|| UserProfile::new(user, self.default_tz))
    }

    pub fn set_profile(&self, profile: UserProfile) -> Result<UserProfile, StoreError> {
        self.commit(|_| Ok((vec![Event::Profile(profile.clone())], profile)))
    }

    pub fn users(&self) -> Vec<String> {
        self.read(|s| {
            let mut u: BTreeSet<String> = s.profiles.keys().cloned().collect();
            u.extend(s.moments.values().map(|m| m.user_id.clone()));
            u.into_iter().collect()
        })
    }

    // Moments

    pub fn put_moment(&self, user: &str, new: NewMoment, now: DateTime<Utc>) -> Result<Moment, StoreError> {
        let text = validate_text(&new.text)?;
        let created_at = new.created_at.unwrap_or(now);
        if created_at > now {
            return Err(StoreError::Validation("created_at is in the future".into()));
        }
        if user.is_empty() {
            return Err(StoreError::Validation("empty user id".into()));
        }
        self.commit(|s| {
            let m = Moment {
                id: s.next_moment_id(),
                user_id: user.to_string(),
                text,
                photo_ref: new.photo_ref,
                created_at,
                source_prompt: new.source_prompt,
            };
            let mut events = Vec::new();
            if !s.profiles.contains_key(user) {
                events.push(Event::Profile(UserProfile::new(user, self.default_tz)));
            }
            events.push(Event::MomentPut(m.clone()));
            Ok((events, m))
        })
    }

    /// Soft delete; the moment disappears from every query.
    pub fn delete_moment(&self, user: &str, id: u64, now: DateTime<Utc>) -> Result<(), StoreError> {
        self.commit(|s| {
            s.live_moment(user, id)?;
            Ok((vec![Event::MomentDeleted { id, at: now }], ()))
        })
    }

    pub fn get_moment(&self, user: &str, id: u64) -> Result<MomentView, StoreError> {
        self.read(|s| s.live_moment(user, id).map(|m| s.view(m, &self.taxonomy)))
    }

    /// Owner of a live moment, without an access check.
    pub fn moment_owner(&self, id: u64) -> Option<String> {
        self.read(|s| {
            s.moments
                .get(&id)
                .filter(|_| !s.deleted.contains_key(&id))
                .map(|m| m.user_id.clone())
        })
    }

    pub fn set_annotation(&self, user: &str, annotation: Annotation) -> Result<(), StoreError> {
        self.commit(|s| {
            s.live_moment(user, annotation.moment_id)?;
            for t in &annotation.values {
                if !self.taxonomy.contains(&t.value) {
                    return Err(StoreError::UnknownValue(t.value.clone()));
                }
            }
            Ok((vec![Event::Annotated(annotation)], ()))
        })
    }

    pub fn tag_state(&self, user: &str, moment_id: u64) -> Result<UserTagState, StoreError> {
        self.read(|s| {
            s.live_moment(user, moment_id)?;
            Ok(s.tag_state(moment_id))
        })
    }

    /// Records an edit and returns the new effective tags.
    pub fn edit_tags(
        &self,
        user: &str,
        moment_id: u64,
        add: &BTreeSet<String>,
        remove: &BTreeSet<String>,
        now: DateTime<Utc>,
    ) -> Result<Vec<ValueTag>, StoreError> {
        let added = self.canonical_values(add)?;
        let removed = self.canonical_values(remove)?;
        if let Some(v) = added.intersection(&removed).next() {
            return Err(StoreError::Validation(format!("{v:?} both added and removed")));
        }
        self.commit(|s| {
            let m = s.live_moment(user, moment_id)?;
            let edit = TagEdit {
                moment_id,
                added,
                removed,
                edited_at: now,
            };
            let mut preview = s.clone();
            let e = Event::TagsEdited(edit);
            preview.apply(&e);
            let tags = preview.view(m, &self.taxonomy).effective_tags;
            Ok((vec![e], tags))
        })
    }

    /// Newest first (created_at desc, id desc).
    pub fn query_moments(&self, user: &str, filter: &MomentFilter, page: Page) -> Result<TimelinePage, StoreError> {
        let value = match &filter.value {
            Some(v) => Some(
                self.taxonomy
                    .canonical(v)
                    .ok_or_else(|| StoreError::UnknownValue(v.clone()))?
                    .to_string(),
            ),
            None => None,
        };
        if page.size == 0 {
            return Err(StoreError::Validation("page size must be positive".into()));
        }
        let query_lemmas: Vec<String> = filter.keyword.as_deref().map(lemmas).unwrap_or_default();
        Ok(self.read(|s| {
            let mut hits: Vec<MomentView> = s
                .moments
                .values()
                .filter(|m| m.user_id == user && !s.deleted.contains_key(&m.id))
                .filter(|m| filter.from.is_none_or(|f| m.created_at >= f))
                .filter(|m| filter.to.is_none_or(|t| m.created_at < t))
                .filter(|m| {
                    let idx = &s.lemma_index[&m.id];
                    query_lemmas.iter().all(|l| idx.contains(l))
                })
                .filter(|m| {
                    filter.polarity.is_none_or(|p| {
                        s.annotations.get(&m.id).is_some_and(|a| a.polarity.label == p)
                    })
                })
                .map(|m| s.view(m, &self.taxonomy))
                .filter(|v| value.as_ref().is_none_or(|val| v.has_tag(val)))
                .collect();
            hits.sort_by(|a, b| {
                (b.moment.created_at, b.moment.id).cmp(&(a.moment.created_at, a.moment.id))
            });
            let total = hits.len();
            let items = hits.into_iter().skip(page.page.saturating_mul(page.size)).take(page.size).collect();
            TimelinePage {
                items,
                total,
                page: page.page,
                size: page.size,
            }
        }))
    }

    /// Every live moment of `user`, in id order.
    pub fn user_moments(&self, user: &str) -> Vec<MomentView> {
        self.read(|s| {
            s.moments
                .values()
                .filter(|m| m.user_id == user && !s.deleted.contains_key(&m.id))
                .map(|m| s.view(m, &self.taxonomy))
                .collect()
        })
    }

    // Goals

    pub fn upsert_goal(
        &self,
        user: &str,
        focus_values: &[String],
        weekly_target: u32,
        now: DateTime<Utc>,
    ) -> Result<Goal, StoreError> {
        let mut values: Vec<String> = Vec::new();
        for v in focus_values {
            let c = self
                .taxonomy
                .canonical(v)
                .ok_or_else(|| StoreError::UnknownValue(v.clone()))?
                .to_string();
            if !values.contains(&c) {
                values.push(c);
            }
        }
        if values.len() > MAX_FOCUS_VALUES {
            return Err(StoreError::TooManyValues(values.len()));
        }
        if values.is_empty() {
            return Err(StoreError::Validation("a goal needs at least one value".into()));
        }
        if weekly_target == 0 {
            return Err(StoreError::Validation("weekly target must be at least 1".into()));
        }
        let goal = Goal {
            user_id: user.to_string(),
            focus_values: values,
            weekly_target,
            created_at: now,
        };
        self.commit(|_| Ok((vec![Event::GoalSet(goal.clone())], goal)))
    }

    pub fn get_goal(&self, user: &str) -> Option<Goal> {
        self.read(|s| s.goals.get(user).cloned())
    }

    // Reminders

    pub fn add_reminder(
        &self,
        user: &str,
        activity_text: &str,
        desired_time: DateTime<Utc>,
        origin: ReminderOrigin,
        value: Option<&str>,
        now: DateTime<Utc>,
    ) -> Result<ReminderItem, StoreError> {
        let text = validate_text(activity_text)?;
        let value = match value {
            Some(v) => Some(
                self.taxonomy
                    .canonical(v)
                    .ok_or_else(|| StoreError::UnknownValue(v.to_string()))?
                    .to_string(),
            ),
            None => None,
        };
        self.commit(|s| {
            let r = ReminderItem {
                id: s.next_reminder_id(),
                user_id: user.to_string(),
                activity_text: text,
                desired_time,
                origin,
                status: ReminderStatus::Open,
                created_at: now,
                value,
            };
            Ok((vec![Event::ReminderAdded(r.clone())], r))
        })
    }

    pub fn reminders(&self, user: &str) -> Vec<ReminderItem> {
        self.read(|s| s.reminders.values().filter(|r| r.user_id == user).cloned().collect())
    }

    /// Open → Done or Open → Dismissed.
    pub fn transition_reminder(
        &self,
        user: &str,
        id: u64,
        to: ReminderStatus,
        now: DateTime<Utc>,
    ) -> Result<ReminderItem, StoreError> {
        self.commit(|s| {
            let r = s.reminders.get(&id).ok_or(StoreError::UnknownReminder(id))?;
            if r.user_id != user {
                return Err(StoreError::Forbidden);
            }
            if r.status != ReminderStatus::Open || to == ReminderStatus::Open {
                return Err(StoreError::IllegalTransition { from: r.status, to });
            }
            let mut out = r.clone();
            out.status = to;
            Ok((vec![Event::ReminderStatus { id, status: to, at: now }], out))
        })
    }

    // Feedback history

    pub fn record_suggestion(&self, record: SuggestionRecord) -> Result<(), StoreError> {
        self.commit(|_| Ok((vec![Event::Suggested(record)], ())))
    }

    /// Activities suggested to `user` for `value`, oldest first.
    pub fn suggestion_history(&self, user: &str, value: &str) -> Vec<SuggestionRecord> {
        self.read(|s| {
            s.suggestions
                .iter()
                .filter(|r| r.user_id == user && r.value == value)
                .cloned()
                .collect()
        })
    }

    pub fn record_congratulation(&self, record: CongratulationRecord) -> Result<(), StoreError> {
        self.commit(|_| Ok((vec![Event::Congratulated(record)], ())))
    }

    pub fn congratulated(&self, user: &str, value: &str, week: WeekKey) -> bool {
        self.read(|s| {
            s.congratulations
                .iter()
                .any(|c| c.user_id == user && c.value == value && c.week == week)
        })
    }

    pub fn save_article(&self, article: SavedArticle) -> Result<SavedArticle, StoreError> {
        self.commit(|s| {
            s.live_moment(&article.user_id, article.moment_id)?;
            Ok((vec![Event::ArticleSaved(article.clone())], article))
        })
    }

    pub fn saved_articles(&self, user: &str) -> Vec<SavedArticle> {
        self.read(|s| s.saved_articles.iter().filter(|a| a.user_id == user).cloned().collect())
    }

    // Notifications

    /// Appends to the outbox and stamps the user's `last_sent` with
    /// `record.due_at`.
    pub fn queue_notification(&self, record: OutboxRecord) -> Result<(), StoreError> {
        self.commit(|s| {
            let mut events = Vec::new();
            if !s.profiles.contains_key(&record.user_id) {
                events.push(Event::Profile(UserProfile::new(&record.user_id, self.default_tz)));
            }
            events.push(Event::Notified(record));
            Ok((events, ()))
        })
    }

    pub fn outbox(&self) -> Vec<OutboxRecord> {
        self.read(|s| s.outbox.clone())
    }

    // Export / import

    /// The user's journal as corpus-style records with annotations.
    pub fn export_records(&self, user: &str) -> Vec<ExportRecord> {
        self.user_moments(user)
            .into_iter()
            .map(|v| {
                let mut labels = Vec::new();
                if let Some(a) = &v.annotation {
                    if let Some(act) = &a.activity {
                        labels.push(format!("activity:{}", act.class));
                    }
                    labels.push(match a.polarity.label {
                        PolarityLabel::Positive => "polarity:positive".to_string(),
                        PolarityLabel::Negative => "polarity:negative".to_string(),
                    });
                }
                labels.extend(v.effective_tags.iter().map(|t| format!("value:{}", t.value)));
                ExportRecord {
                    id: format!("m-{}", v.moment.id),
                    text: v.moment.text,
                    labels,
                    created_at: v.moment.created_at,
                    annotation: v.annotation,
                }
            })
            .collect()
    }

    /// Stores every corpus entry as a moment of `user`.
    pub fn import_corpus(&self, user: &str, corpus: &Corpus, now: DateTime<Utc>) -> Result<Vec<Moment>, StoreError> {
        corpus
            .entries
            .iter()
            .map(|e| self.put_moment(user, NewMoment::text(&e.text), now))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::{ExternalStatus, Polarity, PolaritySource, TagOrigin};
    use chrono::TimeZone;

    fn now() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2026, 6, 1, 12, 0, 0).unwrap()
    }

    fn store() -> Store {
        Store::in_memory(ValueTaxonomy::default(), chrono_tz::UTC)
    }

    fn set(v: &[&str]) -> BTreeSet<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn annotation(id: u64, values: &[&str]) -> Annotation {
        Annotation {
            moment_id: id,
            polarity: Polarity {
                label: PolarityLabel::Positive,
                source: PolaritySource::TrainedClassifier,
                confidence: 0.9,
                external: ExternalStatus::Ok,
            },
            values: values
                .iter()
                .map(|v| ValueTag { value: v.to_string(), origin: TagOrigin::Model, confidence: 0.7 })
                .collect(),
            activity: None,
            people: vec![],
            annotated_at: now(),
            pipeline_version: "test".into(),
            notes: vec![],
        }
    }

    #[test]
    fn moment_validation() {
        let s = store();
        let m = s.put_moment("u", NewMoment::text("Had great dinner with my parents"), now()).unwrap();
        assert_eq!(m.id, 1);
        assert!(matches!(s.put_moment("u", NewMoment::text(""), now()), Err(StoreError::Validation(_))));
        assert!(matches!(s.put_moment("u", NewMoment::text("  \n"), now()), Err(StoreError::Validation(_))));
        let long = "a".repeat(2001);
        assert!(matches!(s.put_moment("u", NewMoment::text(&long), now()), Err(StoreError::Validation(_))));
        assert!(s.put_moment("u", NewMoment::text(&"a".repeat(2000)), now()).is_ok());
        let future = NewMoment { created_at: Some(now() + chrono::Duration::seconds(1)), ..NewMoment::text("x") };
        assert!(matches!(s.put_moment("u", future, now()), Err(StoreError::Validation(_))));
    }

    #[test]
    fn cross_user_access_forbidden() {
        let s = store();
        let m = s.put_moment("alice", NewMoment::text("hi"), now()).unwrap();
        assert!(matches!(s.get_moment("bob", m.id), Err(StoreError::Forbidden)));
        assert!(matches!(s.get_moment("bob", 99), Err(StoreError::UnknownMoment(99))));
        assert!(matches!(s.edit_tags("bob", m.id, &set(&["Family"]), &set(&[]), now()), Err(StoreError::Forbidden)));
    }

    #[test]
    fn tag_edits() {
        let s = store();
        let m = s.put_moment("u", NewMoment::text("quiet morning"), now()).unwrap();
        let tags = s.edit_tags("u", m.id, &set(&["gratitude"]), &set(&[]), now()).unwrap();
        assert_eq!(tags, vec![ValueTag::user("Gratitude")]);
        assert!(matches!(
            s.edit_tags("u", m.id, &set(&["Fame"]), &set(&[]), now()),
            Err(StoreError::UnknownValue(v)) if v == "Fame"
        ));
        // Removed pipeline tag stays removed after re-annotation.
        s.set_annotation("u", annotation(m.id, &["Family", "Leisure"])).unwrap();
        s.edit_tags("u", m.id, &set(&[]), &set(&["Family"]), now()).unwrap();
        s.set_annotation("u", annotation(m.id, &["Family", "Leisure"])).unwrap();
        let v = s.get_moment("u", m.id).unwrap();
        let names: Vec<&str> = v.effective_tags.iter().map(|t| t.value.as_str()).collect();
        assert_eq!(names, vec!["Gratitude", "Leisure"]);
    }

    #[test]
    fn goals() {
        let s = store();
        let vals = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let g = s.upsert_goal("u", &vals(&["Family", "Mindfulness", "Learning"]), 5, now()).unwrap();
        assert_eq!(g.focus_values.len(), 3);
        assert!(matches!(
            s.upsert_goal("u", &vals(&["Family", "Mindfulness", "Learning", "Laugh"]), 5, now()),
            Err(StoreError::TooManyValues(4))
        ));
        s.upsert_goal("u", &vals(&["Laugh"]), 2, now()).unwrap();
        assert_eq!(s.get_goal("u").unwrap().focus_values, vals(&["Laugh"]));
        assert!(s.get_goal("v").is_none());
    }

    #[test]
    fn reminder_lifecycle() {
        let s = store();
        let r = s
            .add_reminder("u", "cook a family meal", now() + chrono::Duration::days(9), ReminderOrigin::Suggested, Some("Family"), now())
            .unwrap();
        assert_eq!(r.status, ReminderStatus::Open);
        let done = s.transition_reminder("u", r.id, ReminderStatus::Done, now()).unwrap();
        assert_eq!(done.status, ReminderStatus::Done);
        assert!(matches!(
            s.transition_reminder("u", r.id, ReminderStatus::Done, now()),
            Err(StoreError::IllegalTransition { from: ReminderStatus::Done, to: ReminderStatus::Done })
        ));
        assert!(matches!(s.transition_reminder("u", 42, ReminderStatus::Done, now()), Err(StoreError::UnknownReminder(42))));
        assert!(matches!(s.transition_reminder("x", r.id, ReminderStatus::Dismissed, now()), Err(StoreError::Forbidden)));
    }

    #[test]
    fn timeline_and_search() {
        let s = store();
        let at = |h| NewMoment { created_at: Some(now() - chrono::Duration::hours(h)), ..NewMoment::default() };
        let a = s.put_moment("u", NewMoment { text: "I ran by the river".into(), ..at(3) }, now()).unwrap();
        let b = s.put_moment("u", NewMoment { text: "Running again".into(), ..at(1) }, now()).unwrap();
        let c = s.put_moment("u", NewMoment { text: "Ate soup".into(), ..at(1) }, now()).unwrap();
        s.put_moment("other", NewMoment::text("I ran too"), now()).unwrap();
        let all = s.query_moments("u", &MomentFilter::default(), Page::default()).unwrap();
        let ids: Vec<u64> = all.items.iter().map(|v| v.moment.id).collect();
        assert_eq!(ids, vec![c.id, b.id, a.id]);
        let run = MomentFilter { keyword: Some("run".into()), ..Default::default() };
        let ids: Vec<u64> = s.query_moments("u", &run, Page::default()).unwrap().items.iter().map(|v| v.moment.id).collect();
        assert_eq!(ids, vec![b.id, a.id]);
        let page = s.query_moments("u", &MomentFilter::default(), Page { page: 1, size: 2 }).unwrap();
        assert_eq!(page.total, 3);
        assert_eq!(page.items.len(), 1);
        s.delete_moment("u", c.id, now()).unwrap();
        assert_eq!(s.query_moments("u", &MomentFilter::default(), Page::default()).unwrap().total, 2);
    }

    #[test]
    fn journal_survives_restart_and_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(JOURNAL_FILE);
        let (before, outbox) = {
            let s = Store::open(&path, ValueTaxonomy::default(), chrono_tz::UTC).unwrap();
            let m = s.put_moment("u", NewMoment::text("Had great dinner with my parents"), now()).unwrap();
            s.set_annotation("u", annotation(m.id, &["Family"])).unwrap();
            s.edit_tags("u", m.id, &set(&["Gratitude"]), &set(&[]), now()).unwrap();
            s.upsert_goal("u", &["Family".to_string()], 3, now()).unwrap();
            s.queue_notification(OutboxRecord { user_id: "u".into(), kind: "daily_journal".into(), body: "b".into(), due_at: now() }).unwrap();
            (serde_json::to_string(&s.user_moments("u")).unwrap(), s.outbox())
        };
        use std::io::Write;
        std::fs::OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"type\":\"moment_put\",\"id\"").unwrap();
        let s = Store::open(&path, ValueTaxonomy::default(), chrono_tz::UTC).unwrap();
        assert_eq!(serde_json::to_string(&s.user_moments("u")).unwrap(), before);
        assert_eq!(s.outbox(), outbox);
        assert_eq!(s.profile("u").notification.last_sent, Some(now()));
        s.compact().unwrap();
        let s2 = Store::open(&path, ValueTaxonomy::default(), chrono_tz::UTC).unwrap();
        assert_eq!(serde_json::to_string(&s2.user_moments("u")).unwrap(), before);
        assert_eq!(s2.get_goal("u"), s.get_goal("u"));
        let m = s2.put_moment("u", NewMoment::text("next"), now()).unwrap();
        assert_eq!(m.id, 2);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(JOURNAL_FILE);
        std::fs::write(&path, "garbage\n{}\n").unwrap();
        assert!(matches!(
            Store::open(&path, ValueTaxonomy::default(), chrono_tz::UTC),
            Err(StoreError::Corrupt { line: 1, .. })
        ));
    }
}
