//! The journal as one object: store, annotator and feedback content wired
//! together behind the operations the HTTP API and CLI expose.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::annotate::{ActivityClass, Annotation, Annotator, ValueTag};
use crate::feedback::{self, Content, FeedbackError, FeedbackItem, FeedbackKind, FeedbackPayload, Prompt, WeeklyContext};
use crate::insights::{self, GoalProgress, InsightsError, InsightsReport, Window};
use crate::scheduler::{self, BucketBounds, BucketGroup, OutboxRecord, DAILY_JOURNAL};
use crate::store::{
    CongratulationRecord, Goal, Moment, MomentFilter, MomentView, NewMoment, Page, ReminderItem, ReminderOrigin,
    ReminderStatus, SavedArticle, Store, StoreError, SuggestionRecord, TimelinePage, WeekKey,
};

pub const NOTIFICATION_BODY: &str = "Take a minute to write down a good moment from today.";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JournalConfig {
    pub seed: u64,
    pub top_k: usize,
    pub buckets: BucketBounds,
}

impl Default for JournalConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            top_k: insights::DEFAULT_TOP_K,
            buckets: BucketBounds::default(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum JournalError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Insights(#[from] InsightsError),
    #[error(transparent)]
    Feedback(#[from] FeedbackError),
    #[error("moment {0} has no tag with a reading suggestion")]
    NoArticle(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostedMoment {
    #[serde(flatten)]
    pub view: MomentView,
    pub feedback: Vec<FeedbackItem>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalReport {
    pub goal: Goal,
    pub week: WeekKey,
    pub progress: Vec<GoalProgress>,
}

/// SplitMix64 finalizer; decorrelates per-moment seeds.
fn mix(seed: u64, n: u64) -> u64 {
    let mut z = seed ^ n.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub struct Journal {
    store: Store,
    annotator: RwLock<Arc<Annotator>>,
    content: RwLock<Arc<Content>>,
    config: JournalConfig,
    prompt_draws: AtomicU64,
}

impl Journal {
    pub fn new(store: Store, annotator: Annotator, content: Content, config: JournalConfig) -> Self {
        Self {
            store,
            annotator: RwLock::new(Arc::new(annotator)),
            content: RwLock::new(Arc::new(content)),
            config,
            prompt_draws: AtomicU64::new(0),
        }
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn config(&self) -> &JournalConfig {
        &self.config
    }

    pub fn annotator(&self) -> Arc<Annotator> {
        self.annotator.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn content(&self) -> Arc<Content> {
        self.content.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Swaps in retrained models; requests in flight finish on the old one.
    pub fn replace_annotator(&self, annotator: Annotator) {
        *self.annotator.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(annotator);
    }

    pub fn replace_content(&self, content: Content) {
        *self.content.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(content);
    }

    pub fn pipeline_version(&self) -> String {
        self.annotator().pipeline_version().to_string()
    }

    /// Stores a moment without annotating it.
    pub fn record_moment(&self, user: &str, new: NewMoment, now: DateTime<Utc>) -> Result<Moment, JournalError> {
        Ok(self.store.put_moment(user, new, now)?)
    }

    /// Runs the pipeline on a stored moment and saves the result.
    pub fn annotate_moment(&self, user: &str, id: u64, now: DateTime<Utc>) -> Result<MomentView, JournalError> {
        let view = self.store.get_moment(user, id)?;
        let state = self.store.tag_state(user, id)?;
        let annotation = self.annotator().annotate(id, &view.moment.text, &state, now);
        self.store.set_annotation(user, annotation)?;
        Ok(self.store.get_moment(user, id)?)
    }

    /// Stores, annotates and responds to a new moment.
    pub fn post_moment(&self, user: &str, new: NewMoment, now: DateTime<Utc>) -> Result<PostedMoment, JournalError> {
        let moment = self.record_moment(user, new, now)?;
        let view = self.annotate_moment(user, moment.id, now)?;
        let feedback = self.respond(user, &view, now)?;
        Ok(PostedMoment { view, feedback })
    }

    fn weekly_context(&self, user: &str, view: &MomentView) -> WeeklyContext {
        let tz = self.store.profile(user).timezone;
        let week = insights::week_of(view.moment.created_at, tz);
        let views = self.store.user_moments(user);
        let mut ctx = WeeklyContext::default();
        if let Some(act) = view.annotation.as_ref().and_then(|a| a.activity.as_ref()) {
            ctx.activity_count = insights::weekly_activity_count(&views, act.class, week, tz);
        }
        if let Some(goal) = self.store.get_goal(user) {
            let others: Vec<MomentView> = views.iter().filter(|v| v.moment.id != view.moment.id).cloned().collect();
            ctx.progress_before = insights::goal_progress(&others, &goal, week, tz);
            ctx.progress_after = insights::goal_progress(&views, &goal, week, tz);
            ctx.congratulated = goal
                .focus_values
                .iter()
                .filter(|v| self.store.congratulated(user, v, week))
                .cloned()
                .collect();
        }
        for t in &view.effective_tags {
            let history = self.store.suggestion_history(user, &t.value).into_iter().map(|r| r.activity).collect();
            ctx.suggestion_history.insert(t.value.clone(), history);
        }
        ctx
    }

    /// Feedback for an annotated moment; congratulations and suggestions
    /// are remembered so they are not repeated.
    pub fn respond(&self, user: &str, view: &MomentView, now: DateTime<Utc>) -> Result<Vec<FeedbackItem>, JournalError> {
        let Some(annotation) = &view.annotation else {
            return Ok(Vec::new());
        };
        let ctx = self.weekly_context(user, view);
        let tz = self.store.profile(user).timezone;
        let week = insights::week_of(view.moment.created_at, tz);
        let items = feedback::generate_feedback(
            annotation,
            &view.effective_tags,
            &ctx,
            &self.content(),
            mix(self.config.seed, view.moment.id),
        );
        for item in &items {
            match (&item.kind, &item.payload) {
                (FeedbackKind::Congratulation, FeedbackPayload::Goal { value, .. }) => {
                    self.store.record_congratulation(CongratulationRecord {
                        user_id: user.to_string(),
                        value: value.clone(),
                        week,
                        at: now,
                    })?;
                }
                (FeedbackKind::ActivitySuggestion, FeedbackPayload::Activity { value, activity }) => {
                    self.store.record_suggestion(SuggestionRecord {
                        user_id: user.to_string(),
                        value: value.clone(),
                        activity: activity.clone(),
                        suggested_at: now,
                    })?;
                }
                _ => {}
            }
        }
        Ok(items)
    }

    pub fn moment(&self, user: &str, id: u64) -> Result<MomentView, JournalError> {
        Ok(self.store.get_moment(user, id)?)
    }

    pub fn delete_moment(&self, user: &str, id: u64, now: DateTime<Utc>) -> Result<(), JournalError> {
        Ok(self.store.delete_moment(user, id, now)?)
    }

    pub fn edit_tags(
        &self,
        user: &str,
        id: u64,
        add: &BTreeSet<String>,
        remove: &BTreeSet<String>,
        now: DateTime<Utc>,
    ) -> Result<Vec<ValueTag>, JournalError> {
        Ok(self.store.edit_tags(user, id, add, remove, now)?)
    }

    pub fn timeline(&self, user: &str, filter: &MomentFilter, page: Page) -> Result<TimelinePage, JournalError> {
        Ok(self.store.query_moments(user, filter, page)?)
    }

    pub fn insights(&self, user: &str, window: Window, now: DateTime<Utc>) -> InsightsReport {
        insights::insights_report(&self.store.user_moments(user), window, now, self.config.top_k)
    }

    pub fn set_goal(&self, user: &str, values: &[String], weekly_target: u32, now: DateTime<Utc>) -> Result<Goal, JournalError> {
        Ok(self.store.upsert_goal(user, values, weekly_target, now)?)
    }

    pub fn goal(&self, user: &str) -> Result<Goal, JournalError> {
        self.store.get_goal(user).ok_or(JournalError::Insights(InsightsError::NoGoal))
    }

    /// Progress for the week containing `at` in the user's timezone.
    pub fn goal_progress(&self, user: &str, at: DateTime<Utc>) -> Result<GoalReport, JournalError> {
        let goal = self.goal(user)?;
        let tz = self.store.profile(user).timezone;
        let week = insights::week_of(at, tz);
        let progress = insights::goal_progress(&self.store.user_moments(user), &goal, week, tz);
        Ok(GoalReport { goal, week, progress })
    }

    pub fn weekly_activity_counts(&self, user: &str, at: DateTime<Utc>) -> BTreeMap<ActivityClass, u32> {
        let tz = self.store.profile(user).timezone;
        let week = insights::week_of(at, tz);
        let views = self.store.user_moments(user);
        ActivityClass::ALL
            .iter()
            .map(|&c| (c, insights::weekly_activity_count(&views, c, week, tz)))
            .collect()
    }

    pub fn want_to_do(&self, user: &str, now: DateTime<Utc>) -> Vec<BucketGroup> {
        let tz = self.store.profile(user).timezone;
        scheduler::grouped_want_to_do(&self.store.reminders(user), now, tz, &self.config.buckets)
    }

    pub fn add_reminder(
        &self,
        user: &str,
        activity_text: &str,
        desired_time: DateTime<Utc>,
        origin: ReminderOrigin,
        value: Option<&str>,
        now: DateTime<Utc>,
    ) -> Result<ReminderItem, JournalError> {
        Ok(self.store.add_reminder(user, activity_text, desired_time, origin, value, now)?)
    }

    pub fn complete_reminder(&self, user: &str, id: u64, now: DateTime<Utc>) -> Result<ReminderItem, JournalError> {
        Ok(self.store.transition_reminder(user, id, ReminderStatus::Done, now)?)
    }

    pub fn dismiss_reminder(&self, user: &str, id: u64, now: DateTime<Utc>) -> Result<ReminderItem, JournalError> {
        Ok(self.store.transition_reminder(user, id, ReminderStatus::Dismissed, now)?)
    }

    /// A prompt for `seed`, or the next one of the journal's own seeded
    /// sequence.
    pub fn prompt(&self, seed: Option<u64>) -> Prompt {
        let seed = seed.unwrap_or_else(|| mix(self.config.seed, self.prompt_draws.fetch_add(1, Ordering::Relaxed)));
        feedback::select_prompt(&self.content(), seed).clone()
    }

    /// Saves the reading suggestion of a moment: the article for `value`,
    /// or for the moment's focus tag when `value` is absent.
    pub fn save_article(
        &self,
        user: &str,
        moment_id: u64,
        value: Option<&str>,
        now: DateTime<Utc>,
    ) -> Result<SavedArticle, JournalError> {
        let view = self.store.get_moment(user, moment_id)?;
        let tag = match value {
            Some(v) => {
                let canonical = self
                    .store
                    .taxonomy()
                    .canonical(v)
                    .ok_or_else(|| StoreError::UnknownValue(v.to_string()))?;
                view.effective_tags.iter().find(|t| t.value == canonical)
            }
            None => feedback::focus_tag(&view.effective_tags),
        };
        let content = self.content();
        let article = tag
            .and_then(|t| content.article(&t.value))
            .ok_or(JournalError::NoArticle(moment_id))?;
        Ok(self.store.save_article(SavedArticle {
            user_id: user.to_string(),
            moment_id,
            value: article.value.clone(),
            title: article.title.clone(),
            url: article.url.clone(),
            saved_at: now,
        })?)
    }

    pub fn saved_articles(&self, user: &str) -> Vec<SavedArticle> {
        self.store.saved_articles(user)
    }

    /// Queues the daily journaling notification for every user it is due
    /// for. Returns what was queued.
    pub fn notification_tick(&self, now: DateTime<Utc>) -> Result<Vec<OutboxRecord>, JournalError> {
        let mut sent = Vec::new();
        for user in self.store.users() {
            let profile = self.store.profile(&user);
            if scheduler::notification_due(&profile.notification, now, profile.timezone) {
                let record = OutboxRecord {
                    user_id: user,
                    kind: DAILY_JOURNAL.to_string(),
                    body: NOTIFICATION_BODY.to_string(),
                    due_at: now,
                };
                self.store.queue_notification(record.clone())?;
                sent.push(record);
            }
        }
        Ok(sent)
    }

    /// Re-runs the current pipeline over every moment of `user`.
    pub fn reannotate_all(&self, user: &str, now: DateTime<Utc>) -> Result<usize, JournalError> {
        let ids: Vec<u64> = self.store.user_moments(user).iter().map(|v| v.moment.id).collect();
        for &id in &ids {
            self.annotate_moment(user, id, now)?;
        }
        Ok(ids.len())
    }

    pub fn annotation(&self, user: &str, id: u64) -> Result<Option<Annotation>, JournalError> {
        Ok(self.store.get_moment(user, id)?.annotation)
    }
}
