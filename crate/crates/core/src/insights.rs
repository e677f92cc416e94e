//! Aggregates behind the insights screen: value, people and activity
//! distributions over positive moments, weekly goal progress and weekly
//! activity counts.
//!
//! Everything here is a pure function of a slice of [`MomentView`]s, so the
//! caller decides which snapshot to aggregate.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Datelike, Duration, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::annotate::ActivityClass;
use crate::store::{Goal, MomentView, WeekKey};

pub const DEFAULT_TOP_K: usize = 8;
pub const OTHER: &str = "other";
pub const DEFAULT_WINDOW_DAYS: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    /// The last `days` days up to now.
    Trailing { days: u32 },
    AllTime,
    /// `from` inclusive, `to` exclusive.
    Range { from: DateTime<Utc>, to: DateTime<Utc> },
}

impl Default for Window {
    fn default() -> Self {
        Self::Trailing {
            days: DEFAULT_WINDOW_DAYS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InsightsError {
    #[error("invalid window {0:?}; expected `all` or `<n>d`")]
    BadWindow(String),
    #[error("window end precedes its start")]
    EmptyRange,
    #[error("no goal set")]
    NoGoal,
}

impl Window {
    pub fn range(from: DateTime<Utc>, to: DateTime<Utc>) -> Result<Self, InsightsError> {
        if to < from {
            return Err(InsightsError::EmptyRange);
        }
        Ok(Self::Range { from, to })
    }

    pub fn contains(&self, t: DateTime<Utc>, now: DateTime<Utc>) -> bool {
        match *self {
            Self::Trailing { days } => t > now - Duration::days(days as i64) && t <= now,
            Self::AllTime => true,
            Self::Range { from, to } => t >= from && t < to,
        }
    }
}

impl FromStr for Window {
    type Err = InsightsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Self::AllTime);
        }
        s.strip_suffix('d')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&d| d > 0)
            .map(|days| Self::Trailing { days })
            .ok_or_else(|| InsightsError::BadWindow(s.to_string()))
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Trailing { days } => write!(f, "{days}d"),
            Self::AllTime => f.write_str("all"),
            Self::Range { from, to } => write!(f, "{}..{}", from.to_rfc3339(), to.to_rfc3339()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSlice {
    pub key: String,
    pub count: usize,
    pub fraction: f64,
}

/// Counts sorted by count descending then key ascending; everything past
/// the first `k` keys is merged into one [`OTHER`] slice.
pub fn top_k(counts: &BTreeMap<String, usize>, k: usize) -> Vec<DistributionSlice> {
    let total: usize = counts.values().sum();
    if total == 0 {
        return Vec::new();
    }
    let mut sorted: Vec<(&String, &usize)> = counts.iter().filter(|(_, &c)| c > 0).collect();
    sorted.sort_by(|a, b| b.1.cmp(a.1).then_with(|| a.0.cmp(b.0)));
    let slice = |key: &str, count: usize| DistributionSlice {
        key: key.to_string(),
        count,
        fraction: count as f64 / total as f64,
    };
    let mut out: Vec<DistributionSlice> = sorted.iter().take(k).map(|(key, &c)| slice(key, c)).collect();
    let rest: usize = sorted.iter().skip(k).map(|(_, &c)| c).sum();
    if rest > 0 {
        out.push(slice(OTHER, rest));
    }
    out
}

fn positive_in_window<'a>(
    views: &'a [MomentView],
    window: &'a Window,
    now: DateTime<Utc>,
) -> impl Iterator<Item = &'a MomentView> {
    views.iter().filter(move |v| {
        v.annotation.as_ref().is_some_and(|a| a.is_positive()) && window.contains(v.moment.created_at, now)
    })
}

/// Effective value tags over positive moments.
pub fn value_counts(views: &[MomentView], window: &Window, now: DateTime<Utc>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for v in positive_in_window(views, window, now) {
        for t in &v.effective_tags {
            *counts.entry(t.value.clone()).or_default() += 1;
        }
    }
    counts
}

/// People over positive moments, each person counted once per moment.
/// Mentions are compared case-insensitively.
pub fn people_counts(views: &[MomentView], window: &Window, now: DateTime<Utc>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for v in positive_in_window(views, window, now) {
        let people: BTreeSet<String> = v
            .annotation
            .iter()
            .flat_map(|a| a.people.iter())
            .map(|p| p.to_lowercase())
            .collect();
        for p in people {
            *counts.entry(p).or_default() += 1;
        }
    }
    counts
}

pub fn activity_counts(views: &[MomentView], window: &Window, now: DateTime<Utc>) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for v in positive_in_window(views, window, now) {
        if let Some(act) = v.annotation.as_ref().and_then(|a| a.activity.as_ref()) {
            *counts.entry(act.class.to_string()).or_default() += 1;
        }
    }
    counts
}

pub fn value_distribution(views: &[MomentView], window: &Window, now: DateTime<Utc>, k: usize) -> Vec<DistributionSlice> {
    top_k(&value_counts(views, window, now), k)
}

pub fn people_distribution(views: &[MomentView], window: &Window, now: DateTime<Utc>, k: usize) -> Vec<DistributionSlice> {
    top_k(&people_counts(views, window, now), k)
}

pub fn activity_distribution(views: &[MomentView], window: &Window, now: DateTime<Utc>, k: usize) -> Vec<DistributionSlice> {
    top_k(&activity_counts(views, window, now), k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub slices: Vec<DistributionSlice>,
    pub window: Window,
    pub generated_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsightsReport {
    pub values: Distribution,
    pub people: Distribution,
    pub activities: Distribution,
}

pub fn insights_report(views: &[MomentView], window: Window, now: DateTime<Utc>, k: usize) -> InsightsReport {
    let doc = |slices| Distribution {
        slices,
        window,
        generated_at: now,
    };
    InsightsReport {
        values: doc(value_distribution(views, &window, now, k)),
        people: doc(people_distribution(views, &window, now, k)),
        activities: doc(activity_distribution(views, &window, now, k)),
    }
}

/// ISO-8601 week (Monday to Sunday) of `t` in the user's timezone.
pub fn week_of(t: DateTime<Utc>, tz: Tz) -> WeekKey {
    let w = t.with_timezone(&tz).iso_week();
    (w.year(), w.week())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoalProgress {
    pub value: String,
    pub target: u32,
    pub achieved: u32,
    pub ratio: f64,
    pub completed: bool,
}

impl GoalProgress {
    pub fn new(value: &str, target: u32, achieved: u32) -> Self {
        let ratio = if target == 0 {
            1.0
        } else {
            (achieved as f64 / target as f64).min(1.0)
        };
        Self {
            value: value.to_string(),
            target,
            achieved,
            ratio,
            completed: achieved >= target,
        }
    }
}

/// One entry per focus value: moments of `week` whose effective tags
/// contain the value.
pub fn goal_progress(views: &[MomentView], goal: &Goal, week: WeekKey, tz: Tz) -> Vec<GoalProgress> {
    goal.focus_values
        .iter()
        .map(|value| {
            let achieved = views
                .iter()
                .filter(|v| week_of(v.moment.created_at, tz) == week && v.has_tag(value))
                .count();
            GoalProgress::new(value, goal.weekly_target, achieved as u32)
        })
        .collect()
}

/// Moments of `week` annotated with activity `class`.
pub fn weekly_activity_count(views: &[MomentView], class: ActivityClass, week: WeekKey, tz: Tz) -> u32 {
    views
        .iter()
        .filter(|v| week_of(v.moment.created_at, tz) == week)
        .filter(|v| {
            v.annotation
                .as_ref()
                .and_then(|a| a.activity.as_ref())
                .is_some_and(|a| a.class == class)
        })
        .count() as u32
}
