//! Rough-time buckets for the want-to-do list and the daily journaling
//! notification.

use chrono::{DateTime, NaiveTime, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};

use crate::store::{ReminderItem, ReminderStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TimeBucket {
    AboutNow,
    InAWeek,
    InTwoWeeks,
    NextMonth,
    Later,
}

impl TimeBucket {
    pub const ALL: [TimeBucket; 5] = [
        Self::AboutNow,
        Self::InAWeek,
        Self::InTwoWeeks,
        Self::NextMonth,
        Self::Later,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::AboutNow => "About now",
            Self::InAWeek => "In a week",
            Self::InTwoWeeks => "In two weeks",
            Self::NextMonth => "Next month",
            Self::Later => "Later",
        }
    }

    pub fn order(self) -> usize {
        self as usize
    }
}

/// Last day difference (inclusive) of each bucket; anything past
/// `next_month` is `Later`. Past-due items count as `AboutNow`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BucketBounds {
    pub about_now: i64,
    pub in_a_week: i64,
    pub in_two_weeks: i64,
    pub next_month: i64,
}

impl Default for BucketBounds {
    fn default() -> Self {
        Self {
            about_now: 3,
            in_a_week: 10,
            in_two_weeks: 20,
            next_month: 45,
        }
    }
}

/// Calendar-day difference between `desired` and `now` in `tz`.
pub fn day_delta(desired: DateTime<Utc>, now: DateTime<Utc>, tz: Tz) -> i64 {
    let d = desired.with_timezone(&tz).date_naive();
    let n = now.with_timezone(&tz).date_naive();
    (d - n).num_days()
}

pub fn bucket_for_delta(delta: i64, bounds: &BucketBounds) -> TimeBucket {
    if delta <= bounds.about_now {
        TimeBucket::AboutNow
    } else if delta <= bounds.in_a_week {
        TimeBucket::InAWeek
    } else if delta <= bounds.in_two_weeks {
        TimeBucket::InTwoWeeks
    } else if delta <= bounds.next_month {
        TimeBucket::NextMonth
    } else {
        TimeBucket::Later
    }
}

pub fn bucket(desired: DateTime<Utc>, now: DateTime<Utc>, tz: Tz, bounds: &BucketBounds) -> TimeBucket {
    bucket_for_delta(day_delta(desired, now, tz), bounds)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BucketGroup {
    pub bucket: TimeBucket,
    pub label: String,
    pub items: Vec<ReminderItem>,
}

/// All buckets in order, each with its open reminders sorted by desired
/// time (then id).
pub fn grouped_want_to_do(
    reminders: &[ReminderItem],
    now: DateTime<Utc>,
    tz: Tz,
    bounds: &BucketBounds,
) -> Vec<BucketGroup> {
    let mut groups: Vec<BucketGroup> = TimeBucket::ALL
        .iter()
        .map(|&b| BucketGroup {
            bucket: b,
            label: b.label().to_string(),
            items: Vec::new(),
        })
        .collect();
    for r in reminders.iter().filter(|r| r.status == ReminderStatus::Open) {
        let b = bucket(r.desired_time, now, tz, bounds);
        groups[b.order()].items.push(r.clone());
    }
    for g in &mut groups {
        g.items.sort_by_key(|r| (r.desired_time, r.id));
    }
    groups
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NotificationPolicy {
    pub local_time: NaiveTime,
    pub enabled: bool,
    pub last_sent: Option<DateTime<Utc>>,
}

impl Default for NotificationPolicy {
    fn default() -> Self {
        Self {
            local_time: NaiveTime::from_hms_opt(20, 0, 0).expect("valid time"),
            enabled: true,
            last_sent: None,
        }
    }
}

/// True when enabled, the user-local time is at or past the policy time,
/// and nothing was sent earlier on the same user-local day.
pub fn notification_due(policy: &NotificationPolicy, now: DateTime<Utc>, tz: Tz) -> bool {
    if !policy.enabled {
        return false;
    }
    let local = now.with_timezone(&tz);
    if local.time() < policy.local_time {
        return false;
    }
    match policy.last_sent {
        None => true,
        Some(sent) => sent.with_timezone(&tz).date_naive() < local.date_naive(),
    }
}

pub const DAILY_JOURNAL: &str = "daily_journal";

/// Outbound notification, consumed by whatever delivers pushes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutboxRecord {
    pub user_id: String,
    pub kind: String,
    pub body: String,
    pub due_at: DateTime<Utc>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;

    fn utc(y: i32, m: u32, d: u32, h: u32, min: u32) -> DateTime<Utc> {
        Utc.with_ymd_and_hms(y, m, d, h, min, 0).unwrap()
    }

    #[test]
    fn bucket_examples() {
        let b = BucketBounds::default();
        assert_eq!(bucket_for_delta(0, &b), TimeBucket::AboutNow);
        assert_eq!(bucket_for_delta(9, &b), TimeBucket::InAWeek);
        assert_eq!(bucket_for_delta(30, &b), TimeBucket::NextMonth);
        assert_eq!(bucket_for_delta(-4, &b), TimeBucket::AboutNow);
        assert_eq!(bucket_for_delta(46, &b), TimeBucket::Later);
    }

    #[test]
    fn delta_uses_local_calendar_days() {
        // 23:30 and 00:30 next day in New York are one local day apart
        // but the same UTC day.
        let tz: Tz = "America/New_York".parse().unwrap();
        let now = utc(2026, 3, 10, 3, 30);
        let desired = utc(2026, 3, 10, 4, 30);
        assert_eq!(day_delta(desired, now, tz), 1);
        assert_eq!(day_delta(desired, now, chrono_tz::UTC), 0);
    }

    #[test]
    fn notification_examples() {
        let tz = chrono_tz::UTC;
        let mut p = NotificationPolicy::default();
        assert!(notification_due(&p, utc(2026, 5, 1, 20, 1), tz));
        assert!(!notification_due(&p, utc(2026, 5, 1, 19, 59), tz));
        p.last_sent = Some(utc(2026, 5, 1, 20, 5));
        assert!(!notification_due(&p, utc(2026, 5, 1, 21, 0), tz));
        assert!(notification_due(&p, utc(2026, 5, 2, 20, 0), tz));
        p.enabled = false;
        assert!(!notification_due(&p, utc(2026, 5, 3, 21, 0), tz));
    }
}
