use std::collections::BTreeSet;

use chrono::{Duration, TimeZone, Utc};
use moments_core::store::{NewMoment, ReminderOrigin, ReminderStatus, Store, JOURNAL_FILE};
use moments_core::taxonomy::ValueTaxonomy;
use proptest::prelude::*;

#[derive(Debug, Clone)]
enum Op {
    Put(String),
    Delete(usize),
    Edit(usize, usize, bool),
    Goal(usize, u32),
    Reminder(i64),
    Finish(usize, bool),
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        "[a-z ]{1,30}".prop_map(Op::Put),
        (0usize..20).prop_map(Op::Delete),
        (0usize..20, 0usize..16, any::<bool>()).prop_map(|(m, v, add)| Op::Edit(m, v, add)),
        (0usize..16, 1u32..5).prop_map(|(v, t)| Op::Goal(v, t)),
        (-3i64..60).prop_map(Op::Reminder),
        (0usize..10, any::<bool>()).prop_map(|(r, d)| Op::Finish(r, d)),
    ]
}

fn snapshot(s: &Store) -> String {
    serde_json::to_string(&(s.user_moments("u"), s.get_goal("u"), s.reminders("u"))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Any sequence of operations, failed ones included, reads back the
    /// same after a reopen and after compaction.
    #[test]
    fn reopen_preserves_state(ops in prop::collection::vec(op(), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(JOURNAL_FILE);
        let tax = ValueTaxonomy::default();
        let values: Vec<String> = tax.values().map(str::to_string).collect();
        let now = Utc.with_ymd_and_hms(2026, 6, 1, 12, 0, 0).unwrap();
        let before = {
            let s = Store::open(&path, tax.clone(), chrono_tz::UTC).unwrap();
            for op in &ops {
                let _ = match op {
                    Op::Put(t) => s.put_moment("u", NewMoment::text(t), now).map(|_| ()),
                    Op::Delete(i) => s.delete_moment("u", *i as u64 + 1, now),
                    Op::Edit(m, v, add) => {
                        let set = BTreeSet::from([values[*v].clone()]);
                        let (a, r) = if *add { (set, BTreeSet::new()) } else { (BTreeSet::new(), set) };
                        s.edit_tags("u", *m as u64 + 1, &a, &r, now).map(|_| ())
                    }
                    Op::Goal(v, t) => s.upsert_goal("u", &[values[*v].clone()], *t, now).map(|_| ()),
                    Op::Reminder(d) => s
                        .add_reminder("u", "call grandma", now + Duration::days(*d), ReminderOrigin::UserAdded, None, now)
                        .map(|_| ()),
                    Op::Finish(r, done) => {
                        let to = if *done { ReminderStatus::Done } else { ReminderStatus::Dismissed };
                        s.transition_reminder("u", *r as u64 + 1, to, now).map(|_| ())
                    }
                };
            }
            snapshot(&s)
        };
        let s = Store::open(&path, tax.clone(), chrono_tz::UTC).unwrap();
        prop_assert_eq!(&snapshot(&s), &before);
        s.compact().unwrap();
        drop(s);
        let s = Store::open(&path, tax, chrono_tz::UTC).unwrap();
        prop_assert_eq!(&snapshot(&s), &before);
    }
}
