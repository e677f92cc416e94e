//! People, duration and distance extraction for activity moments.

use super::types::Attributes;
use crate::text::{match_lexicon, tokenize, HitKind, SeedLexicon, Token};

/// Relation nouns, as lemmas.
const RELATIONS: &[&str] = &[
    "friend", "bestie", "buddy", "pal", "roommate", "neighbor", "neighbour", "mom", "mother", "mum",
    "dad", "father", "parent", "brother", "sister", "sibling", "son", "daughter", "kid", "child",
    "baby", "wife", "husband", "partner", "boyfriend", "girlfriend", "fiance", "fiancee", "grandma",
    "grandpa", "grandmother", "grandfather", "grandparent", "aunt", "uncle", "cousin", "niece",
    "nephew", "family", "coworker", "colleague", "boss", "classmate", "teammate", "teacher",
    "mentor", "team", "spouse",
];

/// Capitalized words that are not people.
const NOT_PEOPLE: &[&str] = &[
    "i", "monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday", "january",
    "february", "march", "april", "may", "june", "july", "august", "september", "october",
    "november", "december", "christmas", "easter", "thanksgiving", "today", "tonight", "god", "ok",
];

fn is_person_name(tok: &Token<'_>, source: &str) -> bool {
    let mut chars = tok.surface.chars();
    let Some(first) = chars.next() else { return false };
    if !first.is_uppercase() || tok.starts_sentence(source) {
        return false;
    }
    let word = tok.surface.split('\'').next().unwrap_or(tok.surface);
    if word.chars().count() > 1 && word.chars().all(|c| !c.is_lowercase()) {
        return false;
    }
    if !word.chars().all(char::is_alphabetic) {
        return false;
    }
    !NOT_PEOPLE.contains(&word.to_lowercase().as_str())
}

fn strip_possessive(s: &str) -> &str {
    s.strip_suffix("'s")
        .or_else(|| s.strip_suffix("’s"))
        .or_else(|| s.strip_suffix('\''))
        .unwrap_or(s)
}

/// Person mentions in order of first appearance: relation nouns (lowercased
/// surface) and capitalized tokens that do not open a sentence.
pub fn extract_people(text: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for tok in tokenize(text) {
        let mention = if RELATIONS.contains(&tok.lemma.as_str()) {
            strip_possessive(tok.surface).to_lowercase()
        } else if is_person_name(&tok, text) {
            strip_possessive(tok.surface).to_string()
        } else {
            continue;
        };
        if !out.contains(&mention) {
            out.push(mention);
        }
    }
    out
}

fn number_word(w: &str) -> Option<f64> {
    let n = match w {
        "a" | "an" | "one" => 1.0,
        "two" | "couple" => 2.0,
        "three" => 3.0,
        "four" => 4.0,
        "five" => 5.0,
        "six" => 6.0,
        "seven" => 7.0,
        "eight" => 8.0,
        "nine" => 9.0,
        "ten" => 10.0,
        "fifteen" => 15.0,
        "twenty" => 20.0,
        "thirty" => 30.0,
        "forty" => 40.0,
        "forty-five" => 45.0,
        "fifty" => 50.0,
        "sixty" => 60.0,
        "ninety" => 90.0,
        _ => return w.parse::<f64>().ok().filter(|n| n.is_finite() && *n >= 0.0),
    };
    Some(n)
}

fn hour_unit(w: &str) -> bool {
    matches!(w, "hour" | "hours" | "hr" | "hrs" | "h")
}

fn minute_unit(w: &str) -> bool {
    matches!(w, "minute" | "minutes" | "min" | "mins")
}

fn distance_unit(w: &str) -> bool {
    matches!(
        w,
        "mile" | "miles" | "km" | "kms" | "k" | "kilometer" | "kilometers" | "kilometre" | "kilometres" | "meter" | "meters" | "metre" | "metres" | "lap" | "laps"
    )
}

/// Lowercased words with `5-mile` style compounds split.
fn words(text: &str) -> Vec<(String, usize, usize)> {
    let mut out = Vec::new();
    for t in tokenize(text) {
        let lower = t.surface.to_lowercase();
        let mut at = t.offset;
        for part in lower.split('-') {
            if !part.is_empty() {
                out.push((part.to_string(), at, at + part.len()));
            }
            at += part.len() + 1;
        }
    }
    out
}

/// Minutes mentioned in `text`: `N minutes`, `N hours`, `an hour`,
/// `half an hour`, `an hour and a half`, `N and a half hours`, with a
/// trailing minutes part (`1 hour 20 minutes`) added on. The first
/// duration expression wins.
pub fn parse_duration(text: &str) -> Option<u32> {
    let w: Vec<String> = words(text).into_iter().map(|(s, _, _)| s).collect();
    let at = |i: usize| w.get(i).map(String::as_str).unwrap_or("");
    let mut i = 0;
    while i < w.len() {
        if at(i) == "half" && matches!(at(i + 1), "an" | "a") && hour_unit(at(i + 2)) {
            return Some(30);
        }
        if let Some(n) = number_word(at(i)) {
            let mut j = i + 1;
            let mut half = false;
            if at(j) == "and" && at(j + 1) == "a" && at(j + 2) == "half" {
                half = true;
                j += 3;
            }
            if hour_unit(at(j)) {
                let mut minutes = n * 60.0;
                if half || (at(j + 1) == "and" && at(j + 2) == "a" && at(j + 3) == "half") {
                    minutes += 30.0;
                } else if let Some(m) = number_word(at(j + 1)).filter(|_| minute_unit(at(j + 2))) {
                    minutes += m;
                } else if at(j + 1) == "and" {
                    if let Some(m) = number_word(at(j + 2)).filter(|_| minute_unit(at(j + 3))) {
                        minutes += m;
                    }
                }
                return Some(minutes.round() as u32);
            }
            if minute_unit(at(j)) && !half {
                return Some(n.round() as u32);
            }
        }
        i += 1;
    }
    None
}

/// Raw distance phrase such as `5 mile`, as written.
pub fn parse_distance(text: &str) -> Option<String> {
    let w = words(text);
    w.windows(2).find_map(|pair| {
        let (num, s, _) = &pair[0];
        let (unit, _, e) = &pair[1];
        (num.parse::<f64>().is_ok() && distance_unit(unit)).then(|| {
            let raw = &text[*s..*e];
            raw.replace('-', " ")
        })
    })
}

/// Attributes of an activity moment. `class_lexicon` is the seed lexicon of
/// the assigned class; its first positive hit is the activity term.
pub fn extract_attributes(text: &str, class_lexicon: Option<&SeedLexicon>) -> Attributes {
    let activity_term = class_lexicon.and_then(|lex| {
        match_lexicon(&tokenize(text), lex)
            .into_iter()
            .find(|h| h.kind == HitKind::Positive)
            .map(|h| h.matched_phrase.join(" "))
    });
    Attributes {
        people: extract_people(text),
        duration_minutes: parse_duration(text),
        distance: parse_distance(text),
        activity_term,
    }
}
