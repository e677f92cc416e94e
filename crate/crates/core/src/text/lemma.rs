//! Rule-based English lemmatizer.
//!
//! Lowercases, drops a possessive `'s`, consults the exception table, then
//! strips one inflectional suffix (`-s`, `-es`, `-ies`, `-ing`, `-ed`,
//! `-ier`). Stripping repeats until nothing changes, so the output is always
//! a fixpoint and `lemmatize(lemmatize(w)) == lemmatize(w)`.
//!
//! Generic `-er` stripping is not applied: it mangles too many common nouns
//! (`dinner`, `water`, `brother`). Agentive and comparative `-er` forms that
//! matter are listed in the exception table instead.

use std::collections::HashMap;
use std::sync::OnceLock;

/// `(inflected, lemma)` pairs. Entries mapping a word to itself protect it
/// from the suffix rules. Every right-hand side must itself be a fixpoint.
const EXCEPTIONS: &[(&str, &str)] = &[
    // irregular verbs
    ("am", "be"), ("is", "be"), ("are", "be"), ("was", "be"), ("were", "be"),
    ("been", "be"), ("being", "be"), ("has", "have"), ("had", "have"), ("having", "have"),
    ("does", "do"), ("did", "do"), ("done", "do"), ("doing", "do"),
    ("goes", "go"), ("went", "go"), ("gone", "go"), ("going", "go"),
    ("ran", "run"), ("ate", "eat"), ("eaten", "eat"), ("saw", "see"), ("seen", "see"),
    ("made", "make"), ("got", "get"), ("gotten", "get"), ("took", "take"), ("taken", "take"),
    ("came", "come"), ("gave", "give"), ("given", "give"), ("met", "meet"),
    ("spoke", "speak"), ("spoken", "speak"), ("thought", "think"), ("bought", "buy"),
    ("brought", "bring"), ("felt", "feel"), ("found", "find"), ("told", "tell"),
    ("said", "say"), ("says", "say"), ("won", "win"), ("swam", "swim"), ("swum", "swim"),
    ("rode", "ride"), ("ridden", "ride"), ("drove", "drive"), ("driven", "drive"),
    ("wrote", "write"), ("written", "write"), ("drew", "draw"), ("drawn", "draw"),
    ("knew", "know"), ("known", "know"), ("grew", "grow"), ("grown", "grow"),
    ("threw", "throw"), ("thrown", "throw"), ("flew", "fly"), ("flown", "fly"),
    ("began", "begin"), ("begun", "begin"), ("sang", "sing"), ("sung", "sing"),
    ("slept", "sleep"), ("kept", "keep"), ("left", "leave"), ("lost", "lose"),
    ("paid", "pay"), ("sat", "sit"), ("stood", "stand"), ("taught", "teach"),
    ("caught", "catch"), ("fought", "fight"), ("sought", "seek"), ("spent", "spend"),
    ("sent", "send"), ("built", "build"), ("held", "hold"), ("heard", "hear"),
    ("led", "lead"), ("fell", "fall"), ("fallen", "fall"), ("broke", "break"),
    ("broken", "break"), ("chose", "choose"), ("chosen", "choose"), ("forgot", "forget"),
    ("forgotten", "forget"), ("forgave", "forgive"), ("forgiven", "forgive"),
    ("hung", "hang"), ("hid", "hide"), ("hidden", "hide"), ("woke", "wake"),
    ("woken", "wake"), ("wore", "wear"), ("worn", "wear"), ("tore", "tear"),
    ("stole", "steal"), ("stolen", "steal"), ("shook", "shake"), ("understood", "understand"),
    ("became", "become"), ("meant", "mean"), ("dealt", "deal"), ("fed", "feed"),
    ("bled", "bleed"), ("lit", "light"), ("ground", "ground"), ("read", "read"),
    ("dying", "die"), ("died", "die"), ("lying", "lie"), ("lied", "lie"), ("tying", "tie"),
    ("used", "use"), ("tired", "tired"), ("excited", "excite"), ("exciting", "excite"),
    ("hiked", "hike"), ("biked", "bike"), ("liked", "like"), ("picnicking", "picnic"),
    ("cancelled", "cancel"), ("canceled", "cancel"), ("travelled", "travel"),
    ("traveled", "travel"), ("travelling", "travel"), ("traveling", "travel"),
    ("skied", "ski"), ("overslept", "oversleep"), ("underwent", "undergo"),
    // irregular nouns
    ("children", "child"), ("men", "man"), ("women", "woman"), ("feet", "foot"),
    ("teeth", "tooth"), ("mice", "mouse"), ("geese", "goose"), ("people", "people"),
    ("lives", "life"), ("wives", "wife"), ("knives", "knife"), ("leaves", "leaf"),
    ("movies", "movie"), ("cookies", "cookie"), ("selfies", "selfie"), ("buses", "bus"),
    ("potatoes", "potato"), ("tomatoes", "tomato"), ("heroes", "hero"),
    ("series", "series"), ("species", "species"), ("news", "news"),
    // comparatives and agentive forms
    ("better", "good"), ("best", "good"), ("worse", "bad"), ("worst", "bad"),
    ("bigger", "big"), ("biggest", "big"), ("runner", "run"), ("runners", "run"),
    ("biker", "bike"), ("bikers", "bike"), ("swimmer", "swim"), ("hiker", "hike"),
    ("walker", "walk"), ("jogger", "jog"), ("climber", "climb"), ("winner", "win"),
    ("player", "play"), ("players", "play"), ("dancer", "dance"), ("painter", "paint"),
    ("writer", "write"), ("reader", "read"), ("learner", "learn"), ("baker", "bake"),
    // words the suffix rules would damage
    ("always", "always"), ("perhaps", "perhaps"), ("sometimes", "sometimes"),
    ("towards", "towards"), ("afterwards", "afterwards"), ("thanks", "thanks"),
    ("pilates", "pilates"), ("athletics", "athletics"), ("gymnastics", "gymnastics"),
    ("physics", "physics"), ("politics", "politics"), ("mathematics", "mathematics"),
    ("diabetes", "diabetes"), ("clothes", "clothes"), ("glasses", "glasses"),
    ("morning", "morning"), ("evening", "evening"), ("wedding", "wedding"),
    ("nothing", "nothing"), ("something", "something"), ("anything", "anything"),
    ("everything", "everything"), ("ceiling", "ceiling"), ("during", "during"),
    ("sibling", "sibling"), ("siblings", "sibling"), ("clothing", "clothing"),
    ("building", "building"), ("pudding", "pudding"), ("darling", "darling"),
    ("hundred", "hundred"), ("sacred", "sacred"), ("naked", "naked"),
    ("wicked", "wicked"), ("beloved", "beloved"), ("bored", "bored"),
    ("red", "red"), ("bed", "bed"), ("shed", "shed"), ("wed", "wed"),
    ("interested", "interested"), ("stressed", "stressed"), ("relaxed", "relaxed"),
];

fn exceptions() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| EXCEPTIONS.iter().copied().collect())
}

fn is_vowel_at(w: &[u8], i: usize) -> bool {
    match w[i] {
        b'a' | b'e' | b'i' | b'o' | b'u' => true,
        b'y' => i > 0 && !is_vowel_at(w, i - 1),
        _ => false,
    }
}

fn has_vowel(w: &str) -> bool {
    let b = w.as_bytes();
    (0..b.len()).any(|i| is_vowel_at(b, i))
}

/// Number of vowel-consonant sequences, the usual stem "measure".
fn measure(w: &str) -> usize {
    let b = w.as_bytes();
    let mut m = 0;
    let mut prev_vowel = false;
    for i in 0..b.len() {
        let v = is_vowel_at(b, i);
        if prev_vowel && !v {
            m += 1;
        }
        prev_vowel = v;
    }
    m
}

/// Ends consonant-vowel-consonant where the last consonant is not w, x or y.
fn ends_cvc(w: &str) -> bool {
    let b = w.as_bytes();
    let n = b.len();
    n >= 3
        && !is_vowel_at(b, n - 3)
        && is_vowel_at(b, n - 2)
        && !is_vowel_at(b, n - 1)
        && !matches!(b[n - 1], b'w' | b'x' | b'y')
}

fn ends_double_consonant(w: &str) -> bool {
    let b = w.as_bytes();
    let n = b.len();
    n >= 2 && b[n - 1] == b[n - 2] && !is_vowel_at(b, n - 1)
}

/// Repairs a stem left behind by removing `-ing` or `-ed`.
fn restore_stem(stem: &str) -> String {
    let b = stem.as_bytes();
    let n = b.len();
    if ends_double_consonant(stem) && !matches!(b[n - 1], b'l' | b's' | b'z') {
        return stem[..n - 1].to_string();
    }
    let consonant_at = n >= 5 && stem.ends_with("at") && !is_vowel_at(b, n - 3);
    if consonant_at
        || stem.ends_with("bl")
        || stem.ends_with("iz")
        || stem.ends_with("yz")
        || matches!(b[n - 1], b'v' | b'c' | b'u')
        || (b[n - 1] == b'z' && is_vowel_at(b, n - 2))
        || (measure(stem) == 1 && ends_cvc(stem))
    {
        return format!("{stem}e");
    }
    stem.to_string()
}

/// One rewriting step. Returns the input unchanged when no rule applies.
fn step(w: &str) -> String {
    if let Some(&lemma) = exceptions().get(w) {
        return lemma.to_string();
    }
    if w.len() <= 3 || !w.bytes().all(|b| b.is_ascii_lowercase()) {
        return w.to_string();
    }
    let n = w.len();
    if n > 4 && w.ends_with("ies") {
        return format!("{}y", &w[..n - 3]);
    }
    if n > 4 && w.ends_with("ied") {
        return format!("{}y", &w[..n - 3]);
    }
    if n > 5 && w.ends_with("ier") {
        return format!("{}y", &w[..n - 3]);
    }
    if w.ends_with("sses") {
        return w[..n - 2].to_string();
    }
    if n > 4 && ["ches", "shes", "xes", "zzes"].iter().any(|s| w.ends_with(s)) {
        return w[..n - 2].to_string();
    }
    if w.ends_with('s') {
        if ["ss", "us", "is", "ous", "'s"].iter().any(|s| w.ends_with(s)) {
            return w.to_string();
        }
        return w[..n - 1].to_string();
    }
    if let Some(stem) = w.strip_suffix("ing") {
        if stem.len() >= 3 && has_vowel(stem) {
            return restore_stem(stem);
        }
        return w.to_string();
    }
    if let Some(stem) = w.strip_suffix("ed") {
        if stem.len() >= 3 && has_vowel(stem) && !stem.ends_with('e') {
            return restore_stem(stem);
        }
    }
    w.to_string()
}

fn normalize(surface: &str) -> String {
    let lower = surface.to_lowercase();
    for suffix in ["'s", "’s"] {
        if let Some(base) = lower.strip_suffix(suffix) {
            if !base.is_empty() {
                return base.to_string();
            }
        }
    }
    lower.replace('’', "'")
}

/// Lemmatizes a token surface. The result is lowercase, non-empty for
/// non-empty input, and a fixpoint of this function.
pub fn lemmatize(surface: &str) -> String {
    let mut current = normalize(surface);
    loop {
        let next = step(&current);
        if next == current || next.is_empty() {
            return current;
        }
        current = next;
    }
}
