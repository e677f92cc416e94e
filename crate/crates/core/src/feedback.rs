//! Responses shown after a moment is saved: weekly status reports, goal
//! congratulations, reading suggestions and activity suggestions, plus the
//! journaling prompt shown on the entry screen.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::annotate::{ActivityClass, Annotation, ValueTag};
use crate::bundled;
use crate::insights::GoalProgress;
use crate::taxonomy::ValueTaxonomy;

pub const POOL_SIZE: usize = 3;
pub const MIN_PROMPTS: usize = 6;
pub const PROMPTS_FILE: &str = "prompts.toml";
pub const ARTICLES_FILE: &str = "articles.toml";
pub const POOLS_FILE: &str = "pools.toml";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub id: String,
    pub text: String,
    #[serde(default = "yes")]
    pub canonical: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub value: String,
    pub title: String,
    pub url: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityPool {
    pub value: String,
    pub activities: Vec<String>,
}

#[derive(Deserialize)]
struct PromptFile {
    prompt: Vec<Prompt>,
}

#[derive(Deserialize)]
struct ArticleFile {
    article: Vec<Article>,
}

#[derive(Deserialize)]
struct PoolFile {
    pool: Vec<ActivityPool>,
}

#[derive(Debug, thiserror::Error)]
pub enum ContentError {
    #[error("{file}: {source}")]
    Parse {
        file: &'static str,
        source: toml::de::Error,
    },
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}: unknown value {value:?}")]
    UnknownValue { file: &'static str, value: String },
    #[error("{file}: value {0:?} listed twice", file = .1)]
    Duplicate(String, &'static str),
    #[error("{file}: no entry for {missing:?}")]
    Uncovered {
        file: &'static str,
        missing: Vec<String>,
    },
    #[error("pool for {value:?} has {len} activities, expected {POOL_SIZE}")]
    PoolSize { value: String, len: usize },
    #[error("need at least {MIN_PROMPTS} distinct prompts, got {0}")]
    TooFewPrompts(usize),
}

/// Prompts, articles and activity pools, validated against a taxonomy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Content {
    prompts: Vec<Prompt>,
    articles: BTreeMap<String, Article>,
    pools: BTreeMap<String, ActivityPool>,
}

fn by_value<T>(
    items: Vec<T>,
    value: impl Fn(&mut T) -> &mut String,
    taxonomy: &ValueTaxonomy,
    file: &'static str,
) -> Result<BTreeMap<String, T>, ContentError> {
    let mut out = BTreeMap::new();
    for mut item in items {
        let v = value(&mut item);
        let canonical = taxonomy
            .canonical(v)
            .ok_or_else(|| ContentError::UnknownValue {
                file,
                value: v.clone(),
            })?
            .to_string();
        *v = canonical.clone();
        if out.insert(canonical.clone(), item).is_some() {
            return Err(ContentError::Duplicate(canonical, file));
        }
    }
    let missing: Vec<String> = taxonomy.values().filter(|v| !out.contains_key(*v)).map(str::to_string).collect();
    if !missing.is_empty() {
        return Err(ContentError::Uncovered { file, missing });
    }
    Ok(out)
}

impl Content {
    pub fn parse(prompts: &str, articles: &str, pools: &str, taxonomy: &ValueTaxonomy) -> Result<Self, ContentError> {
        let prompts: PromptFile = toml::from_str(prompts).map_err(|source| ContentError::Parse {
            file: PROMPTS_FILE,
            source,
        })?;
        let articles: ArticleFile = toml::from_str(articles).map_err(|source| ContentError::Parse {
            file: ARTICLES_FILE,
            source,
        })?;
        let pools: PoolFile = toml::from_str(pools).map_err(|source| ContentError::Parse {
            file: POOLS_FILE,
            source,
        })?;
        let ids: BTreeSet<&str> = prompts.prompt.iter().map(|p| p.id.as_str()).collect();
        let texts: BTreeSet<&str> = prompts.prompt.iter().map(|p| p.text.as_str()).collect();
        let distinct = ids.len().min(texts.len());
        if distinct < MIN_PROMPTS || distinct != prompts.prompt.len() {
            return Err(ContentError::TooFewPrompts(distinct));
        }
        let articles = by_value(articles.article, |a| &mut a.value, taxonomy, ARTICLES_FILE)?;
        let pools = by_value(pools.pool, |p| &mut p.value, taxonomy, POOLS_FILE)?;
        for p in pools.values() {
            if p.activities.len() != POOL_SIZE {
                return Err(ContentError::PoolSize {
                    value: p.value.clone(),
                    len: p.activities.len(),
                });
            }
        }
        Ok(Self {
            prompts: prompts.prompt,
            articles,
            pools,
        })
    }

    pub fn bundled(taxonomy: &ValueTaxonomy) -> Result<Self, ContentError> {
        Self::parse(bundled::PROMPTS, bundled::ARTICLES, bundled::POOLS, taxonomy)
    }

    /// Reads `prompts.toml`, `articles.toml` and `pools.toml` from `dir`.
    pub fn load_dir(dir: &Path, taxonomy: &ValueTaxonomy) -> Result<Self, ContentError> {
        let read = |name: &str| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|source| ContentError::Io {
                path: path.display().to_string(),
                source,
            })
        };
        Self::parse(&read(PROMPTS_FILE)?, &read(ARTICLES_FILE)?, &read(POOLS_FILE)?, taxonomy)
    }

    pub fn prompts(&self) -> &[Prompt] {
        &self.prompts
    }

    pub fn article(&self, value: &str) -> Option<&Article> {
        self.articles.get(value)
    }

    pub fn pool(&self, value: &str) -> Option<&ActivityPool> {
        self.pools.get(value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FeedbackKind {
    StatusReport,
    Congratulation,
    ArticleSuggestion,
    ActivitySuggestion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeedbackPayload {
    Counts { activity: ActivityClass, count: u32 },
    Goal { value: String, achieved: u32, target: u32 },
    Article(Article),
    Activity { value: String, activity: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedbackItem {
    pub kind: FeedbackKind,
    pub message: String,
    pub payload: FeedbackPayload,
}

impl FeedbackItem {
    /// The value an article or activity suggestion is about.
    pub fn value(&self) -> Option<&str> {
        match &self.payload {
            FeedbackPayload::Article(a) => Some(&a.value),
            FeedbackPayload::Activity { value, .. } | FeedbackPayload::Goal { value, .. } => Some(value),
            FeedbackPayload::Counts { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeedbackError {
    #[error("no activity pool for value {0:?}")]
    UnknownValue(String),
}

const SMALL: [&str; 21] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve",
    "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen", "twenty",
];

/// English word for small counts, digits above twenty.
pub fn number_word(n: u32) -> String {
    SMALL.get(n as usize).map_or_else(|| n.to_string(), |w| w.to_string())
}

fn times(n: u32) -> String {
    match n {
        1 => "once".into(),
        2 => "twice".into(),
        n => format!("{} times", number_word(n)),
    }
}

fn plural(n: u32, one: &str, many: &str) -> String {
    if n == 1 {
        format!("one {one}")
    } else {
        format!("{} {many}", number_word(n))
    }
}

pub fn status_message(class: ActivityClass, count: u32) -> String {
    match class {
        ActivityClass::Exercise => format!("You ran {} during this week.", times(count)),
        ActivityClass::Meals => format!("You logged {} this week.", plural(count, "meal", "meals")),
        ActivityClass::Conversation => {
            format!("You had {} this week.", plural(count, "conversation", "conversations"))
        }
    }
}

pub fn congratulation_message(value: &str) -> String {
    format!("Congratulations that you completed your weekly goal for {value}!")
}

/// A congratulation exactly when `before` was incomplete and `after` is
/// complete.
pub fn congratulate_on_goal(before: &GoalProgress, after: &GoalProgress) -> Option<FeedbackItem> {
    if before.value != after.value || before.completed || !after.completed {
        return None;
    }
    Some(FeedbackItem {
        kind: FeedbackKind::Congratulation,
        message: congratulation_message(&after.value),
        payload: FeedbackPayload::Goal {
            value: after.value.clone(),
            achieved: after.achieved,
            target: after.target,
        },
    })
}

/// The least recently suggested activity of the value's pool. Activities
/// never suggested come first; ties are broken by a seeded draw.
pub fn suggest_activity<'c>(
    content: &'c Content,
    value: &str,
    history: &[String],
    seed: u64,
) -> Result<&'c str, FeedbackError> {
    let pool = content.pool(value).ok_or_else(|| FeedbackError::UnknownValue(value.to_string()))?;
    let last_used = |a: &str| history.iter().rposition(|h| h == a);
    let oldest = pool.activities.iter().map(|a| last_used(a)).min().flatten();
    let tied: Vec<&String> = pool.activities.iter().filter(|a| last_used(a) == oldest).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(tied.choose(&mut rng).expect("pool is never empty"))
}

/// Uniform seeded draw from the prompt set.
pub fn select_prompt(content: &Content, seed: u64) -> &Prompt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    &content.prompts[rng.gen_range(0..content.prompts.len())]
}

/// What the generator needs to know about the rest of the user's week.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeeklyContext {
    /// Moments of this week with the moment's activity class, including it.
    pub activity_count: u32,
    /// Goal progress for this week without and with the moment.
    pub progress_before: Vec<GoalProgress>,
    pub progress_after: Vec<GoalProgress>,
    /// Values already congratulated this week.
    pub congratulated: BTreeSet<String>,
    /// Earlier activity suggestions per value, oldest first.
    pub suggestion_history: BTreeMap<String, Vec<String>>,
}

/// The tag an article or activity suggestion is chosen for: highest
/// confidence, earliest in taxonomy order on ties.
pub fn focus_tag(tags: &[ValueTag]) -> Option<&ValueTag> {
    tags.iter().fold(None, |best: Option<&ValueTag>, t| match best {
        Some(b) if b.confidence >= t.confidence => Some(b),
        _ => Some(t),
    })
}

/// Feedback for a freshly annotated moment, in display order: status
/// report, congratulations, article, activity suggestion.
pub fn generate_feedback(
    annotation: &Annotation,
    effective_tags: &[ValueTag],
    ctx: &WeeklyContext,
    content: &Content,
    seed: u64,
) -> Vec<FeedbackItem> {
    let mut out = Vec::new();
    if let Some(act) = &annotation.activity {
        out.push(FeedbackItem {
            kind: FeedbackKind::StatusReport,
            message: status_message(act.class, ctx.activity_count),
            payload: FeedbackPayload::Counts {
                activity: act.class,
                count: ctx.activity_count,
            },
        });
    }
    for after in &ctx.progress_after {
        if ctx.congratulated.contains(&after.value) {
            continue;
        }
        if let Some(before) = ctx.progress_before.iter().find(|b| b.value == after.value) {
            out.extend(congratulate_on_goal(before, after));
        }
    }
    let Some(tag) = focus_tag(effective_tags) else {
        return out;
    };
    if let Some(article) = content.article(&tag.value) {
        out.push(FeedbackItem {
            kind: FeedbackKind::ArticleSuggestion,
            message: article.title.clone(),
            payload: FeedbackPayload::Article(article.clone()),
        });
    }
    if annotation.is_positive() {
        let history = ctx.suggestion_history.get(&tag.value).map(Vec::as_slice).unwrap_or_default();
        if let Ok(activity) = suggest_activity(content, &tag.value, history, seed) {
            out.push(FeedbackItem {
                kind: FeedbackKind::ActivitySuggestion,
                message: activity.to_string(),
                payload: FeedbackPayload::Activity {
                    value: tag.value.clone(),
                    activity: activity.to_string(),
                },
            });
        }
    }
    out
}
