use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use chrono::{DateTime, Utc};
use moments_api::config::ApiConfig;
use moments_core::annotate::{
    Annotation, Annotator, HttpSentimentAdapter, MockSentimentAdapter, PipelineConfig, SentimentAdapter,
    UnavailableAdapter, UserTagState, ACTIVITY_THRESHOLD, DEFAULT_TOP_K,
};
use moments_core::feedback::Content;
use moments_core::models::{ModelBundle, ModelSet, ACTIVITY_FILE, POLARITY_FILE, VALUES_FILE};
use moments_core::service::{Journal, JournalConfig, PostedMoment};
use moments_core::store::{NewMoment, ReminderOrigin, Store, JOURNAL_FILE};
use moments_core::taxonomy::ValueTaxonomy;
use moments_core::text::load_lexicons;
use moments_core::trainer::harness::{
    evaluate_activity, evaluate_keyword_tagger, evaluate_model_tagger, evaluate_polarity, keyword_tagger,
    train_activity, train_all, train_polarity, train_values, DataLayout, HarnessConfig,
};
use moments_core::trainer::{
    augment_one_vs_rest, build_training_set, export_labeling_tasks, import_labels as collect_labels, read_jsonl, simulate_selections,
    train_value_models, value_hyperparams, write_jsonl, LabelingTask, Metrics, SelectionRecord,
    WeakSupervisionConfig, WordSimilarityTable,
};
use serde::Serialize;
use serde_json::json;

use crate::{ExternalArgs, Format, Globals, ModelSource, Task};

fn emit<T: Serialize>(g: &Globals, record: &T, table: impl FnOnce() -> String) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match g.format {
        Format::Records => writeln!(out, "{}", serde_json::to_string(record)?)?,
        Format::Table => write!(out, "{}", table())?,
    }
    Ok(())
}

fn layout(g: &Globals) -> DataLayout {
    DataLayout::new(&g.fixtures)
}

fn harness(g: &Globals) -> HarnessConfig {
    HarnessConfig::with_seed(g.seed)
}

fn load_models(g: &Globals, src: &ModelSource) -> Result<ModelSet> {
    match &src.models {
        Some(dir) => Ok(ModelSet::load_dir(dir)?),
        None => {
            log::info!("training models from {} (seed {})", g.fixtures.display(), g.seed);
            Ok(train_all(&layout(g), &ValueTaxonomy::default(), &harness(g))?)
        }
    }
}

fn build_annotator(g: &Globals, models: ModelSet, external: Arc<dyn SentimentAdapter>) -> Result<Annotator> {
    let l = layout(g);
    Ok(Annotator::new(
        ValueTaxonomy::default(),
        &load_lexicons(&l.value_lexicons())?,
        &load_lexicons(&l.activity_lexicons())?,
        models,
        external,
        PipelineConfig::default(),
    )?)
}

fn fixture_sentiment(g: &Globals, default_score: f64) -> Result<MockSentimentAdapter> {
    let path = layout(g).polarity_external_mock();
    MockSentimentAdapter::from_jsonl(&path, default_score).with_context(|| format!("reading {}", path.display()))
}

fn external(g: &Globals, args: &ExternalArgs) -> Result<Arc<dyn SentimentAdapter>> {
    if args.no_external {
        return Ok(Arc::new(UnavailableAdapter));
    }
    Ok(match (&args.external_url, args.external_score) {
        (Some(url), _) => Arc::new(HttpSentimentAdapter::new(url, Duration::from_secs(2))),
        (None, Some(s)) if (-1.0..=1.0).contains(&s) => Arc::new(MockSentimentAdapter::constant(s)),
        (None, Some(s)) => bail!("--external-score {s} outside [-1, 1]"),
        (None, None) => Arc::new(fixture_sentiment(g, 0.0)?),
    })
}

pub fn serve(
    g: &Globals,
    config: Option<PathBuf>,
    port: Option<u16>,
    data_dir: Option<PathBuf>,
    models: Option<PathBuf>,
) -> Result<()> {
    let mut cfg = match &config {
        Some(p) => ApiConfig::load(p)?,
        None => ApiConfig::default(),
    };
    cfg.apply_env(std::env::vars())?;
    cfg.seed = g.seed;
    if let Some(p) = port {
        cfg.port = p;
    }
    if let Some(d) = data_dir {
        cfg.data_dir = d;
    }
    if let Some(m) = models {
        cfg.model_dir = m;
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(moments_api::serve(cfg))?;
    Ok(())
}

#[derive(Serialize)]
struct AnnotateRecord<'a> {
    text: &'a str,
    #[serde(flatten)]
    annotation: &'a Annotation,
}

pub fn annotate(g: &Globals, text: &str, src: &ModelSource, ext: &ExternalArgs) -> Result<()> {
    let text = text.trim();
    if text.is_empty() {
        bail!("--text is empty");
    }
    let annotator = build_annotator(g, load_models(g, src)?, external(g, ext)?)?;
    // Fixed timestamp so repeated runs print identical records.
    let mut a = annotator.annotate(0, text, &UserTagState::default(), DateTime::UNIX_EPOCH);
    a.annotated_at = DateTime::UNIX_EPOCH;
    emit(g, &AnnotateRecord { text, annotation: &a }, || {
        let mut s = String::new();
        s += &format!("polarity  {:?} ({:.2}, {:?})\n", a.polarity.label, a.polarity.confidence, a.polarity.source);
        s += &match &a.activity {
            Some(act) => {
                let mut line = format!("activity  {} ({:.2})", act.class, act.confidence);
                if let Some(d) = &act.attributes.distance {
                    line += &format!(" distance {d}");
                }
                if let Some(m) = act.attributes.duration_minutes {
                    line += &format!(" duration {m} min");
                }
                line + "\n"
            }
            None => "activity  none\n".into(),
        };
        let values: Vec<String> = a.values.iter().map(|t| format!("{} ({:.2})", t.value, t.confidence)).collect();
        s += &format!("values    {}\n", if values.is_empty() { "none".into() } else { values.join(", ") });
        s += &format!("people    {}\n", if a.people.is_empty() { "none".into() } else { a.people.join(", ") });
        for n in &a.notes {
            s += &format!("note      {n}\n");
        }
        s
    })
}

#[derive(Serialize)]
struct TrainRecord {
    task: &'static str,
    file: PathBuf,
    bundle_hash: String,
    models: BTreeMap<String, String>,
    skipped: Vec<String>,
}

fn save_bundle(g: &Globals, task: &'static str, bundle: &ModelBundle, dir: &Path, file: &str) -> Result<()> {
    let path = dir.join(file);
    bundle.save(&path).with_context(|| format!("writing {}", path.display()))?;
    let rec = TrainRecord {
        task,
        file: path,
        bundle_hash: bundle.bundle_hash(),
        models: bundle.models.iter().map(|(k, m)| (k.clone(), m.model_hash())).collect(),
        skipped: bundle.skipped.clone(),
    };
    emit(g, &rec, || {
        let mut s = format!("{task}: {} -> {}\n", rec.bundle_hash, rec.file.display());
        for (k, h) in &rec.models {
            s += &format!("  {k:<28} {h}\n");
        }
        for k in &rec.skipped {
            s += &format!("  {k:<28} skipped (too little data)\n");
        }
        s
    })
}

pub fn train(g: &Globals, task: Task, out: &Path) -> Result<()> {
    if task == Task::Keywords {
        bail!("the keyword tagger has no model to train");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let l = layout(g);
    let cfg = harness(g);
    let taxonomy = ValueTaxonomy::default();
    let all = task == Task::All;
    if all || task == Task::Activities {
        let (bundle, sizes) = train_activity(&l, &cfg)?;
        for (class, s) in &sizes {
            log::info!("{class}: built {} expanded {} trimmed {}", s.built, s.expanded, s.trimmed);
        }
        save_bundle(g, "activities", &bundle, out, ACTIVITY_FILE)?;
    }
    if all || task == Task::Values {
        save_bundle(g, "values", &train_values(&l, &taxonomy, &cfg)?, out, VALUES_FILE)?;
    }
    if all || task == Task::Polarity {
        save_bundle(g, "polarity", &train_polarity(&l, &cfg)?, out, POLARITY_FILE)?;
    }
    Ok(())
}

fn print_metrics(g: &Globals, task: &str, m: &Metrics) -> Result<()> {
    emit(g, &json!({"task": task, "metrics": m}), || format!("{task}\n{}", m.render_table()))
}

pub fn eval(g: &Globals, task: Task, src: &ModelSource) -> Result<()> {
    let l = layout(g);
    let taxonomy = ValueTaxonomy::default();
    let wants = |t: Task| task == t || task == Task::All;
    if wants(Task::Keywords) {
        let gold = l.load_corpus(&l.values_gold())?;
        print_metrics(g, "keywords", &evaluate_keyword_tagger(&keyword_tagger(&l, &taxonomy)?, &taxonomy, &gold)?)?;
        if task == Task::Keywords {
            return Ok(());
        }
    }
    let models = load_models(g, src)?;
    if wants(Task::Activities) {
        let gold = l.load_corpus(&l.activity_gold())?;
        print_metrics(g, "activities", &evaluate_activity(&models.activity, &gold, ACTIVITY_THRESHOLD)?)?;
    }
    if wants(Task::Values) {
        let gold = l.load_corpus(&l.values_gold())?;
        print_metrics(g, "values", &evaluate_model_tagger(&models.values, &taxonomy, &gold)?)?;
    }
    if wants(Task::Polarity) {
        let test = l.load_corpus(&l.polarity_test())?;
        let ext = fixture_sentiment(g, 0.0)?;
        let model = models.polarity_model().context("polarity bundle has no model")?;
        print_metrics(g, "polarity", &evaluate_polarity(model, &ext, &test)?)?;
    }
    Ok(())
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

pub fn build_data(g: &Globals, out: &Path, sigma: f64, negative_ratio: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&sigma) {
        bail!("--sigma must be in [0, 1]");
    }
    let l = layout(g);
    let corpus = l.load_corpus(&l.corpus())?;
    let sim = WordSimilarityTable::load(&l.vectors())?;
    let ws = WeakSupervisionConfig { negative_ratio, sigma, seed: g.seed };
    std::fs::create_dir_all(out)?;
    for lex in load_lexicons(&l.activity_lexicons())? {
        let (set, sizes) = build_training_set(&corpus, &lex, &sim, &ws)?;
        let path = out.join(format!("{}.jsonl", file_stem(lex.label())));
        set.save(&path).with_context(|| format!("writing {}", path.display()))?;
        let rec = json!({"class": lex.label(), "file": path, "sizes": sizes, "negatives": set.len() - sizes.trimmed});
        emit(g, &rec, || {
            format!(
                "{:<14} built {:>4}  expanded {:>4}  trimmed {:>4}  -> {}\n",
                lex.label(),
                sizes.built,
                sizes.expanded,
                sizes.trimmed,
                path.display()
            )
        })?;
    }
    Ok(())
}

fn write_records<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    write_jsonl(records, &mut w)?;
    w.flush()?;
    Ok(())
}

fn read_records<T: for<'de> serde::Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let r = BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?);
    read_jsonl(r).with_context(|| format!("reading {}", path.display()))
}

pub fn export_tasks(g: &Globals, out: &Path, simulate: Option<&Path>, noise: f64) -> Result<()> {
    let l = layout(g);
    let corpus = l.load_corpus(&l.corpus())?;
    let tasks = export_labeling_tasks(&corpus, &keyword_tagger(&l, &ValueTaxonomy::default())?, DEFAULT_TOP_K);
    write_records(out, &tasks)?;
    let mut rec = json!({"tasks": tasks.len(), "file": out});
    if let Some(sel) = simulate {
        let selections = simulate_selections(&tasks, &corpus, noise, g.seed);
        write_records(sel, &selections)?;
        rec["selections"] = json!(selections.len());
        rec["selections_file"] = json!(sel);
    }
    emit(g, &rec, || {
        let mut s = format!("{} tasks -> {}\n", tasks.len(), out.display());
        if let Some(sel) = simulate {
            s += &format!("simulated selections -> {}\n", sel.display());
        }
        s
    })
}

pub fn import_labels(
    g: &Globals,
    tasks: &Path,
    selections: Option<&Path>,
    out: &Path,
    train: Option<&Path>,
    negative_ratio: f64,
) -> Result<()> {
    let tasks: Vec<LabelingTask> = read_records(tasks)?;
    let selections: Vec<SelectionRecord> = match selections {
        Some(p) => read_records(p)?,
        None => Vec::new(),
    };
    let sets = augment_one_vs_rest(&collect_labels(&tasks, &selections)?, &tasks, negative_ratio, g.seed);
    std::fs::create_dir_all(out)?;
    for (value, set) in &sets {
        let path = out.join(format!("{}.jsonl", file_stem(value)));
        set.save(&path).with_context(|| format!("writing {}", path.display()))?;
        let (pos, neg) = (set.positives().count(), set.negatives().count());
        emit(g, &json!({"value": value, "positives": pos, "negatives": neg, "file": path}), || {
            format!("{value:<28} +{pos:<5} -{neg:<5} -> {}\n", path.display())
        })?;
    }
    if let Some(dir) = train {
        std::fs::create_dir_all(dir)?;
        let bundle = train_value_models(&sets, &value_hyperparams(g.seed), None)?;
        save_bundle(g, "values", &bundle, dir, VALUES_FILE)?;
    }
    Ok(())
}

fn open_store(data_dir: &Path) -> Result<Store> {
    std::fs::create_dir_all(data_dir)?;
    Ok(Store::open(&data_dir.join(JOURNAL_FILE), ValueTaxonomy::default(), chrono_tz::UTC)?)
}

fn open_journal(g: &Globals, data_dir: &Path, src: &ModelSource) -> Result<Journal> {
    let taxonomy = ValueTaxonomy::default();
    let models = load_models(g, src)?;
    let annotator = build_annotator(g, models, Arc::new(fixture_sentiment(g, 0.0)?))?;
    Ok(Journal::new(open_store(data_dir)?, annotator, Content::bundled(&taxonomy)?, JournalConfig { seed: g.seed, ..JournalConfig::default() }))
}

pub fn import_corpus(
    g: &Globals,
    file: &Path,
    data_dir: &Path,
    user: &str,
    annotate: bool,
    at: Option<DateTime<Utc>>,
    src: &ModelSource,
) -> Result<()> {
    let corpus = layout(g).load_corpus(file)?;
    let now = at.unwrap_or_else(Utc::now);
    let mut annotated = 0;
    let moments = if annotate {
        let journal = open_journal(g, data_dir, src)?;
        let moments = journal.store().import_corpus(user, &corpus, now)?;
        for m in &moments {
            journal.annotate_moment(user, m.id, now)?;
            annotated += 1;
        }
        moments
    } else {
        open_store(data_dir)?.import_corpus(user, &corpus, now)?
    };
    emit(g, &json!({"user": user, "imported": moments.len(), "annotated": annotated, "journal": data_dir.join(JOURNAL_FILE)}), || {
        format!("imported {} moments for {user} ({annotated} annotated)\n", moments.len())
    })
}

const DEMO_MOMENTS: &[(i64, &str)] = &[
    (6, "Had great dinner with my parents"),
    (5, "Enjoyed 5 mile run around the lake"),
    (5, "Talked with my sister on the phone for an hour"),
    (4, "Meditated for twenty minutes before work"),
    (3, "Finished a hard project at work and my team celebrated"),
    (2, "Went for a 30 minute walk with my dog in the park"),
    (1, "Cooked a new pasta recipe with my wife"),
    (0, "Laughed all evening playing board games with friends"),
];

fn print_posted(g: &Globals, p: &PostedMoment) -> Result<()> {
    emit(g, p, || {
        let tags: Vec<&str> = p.view.effective_tags.iter().map(|t| t.value.as_str()).collect();
        let mut s = format!("#{} {}\n    tags: {}\n", p.view.moment.id, p.view.moment.text, tags.join(", "));
        for f in &p.feedback {
            s += &format!("    {:?}: {}\n", f.kind, f.message);
        }
        s
    })
}

pub fn demo(g: &Globals, data_dir: &Path, user: &str, at: Option<DateTime<Utc>>, src: &ModelSource) -> Result<()> {
    let now = at.unwrap_or_else(Utc::now);
    let journal = open_journal(g, data_dir, src)?;
    journal.set_goal(user, &["Family".to_string(), "Physical well-being".to_string()], 3, now)?;
    for &(days_ago, text) in DEMO_MOMENTS {
        let new = NewMoment { created_at: Some(now - chrono::Duration::days(days_ago)), ..NewMoment::text(text) };
        print_posted(g, &journal.post_moment(user, new, now)?)?;
    }
    for (days, text) in [(1, "Call grandma"), (9, "Try the new climbing gym"), (30, "Plan a weekend hike")] {
        journal.add_reminder(user, text, now + chrono::Duration::days(days), ReminderOrigin::UserAdded, None, now)?;
    }
    emit(g, &json!({"user": user, "journal": data_dir.join(JOURNAL_FILE)}), || {
        format!("demo journal for {user} at {}\n", data_dir.join(JOURNAL_FILE).display())
    })
}
