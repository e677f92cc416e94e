//! `moments`: run the service, train and evaluate the models, annotate
//! text, and load data.
//!
//! Exit codes: 0 success, 1 the operation failed, 2 usage error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "moments", version, about = "Smart journaling: service, models and data tools")]
struct Cli {
    /// Seed for training, sampling and feedback selection.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    /// `table` for people, `records` for one JSON object per line.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Fixture root with corpus/, lexicons/ and vectors/. Defaults to the
    /// bundled data directory.
    #[arg(long, global = true)]
    fixtures: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Activities,
    Values,
    Keywords,
    Polarity,
    All,
}

#[derive(Debug, Args)]
pub struct ModelSource {
    /// Directory with saved models. Without it, models are trained from the
    /// fixtures in memory.
    #[arg(long)]
    models: Option<PathBuf>,
}

/// External sentiment for the polarity cascade. Defaults to the fixture
/// scores in corpus/polarity_external_mock.jsonl, neutral for other texts.
#[derive(Debug, Args)]
pub struct ExternalArgs {
    /// Fixed external sentiment score in [-1, 1] for every text.
    #[arg(long, conflicts_with_all = ["external_url", "no_external"], allow_hyphen_values = true)]
    external_score: Option<f64>,
    /// Sentiment service URL.
    #[arg(long, conflicts_with = "no_external")]
    external_url: Option<String>,
    /// Trained classifier only.
    #[arg(long)]
    no_external: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        /// TOML config file; `MOMENTS_*` variables override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Annotate one text and print polarity, values, activity and people.
    Annotate {
        #[arg(long)]
        text: String,
        #[command(flatten)]
        models: ModelSource,
        #[command(flatten)]
        external: ExternalArgs,
    },
    /// Train models and save them.
    Train {
        #[arg(long, value_enum)]
        task: Task,
        #[arg(long, default_value = "models")]
        out: PathBuf,
    },
    /// Print per-class precision, recall and F1 on the gold fixtures.
    Eval {
        #[arg(long, value_enum)]
        task: Task,
        #[command(flatten)]
        models: ModelSource,
    },
    /// Write the weakly supervised activity training sets.
    BuildData {
        #[arg(long)]
        out: PathBuf,
        /// Expansion similarity threshold.
        #[arg(long, default_value_t = 0.7)]
        sigma: f64,
        /// Sampled negatives per seed positive.
        #[arg(long, default_value_t = 1.0)]
        negative_ratio: f64,
    },
    /// Write value labeling tasks for the corpus.
    ExportTasks {
        #[arg(long)]
        out: PathBuf,
        /// Also write selections from simulated workers answering against
        /// the corpus labels.
        #[arg(long)]
        simulate: Option<PathBuf>,
        /// Chance a simulated worker flips a candidate.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
    },
    /// Turn labeling selections into per-value training sets.
    ImportLabels {
        #[arg(long)]
        tasks: PathBuf,
        #[arg(long)]
        selections: Option<PathBuf>,
        /// Directory for the per-value sets.
        #[arg(long)]
        out: PathBuf,
        /// Also train the value models and save them here.
        #[arg(long)]
        train: Option<PathBuf>,
        #[arg(long, default_value_t = 3.0)]
        negative_ratio: f64,
    },
    /// Load moments from a JSONL corpus into a journal.
    ImportCorpus {
        #[arg(long)]
        file: PathBuf,
        #[arg(long, default_value = "var")]
        data_dir: PathBuf,
        #[arg(long, default_value = "demo")]
        user: String,
        /// Store the moments without annotating them.
        #[arg(long)]
        no_annotate: bool,
        /// Ingest time (RFC 3339); defaults to now.
        #[arg(long)]
        at: Option<chrono::DateTime<chrono::Utc>>,
        #[command(flatten)]
        models: ModelSource,
    },
    /// Fill a journal with a week of sample moments, a goal and reminders.
    Demo {
        #[arg(long, default_value = "var")]
        data_dir: PathBuf,
        #[arg(long, default_value = "demo")]
        user: String,
        #[arg(long)]
        at: Option<chrono::DateTime<chrono::Utc>>,
        #[command(flatten)]
        models: ModelSource,
    },
}

pub struct Globals {
    pub seed: u64,
    pub format: Format,
    pub fixtures: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        // Help and version exit 0, usage errors 2.
        Err(e) => e.exit(),
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let g = Globals {
        seed: cli.seed,
        format: cli.format,
        fixtures: cli.fixtures.unwrap_or_else(moments_core::bundled::data_dir),
    };
    let result = match cli.command {
        Command::Serve { config, port, data_dir, models } => commands::serve(&g, config, port, data_dir, models),
        Command::Annotate { text, models, external } => commands::annotate(&g, &text, &models, &external),
        Command::Train { task, out } => commands::train(&g, task, &out),
        Command::Eval { task, models } => commands::eval(&g, task, &models),
        Command::BuildData { out, sigma, negative_ratio } => commands::build_data(&g, &out, sigma, negative_ratio),
        Command::ExportTasks { out, simulate, noise } => commands::export_tasks(&g, &out, simulate.as_deref(), noise),
        Command::ImportLabels { tasks, selections, out, train, negative_ratio } => {
            commands::import_labels(&g, &tasks, selections.as_deref(), &out, train.as_deref(), negative_ratio)
        }
        Command::ImportCorpus { file, data_dir, user, no_annotate, at, models } => {
            commands::import_corpus(&g, &file, &data_dir, &user, !no_annotate, at, &models)
        }
        Command::Demo { data_dir, user, at, models } => commands::demo(&g, &data_dir, &user, at, &models),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
