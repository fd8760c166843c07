//! `cvrank` command-line front end.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cvrank::YearMonth;

use crate::commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "cvrank", version, about = "Parse, topic-model and rate resumes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train an LDA model on a directory of plain-text resumes.
    Train(TrainArgs),
    /// Extract the structured record of one resume (or a directory of them).
    Parse(ParseArgs),
    /// Show the dominant topics of a training document and their top terms.
    Topics(TopicsArgs),
    /// Score every resume of a corpus against a domain profile.
    Rate(RateArgs),
    /// Evaluate parsed resumes against gold entity annotations.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, Args)]
struct SamplerArgs {
    /// Gibbs sweeps (training) or fold-in sweeps (unseen documents).
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output model file.
    #[arg(long, default_value = "model.json")]
    model: PathBuf,
    /// Number of topics.
    #[arg(short = 'K', long = "topics", default_value_t = 8)]
    topics: usize,
    /// Document-topic prior; defaults to 50/K.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Stopword file, one token per line; defaults to the bundled English list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Drop terms seen fewer times than this across the corpus.
    #[arg(long, default_value_t = 1)]
    min_count: usize,
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// A resume text file, or a directory of them (requires --out-dir).
    path: PathBuf,
    /// Directory with skills.txt, cities.txt, colleges.txt, degrees.txt.
    #[arg(long)]
    gazetteers: Option<PathBuf>,
    /// Month that "Present" resolves to.
    #[arg(long, value_name = "YYYY-MM", default_value_t = YearMonth::DEFAULT_REFERENCE)]
    reference_date: YearMonth,
    /// Write one JSON record per resume here when parsing a directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Fill in the rating (needs --model, --profile and --stats or --corpus).
    #[arg(long)]
    rate: bool,
    /// Also emit the score breakdown next to the record.
    #[arg(long, requires = "rate")]
    explain: bool,
    #[command(flatten)]
    rating: RatingArgs,
}

#[derive(Debug, Args)]
struct RatingArgs {
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Corpus statistics file; computed from --corpus when absent.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Reference corpus used to compute statistics on demand.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Keywords per document.
    #[arg(short = 'n', default_value_t = cvrank::lda::DEFAULT_KEYWORDS)]
    keywords: usize,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Rate 5 instead of failing when the reference corpus has zero spread.
    #[arg(long)]
    neutral_on_zero_sd: bool,
}

#[derive(Debug, Args)]
struct TopicsArgs {
    #[arg(long)]
    model: PathBuf,
    /// Training document id (file stem).
    #[arg(long)]
    doc: String,
    /// Terms per topic.
    #[arg(short = 'n', default_value_t = cvrank::lda::DEFAULT_KEYWORDS)]
    terms: usize,
    /// Number of topics to list.
    #[arg(long, default_value_t = 4)]
    top_topics: usize,
}

#[derive(Debug, Args)]
struct RateArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus statistics file; computed from the corpus when absent.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    #[arg(short = 'n', default_value_t = cvrank::lda::DEFAULT_KEYWORDS)]
    keywords: usize,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
    /// Write the corpus statistics here.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    #[arg(long)]
    neutral_on_zero_sd: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Directory of parsed resume JSON files named `<doc_id>.json`.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    gazetteers: Option<PathBuf>,
    /// Where to write the JSON report.
    #[arg(long, default_value = "eval_report.json")]
    report: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Parse(args) => commands::parse(args),
        Command::Topics(args) => commands::topics(args),
        Command::Rate(args) => commands::rate(args),
        Command::Eval(args) => commands::eval(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
