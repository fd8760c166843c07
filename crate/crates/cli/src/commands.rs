use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use cvrank::corpus::{self, RawDocument, StopWords};
use cvrank::entities::{parse_resume, Gazetteers, ParsedResume};
use cvrank::eval::{evaluate_corpus, render_report, EntityAnnotation};
use cvrank::lda::{self, LdaConfig, LdaModel};
use cvrank::scorer::{corpus_stats, CorpusStats, DomainProfile, RawScore, Scorer, TopicSource, ZeroVariancePolicy};
use cvrank::{tokenize, ScoreBreakdown, Vocabulary};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::{EvalArgs, ParseArgs, RateArgs, RatingArgs, SamplerArgs, TopicsArgs, TrainArgs};

#[derive(Debug)]
pub enum CliError {
    /// Flags that are individually valid but do not fit together.
    Usage(String),
    /// Missing, unreadable or inconsistent input data.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Data(msg) => f.write_str(msg),
        }
    }
}

macro_rules! data_error {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::Data(err.to_string())
            }
        })*
    };
}

data_error!(
    corpus::CorpusError,
    cvrank::entities::EntityError,
    cvrank::eval::EvalError,
    cvrank::lda::LdaError,
    cvrank::scorer::ScoreError
);

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Data(format!("failed to read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Data(format!("failed to write {}: {e}", path.display())))
}

/// Writes the command's artifact to stdout. A closed pipe ends output quietly.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(CliError::Data(format!("failed to write output: {e}"))),
        _ => Ok(()),
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

fn stopwords(path: Option<&Path>) -> Result<StopWords, CliError> {
    match path {
        Some(p) => Ok(StopWords::from_file(p)?),
        None => Ok(StopWords::english()),
    }
}

fn gazetteers(dir: Option<&Path>) -> Result<Gazetteers, CliError> {
    match dir {
        Some(d) => Ok(Gazetteers::load_dir(d)?),
        None => Ok(Gazetteers::builtin()),
    }
}

fn load_corpus(dir: &Path) -> Result<Vec<RawDocument>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Data(format!(
            "corpus directory {} does not exist",
            dir.display()
        )));
    }
    let docs = corpus::load_dir(dir)?;
    if docs.is_empty() {
        return Err(CliError::Data(format!("no .txt documents in {}", dir.display())));
    }
    Ok(docs)
}

fn load_model(path: &Path) -> Result<LdaModel<f64>, CliError> {
    LdaModel::from_json(&read_text(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn train(args: TrainArgs) -> Result<(), CliError> {
    let stop = stopwords(args.stopwords.as_deref())?;
    let docs = load_corpus(&args.corpus)?;
    let tokenized: Vec<Vec<String>> = docs.iter().map(|d| tokenize(&d.text, &stop)).collect();
    let vocabulary = Vocabulary::build(&tokenized, args.min_count);
    let bows: Vec<Vec<usize>> = tokenized.iter().map(|t| vocabulary.to_bow(t)).collect();

    let mut config = LdaConfig::<f64>::new(args.topics)
        .eta(args.eta)
        .iterations(args.sampler.iters)
        .seed(args.sampler.seed);
    if let Some(alpha) = args.alpha {
        config = config.alpha(alpha);
    }
    let model = lda::train(&bows, &vocabulary, &config)?.with_document_ids(docs.iter().map(|d| d.id.clone()).collect());
    write_text(&args.model, &(model.to_json() + "\n"))?;

    let summary = json!({
        "model": args.model.display().to_string(),
        "topics": model.topics(),
        "vocabulary": model.vocab_size(),
        "documents": model.docs(),
        "iterations": config.iterations,
    });
    emit(&(pretty(&summary) + "\n"))?;
    Ok(())
}

/// Everything needed to turn a parsed resume into a rating.
struct RatingContext {
    model: LdaModel<f64>,
    profile: DomainProfile,
    stats: CorpusStats<f64>,
    stopwords: StopWords,
    keywords: usize,
    sampler: SamplerArgs,
    policy: ZeroVariancePolicy,
}

fn policy(neutral: bool) -> ZeroVariancePolicy {
    if neutral {
        ZeroVariancePolicy::Neutral
    } else {
        ZeroVariancePolicy::Error
    }
}

/// Training documents use their fitted θ; anything else is folded in.
fn raw_score(
    scorer: &Scorer<'_, f64>,
    id: &str,
    tokens: &[String],
    sampler: &SamplerArgs,
) -> Result<RawScore<f64>, CliError> {
    let bow = scorer.model.vocabulary.to_bow(tokens);
    let source = match scorer.model.document_index(id) {
        Some(d) => TopicSource::Trained(d),
        None => TopicSource::Unseen {
            bow: &bow,
            iterations: sampler.iters,
            seed: sampler.seed,
        },
    };
    scorer
        .raw_score(source, tokens)
        .map_err(|e| CliError::Data(format!("{id}: {e}")))
}

fn score_corpus(
    scorer: &Scorer<'_, f64>,
    docs: &[RawDocument],
    stop: &StopWords,
    sampler: &SamplerArgs,
) -> Result<Vec<RawScore<f64>>, CliError> {
    docs.iter()
        .map(|doc| raw_score(scorer, &doc.id, &tokenize(&doc.text, stop), sampler))
        .collect()
}

impl RatingContext {
    fn load(args: &RatingArgs) -> Result<Self, CliError> {
        let missing = |flag: &str| CliError::Usage(format!("--rate needs {flag}"));
        let model = load_model(args.model.as_deref().ok_or_else(|| missing("--model"))?)?;
        let profile = DomainProfile::load(args.profile.as_deref().ok_or_else(|| missing("--profile"))?)?;
        let stop = stopwords(args.stopwords.as_deref())?;
        if args.keywords == 0 {
            return Err(CliError::Usage("-n must be at least 1".into()));
        }
        let stats = match (&args.stats, &args.corpus) {
            (Some(path), _) => CorpusStats::load(path)?,
            (None, Some(dir)) => {
                let docs = load_corpus(dir)?;
                let scorer = Scorer::new(&model, &profile, args.keywords);
                let scores = score_corpus(&scorer, &docs, &stop, &args.sampler)?;
                corpus_stats(&scores.iter().map(|s| s.final_score).collect::<Vec<_>>())?
            }
            (None, None) => return Err(missing("--stats or --corpus")),
        };
        Ok(Self {
            model,
            profile,
            stats,
            stopwords: stop,
            keywords: args.keywords,
            sampler: args.sampler,
            policy: policy(args.neutral_on_zero_sd),
        })
    }

    fn rate(&self, doc: &RawDocument, parsed: &mut ParsedResume) -> Result<ScoreBreakdown, CliError> {
        let mut scorer = Scorer::new(&self.model, &self.profile, self.keywords);
        scorer.zero_variance = self.policy;
        let tokens = tokenize(&doc.text, &self.stopwords);
        let breakdown = raw_score(&scorer, &doc.id, &tokens, &self.sampler)?.standardize(&self.stats, self.policy)?;
        parsed.rating = Some((breakdown.rating * 100.0).round() / 100.0);
        Ok(breakdown)
    }
}

fn render_parsed(parsed: &ParsedResume, breakdown: Option<&ScoreBreakdown>) -> String {
    match breakdown {
        Some(b) => pretty(&json!({ "resume": parsed, "breakdown": b })),
        None => parsed.to_json_pretty(),
    }
}

pub fn parse(args: ParseArgs) -> Result<(), CliError> {
    let gaz = gazetteers(args.gazetteers.as_deref())?;
    let rating = if args.rate {
        Some(RatingContext::load(&args.rating)?)
    } else {
        None
    };
    let process = |doc: &RawDocument| -> Result<String, CliError> {
        let mut parsed = parse_resume(doc, &gaz, args.reference_date)
            .map_err(|e| CliError::Data(format!("{}: {e}", doc.filename)))?;
        let breakdown = match &rating {
            Some(ctx) => Some(ctx.rate(doc, &mut parsed)?),
            None => None,
        };
        Ok(render_parsed(&parsed, breakdown.filter(|_| args.explain).as_ref()))
    };

    if args.path.is_dir() {
        let out_dir = args
            .out_dir
            .as_deref()
            .ok_or_else(|| CliError::Usage("parsing a directory needs --out-dir".into()))?;
        fs::create_dir_all(out_dir)
            .map_err(|e| CliError::Data(format!("failed to create {}: {e}", out_dir.display())))?;
        let docs = corpus::load_dir(&args.path)?;
        for doc in &docs {
            let path: PathBuf = out_dir.join(format!("{}.json", doc.id));
            write_text(&path, &(process(doc)? + "\n"))?;
        }
        eprintln!("parsed {} resumes into {}", docs.len(), out_dir.display());
    } else {
        let doc = RawDocument::from_path(&args.path)?;
        emit(&(process(&doc)? + "\n"))?;
    }
    Ok(())
}

fn format_probability(p: f64) -> String {
    format!("{p:.8}")
}

pub fn topics(args: TopicsArgs) -> Result<(), CliError> {
    if args.terms == 0 {
        return Err(CliError::Usage("-n must be at least 1".into()));
    }
    let model = load_model(&args.model)?;
    let d = model
        .document_index(&args.doc)
        .ok_or_else(|| CliError::Data(format!("unknown document id `{}`", args.doc)))?;
    let theta = model.doc_topics(d)?;
    let blocks: Vec<Value> = LdaModel::ranked_topics(theta)
        .into_iter()
        .take(args.top_topics)
        .map(|(k, score)| {
            let mut block = Map::new();
            for (term, p) in model.topic_terms(k, args.terms) {
                // A vocabulary term may collide with the two reserved keys.
                if term != "topic" && term != "topic_score" {
                    block.insert(term.to_string(), Value::String(format_probability(p)));
                }
            }
            block.insert("topic_score".into(), Value::String(format_probability(score)));
            block.insert("topic".into(), Value::from(k));
            Value::Object(block)
        })
        .collect();
    emit(&(pretty(&blocks) + "\n"))?;
    Ok(())
}

#[derive(Serialize)]
struct RatedDocument {
    id: String,
    #[serde(flatten)]
    breakdown: ScoreBreakdown,
}

pub fn rate(args: RateArgs) -> Result<(), CliError> {
    if args.keywords == 0 {
        return Err(CliError::Usage("-n must be at least 1".into()));
    }
    let model = load_model(&args.model)?;
    let profile = DomainProfile::load(&args.profile)?;
    let stop = stopwords(args.stopwords.as_deref())?;
    let docs = load_corpus(&args.corpus)?;
    let policy = policy(args.neutral_on_zero_sd);
    let mut scorer = Scorer::new(&model, &profile, args.keywords);
    scorer.zero_variance = policy;

    let scores = score_corpus(&scorer, &docs, &stop, &args.sampler)?;
    let stats = match &args.stats {
        Some(path) => CorpusStats::load(path)?,
        None => corpus_stats(&scores.iter().map(|s| s.final_score).collect::<Vec<_>>())?,
    };
    if let Some(path) = &args.stats_out {
        write_text(path, &(pretty(&stats) + "\n"))?;
    }
    let rated = docs
        .iter()
        .zip(scores)
        .map(|(doc, score)| {
            Ok(RatedDocument {
                id: doc.id.clone(),
                breakdown: score.standardize(&stats, policy)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    eprintln!(
        "rated {} resumes against `{}` (mean {:.6}, sd {:.6})",
        rated.len(),
        profile.name,
        stats.mean,
        stats.sd
    );
    emit(&(pretty(&json!({ "stats": stats, "documents": rated })) + "\n"))?;
    Ok(())
}

fn load_predictions(dir: &Path, gaz: &Gazetteers) -> Result<Vec<EntityAnnotation>, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Data(format!(
            "prediction directory {} does not exist",
            dir.display()
        )));
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Data(format!("failed to read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|path| {
            let parsed: ParsedResume = serde_json::from_str(&read_text(path)?)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            let name = path
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(EntityAnnotation::from_parsed(corpus::file_stem(&name), &parsed, gaz))
        })
        .collect()
}

pub fn eval(args: EvalArgs) -> Result<(), CliError> {
    let gaz = gazetteers(args.gazetteers.as_deref())?;
    let predictions = load_predictions(&args.predictions, &gaz)?;
    let gold = EntityAnnotation::list_from_json(&read_text(&args.gold)?)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.gold.display())))?;
    let report = evaluate_corpus::<f64>(&predictions, &gold)?;
    write_text(&args.report, &(report.to_json() + "\n"))?;
    emit(&render_report(&report))?;
    eprintln!(
        "{} documents; macro F1 {:.3}; accuracy {:.3} (skills {:.3}); report written to {}",
        report.documents,
        report.macro_avg.f1,
        report.accuracy_all,
        report.accuracy_skills,
        args.report.display()
    );
    Ok(())
}
