//! Keyword-match scoring and corpus-standardized 0–10 ratings.
//!
//! A resume's raw score is `KM × WM`:
//!
//! * KM, keyword match: the share of the document's top-n LDA keywords that
//!   belong to the domain profile.
//! * WM, within match: the share of the document's token positions taken by
//!   those matched keywords.
//!
//! The raw score is standardized against a reference corpus,
//! `diff = (score − mean) / sd`, and mapped to `clamp(5 + diff, 0, 10)`.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::entities::ParsedResume;
use crate::lda::{KeywordList, LdaError, LdaModel};
use crate::scalar::{Real, Scalar};

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error("document produced no keywords")]
    EmptyKeywords,
    #[error("corpus statistics need at least two scores, got {0}")]
    TooFewScores(usize),
    #[error("reference corpus has zero standard deviation")]
    ZeroVariance,
    #[error("domain profile `{0}` has no keywords")]
    EmptyProfile(String),
    #[error(transparent)]
    Lda(#[from] LdaError),
    #[error("failed to read {path}: {message}")]
    Read { path: String, message: String },
}

/// Keywords that define a job family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainProfile {
    pub name: String,
    pub keywords: BTreeSet<String>,
}

impl DomainProfile {
    /// Normalizes keywords to lowercase trimmed form; an empty set is an error.
    pub fn new<I, S>(name: impl Into<String>, keywords: I) -> Result<Self, ScoreError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let name = name.into();
        let keywords: BTreeSet<String> = keywords
            .into_iter()
            .map(|k| k.as_ref().trim().to_lowercase())
            .filter(|k| !k.is_empty())
            .collect();
        if keywords.is_empty() {
            return Err(ScoreError::EmptyProfile(name));
        }
        Ok(Self { name, keywords })
    }

    pub fn contains(&self, term: &str) -> bool {
        self.keywords.contains(term)
    }

    pub fn from_json(source: &str) -> Result<Self, ScoreError> {
        #[derive(Deserialize)]
        struct ProfileFile {
            name: String,
            keywords: Vec<String>,
        }
        let file: ProfileFile = serde_json::from_str(source).map_err(|e| ScoreError::Read {
            path: "<profile>".into(),
            message: e.to_string(),
        })?;
        Self::new(file.name, file.keywords)
    }

    pub fn load(path: &Path) -> Result<Self, ScoreError> {
        Self::from_json(&read(path)?).map_err(|e| relabel(e, path))
    }
}

fn read(path: &Path) -> Result<String, ScoreError> {
    fs::read_to_string(path).map_err(|e| ScoreError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn relabel(err: ScoreError, path: &Path) -> ScoreError {
    match err {
        ScoreError::Read { message, .. } => ScoreError::Read {
            path: path.display().to_string(),
            message,
        },
        other => other,
    }
}

/// Profile keywords found among the document keywords.
pub fn matched_keywords<'a, F>(doc_keywords: &'a KeywordList<F>, profile: &DomainProfile) -> HashSet<&'a str> {
    doc_keywords.terms().filter(|t| profile.contains(t)).collect()
}

/// KM: matched keywords over the document's keyword count.
pub fn keyword_match<F: Scalar>(doc_keywords: &KeywordList<F>, profile: &DomainProfile) -> Result<F, ScoreError> {
    if doc_keywords.is_empty() {
        return Err(ScoreError::EmptyKeywords);
    }
    let hits = doc_keywords.terms().filter(|t| profile.contains(t)).count();
    Ok(F::from_count(hits) / F::from_count(doc_keywords.len()))
}

/// WM: token positions holding a matched keyword over the token count. Zero
/// for an empty document or an empty matched set.
pub fn within_match<F: Scalar, T: AsRef<str>>(doc_tokens: &[T], matched: &HashSet<&str>) -> F {
    if doc_tokens.is_empty() || matched.is_empty() {
        return F::zero();
    }
    let hits = doc_tokens.iter().filter(|t| matched.contains(t.as_ref())).count();
    F::from_count(hits) / F::from_count(doc_tokens.len())
}

pub fn final_score<F: Scalar>(km: F, wm: F) -> F {
    km * wm
}

/// Mean and population standard deviation of raw scores over a reference corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats<F> {
    pub mean: F,
    pub sd: F,
    #[serde(default)]
    pub corpus_size: usize,
}

impl<F: Real> CorpusStats<F> {
    pub fn from_json(source: &str) -> Result<Self, ScoreError> {
        let stats: Self = serde_json::from_str(source).map_err(|e| ScoreError::Read {
            path: "<stats>".into(),
            message: e.to_string(),
        })?;
        if stats.sd.is_sign_negative() || !stats.mean.is_finite() || !stats.sd.is_finite() {
            return Err(ScoreError::Read {
                path: "<stats>".into(),
                message: "mean and sd must be finite with sd >= 0".into(),
            });
        }
        Ok(stats)
    }

    pub fn load(path: &Path) -> Result<Self, ScoreError> {
        Self::from_json(&read(path)?).map_err(|e| relabel(e, path))
    }
}

/// Arithmetic mean and population (divide-by-N) standard deviation.
pub fn corpus_stats<F: Real>(scores: &[F]) -> Result<CorpusStats<F>, ScoreError> {
    if scores.len() < 2 {
        return Err(ScoreError::TooFewScores(scores.len()));
    }
    // Welford's update keeps a constant series exactly constant.
    let mut mean = F::zero();
    let mut m2 = F::zero();
    for (i, &x) in scores.iter().enumerate() {
        let delta = x - mean;
        mean = mean + delta / F::from_count(i + 1);
        m2 = m2 + delta * (x - mean);
    }
    let var = m2 / F::from_count(scores.len());
    Ok(CorpusStats {
        mean,
        sd: var.sqrt(),
        corpus_size: scores.len(),
    })
}

/// What to do when the reference corpus has no spread.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ZeroVariancePolicy {
    #[default]
    Error,
    /// Rate every resume 5, the corpus midpoint.
    Neutral,
}

fn standardize<F: Scalar>(final_score: F, stats: &CorpusStats<F>, policy: ZeroVariancePolicy) -> Result<F, ScoreError> {
    if stats.sd > F::zero() {
        Ok((final_score - stats.mean) / stats.sd)
    } else {
        match policy {
            ZeroVariancePolicy::Error => Err(ScoreError::ZeroVariance),
            ZeroVariancePolicy::Neutral => Ok(F::zero()),
        }
    }
}

fn rating_from_diff<F: Scalar>(diff: F) -> F {
    let five = F::from_count(5);
    let ten = F::from_count(10);
    (five + diff).clamp_to(F::zero(), ten)
}

/// `min(10, max(0, 5 + (score − mean) / sd))`.
pub fn rating<F: Scalar>(final_score: F, stats: &CorpusStats<F>) -> Result<F, ScoreError> {
    rating_with(final_score, stats, ZeroVariancePolicy::Error)
}

pub fn rating_with<F: Scalar>(
    final_score: F,
    stats: &CorpusStats<F>,
    policy: ZeroVariancePolicy,
) -> Result<F, ScoreError> {
    standardize(final_score, stats, policy).map(rating_from_diff)
}

/// Every intermediate quantity of one resume's rating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown<F> {
    pub km: F,
    pub wm: F,
    pub final_score: F,
    pub diff: F,
    pub rating: F,
}

/// KM, WM and their product before corpus standardization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawScore<F> {
    pub km: F,
    pub wm: F,
    pub final_score: F,
}

impl<F: Scalar> RawScore<F> {
    pub fn standardize(
        self,
        stats: &CorpusStats<F>,
        policy: ZeroVariancePolicy,
    ) -> Result<ScoreBreakdown<F>, ScoreError> {
        let diff = standardize(self.final_score, stats, policy)?;
        Ok(ScoreBreakdown {
            km: self.km,
            wm: self.wm,
            final_score: self.final_score,
            diff,
            rating: rating_from_diff(diff),
        })
    }
}

/// Where a resume's topic mixture comes from.
#[derive(Debug, Clone, Copy)]
pub enum TopicSource<'a> {
    /// A training document of the model.
    Trained(usize),
    /// A new document, folded in by Gibbs sampling.
    Unseen {
        bow: &'a [usize],
        iterations: usize,
        seed: u64,
    },
}

/// Scoring setup shared across resumes.
#[derive(Debug, Clone, Copy)]
pub struct Scorer<'a, F> {
    pub model: &'a LdaModel<F>,
    pub profile: &'a DomainProfile,
    /// Number of LDA keywords per document.
    pub keywords: usize,
    pub zero_variance: ZeroVariancePolicy,
}

impl<'a, F: Real> Scorer<'a, F> {
    pub fn new(model: &'a LdaModel<F>, profile: &'a DomainProfile, keywords: usize) -> Self {
        Self {
            model,
            profile,
            keywords,
            zero_variance: ZeroVariancePolicy::Error,
        }
    }

    /// KM, WM and the raw score for a tokenized resume.
    pub fn raw_score<T: AsRef<str>>(&self, source: TopicSource<'_>, tokens: &[T]) -> Result<RawScore<F>, ScoreError> {
        let keywords = match source {
            TopicSource::Trained(d) => self.model.top_keywords(d, self.keywords)?,
            TopicSource::Unseen { bow, iterations, seed } => {
                if self.keywords == 0 {
                    return Err(ScoreError::EmptyKeywords);
                }
                let theta = self.model.infer_unseen(bow, iterations, seed)?;
                self.model.keywords_for(&theta, self.keywords)
            }
        };
        let km = keyword_match(&keywords, self.profile)?;
        let matched = matched_keywords(&keywords, self.profile);
        let wm = within_match(tokens, &matched);
        Ok(RawScore {
            km,
            wm,
            final_score: final_score(km, wm),
        })
    }

    /// Full pipeline for one resume; stores the rating, rounded to two
    /// decimals, on `parsed`.
    pub fn rate_resume<T: AsRef<str>>(
        &self,
        parsed: &mut ParsedResume,
        source: TopicSource<'_>,
        tokens: &[T],
        stats: &CorpusStats<F>,
    ) -> Result<ScoreBreakdown<F>, ScoreError> {
        let breakdown = self.raw_score(source, tokens)?.standardize(stats, self.zero_variance)?;
        let rating = breakdown.rating.to_f64().unwrap_or(0.0);
        parsed.rating = Some((rating * 100.0).round() / 100.0);
        Ok(breakdown)
    }
}
