//! Latent Dirichlet Allocation trained by collapsed Gibbs sampling.
//!
//! Topic `k` has a word distribution `φ_k` (row `k` of `topic_word`) and each
//! training document `d` a topic mixture `θ_d` (row `d` of `doc_topic`). The
//! sampler integrates both out and resamples one token's topic at a time from
//!
//! ```text
//! p(z = k | rest) ∝ (n_dk + α) · (n_kw + η) / (n_k + V·η)
//! ```
//!
//! where the counts exclude the token being resampled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Vocabulary;
use crate::scalar::Real;

/// Keyword count per document used when none is given.
pub const DEFAULT_KEYWORDS: usize = 30;

#[derive(Debug, Error)]
pub enum LdaError {
    #[error("corpus has no tokens to train on")]
    EmptyCorpus,
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("word index {word} outside vocabulary of size {vocab}")]
    WordOutOfRange { word: usize, vocab: usize },
    #[error("document index {doc} outside corpus of {docs} documents")]
    DocumentOutOfRange { doc: usize, docs: usize },
    #[error("document has no in-vocabulary tokens")]
    EmptyDocument,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model JSON: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct LdaConfig<F> {
    pub topics: usize,
    /// Symmetric Dirichlet prior on document-topic mixtures.
    pub alpha: F,
    /// Symmetric Dirichlet prior on topic-word distributions.
    pub eta: F,
    pub iterations: usize,
    pub seed: u64,
}

impl<F: Real> LdaConfig<F> {
    /// `alpha = 50 / K`, `eta = 0.01`, 1000 sweeps, seed 0.
    pub fn new(topics: usize) -> Self {
        let k = F::from_count(topics.max(1));
        Self {
            topics,
            alpha: F::from_f64_lossy(50.0) / k,
            eta: F::from_f64_lossy(0.01),
            iterations: 1000,
            seed: 0,
        }
    }

    pub fn alpha(mut self, alpha: F) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn eta(mut self, eta: F) -> Self {
        self.eta = eta;
        self
    }

    pub fn iterations(mut self, iterations: usize) -> Self {
        self.iterations = iterations;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<(), LdaError> {
        if self.topics == 0 {
            return Err(LdaError::InvalidConfig("topic count must be at least 1".into()));
        }
        if !(self.alpha > F::zero() && self.alpha.is_finite()) {
            return Err(LdaError::InvalidConfig(format!(
                "alpha must be positive, got {}",
                self.alpha
            )));
        }
        if !(self.eta > F::zero() && self.eta.is_finite()) {
            return Err(LdaError::InvalidConfig(format!(
                "eta must be positive, got {}",
                self.eta
            )));
        }
        if self.iterations == 0 {
            return Err(LdaError::InvalidConfig("iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Sufficient statistics of a topic assignment: document-topic counts
/// (D×K), topic-word counts (K×V) and per-topic totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GibbsCounts {
    topics: usize,
    vocab_size: usize,
    doc_topic: Vec<u32>,
    topic_word: Vec<u32>,
    topic_totals: Vec<u32>,
}

impl GibbsCounts {
    pub fn zeros(docs: usize, topics: usize, vocab_size: usize) -> Self {
        Self {
            topics,
            vocab_size,
            doc_topic: vec![0; docs * topics],
            topic_word: vec![0; topics * vocab_size],
            topic_totals: vec![0; topics],
        }
    }

    /// Builds counts from explicit matrices. Totals are taken as given, so a
    /// state need not correspond to any full assignment.
    pub fn from_parts(
        doc_topic: Vec<Vec<u32>>,
        topic_word: Vec<Vec<u32>>,
        topic_totals: Vec<u32>,
    ) -> Result<Self, LdaError> {
        let topics = topic_totals.len();
        let vocab_size = topic_word.first().map_or(0, Vec::len);
        if topic_word.len() != topics || doc_topic.iter().any(|r| r.len() != topics) {
            return Err(LdaError::InvalidModel("count matrices disagree on topic count".into()));
        }
        if topic_word.iter().any(|r| r.len() != vocab_size) {
            return Err(LdaError::InvalidModel("ragged topic-word counts".into()));
        }
        Ok(Self {
            topics,
            vocab_size,
            doc_topic: doc_topic.concat(),
            topic_word: topic_word.concat(),
            topic_totals,
        })
    }

    /// Recomputes counts from scratch for a corpus and its assignments.
    pub fn from_assignments(
        corpus: &[Vec<usize>],
        assignments: &[Vec<usize>],
        topics: usize,
        vocab_size: usize,
    ) -> Self {
        let mut counts = Self::zeros(corpus.len(), topics, vocab_size);
        for (d, (doc, zs)) in corpus.iter().zip(assignments).enumerate() {
            for (&w, &k) in doc.iter().zip(zs) {
                counts.add(d, w, k);
            }
        }
        counts
    }

    pub fn topics(&self) -> usize {
        self.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn docs(&self) -> usize {
        self.doc_topic.len().checked_div(self.topics).unwrap_or(0)
    }

    pub fn doc_topic(&self, d: usize, k: usize) -> u32 {
        self.doc_topic[d * self.topics + k]
    }

    pub fn topic_word(&self, k: usize, w: usize) -> u32 {
        self.topic_word[k * self.vocab_size + w]
    }

    pub fn topic_total(&self, k: usize) -> u32 {
        self.topic_totals[k]
    }

    fn add(&mut self, d: usize, w: usize, k: usize) {
        self.doc_topic[d * self.topics + k] += 1;
        self.topic_word[k * self.vocab_size + w] += 1;
        self.topic_totals[k] += 1;
    }

    fn remove(&mut self, d: usize, w: usize, k: usize) {
        self.doc_topic[d * self.topics + k] -= 1;
        self.topic_word[k * self.vocab_size + w] -= 1;
        self.topic_totals[k] -= 1;
    }

    /// Unnormalized collapsed conditional for word `w` in document `d`.
    fn conditional_weights<F: Real>(&self, d: usize, w: usize, alpha: F, eta: F, out: &mut [F]) {
        let v_eta = F::from_count(self.vocab_size) * eta;
        for (k, slot) in out.iter_mut().enumerate() {
            let n_dk = F::from_count(self.doc_topic(d, k) as usize);
            let n_kw = F::from_count(self.topic_word(k, w) as usize);
            let n_k = F::from_count(self.topic_total(k) as usize);
            *slot = (n_dk + alpha) * (n_kw + eta) / (n_k + v_eta);
        }
    }
}

/// Normalized topic distribution for one token given every other token's
/// assignment. The token's own assignment must already be removed from
/// `counts`.
pub fn gibbs_conditional<F: Real>(counts: &GibbsCounts, d: usize, w: usize, alpha: F, eta: F) -> Vec<F> {
    let mut p = vec![F::zero(); counts.topics];
    counts.conditional_weights(d, w, alpha, eta, &mut p);
    let total = p.iter().fold(F::zero(), |acc, &x| acc + x);
    for x in &mut p {
        *x = *x / total;
    }
    p
}

/// Draws an index with probability proportional to `weights`.
fn sample_index<F: Real, R: Rng>(weights: &[F], rng: &mut R) -> usize {
    let total = weights.iter().fold(F::zero(), |acc, &x| acc + x);
    let u = F::from_f64_lossy(rng.gen::<f64>()) * total;
    let mut acc = F::zero();
    for (k, &wk) in weights.iter().enumerate() {
        acc = acc + wk;
        if u < acc {
            return k;
        }
    }
    weights.len() - 1
}

/// Sampler state kept alongside a freshly trained model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerState {
    pub corpus: Vec<Vec<usize>>,
    /// Topic of every token position, `assignments[d][n]`.
    pub assignments: Vec<Vec<usize>>,
    pub counts: GibbsCounts,
}

impl SamplerState {
    pub fn recount(&self) -> GibbsCounts {
        GibbsCounts::from_assignments(
            &self.corpus,
            &self.assignments,
            self.counts.topics,
            self.counts.vocab_size,
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Keyword<F> {
    pub term: String,
    pub index: usize,
    pub probability: F,
}

/// Highest-probability terms for one document, in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordList<F> {
    pub entries: Vec<Keyword<F>>,
    pub n: usize,
}

impl<F> KeywordList<F> {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|k| k.term.as_str())
    }
}

/// A trained topic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Real")]
pub struct LdaModel<F> {
    pub config: LdaConfig<F>,
    pub vocabulary: Vocabulary,
    /// Training document ids, parallel to `doc_topic`; may be empty.
    #[serde(default)]
    pub documents: Vec<String>,
    pub topic_word: Vec<Vec<F>>,
    pub doc_topic: Vec<Vec<F>>,
    #[serde(skip)]
    pub state: Option<SamplerState>,
}

fn check_stochastic<F: Real>(rows: &[Vec<F>], width: usize, what: &str) -> Result<(), LdaError> {
    for (i, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(LdaError::InvalidModel(format!(
                "{what} row {i} has {} entries, expected {width}",
                row.len()
            )));
        }
        if row.iter().any(|p| !(p.is_finite() && *p >= F::zero())) {
            return Err(LdaError::InvalidModel(format!(
                "{what} row {i} holds an invalid probability"
            )));
        }
        let sum = row.iter().fold(F::zero(), |acc, &x| acc + x);
        if (sum - F::one()).abs() > F::stochastic_tolerance() {
            return Err(LdaError::InvalidModel(format!("{what} row {i} sums to {sum}")));
        }
    }
    Ok(())
}

/// Trains a model on documents given as vocabulary indices.
pub fn train<F: Real>(
    corpus: &[Vec<usize>],
    vocabulary: &Vocabulary,
    config: &LdaConfig<F>,
) -> Result<LdaModel<F>, LdaError> {
    config.validate()?;
    let vocab_size = vocabulary.len();
    if vocab_size == 0 {
        return Err(LdaError::EmptyVocabulary);
    }
    if corpus.iter().all(Vec::is_empty) {
        return Err(LdaError::EmptyCorpus);
    }
    if let Some(&word) = corpus.iter().flatten().find(|&&w| w >= vocab_size) {
        return Err(LdaError::WordOutOfRange {
            word,
            vocab: vocab_size,
        });
    }

    let topics = config.topics;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let assignments: Vec<Vec<usize>> = corpus
        .iter()
        .map(|doc| doc.iter().map(|_| rng.gen_range(0..topics)).collect())
        .collect();
    let mut state = SamplerState {
        counts: GibbsCounts::from_assignments(corpus, &assignments, topics, vocab_size),
        corpus: corpus.to_vec(),
        assignments,
    };

    let mut weights = vec![F::zero(); topics];
    for _ in 0..config.iterations {
        for (d, doc) in state.corpus.iter().enumerate() {
            for (n, &w) in doc.iter().enumerate() {
                let old = state.assignments[d][n];
                state.counts.remove(d, w, old);
                state
                    .counts
                    .conditional_weights(d, w, config.alpha, config.eta, &mut weights);
                let new = sample_index(&weights, &mut rng);
                state.counts.add(d, w, new);
                state.assignments[d][n] = new;
            }
        }
    }

    let counts = &state.counts;
    let v_eta = F::from_count(vocab_size) * config.eta;
    let topic_word = (0..topics)
        .map(|k| {
            let denom = F::from_count(counts.topic_total(k) as usize) + v_eta;
            (0..vocab_size)
                .map(|w| (F::from_count(counts.topic_word(k, w) as usize) + config.eta) / denom)
                .collect()
        })
        .collect();
    let k_alpha = F::from_count(topics) * config.alpha;
    let doc_topic = corpus
        .iter()
        .enumerate()
        .map(|(d, doc)| {
            let denom = F::from_count(doc.len()) + k_alpha;
            (0..topics)
                .map(|k| (F::from_count(counts.doc_topic(d, k) as usize) + config.alpha) / denom)
                .collect()
        })
        .collect();

    Ok(LdaModel {
        config: *config,
        vocabulary: vocabulary.clone(),
        documents: Vec::new(),
        topic_word,
        doc_topic,
        state: Some(state),
    })
}

impl<F: Real> LdaModel<F> {
    pub fn with_document_ids(mut self, ids: Vec<String>) -> Self {
        self.documents = ids;
        self
    }

    pub fn topics(&self) -> usize {
        self.config.topics
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn docs(&self) -> usize {
        self.doc_topic.len()
    }

    pub fn document_index(&self, id: &str) -> Option<usize> {
        self.documents.iter().position(|d| d == id)
    }

    /// θ_d for a training document.
    pub fn doc_topics(&self, d: usize) -> Result<&[F], LdaError> {
        self.doc_topic
            .get(d)
            .map(Vec::as_slice)
            .ok_or(LdaError::DocumentOutOfRange {
                doc: d,
                docs: self.docs(),
            })
    }

    /// `P(w | θ) = Σ_z φ[z][w] · θ[z]` for every vocabulary term.
    pub fn word_mixture(&self, theta: &[F]) -> Vec<F> {
        let mut p = vec![F::zero(); self.vocab_size()];
        for (row, &weight) in self.topic_word.iter().zip(theta) {
            for (acc, &phi) in p.iter_mut().zip(row) {
                *acc = *acc + phi * weight;
            }
        }
        p
    }

    /// The `n` most probable terms under the mixture `theta`; ties go to the
    /// lower vocabulary index.
    pub fn keywords_for(&self, theta: &[F], n: usize) -> KeywordList<F> {
        let mixture = self.word_mixture(theta);
        let mut order: Vec<usize> = (0..mixture.len()).collect();
        order.sort_by(|&a, &b| {
            mixture[b]
                .partial_cmp(&mixture[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let entries = order
            .into_iter()
            .take(n)
            .map(|index| Keyword {
                term: self.vocabulary.term(index).unwrap_or_default().to_string(),
                index,
                probability: mixture[index],
            })
            .collect();
        KeywordList { entries, n }
    }

    /// The `n` most probable terms of training document `d`.
    pub fn top_keywords(&self, d: usize, n: usize) -> Result<KeywordList<F>, LdaError> {
        if n == 0 {
            return Err(LdaError::InvalidConfig("keyword count must be at least 1".into()));
        }
        let theta = self.doc_topics(d)?;
        Ok(self.keywords_for(theta, n))
    }

    /// Topics of a mixture ordered by weight, heaviest first.
    pub fn ranked_topics(theta: &[F]) -> Vec<(usize, F)> {
        let mut ranked: Vec<(usize, F)> = theta.iter().copied().enumerate().collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.0.cmp(&b.0))
        });
        ranked
    }

    /// Top `n` terms of topic `k`, by φ.
    pub fn topic_terms(&self, k: usize, n: usize) -> Vec<(&str, F)> {
        let row = &self.topic_word[k];
        let mut order: Vec<usize> = (0..row.len()).collect();
        order.sort_by(|&a, &b| {
            row[b]
                .partial_cmp(&row[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        order
            .into_iter()
            .take(n)
            .map(|w| (self.vocabulary.term(w).unwrap_or_default(), row[w]))
            .collect()
    }

    /// Estimates θ for a document outside the training set by Gibbs sampling
    /// its topic assignments with the topic-word distributions held fixed.
    /// Indices outside the vocabulary are ignored.
    pub fn infer_unseen(&self, doc: &[usize], iterations: usize, seed: u64) -> Result<Vec<F>, LdaError> {
        let words: Vec<usize> = doc.iter().copied().filter(|&w| w < self.vocab_size()).collect();
        if words.is_empty() {
            return Err(LdaError::EmptyDocument);
        }
        let topics = self.topics();
        let alpha = self.config.alpha;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z: Vec<usize> = words.iter().map(|_| rng.gen_range(0..topics)).collect();
        let mut doc_counts = vec![0usize; topics];
        for &k in &z {
            doc_counts[k] += 1;
        }
        let mut weights = vec![F::zero(); topics];
        for _ in 0..iterations {
            for (n, &w) in words.iter().enumerate() {
                doc_counts[z[n]] -= 1;
                for (k, slot) in weights.iter_mut().enumerate() {
                    *slot = (F::from_count(doc_counts[k]) + alpha) * self.topic_word[k][w];
                }
                let new = sample_index(&weights, &mut rng);
                doc_counts[new] += 1;
                z[n] = new;
            }
        }
        let denom = F::from_count(words.len()) + F::from_count(topics) * alpha;
        Ok(doc_counts
            .into_iter()
            .map(|c| (F::from_count(c) + alpha) / denom)
            .collect())
    }

    /// Checks shapes and that every φ and θ row is a probability vector.
    pub fn validate(&self) -> Result<(), LdaError> {
        self.config.validate()?;
        if self.vocab_size() == 0 {
            return Err(LdaError::EmptyVocabulary);
        }
        if self.topic_word.len() != self.topics() {
            return Err(LdaError::InvalidModel(format!(
                "{} topic-word rows for {} topics",
                self.topic_word.len(),
                self.topics()
            )));
        }
        if !self.documents.is_empty() && self.documents.len() != self.docs() {
            return Err(LdaError::InvalidModel(
                "document ids do not match doc-topic rows".into(),
            ));
        }
        check_stochastic(&self.topic_word, self.vocab_size(), "topic-word")?;
        check_stochastic(&self.doc_topic, self.topics(), "doc-topic")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Parses and validates a persisted model.
    pub fn from_json(source: &str) -> Result<Self, LdaError> {
        let model: Self = serde_json::from_str(source)?;
        model.validate()?;
        Ok(model)
    }
}
