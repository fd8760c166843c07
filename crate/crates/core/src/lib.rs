//! Resume parsing, LDA topic modeling and corpus-normalized resume rating.
//!
//! The numeric modules ([`lda`], [`scorer`], [`eval`]) are generic over the
//! scalar type; the aliases below fix the common instantiations.

pub mod corpus;
pub mod entities;
pub mod eval;
pub mod lda;
pub mod scalar;
pub mod scorer;

pub use corpus::{tokenize, RawDocument, StopWords, TokenizedDocument, Vocabulary};
pub use entities::{parse_resume, Gazetteers, Months, ParsedResume, YearMonth};
pub use scalar::{Real, Scalar};

/// Exact rational scalar for ratio arithmetic that must not round.
pub type Exact = num_rational::Ratio<i64>;

pub type LdaConfig = lda::LdaConfig<f64>;
pub type LdaModel = lda::LdaModel<f64>;
pub type KeywordList = lda::KeywordList<f64>;
pub type LdaConfigF32 = lda::LdaConfig<f32>;
pub type LdaModelF32 = lda::LdaModel<f32>;

pub type CorpusStats = scorer::CorpusStats<f64>;
pub type ScoreBreakdown = scorer::ScoreBreakdown<f64>;
pub type ExactCorpusStats = scorer::CorpusStats<Exact>;

pub type EntityMetrics = eval::EntityMetrics<f64>;
pub type EvalReport = eval::EvalReport<f64>;
pub type ExactEntityMetrics = eval::EntityMetrics<Exact>;
