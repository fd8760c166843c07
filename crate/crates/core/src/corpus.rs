//! Document ingestion, tokenization and vocabulary construction.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

const ENGLISH_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} is not valid UTF-8")]
    Encoding(PathBuf),
    #[error("duplicate document id `{0}`")]
    DuplicateId(String),
}

/// A resume as extracted plain text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub filename: String,
    pub text: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, filename: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            filename: filename.into(),
            text: text.into(),
        }
    }

    /// Reads a UTF-8 text file; the id is the file name without its extension.
    pub fn from_path(path: &Path) -> Result<Self, CorpusError> {
        let bytes = fs::read(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::Encoding(path.to_path_buf()))?;
        let filename = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        Ok(Self {
            id: file_stem(&filename).to_string(),
            filename,
            text,
        })
    }
}

/// File name without its final extension. Unlike [`Path::file_stem`], a
/// leading-dot name such as `.txt` yields an empty stem.
pub fn file_stem(filename: &str) -> &str {
    match filename.rfind('.') {
        Some(i) => &filename[..i],
        None => filename,
    }
}

/// Loads every `.txt` file of a directory, sorted by document id.
pub fn load_dir(dir: &Path) -> Result<Vec<RawDocument>, CorpusError> {
    let io_err = |source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut docs = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err)? {
        let path = entry.map_err(io_err)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            docs.push(RawDocument::from_path(&path)?);
        }
    }
    docs.sort_by(|a, b| a.id.cmp(&b.id));
    for pair in docs.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(CorpusError::DuplicateId(pair[0].id.clone()));
        }
    }
    Ok(docs)
}

/// Set of lowercase tokens removed during tokenization.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopWords {
    words: HashSet<String>,
}

impl StopWords {
    /// Parses one token per line; blank lines and `#` comments are skipped.
    pub fn parse(source: &str) -> Self {
        let words = source
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Self { words }
    }

    pub fn english() -> Self {
        Self::parse(ENGLISH_STOPWORDS)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_file(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path).map_err(|source| CorpusError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for StopWords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self {
            words: iter.into_iter().map(|s| s.into().to_lowercase()).collect(),
        }
    }
}

fn keeps_trailing(c: char) -> bool {
    c.is_alphanumeric() || c == '+' || c == '#'
}

fn normalize_token(raw: &str) -> String {
    let lower = raw.to_lowercase();
    lower
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .trim_end_matches(|c: char| !keeps_trailing(c))
        .to_string()
}

/// Lowercases, splits on whitespace and strips leading non-alphanumerics and
/// trailing punctuation (`+` and `#` survive, so `c++` and `c#` stay intact).
/// Stopwords are dropped after normalization.
pub fn tokenize(text: &str, stopwords: &StopWords) -> Vec<String> {
    text.split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty() && !stopwords.contains(t))
        .collect()
}

/// A resume reduced to its token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub id: String,
    pub tokens: Vec<String>,
}

impl TokenizedDocument {
    pub fn from_raw(doc: &RawDocument, stopwords: &StopWords) -> Self {
        Self {
            id: doc.id.clone(),
            tokens: tokenize(&doc.text, stopwords),
        }
    }
}

/// Bijection between retained terms and indices `0..V`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Keeps the terms whose total frequency is at least `min_count`, in order
    /// of first occurrence. A `min_count` of zero behaves like one.
    pub fn build<D, T>(docs: &[D], min_count: usize) -> Self
    where
        D: AsRef<[T]>,
        T: AsRef<str>,
    {
        let mut first_seen: Vec<&str> = Vec::new();
        let mut counts: HashMap<&str, usize> = HashMap::new();
        for doc in docs {
            for token in doc.as_ref() {
                let token = token.as_ref();
                let count = counts.entry(token).or_insert(0);
                if *count == 0 {
                    first_seen.push(token);
                }
                *count += 1;
            }
        }
        let min_count = min_count.max(1);
        Self::from_terms(
            first_seen
                .into_iter()
                .filter(|t| counts[t] >= min_count)
                .map(str::to_string),
        )
    }

    /// Builds a vocabulary from an ordered term list; repeated terms keep their
    /// first position.
    pub fn from_terms<I, S>(terms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Self::default();
        for term in terms {
            let term = term.into();
            if !vocab.index.contains_key(&term) {
                vocab.index.insert(term.clone(), vocab.terms.len());
                vocab.terms.push(term);
            }
        }
        vocab
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn term(&self, index: usize) -> Option<&str> {
        self.terms.get(index).map(String::as_str)
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    /// Maps tokens to indices, dropping out-of-vocabulary tokens.
    pub fn to_bow<T: AsRef<str>>(&self, doc: &[T]) -> Vec<usize> {
        doc.iter().filter_map(|t| self.index_of(t.as_ref())).collect()
    }
}

impl Serialize for Vocabulary {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Vocabulary {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<String>::deserialize(deserializer)?;
        let vocab = Self::from_terms(terms.iter().cloned());
        if vocab.len() != terms.len() {
            return Err(serde::de::Error::custom("vocabulary terms must be unique"));
        }
        Ok(vocab)
    }
}
