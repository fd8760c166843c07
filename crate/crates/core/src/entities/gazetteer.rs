//! Lookup lists of entity surface forms with whole-word, case-insensitive
//! matching.

use std::fmt;
use std::fs;
use std::path::Path;

use regex::{Regex, RegexBuilder};

use super::EntityError;

const SKILLS: &str = include_str!("../../data/skills.txt");
const CITIES: &str = include_str!("../../data/cities.txt");
const COLLEGES: &str = include_str!("../../data/colleges.txt");
const DEGREES: &str = include_str!("../../data/degrees.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GazetteerKind {
    Skills,
    Cities,
    Colleges,
    Degrees,
}

impl GazetteerKind {
    pub const ALL: [GazetteerKind; 4] = [
        GazetteerKind::Skills,
        GazetteerKind::Cities,
        GazetteerKind::Colleges,
        GazetteerKind::Degrees,
    ];

    /// File name the gazetteer is loaded from inside a gazetteer directory.
    pub fn file_name(self) -> &'static str {
        match self {
            GazetteerKind::Skills => "skills.txt",
            GazetteerKind::Cities => "cities.txt",
            GazetteerKind::Colleges => "colleges.txt",
            GazetteerKind::Degrees => "degrees.txt",
        }
    }

    fn builtin_source(self) -> &'static str {
        match self {
            GazetteerKind::Skills => SKILLS,
            GazetteerKind::Cities => CITIES,
            GazetteerKind::Colleges => COLLEGES,
            GazetteerKind::Degrees => DEGREES,
        }
    }
}

impl fmt::Display for GazetteerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GazetteerKind::Skills => "skills",
            GazetteerKind::Cities => "cities",
            GazetteerKind::Colleges => "colleges",
            GazetteerKind::Degrees => "degrees",
        };
        f.write_str(name)
    }
}

/// One whole-word occurrence of a gazetteer entry, as byte offsets into the
/// searched text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hit {
    pub start: usize,
    pub end: usize,
    pub entry: usize,
}

#[derive(Clone)]
pub struct Gazetteer {
    kind: GazetteerKind,
    entries: Vec<String>,
    matchers: Vec<Regex>,
}

impl fmt::Debug for Gazetteer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gazetteer")
            .field("kind", &self.kind)
            .field("entries", &self.entries)
            .finish()
    }
}

/// Lowercase and collapse internal whitespace.
pub fn normalize_entry(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

impl Gazetteer {
    pub fn new<I, S>(kind: GazetteerKind, entries: I) -> Result<Self, EntityError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut normalized: Vec<String> = Vec::new();
        for e in entries {
            let e = normalize_entry(e.as_ref());
            if !e.is_empty() && !normalized.contains(&e) {
                normalized.push(e);
            }
        }
        if normalized.is_empty() {
            return Err(EntityError::EmptyGazetteer(kind));
        }
        let matchers = normalized
            .iter()
            .map(|e| {
                let pattern = e.split(' ').map(regex::escape).collect::<Vec<_>>().join(r"\s+");
                RegexBuilder::new(&pattern)
                    .case_insensitive(true)
                    .build()
                    .expect("escaped literal compiles")
            })
            .collect();
        Ok(Self {
            kind,
            entries: normalized,
            matchers,
        })
    }

    /// Parses one entry per line, skipping blanks and `#` comments.
    pub fn parse(kind: GazetteerKind, source: &str) -> Result<Self, EntityError> {
        Self::new(
            kind,
            source
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn builtin(kind: GazetteerKind) -> Self {
        Self::parse(kind, kind.builtin_source()).expect("bundled gazetteer is non-empty")
    }

    pub fn kind(&self) -> GazetteerKind {
        self.kind
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn entry(&self, hit: &Hit) -> &str {
        &self.entries[hit.entry]
    }

    /// All whole-word occurrences of all entries, sorted by start offset with
    /// longer matches first at equal offsets. Hits may overlap.
    pub fn find_all(&self, text: &str) -> Vec<Hit> {
        let mut hits = Vec::new();
        for (entry, re) in self.matchers.iter().enumerate() {
            for m in re.find_iter(text) {
                if is_word_bounded(text, m.start(), m.end()) {
                    hits.push(Hit {
                        start: m.start(),
                        end: m.end(),
                        entry,
                    });
                }
            }
        }
        hits.sort_by_key(|h| (h.start, std::cmp::Reverse(h.end), h.entry));
        hits
    }

    /// Non-overlapping hits chosen leftmost-longest.
    pub fn find_disjoint(&self, text: &str) -> Vec<Hit> {
        let mut out: Vec<Hit> = Vec::new();
        for hit in self.find_all(text) {
            if out.last().is_none_or(|prev| hit.start >= prev.end) {
                out.push(hit);
            }
        }
        out
    }

    pub fn first(&self, text: &str) -> Option<Hit> {
        self.find_all(text).into_iter().next()
    }
}

fn is_word_bounded(text: &str, start: usize, end: usize) -> bool {
    let before = text[..start].chars().next_back();
    let after = text[end..].chars().next();
    !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
}

/// Title-cases each whitespace-separated word: `new york` → `New York`.
pub fn title_case(s: &str) -> String {
    s.split_whitespace()
        .map(|w| {
            let mut chars = w.chars();
            match chars.next() {
                Some(first) => first.to_uppercase().chain(chars.flat_map(char::to_lowercase)).collect(),
                None => String::new(),
            }
        })
        .collect::<Vec<String>>()
        .join(" ")
}

/// The four lookup lists the extractor consumes.
#[derive(Debug, Clone)]
pub struct Gazetteers {
    pub skills: Gazetteer,
    pub cities: Gazetteer,
    pub colleges: Gazetteer,
    pub degrees: Gazetteer,
}

impl Gazetteers {
    pub fn builtin() -> Self {
        Self {
            skills: Gazetteer::builtin(GazetteerKind::Skills),
            cities: Gazetteer::builtin(GazetteerKind::Cities),
            colleges: Gazetteer::builtin(GazetteerKind::Colleges),
            degrees: Gazetteer::builtin(GazetteerKind::Degrees),
        }
    }

    /// Loads `skills.txt`, `cities.txt`, `colleges.txt` and `degrees.txt` from
    /// a directory. Missing files fall back to the bundled lists.
    pub fn load_dir(dir: &Path) -> Result<Self, EntityError> {
        if !dir.is_dir() {
            return Err(EntityError::Io {
                path: dir.to_path_buf(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
            });
        }
        let load = |kind: GazetteerKind| -> Result<Gazetteer, EntityError> {
            let path = dir.join(kind.file_name());
            if !path.exists() {
                return Ok(Gazetteer::builtin(kind));
            }
            let text = fs::read_to_string(&path).map_err(|source| EntityError::Io {
                path: path.clone(),
                source,
            })?;
            Gazetteer::parse(kind, &text)
        };
        Ok(Self {
            skills: load(GazetteerKind::Skills)?,
            cities: load(GazetteerKind::Cities)?,
            colleges: load(GazetteerKind::Colleges)?,
            degrees: load(GazetteerKind::Degrees)?,
        })
    }
}

impl Default for Gazetteers {
    fn default() -> Self {
        Self::builtin()
    }
}
