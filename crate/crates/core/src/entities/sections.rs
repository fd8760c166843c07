//! Splitting a resume into labeled sections at header lines.

use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    Preamble,
    Work,
    Education,
    Skills,
    /// Recognized headers that none of the extractors consume
    /// (summary, projects, certifications, ...).
    Other,
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Section::Preamble => "preamble",
            Section::Work => "work",
            Section::Education => "education",
            Section::Skills => "skills",
            Section::Other => "other",
        })
    }
}

const WORK_HEADERS: &[&str] = &[
    "experience",
    "work experience",
    "professional experience",
    "relevant experience",
    "work history",
    "employment",
    "employment history",
    "career history",
    "work",
];

const EDUCATION_HEADERS: &[&str] = &[
    "education",
    "academic",
    "academics",
    "academic background",
    "academic qualifications",
    "educational background",
    "education and training",
    "qualifications",
];

const SKILL_HEADERS: &[&str] = &[
    "skills",
    "technical skills",
    "key skills",
    "core skills",
    "technologies",
    "skills and technologies",
    "tools and technologies",
    "technical proficiencies",
    "core competencies",
];

const OTHER_HEADERS: &[&str] = &[
    "summary",
    "professional summary",
    "profile",
    "objective",
    "career objective",
    "projects",
    "certifications",
    "awards",
    "achievements",
    "publications",
    "interests",
    "languages",
    "references",
    "activities",
    "volunteer experience",
];

fn normalize_header(line: &str) -> String {
    line.trim()
        .trim_end_matches(':')
        .replace('&', " and ")
        .split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Classifies a line as a section header, if it is one.
pub fn header_section(line: &str) -> Option<Section> {
    let key = normalize_header(line);
    if key.is_empty() {
        return None;
    }
    let is = |table: &[&str]| table.contains(&key.as_str());
    if is(WORK_HEADERS) {
        Some(Section::Work)
    } else if is(EDUCATION_HEADERS) {
        Some(Section::Education)
    } else if is(SKILL_HEADERS) {
        Some(Section::Skills)
    } else if is(OTHER_HEADERS) {
        Some(Section::Other)
    } else {
        None
    }
}

/// Groups the document's lines under the most recent header. Lines before the
/// first header land in [`Section::Preamble`], which is always present.
/// Header lines themselves are not included; repeated headers append.
pub fn segment_sections(text: &str) -> BTreeMap<Section, Vec<&str>> {
    let mut sections: BTreeMap<Section, Vec<&str>> = BTreeMap::new();
    sections.insert(Section::Preamble, Vec::new());
    let mut current = Section::Preamble;
    for line in text.lines() {
        if let Some(section) = header_section(line) {
            current = section;
            sections.entry(section).or_default();
        } else {
            sections.entry(current).or_default().push(line);
        }
    }
    sections
}

/// Trims whitespace and leading bullet glyphs. The result is a substring of
/// the input line.
pub fn clean_line(line: &str) -> &str {
    line.trim()
        .trim_start_matches(['•', '◦', '▪', '‣', '●', '*', '-', '–'])
        .trim()
}
