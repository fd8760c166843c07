//! Rule- and gazetteer-based extraction of the structured resume record.

mod dates;
mod gazetteer;
mod sections;

use std::path::PathBuf;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{file_stem, RawDocument};

pub use dates::{find_date_ranges, parse_date_range, total_duration, DateRange, Months, YearMonth};
pub use gazetteer::{normalize_entry, title_case, Gazetteer, GazetteerKind, Gazetteers, Hit};
pub use sections::{clean_line, header_section, segment_sections, Section};

#[derive(Debug, Error)]
pub enum EntityError {
    #[error("malformed date range in `{line}`: {start} is after {end}")]
    MalformedRange {
        line: String,
        start: YearMonth,
        end: YearMonth,
    },
    #[error("{0} gazetteer has no entries")]
    EmptyGazetteer(GazetteerKind),
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid resume record: {0}")]
    InvalidRecord(String),
}

fn email_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}")
            .expect("email regex")
    })
}

fn phone_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\+?\(?\d[\d ().\-]*\d\)?").expect("phone regex"))
}

/// First `local@domain.tld` address in document order.
pub fn extract_email(text: &str) -> Option<String> {
    email_regex().find(text).map(|m| m.as_str().to_string())
}

/// First run of 10 to 13 digits joined by `( ) - . ` separators, with an
/// optional leading `+`. Returned verbatim.
pub fn extract_phone(text: &str) -> Option<String> {
    phone_regex().find_iter(text).find_map(|m| {
        let mut candidate = m.as_str();
        // an unmatched closing paren is not part of the number
        if candidate.ends_with(')') && !candidate.contains('(') {
            candidate = &candidate[..candidate.len() - 1];
        }
        let digits = candidate.chars().filter(char::is_ascii_digit).count();
        (10..=13).contains(&digits).then(|| candidate.to_string())
    })
}

/// Name from the file stem (`_ - .` become spaces, words title-cased), or the
/// first non-empty line of text when the stem is empty.
pub fn extract_name(filename: &str, text: &str) -> String {
    let stem = file_stem(filename).replace(['_', '-', '.'], " ");
    let from_stem = title_case(&stem);
    if !from_stem.is_empty() {
        return from_stem;
    }
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or_default()
        .to_string()
}

/// First city gazetteer hit in document order, title-cased.
pub fn extract_city(text: &str, cities: &Gazetteer) -> Option<String> {
    cities.first(text).map(|hit| title_case(cities.entry(&hit)))
}

/// Distinct skill gazetteer hits in first-occurrence order, title-cased.
pub fn extract_skills(text: &str, skills: &Gazetteer) -> Vec<String> {
    let mut seen = vec![false; skills.entries().len()];
    let mut out = Vec::new();
    for hit in skills.find_disjoint(text) {
        if !std::mem::replace(&mut seen[hit.entry], true) {
            out.push(title_case(skills.entry(&hit)));
        }
    }
    out
}

fn field_end_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[,|;(\t]|\s[-–—/]\s|\b(?:19|20)\d{2}\b").expect("field end regex"))
}

fn college_keyword_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?i)\b(?:university|college|institute|school|academy|polytechnic)\b").expect("college regex")
    })
}

fn cut_field(s: &str) -> &str {
    let end = field_end_regex().find(s).map_or(s.len(), |m| m.start());
    s[..end].trim()
}

/// Degree mentions in education lines: a degree pattern plus the
/// field-of-study tail up to the next delimiter or year.
pub fn extract_degrees<S: AsRef<str>>(lines: &[S], degrees: &Gazetteer) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in lines {
        let line = line.as_ref();
        if let Some(hit) = degrees.first(line) {
            let tail = cut_field(&line[hit.end..]);
            let value = format!(
                "{}{}{}",
                &line[hit.start..hit.end],
                if tail.is_empty() { "" } else { " " },
                tail
            );
            let value = value.trim().to_string();
            if !out.iter().any(|v| normalize_entry(v) == normalize_entry(&value)) {
                out.push(value);
            }
        }
    }
    out
}

/// College names in education lines: delimiter-separated segments that hold a
/// college gazetteer entry or an institution keyword.
pub fn extract_colleges<S: AsRef<str>>(lines: &[S], colleges: &Gazetteer) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for line in lines {
        let line = line.as_ref();
        let mut segments = Vec::new();
        let mut start = 0;
        for m in field_end_regex().find_iter(line) {
            segments.push(&line[start..m.start()]);
            start = m.end();
        }
        segments.push(&line[start..]);
        for segment in segments.into_iter().map(clean_line) {
            if !segment.is_empty()
                && (colleges.first(segment).is_some() || college_keyword_regex().is_match(segment))
                && !out.iter().any(|v| normalize_entry(v) == normalize_entry(segment))
            {
                out.push(segment.to_string());
            }
        }
    }
    out
}

/// The structured record extracted from one resume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ResumeRecord", try_from = "ResumeRecord")]
pub struct ParsedResume {
    pub name: String,
    pub email: Option<String>,
    pub number: Option<String>,
    pub city: Option<String>,
    pub work_exp: Vec<String>,
    pub education: Vec<String>,
    pub work_duration: Months,
    pub education_duration: Months,
    pub skills: Vec<String>,
    pub rating: Option<f64>,
}

impl ParsedResume {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("resume record serializes")
    }
}

/// Wire form of [`ParsedResume`]: durations as text, skills comma-joined.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ResumeRecord {
    name: String,
    email: Option<String>,
    number: Option<String>,
    city: Option<String>,
    work_exp: Vec<String>,
    education: Vec<String>,
    work_duration: String,
    education_duration: String,
    skills: String,
    rating: Option<f64>,
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

impl From<ParsedResume> for ResumeRecord {
    fn from(r: ParsedResume) -> Self {
        Self {
            name: r.name,
            email: r.email,
            number: r.number,
            city: r.city,
            work_exp: r.work_exp,
            education: r.education,
            work_duration: r.work_duration.to_string(),
            education_duration: r.education_duration.to_string(),
            skills: r.skills.join(", "),
            rating: r.rating.map(round2),
        }
    }
}

impl TryFrom<ResumeRecord> for ParsedResume {
    type Error = EntityError;

    fn try_from(r: ResumeRecord) -> Result<Self, Self::Error> {
        let months = |s: &str| s.parse::<Months>().map_err(EntityError::InvalidRecord);
        if let Some(rating) = r.rating {
            if !(0.0..=10.0).contains(&rating) {
                return Err(EntityError::InvalidRecord(format!("rating {rating} outside [0, 10]")));
            }
        }
        Ok(Self {
            work_duration: months(&r.work_duration)?,
            education_duration: months(&r.education_duration)?,
            name: r.name,
            email: r.email,
            number: r.number,
            city: r.city,
            work_exp: r.work_exp,
            education: r.education,
            skills: r
                .skills
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
            rating: r.rating,
        })
    }
}

fn section_lines<'a>(sections: &std::collections::BTreeMap<Section, Vec<&'a str>>, which: Section) -> Vec<&'a str> {
    sections
        .get(&which)
        .map(|lines| lines.iter().map(|l| clean_line(l)).filter(|l| !l.is_empty()).collect())
        .unwrap_or_default()
}

/// Runs every extractor over one document. `reference` is the month that
/// "Present" resolves to. The rating stays empty until scored.
pub fn parse_resume(
    raw: &RawDocument,
    gazetteers: &Gazetteers,
    reference: YearMonth,
) -> Result<ParsedResume, EntityError> {
    let text = raw.text.as_str();
    let sections = segment_sections(text);
    let work_exp = section_lines(&sections, Section::Work);
    let education = section_lines(&sections, Section::Education);
    let work_duration = total_duration(&find_date_ranges(&work_exp, reference)?);
    let education_duration = total_duration(&find_date_ranges(&education, reference)?);
    Ok(ParsedResume {
        name: extract_name(&raw.filename, text),
        email: extract_email(text),
        number: extract_phone(text),
        city: extract_city(text, &gazetteers.cities),
        work_exp: work_exp.into_iter().map(str::to_string).collect(),
        education: education.into_iter().map(str::to_string).collect(),
        work_duration,
        education_duration,
        skills: extract_skills(text, &gazetteers.skills),
        rating: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn email_first_match() {
        assert_eq!(
            extract_email("Contact: cmcturland@email.com | NY").as_deref(),
            Some("cmcturland@email.com")
        );
        assert_eq!(extract_email("no at sign here"), None);
        assert_eq!(extract_email("a@x.com ... b@y.com").as_deref(), Some("a@x.com"));
        assert_eq!(extract_email("mail me: a.b@x.co.uk.").as_deref(), Some("a.b@x.co.uk"));
    }

    #[test]
    fn phone_first_match() {
        assert_eq!(extract_phone("(123) 456-7890").as_deref(), Some("(123) 456-7890"));
        assert_eq!(extract_phone("no digits at all"), None);
        assert_eq!(
            extract_phone("+91 98765 43210 and (123) 456-7890").as_deref(),
            Some("+91 98765 43210")
        );
        assert_eq!(extract_phone("September 2008 - April 2012"), None);
        assert_eq!(extract_phone("call 555.123.4567)").as_deref(), Some("555.123.4567"));
    }

    #[test]
    fn name_from_filename() {
        assert_eq!(extract_name("john_doe.txt", ""), "John Doe");
        assert_eq!(extract_name("resume.txt", "Jane Roe\n"), "Resume");
        assert_eq!(extract_name(".txt", "\n  Jane Roe\nx"), "Jane Roe");
        assert_eq!(extract_name("mary-ann.smith.txt", ""), "Mary Ann Smith");
    }

    #[test]
    fn city_first_match() {
        let cities = Gazetteer::new(GazetteerKind::Cities, ["new york", "pittsburgh", "washington"]).unwrap();
        assert_eq!(extract_city("New York, NY", &cities).as_deref(), Some("New York"));
        assert_eq!(extract_city("Paris", &cities), None);
        assert_eq!(
            extract_city("Pittsburgh then Washington", &cities).as_deref(),
            Some("Pittsburgh")
        );
    }

    #[test]
    fn skills_in_order_deduplicated() {
        let skills = Gazetteers::builtin().skills;
        assert_eq!(
            extract_skills("NodeJS backend, Django views, MySQL and nodejs again", &skills),
            ["Nodejs", "Django", "Mysql"]
        );
        assert!(extract_skills("nothing relevant", &skills).is_empty());
        assert_eq!(extract_skills("SQL and PostgreSQL", &skills), ["Sql", "Postgresql"]);
        assert_eq!(extract_skills("JavaScript", &skills), ["Javascript"]);
    }

    #[test]
    fn degrees_and_colleges() {
        let g = Gazetteers::builtin();
        let lines = [
            "B.S. Computer Science",
            "University of Pittsburgh",
            "September 2008 - April 2012",
            "Master of Business Administration (MBA), Boston University, 2016",
        ];
        assert_eq!(
            extract_degrees(&lines, &g.degrees),
            ["B.S. Computer Science", "Master of Business Administration"]
        );
        assert_eq!(
            extract_colleges(&lines, &g.colleges),
            ["University of Pittsburgh", "Boston University"]
        );
    }

    #[test]
    fn empty_document() {
        let raw = RawDocument::new("jane_roe", "jane_roe.txt", "");
        let parsed = parse_resume(&raw, &Gazetteers::builtin(), YearMonth::DEFAULT_REFERENCE).unwrap();
        assert_eq!(parsed.name, "Jane Roe");
        assert_eq!(parsed.email, None);
        assert_eq!(parsed.number, None);
        assert_eq!(parsed.city, None);
        assert!(parsed.work_exp.is_empty() && parsed.education.is_empty() && parsed.skills.is_empty());
        assert_eq!(parsed.work_duration, Months(0));
        assert_eq!(parsed.rating, None);
    }

    #[test]
    fn education_only() {
        let text = "EDUCATION\nB.A. History\nBoston University\nSeptember 2010 - May 2014\n";
        let raw = RawDocument::new("x", "x.txt", text);
        let parsed = parse_resume(&raw, &Gazetteers::builtin(), YearMonth::DEFAULT_REFERENCE).unwrap();
        assert!(parsed.work_exp.is_empty());
        assert_eq!(parsed.work_duration, Months(0));
        assert_eq!(parsed.education_duration, Months(44));
    }

    #[test]
    fn malformed_range_propagates() {
        let raw = RawDocument::new("x", "x.txt", "EXPERIENCE\nMay 2015 - January 2012\n");
        let err = parse_resume(&raw, &Gazetteers::builtin(), YearMonth::DEFAULT_REFERENCE).unwrap_err();
        assert!(matches!(err, EntityError::MalformedRange { .. }));
    }

    #[test]
    fn record_json_shape() {
        let parsed = ParsedResume {
            name: "John Doe".into(),
            email: Some("cmcturland@email.com".into()),
            number: None,
            city: Some("New York".into()),
            work_exp: vec!["Software Engineer".into()],
            education: vec![],
            work_duration: Months(44),
            education_duration: Months(43),
            skills: vec!["Nodejs".into(), "Django".into()],
            rating: Some(8.1349),
        };
        let value = serde_json::to_value(&parsed).unwrap();
        let keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "name",
            "email",
            "number",
            "city",
            "work_exp",
            "education",
            "work_duration",
            "education_duration",
            "skills",
            "rating",
        ];
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        expected.sort_unstable();
        assert_eq!(sorted, expected);
        assert_eq!(value["work_duration"], "3 years 8 months");
        assert_eq!(value["skills"], "Nodejs, Django");
        assert_eq!(value["rating"], 8.13);
        assert!(value["number"].is_null());

        let back: ParsedResume = serde_json::from_value(value).unwrap();
        assert_eq!(back.skills, parsed.skills);
        assert_eq!(back.work_duration, Months(44));
        assert_eq!(back.rating, Some(8.13));
    }

    #[test]
    fn record_rejects_out_of_range_rating() {
        let json = r#"{"name":"x","email":null,"number":null,"city":null,"work_exp":[],"education":[],
            "work_duration":"0 years 0 months","education_duration":"0 years 0 months","skills":"","rating":11.0}"#;
        assert!(serde_json::from_str::<ParsedResume>(json).is_err());
    }
}
