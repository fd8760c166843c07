//! Month-granular date ranges and employment/education duration arithmetic.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::EntityError;

/// A calendar month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    /// Reference month that "Present" resolves to unless overridden.
    pub const DEFAULT_REFERENCE: YearMonth = YearMonth { year: 2024, month: 1 };

    pub fn new(year: i32, month: u32) -> Option<Self> {
        (1..=12).contains(&month).then_some(Self { year, month })
    }

    /// Months since year zero; differences of ordinals are month counts.
    pub fn ordinal(self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = String;

    /// Parses `YYYY-MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (y, m) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| format!("expected YYYY-MM, got `{s}`"))?;
        let year = y.parse().map_err(|_| format!("bad year in `{s}`"))?;
        let month = m.parse().map_err(|_| format!("bad month in `{s}`"))?;
        YearMonth::new(year, month).ok_or_else(|| format!("month out of range in `{s}`"))
    }
}

/// Span between two months; `ongoing` marks an end that was "Present".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DateRange {
    pub start: YearMonth,
    pub end: YearMonth,
    pub ongoing: bool,
}

impl DateRange {
    pub fn new(start: YearMonth, end: YearMonth) -> Option<Self> {
        (start <= end).then_some(Self {
            start,
            end,
            ongoing: false,
        })
    }

    pub fn months(&self) -> u32 {
        (self.end.ordinal() - self.start.ordinal()) as u32
    }
}

const MONTH: &str = r"(jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\.?";

fn range_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        let pattern = format!(
            r"(?i)\b{MONTH}\s+(\d{{4}})(?:\s*[-–—]\s*|\s+to\s+)(?:{MONTH}\s+(\d{{4}})|(present|current|now))\b"
        );
        Regex::new(&pattern).expect("date range regex")
    })
}

fn month_number(name: &str) -> u32 {
    let key = name.to_ascii_lowercase();
    match &key[..3] {
        "jan" => 1,
        "feb" => 2,
        "mar" => 3,
        "apr" => 4,
        "may" => 5,
        "jun" => 6,
        "jul" => 7,
        "aug" => 8,
        "sep" => 9,
        "oct" => 10,
        "nov" => 11,
        _ => 12,
    }
}

fn parse_captures(caps: &regex::Captures<'_>, line: &str, reference: YearMonth) -> Result<DateRange, EntityError> {
    let year = |i: usize| caps[i].parse::<i32>().expect("four digits");
    let start = YearMonth {
        year: year(2),
        month: month_number(&caps[1]),
    };
    let (end, ongoing) = if caps.get(5).is_some() {
        (reference, true)
    } else {
        (
            YearMonth {
                year: year(4),
                month: month_number(&caps[3]),
            },
            false,
        )
    };
    if start > end {
        return Err(EntityError::MalformedRange {
            line: line.to_string(),
            start,
            end,
        });
    }
    Ok(DateRange { start, end, ongoing })
}

/// Parses the first `Month YYYY - Month YYYY` or `Month YYYY - Present`
/// range in a line. A range whose start follows its end is an error.
pub fn parse_date_range(line: &str, reference: YearMonth) -> Result<Option<DateRange>, EntityError> {
    range_regex()
        .captures(line)
        .map(|caps| parse_captures(&caps, line, reference))
        .transpose()
}

/// Every date range appearing in a block of lines.
pub fn find_date_ranges<S: AsRef<str>>(lines: &[S], reference: YearMonth) -> Result<Vec<DateRange>, EntityError> {
    let mut out = Vec::new();
    for line in lines {
        let line = line.as_ref();
        for caps in range_regex().captures_iter(line) {
            out.push(parse_captures(&caps, line, reference)?);
        }
    }
    Ok(out)
}

/// Total months covered by the union of the ranges. Each range covers the
/// half-open month interval `[start, end)`; overlapping or touching ranges
/// merge before summing.
pub fn total_duration(ranges: &[DateRange]) -> Months {
    let mut spans: Vec<(i64, i64)> = ranges
        .iter()
        .map(|r| (r.start.ordinal(), r.end.ordinal()))
        .filter(|(s, e)| e > s)
        .collect();
    spans.sort_unstable();
    let mut total = 0i64;
    let mut current: Option<(i64, i64)> = None;
    for (s, e) in spans {
        current = match current {
            Some((cs, ce)) if s <= ce => Some((cs, ce.max(e))),
            Some((cs, ce)) => {
                total += ce - cs;
                Some((s, e))
            }
            None => Some((s, e)),
        };
    }
    if let Some((cs, ce)) = current {
        total += ce - cs;
    }
    Months(total as u32)
}

/// A month count rendered as `Y years M months`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Months(pub u32);

impl fmt::Display for Months {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} years {} months", self.0 / 12, self.0 % 12)
    }
}

impl FromStr for Months {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        match parts.as_slice() {
            [y, "years", m, "months"] => {
                let y: u32 = y.parse().map_err(|_| format!("bad duration `{s}`"))?;
                let m: u32 = m.parse().map_err(|_| format!("bad duration `{s}`"))?;
                Ok(Months(y * 12 + m))
            }
            _ => Err(format!("expected `Y years M months`, got `{s}`")),
        }
    }
}
