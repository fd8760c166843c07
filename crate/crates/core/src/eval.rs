//! Entity-extraction quality: per-entity precision, recall and F1 against
//! gold annotations, macro averages and exact-match accuracy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::entities::{extract_colleges, extract_degrees, Gazetteers, ParsedResume};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("document ids do not align: without prediction [{}], without gold [{}]",
        .missing_predictions.join(", "), .missing_gold.join(", "))]
    IdMismatch {
        missing_predictions: Vec<String>,
        missing_gold: Vec<String>,
    },
    #[error("document id `{0}` appears more than once")]
    DuplicateId(String),
    #[error("nothing to evaluate")]
    NoDocuments,
    #[error("unknown entity type `{0}`")]
    UnknownEntity(String),
    #[error("annotation JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// Entity types scored by the harness, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EntityType {
    CollegeName,
    Degree,
    Email,
    Location,
    Name,
    Skills,
}

impl EntityType {
    pub const ALL: [EntityType; 6] = [
        EntityType::CollegeName,
        EntityType::Degree,
        EntityType::Email,
        EntityType::Location,
        EntityType::Name,
        EntityType::Skills,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EntityType::CollegeName => "College Name",
            EntityType::Degree => "Degree",
            EntityType::Email => "Email",
            EntityType::Location => "Location",
            EntityType::Name => "Name",
            EntityType::Skills => "Skills",
        }
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EntityType {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = normalize_value(s);
        EntityType::ALL
            .into_iter()
            .find(|t| t.label().to_lowercase() == key)
            .ok_or_else(|| EvalError::UnknownEntity(s.to_string()))
    }
}

impl Serialize for EntityType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.label())
    }
}

impl<'de> Deserialize<'de> for EntityType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Lowercase, trimmed, single-spaced.
pub fn normalize_value(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Entity values of one document, keyed by type. Used for both gold
/// annotations and predictions; a missing type means no values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntityAnnotation {
    pub doc_id: String,
    pub entities: BTreeMap<EntityType, BTreeSet<String>>,
}

pub type GoldAnnotation = EntityAnnotation;

impl<'de> Deserialize<'de> for EntityAnnotation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            doc_id: String,
            #[serde(default)]
            entities: BTreeMap<EntityType, Vec<String>>,
        }
        let wire = Wire::deserialize(deserializer)?;
        let mut ann = EntityAnnotation::new(wire.doc_id);
        for (ty, values) in wire.entities {
            ann.insert_all(ty, values);
        }
        Ok(ann)
    }
}

impl EntityAnnotation {
    pub fn new(doc_id: impl Into<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            entities: BTreeMap::new(),
        }
    }

    /// Adds normalized values; empty values are ignored.
    pub fn insert_all<I, S>(&mut self, ty: EntityType, values: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set = self.entities.entry(ty).or_default();
        set.extend(
            values
                .into_iter()
                .map(|v| normalize_value(v.as_ref()))
                .filter(|v| !v.is_empty()),
        );
    }

    pub fn values(&self, ty: EntityType) -> BTreeSet<String> {
        self.entities.get(&ty).cloned().unwrap_or_default()
    }

    /// Predictions carried by a parsed resume. College names and degrees are
    /// recovered from its verbatim education lines.
    pub fn from_parsed(doc_id: impl Into<String>, parsed: &ParsedResume, gazetteers: &Gazetteers) -> Self {
        let mut ann = Self::new(doc_id);
        ann.insert_all(EntityType::Name, [&parsed.name]);
        ann.insert_all(EntityType::Email, parsed.email.iter());
        ann.insert_all(EntityType::Location, parsed.city.iter());
        ann.insert_all(EntityType::Skills, &parsed.skills);
        ann.insert_all(
            EntityType::CollegeName,
            extract_colleges(&parsed.education, &gazetteers.colleges),
        );
        ann.insert_all(
            EntityType::Degree,
            extract_degrees(&parsed.education, &gazetteers.degrees),
        );
        ann
    }

    pub fn list_from_json(source: &str) -> Result<Vec<Self>, EvalError> {
        Ok(serde_json::from_str(source)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntityMetrics<F> {
    pub precision: F,
    pub recall: F,
    pub f1: F,
    pub support: usize,
}

/// Harmonic mean of precision and recall, zero when both are zero.
pub fn f1_score<F: Scalar>(precision: F, recall: F) -> F {
    let sum = precision + recall;
    if sum == F::zero() {
        F::zero()
    } else {
        F::from_count(2) * precision * recall / sum
    }
}

/// Set-based metrics. An empty prediction against an empty gold set is a
/// full success; an empty side against a non-empty one scores zero.
pub fn evaluate_entity<F: Scalar>(predicted: &BTreeSet<String>, gold: &BTreeSet<String>) -> EntityMetrics<F> {
    let support = gold.len();
    if predicted.is_empty() && gold.is_empty() {
        return EntityMetrics {
            precision: F::one(),
            recall: F::one(),
            f1: F::one(),
            support,
        };
    }
    let overlap = predicted.intersection(gold).count();
    let ratio = |den: usize| {
        if den == 0 {
            F::zero()
        } else {
            F::from_count(overlap) / F::from_count(den)
        }
    };
    let precision = ratio(predicted.len());
    let recall = ratio(gold.len());
    EntityMetrics {
        precision,
        recall,
        f1: f1_score(precision, recall),
        support,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<F> {
    pub documents: usize,
    pub per_entity: BTreeMap<EntityType, EntityMetrics<F>>,
    #[serde(rename = "macro")]
    pub macro_avg: EntityMetrics<F>,
    /// Share of (document, entity type) cells predicted exactly.
    pub accuracy_all: F,
    /// The same share restricted to skills.
    pub accuracy_skills: F,
}

impl<F: Scalar + Serialize> EvalReport<F> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn mean<F: Scalar>(values: impl Iterator<Item = F>) -> F {
    let (sum, n) = values.fold((F::zero(), 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        F::zero()
    } else {
        sum / F::from_count(n)
    }
}

fn index_by_id(items: &[EntityAnnotation]) -> Result<BTreeMap<&str, &EntityAnnotation>, EvalError> {
    let mut map = BTreeMap::new();
    for item in items {
        if map.insert(item.doc_id.as_str(), item).is_some() {
            return Err(EvalError::DuplicateId(item.doc_id.clone()));
        }
    }
    Ok(map)
}

/// Scores every document per entity type, then averages each metric over
/// documents with equal weight. Documents are matched by id, and the result
/// does not depend on input order.
pub fn evaluate_corpus<F: Scalar>(
    predictions: &[EntityAnnotation],
    golds: &[GoldAnnotation],
) -> Result<EvalReport<F>, EvalError> {
    let predicted = index_by_id(predictions)?;
    let gold = index_by_id(golds)?;
    let missing_predictions: Vec<String> = gold
        .keys()
        .filter(|id| !predicted.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    let missing_gold: Vec<String> = predicted
        .keys()
        .filter(|id| !gold.contains_key(*id))
        .map(|id| id.to_string())
        .collect();
    if !missing_predictions.is_empty() || !missing_gold.is_empty() {
        return Err(EvalError::IdMismatch {
            missing_predictions,
            missing_gold,
        });
    }
    if gold.is_empty() {
        return Err(EvalError::NoDocuments);
    }

    let mut per_doc: BTreeMap<EntityType, Vec<EntityMetrics<F>>> = BTreeMap::new();
    let mut exact = BTreeMap::<EntityType, usize>::new();
    for (id, g) in &gold {
        let p = predicted[id];
        for ty in EntityType::ALL {
            let (pv, gv) = (p.values(ty), g.values(ty));
            per_doc.entry(ty).or_default().push(evaluate_entity(&pv, &gv));
            if pv == gv {
                *exact.entry(ty).or_default() += 1;
            }
        }
    }

    let per_entity: BTreeMap<EntityType, EntityMetrics<F>> = per_doc
        .iter()
        .map(|(&ty, ms)| {
            let metrics = EntityMetrics {
                precision: mean(ms.iter().map(|m| m.precision)),
                recall: mean(ms.iter().map(|m| m.recall)),
                f1: mean(ms.iter().map(|m| m.f1)),
                support: ms.iter().map(|m| m.support).sum(),
            };
            (ty, metrics)
        })
        .collect();
    let macro_avg = EntityMetrics {
        precision: mean(per_entity.values().map(|m| m.precision)),
        recall: mean(per_entity.values().map(|m| m.recall)),
        f1: mean(per_entity.values().map(|m| m.f1)),
        support: per_entity.values().map(|m| m.support).sum(),
    };
    let docs = gold.len();
    let cells = docs * EntityType::ALL.len();
    let exact_all: usize = exact.values().sum();
    let exact_skills = exact.get(&EntityType::Skills).copied().unwrap_or(0);
    Ok(EvalReport {
        documents: docs,
        per_entity,
        macro_avg,
        accuracy_all: F::from_count(exact_all) / F::from_count(cells),
        accuracy_skills: F::from_count(exact_skills) / F::from_count(docs),
    })
}

/// Fixed-width table, one row per entity type, three decimals.
pub fn render_report<F: Scalar>(report: &EvalReport<F>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14}{:>10}{:>8}{:>10}",
        "Entity", "precision", "recall", "F1-score"
    );
    for (ty, m) in &report.per_entity {
        let f = |x: F| x.to_f64().unwrap_or(f64::NAN);
        let _ = writeln!(
            out,
            "{:<14}{:>10.3}{:>8.3}{:>10.3}",
            ty.label(),
            f(m.precision),
            f(m.recall),
            f(m.f1)
        );
    }
    out
}
