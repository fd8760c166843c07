use std::path::PathBuf;

use cvrank::corpus::load_dir;
use cvrank::eval::{evaluate_corpus, render_report, EntityAnnotation, EntityType};
use cvrank::{parse_resume, Gazetteers, ParsedResume, RawDocument, YearMonth};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn parse_all() -> Vec<(String, ParsedResume)> {
    let gaz = Gazetteers::builtin();
    load_dir(&fixtures().join("resumes"))
        .unwrap()
        .iter()
        .map(|doc| {
            (
                doc.id.clone(),
                parse_resume(doc, &gaz, YearMonth::DEFAULT_REFERENCE).unwrap(),
            )
        })
        .collect()
}

fn predictions(parsed: &[(String, ParsedResume)]) -> Vec<EntityAnnotation> {
    let gaz = Gazetteers::builtin();
    parsed
        .iter()
        .map(|(id, p)| EntityAnnotation::from_parsed(id.as_str(), p, &gaz))
        .collect()
}

fn gold() -> Vec<EntityAnnotation> {
    EntityAnnotation::list_from_json(&std::fs::read_to_string(fixtures().join("gold.json")).unwrap()).unwrap()
}

#[test]
fn sample_resume_record() {
    let doc = RawDocument::from_path(&fixtures().join("resumes/john_doe.txt")).unwrap();
    let parsed = parse_resume(&doc, &Gazetteers::builtin(), YearMonth::DEFAULT_REFERENCE).unwrap();
    assert_eq!(parsed.name, "John Doe");
    assert_eq!(parsed.email.as_deref(), Some("cmcturland@email.com"));
    assert_eq!(parsed.number.as_deref(), Some("(123) 456-7890"));
    assert_eq!(parsed.city.as_deref(), Some("New York"));
    assert_eq!(parsed.education_duration.to_string(), "3 years 7 months");
    assert_eq!(parsed.work_duration.to_string(), "3 years 8 months");
    for skill in ["Nodejs", "Django", "Mysql", "Reactjs"] {
        assert!(parsed.skills.iter().any(|s| s == skill), "missing {skill}");
    }
    assert_eq!(parsed.rating, None);

    let json = parsed.to_json_pretty();
    let back: ParsedResume = serde_json::from_str(&json).unwrap();
    assert_eq!(back, parsed);
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let mut keys: Vec<&str> = value.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
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
    expected.sort();
    assert_eq!(keys, expected);
}

#[test]
fn ongoing_role_resolves_against_reference_month() {
    let doc = RawDocument::from_path(&fixtures().join("resumes/priya_sharma.txt")).unwrap();
    let gaz = Gazetteers::builtin();
    let early = parse_resume(&doc, &gaz, YearMonth::new(2023, 1).unwrap()).unwrap();
    let late = parse_resume(&doc, &gaz, YearMonth::new(2024, 1).unwrap()).unwrap();
    assert_eq!(late.work_duration.0, early.work_duration.0 + 12);
}

#[test]
fn every_fixture_parses() {
    let parsed = parse_all();
    assert_eq!(parsed.len(), 10);
    for (id, p) in &parsed {
        assert!(p.email.is_some(), "{id} lacks an email");
        assert!(!p.skills.is_empty(), "{id} lacks skills");
        assert!(p.work_duration.0 > 0, "{id} has no work history");
    }
}

#[test]
fn fixture_report_covers_all_entity_types() {
    let report = evaluate_corpus::<f64>(&predictions(&parse_all()), &gold()).unwrap();
    assert_eq!(report.documents, 10);
    assert_eq!(report.per_entity.len(), EntityType::ALL.len());
    for m in report.per_entity.values() {
        for x in [m.precision, m.recall, m.f1] {
            assert!((0.0..=1.0).contains(&x));
        }
    }
    let table = render_report(&report);
    assert_eq!(table.lines().count(), 7);
    for ty in EntityType::ALL {
        assert!(table.contains(ty.label()));
    }
    let back: cvrank::EvalReport = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(back, report);
}

#[test]
fn perfect_predictions_score_one() {
    let gold = gold();
    let report = evaluate_corpus::<f64>(&gold, &gold).unwrap();
    for m in report.per_entity.values() {
        assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
    }
    assert_eq!(report.accuracy_all, 1.0);
}

#[test]
fn corrupting_half_the_skills_lowers_skills_f1() {
    let parsed = parse_all();
    let gold = gold();
    let base = evaluate_corpus::<f64>(&predictions(&parsed), &gold).unwrap();

    let corrupted: Vec<(String, ParsedResume)> = parsed
        .into_iter()
        .map(|(id, mut p)| {
            for (i, skill) in p.skills.iter_mut().enumerate() {
                if i % 2 == 0 {
                    *skill = format!("corrupted-{i}");
                }
            }
            (id, p)
        })
        .collect();
    let worse = evaluate_corpus::<f64>(&predictions(&corrupted), &gold).unwrap();
    let f1 = |r: &cvrank::EvalReport| r.per_entity[&EntityType::Skills].f1;
    assert!(f1(&worse) < f1(&base), "{} !< {}", f1(&worse), f1(&base));
}
