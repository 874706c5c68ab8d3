use std::collections::BTreeSet;

use trigbeta::corpus::{
    default_corpus, load_corpus, load_corpus_str, run_corpus, verify_entry, CorpusError, IntegrandSource, ReportFormat,
    Status, Verdict, ANCHORS, DEFAULT_CORPUS,
};
use trigbeta::integrand::ParseErrorKind;

const TOL: f64 = 1e-10;

fn entry_json(gr_id: &str, integrand: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "gr_id": gr_id,
        "paper_anchor": "anchor",
        "interval": "pi/2",
        "integrand": integrand,
        "expected_form": {"mul": [{"const": "1/2"}, {"beta": ["1/2", "1/2"]}]},
        "status": "verified",
        "note": ""
    })
}

fn doc(entries: Vec<serde_json::Value>) -> String {
    serde_json::json!({ "entries": entries }).to_string()
}

#[test]
fn default_corpus_covers_required_entries() {
    let entries = default_corpus();
    let verified: BTreeSet<String> =
        entries.iter().filter(|e| e.status == Status::Verified).map(|e| e.label()).collect();
    assert!(verified.len() >= 22, "{} verified entries", verified.len());

    let ids: BTreeSet<&str> = entries.iter().map(|e| e.gr_id.as_str()).collect();
    for id in [
        "3.621.1", "3.621.2", "3.621.3", "3.621.4", "3.621.5", "3.621.6", "3.621.7", "3.622.1", "3.623.1", "3.624.2",
        "3.624.3", "3.624.4", "3.624.5", "3.625.1", "3.625.2", "3.625.3", "3.625.4", "3.626.1", "3.626.2", "3.627",
        "3.628",
    ] {
        assert!(ids.contains(id), "missing {id}");
    }
    let forms_3627 = entries.iter().filter(|e| e.gr_id == "3.627" && e.status == Status::Verified).count();
    assert_eq!(forms_3627, 2);
}

#[test]
fn parametric_entries_ship_three_bindings() {
    for e in default_corpus() {
        if let IntegrandSource::Template { bindings, .. } = &e.integrand {
            assert!(bindings.len() >= 3, "{} has {} bindings", e.label(), bindings.len());
            assert_eq!(e.instances().unwrap().len(), bindings.len());
        }
    }
}

#[test]
fn errata_entries_carry_notes() {
    for e in default_corpus() {
        if e.status != Status::Verified {
            assert!(!e.note.is_empty(), "{}", e.label());
        }
        if e.status == Status::Corrected {
            assert!(e.corrected_form.is_some(), "{}", e.label());
        }
    }
}

#[test]
fn anchors_match_bundled_list() {
    let anchors: BTreeSet<&str> = ANCHORS.lines().filter(|l| !l.trim().is_empty()).collect();
    for e in default_corpus() {
        assert!(
            anchors.contains(e.paper_anchor.as_str()),
            "anchor of {} not in bundled list: {:?}",
            e.label(),
            e.paper_anchor
        );
    }
}

#[test]
fn full_run_has_no_failures() {
    let entries = default_corpus();
    let report = run_corpus(&entries, TOL, 4);
    let s = report.summary;
    assert_eq!(s.fail, 0, "{}", report.to_text());
    assert_eq!(s.rows, s.pass + s.fail + s.expected_mismatch);
    assert_eq!(s.entries, entries.len());
    let errata = entries.iter().filter(|e| e.status != Status::Verified).count();
    assert!(errata >= 1);
    assert_eq!(s.mismatch_entries, errata);
    for row in &report.rows {
        if row.status == Status::Verified {
            assert_eq!(row.verdict, Verdict::Pass, "{} {}", row.gr_id, row.binding);
            assert!(row.rel_discrepancy <= TOL);
        } else {
            assert_eq!(row.verdict, Verdict::ExpectedMismatch);
        }
    }
}

#[test]
fn spot_rows() {
    let entries = default_corpus();
    let find = |id: &str| entries.iter().find(|e| e.gr_id == id && e.variant.is_none()).unwrap();

    let e = find("3.621.7");
    let inst = &e.instances().unwrap()[0];
    let row = verify_entry(e, inst, TOL).unwrap();
    assert_eq!(row.verdict, Verdict::Pass);
    assert!((row.closed_value - 2.6220575543).abs() < 1e-9);

    let e = find("3.621.6");
    let row = verify_entry(e, &e.instances().unwrap()[0], TOL).unwrap();
    assert_eq!(row.verdict, Verdict::ExpectedMismatch);
    assert!((row.printed_value - 10.4882).abs() < 1e-3, "{}", row.printed_value);
    assert!((row.oracle_value - 1.1981402).abs() < 1e-6, "{}", row.oracle_value);
    assert!(row.printed_discrepancy > 1.0);
    assert!(row.rel_discrepancy <= TOL);

    let e = find("3.625.3");
    let inst = e
        .instances()
        .unwrap()
        .into_iter()
        .find(|i| i.binding.values == vec![("n".to_string(), 1), ("m".to_string(), 1)])
        .expect("binding (1, 1)");
    let row = verify_entry(e, &inst, TOL).unwrap();
    assert_eq!(row.verdict, Verdict::Pass);
    assert!((row.closed_value - 1.0 / 3.0).abs() < 1e-14);
    assert!(row.alternatives.iter().any(|a| a.exact_match == Some(true)));
}

#[test]
fn report_is_independent_of_parallelism() {
    let entries = default_corpus();
    let a = run_corpus(&entries, TOL, 1);
    let b = run_corpus(&entries, TOL, 8);
    for f in [ReportFormat::Text, ReportFormat::Json, ReportFormat::Markdown] {
        assert_eq!(a.render(f), b.render(f));
    }
}

#[test]
fn empty_corpus_gives_empty_report() {
    let report = run_corpus(&[], TOL, 2);
    assert!(report.rows.is_empty());
    assert_eq!(report.summary.rows, 0);
    assert_eq!(report.summary.pass + report.summary.fail + report.summary.expected_mismatch, 0);
    assert!(load_corpus_str(r#"{"entries": []}"#).unwrap().is_empty());
}

#[test]
fn impossible_tolerance_reports_failures() {
    let report = run_corpus(&default_corpus(), 1e-16, 4);
    let fails: Vec<_> = report.rows.iter().filter(|r| r.verdict == Verdict::Fail).collect();
    assert!(!fails.is_empty());
    for r in fails {
        assert!(!r.reason.is_empty());
        if r.status != Status::Verified {
            continue;
        }
        let worst =
            r.alternatives.iter().map(|a| a.discrepancy).chain(r.engine_discrepancy).fold(r.rel_discrepancy, f64::max);
        assert!(worst > 1e-16 && worst <= TOL, "{} {} {}", r.gr_id, worst, r.reason);
    }
}

#[test]
fn loose_tolerance_still_flags_errata() {
    let report = run_corpus(&default_corpus(), 1e-2, 4);
    assert_eq!(report.summary.fail, 0);
    let strict = run_corpus(&default_corpus(), TOL, 4);
    assert_eq!(report.summary.expected_mismatch, strict.summary.expected_mismatch);
}

#[test]
fn duplicate_binding_rejected() {
    let template = serde_json::json!({
        "template": {"alpha": "2*n", "beta": "0", "gamma": "0"},
        "params": ["n"],
        "bindings": [[1], [2], [1]]
    });
    let err = load_corpus_str(&doc(vec![entry_json("9.1", template)])).unwrap_err();
    assert!(matches!(err, CorpusError::Duplicate { ref gr_id, .. } if gr_id == "9.1"), "{err}");

    let a = entry_json("9.2", "int[0,pi/2] sin(x)^2 dx".into());
    let err = load_corpus_str(&doc(vec![a.clone(), a])).unwrap_err();
    assert!(matches!(err, CorpusError::Duplicate { .. }), "{err}");
}

#[test]
fn dsl_error_names_entry() {
    let bad = entry_json("9.3", "int[0,pi/2] cos(2x)^2 dx".into());
    let err = load_corpus_str(&doc(vec![bad])).unwrap_err();
    match err {
        CorpusError::Dsl { gr_id, error } => {
            assert_eq!(gr_id, "9.3");
            assert_eq!(error.kind, ParseErrorKind::CosTwoXOnHalfPi);
        }
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn schema_error_names_index() {
    let good = entry_json("9.4", "int[0,pi/2] sin(x) dx".into());
    let mut bad = entry_json("9.5", "int[0,pi/2] sin(x) dx".into());
    bad["status"] = "approved".into();
    let err = load_corpus_str(&doc(vec![good.clone(), bad])).unwrap_err();
    assert!(matches!(err, CorpusError::Schema { index: 1, .. }), "{err}");

    let mut no_note = good.clone();
    no_note["status"] = "erratum_suspected".into();
    let err = load_corpus_str(&doc(vec![no_note])).unwrap_err();
    assert!(matches!(err, CorpusError::Schema { index: 0, .. }), "{err}");

    let mut no_fix = good;
    no_fix["status"] = "corrected".into();
    no_fix["note"] = "printed constant is wrong".into();
    let err = load_corpus_str(&doc(vec![no_fix])).unwrap_err();
    assert!(matches!(err, CorpusError::Schema { index: 0, .. }), "{err}");

    assert!(matches!(load_corpus_str("{"), Err(CorpusError::Json(_))));
}

#[test]
fn file_loading() {
    let dir = std::env::temp_dir().join(format!("trigbeta-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("corpus.json");
    std::fs::write(&path, DEFAULT_CORPUS).unwrap();
    assert_eq!(load_corpus(Some(&path)).unwrap(), default_corpus());
    let missing = dir.join("missing.json");
    assert!(matches!(load_corpus(Some(&missing)), Err(CorpusError::Io { .. })));
    std::fs::remove_dir_all(&dir).unwrap();
}
