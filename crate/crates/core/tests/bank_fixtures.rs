use std::path::PathBuf;

use qjudge_core::bank::Bank;
use qjudge_core::eval::report_json;
use qjudge_core::qasm::SourceProgram;
use qjudge_core::{evaluate, Verdict};

fn bundled() -> Bank {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../problems");
    Bank::load(dir).expect("bundled bank loads")
}

#[test]
fn bank_has_expected_size() {
    let bank = bundled();
    assert!(bank.len() >= 10);
    assert!(bank.problem("QPC001-A4").is_some());
    assert!(bank.problem("PREP-I1").is_some());
}

#[test]
fn every_reference_is_accepted() {
    for entry in bundled().entries() {
        let source = SourceProgram::native(entry.reference_source().unwrap());
        let report = evaluate(&source, &entry.spec);
        assert_eq!(
            report.verdict,
            Verdict::AC,
            "{}: {}",
            entry.spec.id,
            report.diagnostic
        );
    }
}

#[test]
fn fixture_prefix_names_the_verdict() {
    let mut total = 0;
    for entry in bundled().entries() {
        for path in entry.fixtures().unwrap() {
            let name = path.file_stem().unwrap().to_str().unwrap();
            let expected: Verdict = name.split('_').next().unwrap().parse().unwrap();
            let text = std::fs::read_to_string(&path).unwrap();
            let report = evaluate(&SourceProgram::native(text), &entry.spec);
            assert_eq!(
                report.verdict, expected,
                "{}/{name}: {}",
                entry.spec.id, report.diagnostic
            );
            total += 1;
        }
    }
    assert!(total >= 50);
}

#[test]
fn synthetic_problems_cover_every_failure_class() {
    for entry in bundled().entries().filter(|e| e.spec.depth_limit.is_some()) {
        let prefixes: Vec<String> = entry
            .fixtures()
            .unwrap()
            .iter()
            .map(|p| {
                p.file_stem()
                    .unwrap()
                    .to_str()
                    .unwrap()
                    .split('_')
                    .next()
                    .unwrap()
                    .to_string()
            })
            .collect();
        for verdict in ["re", "ume", "uge", "dle", "wa"] {
            assert!(
                prefixes.iter().any(|p| p == verdict),
                "{} lacks a {verdict} fixture",
                entry.spec.id
            );
        }
    }
}

#[test]
fn loaded_specs_round_trip_through_toml() {
    for entry in bundled().entries() {
        let again =
            qjudge_core::bank::ProblemSpec::from_toml(&entry.spec.to_toml(), &entry.dir).unwrap();
        assert_eq!(again, entry.spec);
    }
}

#[test]
fn accepted_reports_are_golden() {
    let bank = bundled();
    let entry = bank.get("QPC001-A4").unwrap();
    let report = evaluate(
        &SourceProgram::native(entry.reference_source().unwrap()),
        &entry.spec,
    );
    assert_eq!(
        report_json(&report),
        r#"{ "runtime_error": false, "gate_violation": false, "depth_violation": false, "state_match": true }"#
    );
}
