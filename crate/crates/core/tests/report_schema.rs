use jsonschema::{Draft, JSONSchema};
use relact::corpus;
use relact::report::{analyze, REPORT_SCHEMA};
use relact::Tolerances;

#[test]
fn reports_validate_against_the_bundled_schema() {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = JSONSchema::options().with_draft(Draft::Draft7).compile(&schema).unwrap();
    for name in corpus::NAMES {
        let spec = corpus::by_name(name).unwrap();
        let report = analyze(&spec, &Tolerances::default(), &[(1, 2), (2, 3)]).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let msgs: Vec<String> = match compiled.validate(&doc) {
            Ok(()) => Vec::new(),
            Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
        };
        assert!(msgs.is_empty(), "{name}: {msgs:#?}");
    }
}

#[test]
fn schema_rejects_a_missing_verdict() {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
    let compiled = JSONSchema::options().with_draft(Draft::Draft7).compile(&schema).unwrap();
    let report = analyze(&corpus::watertanks(), &Tolerances::default(), &[]).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    doc["verdicts"].as_object_mut().unwrap().remove("controllable");
    assert!(!compiled.is_valid(&doc));
}

#[test]
fn every_row_is_present_in_json() {
    let spec = corpus::by_name("oscillators-b").unwrap();
    let report = analyze(&spec, &Tolerances::default(), &[(1, 3)]).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(doc["spectrum"].as_array().unwrap().len(), 10);
    // V rows, then per pair W, V and Q rows, for every kappa
    assert_eq!(doc["eigen_graphs"].as_array().unwrap().len(), 40);
}
