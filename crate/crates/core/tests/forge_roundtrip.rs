//! Round-trip: generate each standard scenario, run the full analysis
//! pipeline over the tree, and require the ground truth to be reproduced
//! with zero field mismatches. Also checks generation determinism and
//! tamper expectation soundness.

use examiner_core::analyze::{correlate_store, load_store, LoadOptions};
use examiner_core::correlate::DEFAULT_PROXIMITY_WINDOW_MS;
use examiner_core::forge::{
    apply_tamper, generate_store, standard_scenarios, DeleteTarget, TamperOp, TamperSpec,
};
use examiner_core::store::StoreRoot;

fn verify_scenario(spec: &examiner_core::forge::ScenarioSpec) -> Vec<String> {
    let dir = tempfile::tempdir().expect("tempdir");
    let (generated, truth) = generate_store(spec, dir.path()).expect("generate");
    let root = StoreRoot::new(&generated.store_dir).with_logs(&generated.log_dir);
    let options = LoadOptions {
        capture_time: Some(truth.capture_time),
        ..LoadOptions::default()
    };
    let loaded = load_store(&root, &options).expect("load");
    let correlated = correlate_store(&loaded, DEFAULT_PROXIMITY_WINDOW_MS);
    truth.verify(&generated.store_dir, &loaded, &correlated)
}

#[test]
fn minimal_scenario_round_trips() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "minimal").unwrap();
    let errs = verify_scenario(spec);
    assert!(errs.is_empty(), "mismatches:\n{}", errs.join("\n"));
}

#[test]
fn all_standard_scenarios_round_trip() {
    let mut failures = Vec::new();
    for spec in standard_scenarios() {
        let errs = verify_scenario(&spec);
        if !errs.is_empty() {
            failures.push(format!("scenario {}:\n  {}", spec.name, errs.join("\n  ")));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n\n"));
}

#[test]
fn same_seed_yields_identical_trees() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let (gen_a, _) = generate_store(spec, dir_a.path()).unwrap();
    let (gen_b, _) = generate_store(spec, dir_b.path()).unwrap();
    let snap_a = examiner_core::diffkit::snapshot_manifest(&gen_a.store_dir, "a").unwrap();
    let snap_b = examiner_core::diffkit::snapshot_manifest(&gen_b.store_dir, "b").unwrap();
    let hashes_a: Vec<_> = snap_a
        .entries
        .iter()
        .map(|(p, e)| (p.clone(), e.content_hash.clone()))
        .collect();
    let hashes_b: Vec<_> = snap_b
        .entries
        .iter()
        .map(|(p, e)| (p.clone(), e.content_hash.clone()))
        .collect();
    assert_eq!(hashes_a, hashes_b);
}

#[test]
fn tamper_expectations_are_emitted() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "autonomy-direct").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, truth) = generate_store(spec, dir.path()).unwrap();

    // Delete the toolResult line of the first logged execution.
    let victim = truth.logged_tool_call_ids[0].clone();
    let tamper = TamperSpec {
        operations: vec![TamperOp::DeleteTranscriptLine {
            tool_call_id: victim.clone(),
            target: DeleteTarget::ResultLine,
        }],
        expected_findings: Vec::new(),
    };
    let expected = apply_tamper(&generated, &truth, &tamper).unwrap();
    assert_eq!(expected, vec!["R1".to_string()]);

    let root = StoreRoot::new(&generated.store_dir).with_logs(&generated.log_dir);
    let options = LoadOptions {
        capture_time: Some(truth.capture_time),
        ..LoadOptions::default()
    };
    let loaded = load_store(&root, &options).unwrap();
    let correlated = correlate_store(&loaded, DEFAULT_PROXIMITY_WINDOW_MS);
    let findings = examiner_core::examine::detect_antiforensics(
        &examiner_core::examine::AntiForensicsInputs {
            logs: &loaded.logs,
            resolution: &loaded.resolution,
            sessions: &loaded.sessions,
            index: &loaded.index,
            index_path: &loaded.index_path,
            cron: &loaded.cron,
            registry: &loaded.registry,
            retention: &loaded.retention,
            graph: &correlated.graph,
            capture_time: loaded.capture_time,
        },
    );
    let rules: Vec<&str> = findings.iter().map(|f| f.rule.as_str()).collect();
    assert!(rules.contains(&"R1"), "findings: {findings:?}");
    assert!(findings
        .iter()
        .any(|f| f.rule == "R1" && f.summary.contains(&victim)));
}
