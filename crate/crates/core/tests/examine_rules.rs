//! Rule-level checks that need hand-built store states beyond what the
//! scenario matrix produces (notably R4: dangling index entries).

use examiner_core::analyze::{correlate_store, load_store, LoadOptions};
use examiner_core::correlate::DEFAULT_PROXIMITY_WINDOW_MS;
use examiner_core::examine::{detect_antiforensics, AntiForensicsInputs, Severity};
use examiner_core::forge::{generate_store, standard_scenarios};
use examiner_core::store::{discover_store, StoreRoot};

fn analysis(
    store_dir: &std::path::Path,
    log_dir: &std::path::Path,
    capture: examiner_core::common::TimestampMs,
) -> Vec<examiner_core::examine::Finding> {
    let root = StoreRoot::new(store_dir).with_logs(log_dir);
    let options = LoadOptions {
        capture_time: Some(capture),
        ..LoadOptions::default()
    };
    let loaded = load_store(&root, &options).unwrap();
    let correlated = correlate_store(&loaded, DEFAULT_PROXIMITY_WINDOW_MS);
    detect_antiforensics(&AntiForensicsInputs {
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
    })
}

#[test]
fn r4_dangling_index_entry_is_anomalous() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "autonomy-direct").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, truth) = generate_store(spec, dir.path()).unwrap();

    // Out-of-band transcript deletion: the index still references it.
    let session = &truth.sessions[0];
    std::fs::remove_file(generated.store_dir.join(format!(
        "agents/{}/sessions/{}",
        truth.agent_id, session.file_name
    )))
    .unwrap();

    let findings = analysis(&generated.store_dir, &generated.log_dir, truth.capture_time);
    let r4 = findings
        .iter()
        .find(|f| f.rule == "R4")
        .expect("R4 emitted for dangling index entry");
    assert_eq!(r4.severity, Severity::Anomalous);
    assert!(r4.summary.contains(&session.session_id));
    // The deleted transcript's logged tool calls now also trip R1.
    assert!(findings.iter().any(|f| f.rule == "R1"));
}

#[test]
fn finding_ids_are_stable_across_runs() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "soft-delete").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, truth) = generate_store(spec, dir.path()).unwrap();
    let a = analysis(&generated.store_dir, &generated.log_dir, truth.capture_time);
    let b = analysis(&generated.store_dir, &generated.log_dir, truth.capture_time);
    let ids_a: Vec<&str> = a.iter().map(|f| f.id.as_str()).collect();
    let ids_b: Vec<&str> = b.iter().map(|f| f.id.as_str()).collect();
    assert_eq!(ids_a, ids_b);
    assert!(!ids_a.is_empty());
    for f in &a {
        assert!(!f.evidence.is_empty(), "finding {} cites no evidence", f.id);
    }
}

#[test]
fn discovery_is_idempotent_over_unchanged_tree() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, _) = generate_store(spec, dir.path()).unwrap();
    let root = StoreRoot::new(&generated.store_dir).with_logs(&generated.log_dir);
    let a = discover_store(&root).unwrap();
    let b = discover_store(&root).unwrap();
    assert_eq!(a.descriptors, b.descriptors);
    assert_eq!(a.unclassified, b.unclassified);
}

#[test]
fn timeline_evidence_refs_resolve_to_real_locations() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, truth) = generate_store(spec, dir.path()).unwrap();
    let root = StoreRoot::new(&generated.store_dir).with_logs(&generated.log_dir);
    let options = LoadOptions {
        capture_time: Some(truth.capture_time),
        ..LoadOptions::default()
    };
    let loaded = load_store(&root, &options).unwrap();
    let correlated = correlate_store(&loaded, DEFAULT_PROXIMITY_WINDOW_MS);

    for event in &correlated.timeline.events {
        // Resolve the path against whichever root the source lives in.
        let candidates = [
            generated.store_dir.join(&event.evidence.path),
            generated.log_dir.join(&event.evidence.path),
        ];
        let path = candidates
            .iter()
            .find(|p| p.is_file())
            .unwrap_or_else(|| panic!("evidence path {} does not exist", event.evidence.path));
        if let examiner_core::common::Locator::Line(line) = &event.evidence.locator {
            let content = std::fs::read_to_string(path).unwrap();
            let line_count = content.lines().count() as u64;
            assert!(
                *line >= 1 && *line <= line_count,
                "evidence {}:{line} out of range (file has {line_count} lines)",
                event.evidence.path
            );
        }
    }
}
