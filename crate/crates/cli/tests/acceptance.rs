//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! C1  round-trip oracle over the full scenario matrix (< 60 s)
//! C2  tamper soundness and pristine precision
//! C3  diff oracle equivalence on randomized tree pairs (< 120 s)
//! C4  literal format conformance corpus
//! C5  taxonomy totality over every artifact row
//! C6  byte-identical reports across repeated runs
//! C7  salvage robustness on mutated transcripts
//! C8  read-only guarantee during a full analysis run

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use examiner_core::analyze::{correlate_store, load_store, LoadOptions};
use examiner_core::common::TimestampMs;
use examiner_core::correlate::DEFAULT_PROXIMITY_WINDOW_MS;
use examiner_core::diffkit::{diff_manifests, ChangeRecord, ManifestEntry, Snapshot};
use examiner_core::examine::{detect_antiforensics, AntiForensicsInputs, Severity};
use examiner_core::forge::{
    apply_tamper, generate_store, standard_scenarios, DeleteTarget, GroundTruth, TamperOp,
    TamperSpec,
};
use examiner_core::store::{classify_plane, ArtifactKind, Plane, RelevanceLevel, StoreRoot};

const BIN: &str = env!("CARGO_BIN_EXE_openclaw-examiner");

fn load_and_correlate(
    store_dir: &Path,
    log_dir: &Path,
    truth: &GroundTruth,
) -> (examiner_core::analyze::LoadedStore, examiner_core::analyze::CorrelatedStore) {
    let root = StoreRoot::new(store_dir).with_logs(log_dir);
    let options = LoadOptions {
        capture_time: Some(truth.capture_time),
        ..LoadOptions::default()
    };
    let loaded = load_store(&root, &options).expect("load");
    let correlated = correlate_store(&loaded, DEFAULT_PROXIMITY_WINDOW_MS);
    (loaded, correlated)
}

fn findings_of(
    loaded: &examiner_core::analyze::LoadedStore,
    correlated: &examiner_core::analyze::CorrelatedStore,
) -> Vec<examiner_core::examine::Finding> {
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

// ---------------------------------------------------------------------------
// C1
// ---------------------------------------------------------------------------

#[test]
fn c1_round_trip_oracle() {
    let started = Instant::now();
    let scenarios = standard_scenarios();
    assert!(
        scenarios.len() >= 25,
        "scenario matrix has {} entries; need >= 25",
        scenarios.len()
    );
    let mut failures = Vec::new();
    for spec in &scenarios {
        let dir = tempfile::tempdir().unwrap();
        let (generated, truth) = generate_store(spec, dir.path()).unwrap();
        let (loaded, correlated) =
            load_and_correlate(&generated.store_dir, &generated.log_dir, &truth);
        let errs = truth.verify(&generated.store_dir, &loaded, &correlated);
        if !errs.is_empty() {
            failures.push(format!("{}: {}", spec.name, errs.join(" | ")));
        }
    }
    let elapsed = started.elapsed();
    assert!(failures.is_empty(), "round-trip mismatches:\n{}", failures.join("\n"));
    assert!(
        elapsed.as_secs() < 60,
        "round-trip took {elapsed:?}, budget is 60 s"
    );
    println!(
        "ACCEPTANCE C1 PASS — round-trip oracle: {} scenarios, zero field mismatches, {:.2?}",
        scenarios.len(),
        elapsed
    );
}

// ---------------------------------------------------------------------------
// C2
// ---------------------------------------------------------------------------

#[test]
fn c2_tamper_soundness_and_pristine_precision() {
    let scenarios = standard_scenarios();
    let by_name = |name: &str| {
        scenarios
            .iter()
            .find(|s| s.name == name)
            .unwrap_or_else(|| panic!("scenario {name}"))
    };

    // Pristine precision: zero anomalous findings on every untampered store.
    let mut anomalous_total = 0usize;
    for spec in &scenarios {
        let dir = tempfile::tempdir().unwrap();
        let (generated, truth) = generate_store(spec, dir.path()).unwrap();
        let (loaded, correlated) =
            load_and_correlate(&generated.store_dir, &generated.log_dir, &truth);
        anomalous_total += findings_of(&loaded, &correlated)
            .iter()
            .filter(|f| f.severity == Severity::Anomalous)
            .count();
    }
    assert_eq!(anomalous_total, 0, "pristine stores produced anomalous findings");

    // Soundness: every operation type, every expected rule emitted.
    struct Case {
        scenario: &'static str,
        ops: Vec<TamperOp>,
    }
    let cases = vec![
        Case {
            scenario: "autonomy-direct",
            ops: vec![TamperOp::DeleteTranscriptLine {
                tool_call_id: String::new(), // filled below with a logged id
                target: DeleteTarget::ResultLine,
            }],
        },
        Case {
            scenario: "autonomy-interpretive",
            ops: vec![TamperOp::DeleteTranscriptLine {
                tool_call_id: String::new(),
                target: DeleteTarget::Both,
            }],
        },
        Case {
            scenario: "minimal",
            ops: vec![TamperOp::RemoveIndexEntry {
                session_id: String::new(), // filled below with the main session
            }],
        },
        Case {
            scenario: "minimal",
            ops: vec![TamperOp::DeleteLogs],
        },
        Case {
            scenario: "autonomy-direct",
            ops: vec![TamperOp::TruncateTranscript {
                session_id: String::new(),
                keep_lines: 2,
            }],
        },
        Case {
            scenario: "minimal",
            ops: vec![TamperOp::BackdateMtime {
                path: "workspace/SOUL.md".into(),
                to: TimestampMs(946_684_800_000), // 2000-01-01
            }],
        },
    ];

    let mut misses = Vec::new();
    for case in cases {
        let spec = by_name(case.scenario);
        let dir = tempfile::tempdir().unwrap();
        let (generated, truth) = generate_store(spec, dir.path()).unwrap();

        let ops: Vec<TamperOp> = case
            .ops
            .into_iter()
            .map(|op| match op {
                TamperOp::DeleteTranscriptLine { tool_call_id, target } if tool_call_id.is_empty() => {
                    TamperOp::DeleteTranscriptLine {
                        tool_call_id: truth.logged_tool_call_ids[0].clone(),
                        target,
                    }
                }
                TamperOp::RemoveIndexEntry { session_id } if session_id.is_empty() => {
                    TamperOp::RemoveIndexEntry {
                        session_id: truth.index_sessions[0].session_id.clone(),
                    }
                }
                TamperOp::TruncateTranscript { session_id, keep_lines } if session_id.is_empty() => {
                    let with_logged = truth
                        .executions
                        .iter()
                        .find(|e| truth.logged_tool_call_ids.contains(&e.tool_call_id))
                        .expect("logged execution");
                    TamperOp::TruncateTranscript {
                        session_id: with_logged.session_id.clone(),
                        keep_lines,
                    }
                }
                other => other,
            })
            .collect();
        let ops_desc: Vec<String> = ops
            .iter()
            .map(|o| format!("{o:?}").split_whitespace().next().unwrap_or("op").to_string())
            .collect();

        let tamper = TamperSpec {
            operations: ops,
            expected_findings: Vec::new(),
        };
        let expected = apply_tamper(&generated, &truth, &tamper).unwrap();
        let (loaded, correlated) =
            load_and_correlate(&generated.store_dir, &generated.log_dir, &truth);
        let findings = findings_of(&loaded, &correlated);
        let emitted: Vec<&str> = findings.iter().map(|f| f.rule.as_str()).collect();
        for rule in &expected {
            if !emitted.contains(&rule.as_str()) {
                misses.push(format!(
                    "{} + {:?}: expected {rule}, emitted {emitted:?}",
                    case.scenario, ops_desc
                ));
            }
        }
    }
    assert!(misses.is_empty(), "tamper soundness misses:\n{}", misses.join("\n"));
    println!(
        "ACCEPTANCE C2 PASS — tamper soundness across all operation types, 0 missed rules; \
         pristine precision: 0 anomalous findings over {} scenarios",
        scenarios.len()
    );
}

// ---------------------------------------------------------------------------
// C3
// ---------------------------------------------------------------------------

/// Independent oracle: enumerate the path union and classify by direct rule
/// application. Rename candidates are derived the same way the contract
/// states (unique hash+size on both sides); generation never produces
/// duplicate content, so ambiguity is excluded by construction.
fn brute_force_diff(a: &Snapshot, b: &Snapshot) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut deleted: Vec<&String> = Vec::new();
    let mut created: Vec<&String> = Vec::new();
    let paths: std::collections::BTreeSet<&String> = a.entries.keys().chain(b.entries.keys()).collect();
    for path in paths {
        match (a.entries.get(path), b.entries.get(path)) {
            (Some(ea), Some(eb)) => {
                if ea.content_hash != eb.content_hash || ea.is_dir != eb.is_dir {
                    out.push(("content_modified".into(), path.clone()));
                } else if ea.mtime != eb.mtime {
                    out.push(("timestamp_updated".into(), path.clone()));
                }
            }
            (Some(_), None) => deleted.push(path),
            (None, Some(_)) => created.push(path),
            (None, None) => unreachable!(),
        }
    }
    let fp = |s: &Snapshot, p: &String| {
        let e = &s.entries[p];
        (e.content_hash.clone(), e.size)
    };
    let mut consumed_new: std::collections::BTreeSet<String> = Default::default();
    let mut renamed_old: std::collections::BTreeSet<String> = Default::default();
    for old in &deleted {
        let old_fp = fp(a, old);
        if old_fp.0.is_none() {
            continue;
        }
        let matches_old: Vec<_> = deleted.iter().filter(|p| fp(a, p) == old_fp).collect();
        let matches_new: Vec<_> = created.iter().filter(|p| fp(b, p) == old_fp).collect();
        if matches_old.len() == 1 && matches_new.len() == 1 {
            out.push(("renamed".into(), format!("{} -> {}", old, matches_new[0])));
            consumed_new.insert((*matches_new[0]).clone());
            renamed_old.insert((**old).clone());
        }
    }
    for path in deleted {
        if !renamed_old.contains(path.as_str()) {
            out.push(("deleted".into(), path.clone()));
        }
    }
    for path in created {
        if !consumed_new.contains(path.as_str()) {
            out.push(("created".into(), path.clone()));
        }
    }
    out.sort();
    out
}

fn project(cs: &examiner_core::diffkit::ChangeSet) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = cs
        .records
        .iter()
        .map(|r| match r {
            ChangeRecord::Created { path, .. } => ("created".to_string(), path.clone()),
            ChangeRecord::Deleted { path, .. } => ("deleted".to_string(), path.clone()),
            ChangeRecord::Renamed { old_path, path, .. } => {
                ("renamed".to_string(), format!("{old_path} -> {path}"))
            }
            ChangeRecord::ContentModified { path, .. } => {
                ("content_modified".to_string(), path.clone())
            }
            ChangeRecord::TimestampUpdated { path, .. } => {
                ("timestamp_updated".to_string(), path.clone())
            }
        })
        .collect();
    out.sort();
    out
}

fn entry(content_id: u64, mtime: i64) -> ManifestEntry {
    ManifestEntry {
        size: 32 + (content_id % 64),
        mtime: TimestampMs(mtime),
        ctime: None,
        content_hash: Some(examiner_core::diffkit::hash_bytes(
            format!("content-{content_id}").as_bytes(),
        )),
        is_dir: false,
        symlink_target: None,
        read_error: None,
    }
}

fn random_tree_pair(rng: &mut ChaCha20Rng, pair_index: u64) -> (Snapshot, Snapshot) {
    let file_count = rng.gen_range(0..=200usize);
    let mut a = BTreeMap::new();
    for i in 0..file_count {
        let depth = rng.gen_range(0..3);
        let mut path = String::new();
        for d in 0..depth {
            path.push_str(&format!("d{}/", rng.gen_range(0..5u32) + d));
        }
        path.push_str(&format!("f{i}"));
        // Unique content per file: rename matching stays unambiguous.
        let content_id = pair_index * 1_000_000 + i as u64;
        a.insert(path, entry(content_id, rng.gen_range(0..1_000_000)));
    }

    let mut b = BTreeMap::new();
    let mut rename_counter = 0u32;
    for (path, e) in &a {
        match rng.gen_range(0..100u32) {
            0..=9 => {} // deleted
            10..=19 => {
                // renamed: new unique path, identical entry
                rename_counter += 1;
                b.insert(format!("moved/{rename_counter}-{path}"), e.clone());
            }
            20..=34 => {
                // content modified
                let content_id = pair_index * 1_000_000 + 500_000 + rename_counter as u64
                    + b.len() as u64;
                b.insert(path.clone(), entry(content_id, e.mtime.0));
            }
            35..=49 => {
                // timestamp bumped
                let mut e2 = e.clone();
                e2.mtime = TimestampMs(e.mtime.0 + 1 + rng.gen_range(0..1000));
                b.insert(path.clone(), e2);
            }
            _ => {
                b.insert(path.clone(), e.clone());
            }
        }
    }
    // Fresh creations.
    for i in 0..rng.gen_range(0..10usize) {
        let content_id = pair_index * 1_000_000 + 900_000 + i as u64;
        b.insert(format!("new/n{i}"), entry(content_id, rng.gen_range(0..1_000_000)));
    }

    let snap = |id: &str, entries: BTreeMap<String, ManifestEntry>| Snapshot {
        state_id: id.to_string(),
        label: None,
        hash_algorithm: examiner_core::diffkit::HASH_ALGORITHM.to_string(),
        entries,
    };
    (snap("q0", a), snap("q1", b))
}

#[test]
fn c3_diff_oracle_equivalence() {
    let started = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0xD1FF);
    let pairs = 1000;
    for i in 0..pairs {
        let (a, b) = random_tree_pair(&mut rng, i);
        let got = project(&diff_manifests(&a, &b));
        let want = brute_force_diff(&a, &b);
        assert_eq!(got, want, "pair {i}: diff disagrees with brute-force oracle");

        // Involution: swapping the inputs maps created <-> deleted and
        // reverses renames; modifications stay put.
        let swapped = project(&diff_manifests(&b, &a));
        let mut mapped: Vec<(String, String)> = got
            .iter()
            .map(|(cat, path)| match cat.as_str() {
                "created" => ("deleted".to_string(), path.clone()),
                "deleted" => ("created".to_string(), path.clone()),
                "renamed" => {
                    let (old, new) = path.split_once(" -> ").expect("rename path");
                    ("renamed".to_string(), format!("{new} -> {old}"))
                }
                other => (other.to_string(), path.clone()),
            })
            .collect();
        mapped.sort();
        assert_eq!(swapped, mapped, "pair {i}: involution property violated");
    }

    // Composability sanity: every path named in diff(q0, q2) is named in
    // diff(q0, q1) or diff(q1, q2).
    for i in 0..50u64 {
        let (q0, q1) = random_tree_pair(&mut rng, 10_000 + i);
        let (_, q2) = random_tree_pair(&mut rng, 20_000 + i);
        let names = |v: Vec<(String, String)>| -> std::collections::BTreeSet<String> {
            v.into_iter()
                .flat_map(|(_, p)| {
                    p.split(" -> ").map(str::to_owned).collect::<Vec<_>>()
                })
                .collect()
        };
        let step = {
            let mut s = names(project(&diff_manifests(&q0, &q1)));
            s.extend(names(project(&diff_manifests(&q1, &q2))));
            s
        };
        let direct = names(project(&diff_manifests(&q0, &q2)));
        for path in &direct {
            assert!(
                step.contains(path),
                "pair {i}: {path} appears in the direct diff but neither step"
            );
        }
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 120, "diff oracle took {elapsed:?}, budget 120 s");
    println!(
        "ACCEPTANCE C3 PASS — diff oracle equivalence on {pairs} randomized pairs \
         (+50 composability triples), {:.2?}",
        elapsed
    );
}

// ---------------------------------------------------------------------------
// C4
// ---------------------------------------------------------------------------

#[test]
fn c4_format_conformance_corpus() {
    use examiner_core::peripheral::{
        log_retention_gaps, parse_subagent_registry, LogFileStat, DEFAULT_ARCHIVE_WINDOW_MS,
        LOG_RETENTION_MS,
    };
    use examiner_core::transcript::{
        parse_media_filename, parse_session_key, parse_soft_delete_name, parse_transcript,
        visible_output, ContentBlock, EntryPayload, ProviderMode, SessionKeyKind,
    };

    // Version-3 header requirement.
    let (entries, warnings) = parse_transcript(
        br#"{"type":"session","version":3,"id":"h","sessionId":"0f8fad5b-d9cb-469f-a165-70867728950e","timestamp":1767312000}"#,
    );
    assert!(matches!(&entries[0].payload, EntryPayload::SessionHeader(h) if h.version == 3));
    assert!(warnings.is_empty());
    let (_, warnings) = parse_transcript(
        br#"{"type":"session","version":2,"id":"h","sessionId":"0f8fad5b-d9cb-469f-a165-70867728950e"}"#,
    );
    assert!(warnings.iter().any(|w| w.reason.contains("version 2")));

    // Soft-delete suffix.
    let (stem, ts) = parse_soft_delete_name(
        "0f8fad5b-d9cb-469f-a165-70867728950e.jsonl.deleted.1767312000",
    )
    .expect("soft delete name");
    assert_eq!(stem, "0f8fad5b-d9cb-469f-a165-70867728950e");
    assert_eq!(ts.0, 1_767_312_000_000);

    // Log naming and 24-hour retention reasoning.
    assert!(examiner_core::store::is_runtime_log_name("openclaw-2026-01-31.log"));
    assert!(!examiner_core::store::is_runtime_log_name("openclaw-2026-02-30.log"));
    assert_eq!(LOG_RETENTION_MS, 24 * 3600 * 1000);
    let capture = TimestampMs(1_767_312_000_000);
    let report = log_retention_gaps(
        &[LogFileStat {
            file_name: "openclaw-2025-12-20.log".into(),
            date: None,
            mtime: TimestampMs(capture.0 - 10 * 24 * 3600 * 1000),
        }],
        capture,
    );
    assert!(report.flags.iter().any(|f| matches!(
        f,
        examiner_core::peripheral::RetentionFlag::StaleSurvivor { .. }
    )));

    // Telegram header and [message_id: N] grammar.
    let m = examiner_core::transcript::Message {
        role: examiner_core::transcript::Role::User,
        timestamp: None,
        blocks: vec![ContentBlock::Text {
            text: "[Telegram Ada (@ada) id:42 2026-02-02 14:05 UTC]\n[message_id: 7]\nhello"
                .into(),
        }],
        usage: None,
        tool_call_id: None,
        is_error: None,
        details: None,
        raw: serde_json::Value::Null,
    };
    let (attr, warnings) = examiner_core::transcript::extract_user_attribution(&m);
    assert!(warnings.is_empty());
    let attr = attr.unwrap();
    assert_eq!(
        (
            attr.channel.as_str(),
            attr.display_name.as_str(),
            attr.handle.as_deref(),
            attr.platform_user_id.as_str(),
            attr.platform_message_id,
        ),
        ("Telegram", "Ada", Some("ada"), "42", Some(7))
    );
    assert_eq!(attr.message_time.to_rfc3339(), "2026-02-02T14:05:00.000Z");

    // Media filename grammar: named, UUID-only, multi-separator.
    let n = parse_media_filename("invoice.pdf---0f8fad5b-d9cb-469f-a165-70867728950e.pdf").unwrap();
    assert_eq!((n.original.as_deref(), n.ext.as_str()), (Some("invoice.pdf"), "pdf"));
    let n = parse_media_filename("0f8fad5b-d9cb-469f-a165-70867728950e.ogg").unwrap();
    assert_eq!((n.original, n.ext.as_str()), (None, "ogg"));
    let n = parse_media_filename("notes---v2---0f8fad5b-d9cb-469f-a165-70867728950e.md").unwrap();
    assert_eq!(n.original.as_deref(), Some("notes---v2"));

    // <final>/<think> filtering behavior.
    let (entries, _) = parse_transcript(
        br#"{"type":"message","id":"m","role":"assistant","content":[{"type":"text","text":"<think>plan</think><final>Done.</final>"}]}"#,
    );
    let m = entries[0].as_message().unwrap();
    assert_eq!(visible_output(m, ProviderMode::TagFiltered), "Done.");
    let native = visible_output(m, ProviderMode::NativeThinking);
    assert!(native.contains("Done."));
    assert!(!visible_output(m, ProviderMode::TagFiltered).contains("plan"));

    // cron:<jobId> and agent:main:subagent:<uuid> session keys.
    assert_eq!(
        parse_session_key("cron:backup").kind,
        SessionKeyKind::Cron { job_id: "backup".into() }
    );
    assert_eq!(
        parse_session_key("agent:main:cron:backup").kind,
        SessionKeyKind::Cron { job_id: "backup".into() }
    );
    assert_eq!(
        parse_session_key("agent:main:subagent:0f8fad5b-d9cb-469f-a165-70867728950e").kind,
        SessionKeyKind::Subagent {
            child_uuid: "0f8fad5b-d9cb-469f-a165-70867728950e".into()
        }
    );

    // 60-minute archiveAtMs default surfaced.
    assert_eq!(DEFAULT_ARCHIVE_WINDOW_MS, 60 * 60 * 1000);
    let registry = parse_subagent_registry(Some(
        br#"[{"runId":"r1","childSessionId":"x","started":1767312000000,"archiveAtMs":1767315600000}]"#,
    ));
    assert!(registry.records[0].archive_at_is_default_window);

    println!("ACCEPTANCE C4 PASS — literal format corpus parses exactly");
}

// ---------------------------------------------------------------------------
// C5
// ---------------------------------------------------------------------------

#[test]
fn c5_taxonomy_totality() {
    use ArtifactKind as K;
    use RelevanceLevel::{NotRelevant as N, Primary as P, Secondary as S};

    // Every filled/half bullet of the artifact-location table, phase columns
    // in order: characterization (identity), knowledge, interaction
    // (communication), action.
    let table: &[(K, [RelevanceLevel; 4])] = &[
        (K::Config, [P, N, P, N]),
        (K::ConfigBackup, [P, N, S, N]),
        (K::ChannelCredentials, [S, N, P, N]),
        (K::AuthProfiles, [P, N, N, N]),
        (K::DeviceIdentity, [N, N, P, N]),
        (K::WorkspaceIdentityFile, [P, P, N, N]),
        (K::SkillDefinition, [P, S, N, N]),
        (K::DailyMemoryLog, [N, P, S, N]),
        (K::SemanticMemoryDb, [N, P, N, N]),
        (K::SessionIndex, [P, S, P, S]),
        (K::SessionTranscript, [S, P, P, P]),
        (K::DeletedSessionTranscript, [S, P, P, P]),
        (K::InboundMedia, [N, S, P, N]),
        (K::CronJobs, [P, N, N, P]),
        (K::CronRunLog, [N, N, N, P]),
        (K::SubagentRegistry, [N, N, N, P]),
        (K::RuntimeLog, [S, N, S, P]),
    ];
    assert_eq!(table.len(), ArtifactKind::ALL.len(), "table covers every kind");
    for (kind, [char_, know, inter, act]) in table {
        let map = classify_plane(*kind);
        assert_eq!(map.len(), 5, "{kind:?} total over all planes");
        assert_eq!(map[&Plane::IdentityConfiguration], *char_, "{kind:?} characterization");
        assert_eq!(map[&Plane::KnowledgeRecall], *know, "{kind:?} knowledge");
        assert_eq!(map[&Plane::CommunicationIO], *inter, "{kind:?} interaction");
        assert_eq!(map[&Plane::ActionsEffects], *act, "{kind:?} action");
    }

    // Transcripts are cross-cutting: at least three planes at >= secondary,
    // and they carry the reasoning plane directly.
    let transcript = classify_plane(K::SessionTranscript);
    assert_eq!(transcript[&Plane::ReasoningCognition], P);
    assert!(
        transcript.values().filter(|r| **r >= S).count() >= 3,
        "session transcripts map to >= 3 planes"
    );

    println!(
        "ACCEPTANCE C5 PASS — taxonomy total over {} artifact kinds x 5 planes",
        ArtifactKind::ALL.len()
    );
}

// ---------------------------------------------------------------------------
// C6
// ---------------------------------------------------------------------------

#[test]
fn c6_determinism_of_reports() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, _truth) = generate_store(spec, dir.path()).unwrap();

    for command in ["timeline", "antiforensics"] {
        let mut outputs = Vec::new();
        for _ in 0..3 {
            let output = Command::new(BIN)
                .arg(command)
                .arg(&generated.store_dir)
                .arg("--logs")
                .arg(&generated.log_dir)
                .arg("--format")
                .arg("json")
                .output()
                .expect("run binary");
            assert!(output.status.success(), "{command} failed: {output:?}");
            outputs.push(output.stdout);
        }
        assert_eq!(outputs[0], outputs[1], "{command} run 1 vs 2 differ");
        assert_eq!(outputs[1], outputs[2], "{command} run 2 vs 3 differ");
        assert!(!outputs[0].is_empty());
    }
    println!("ACCEPTANCE C6 PASS — timeline and antiforensics JSON byte-identical across 3 runs");
}

// ---------------------------------------------------------------------------
// C7
// ---------------------------------------------------------------------------

#[test]
fn c7_salvage_robustness() {
    use examiner_core::transcript::parse_transcript;

    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, truth) = generate_store(spec, dir.path()).unwrap();
    let base = std::fs::read(
        generated
            .store_dir
            .join(format!("agents/{}/sessions", truth.agent_id))
            .join(
                truth
                    .sessions
                    .iter()
                    .find(|s| s.status_tag == "indexed")
                    .map(|s| s.file_name.clone())
                    .unwrap(),
            ),
    )
    .unwrap();

    let mut rng = ChaCha20Rng::seed_from_u64(0x5A17);
    for i in 0..100 {
        let mut mutated = base.clone();
        if i % 2 == 0 {
            // Random byte flips.
            let flips = rng.gen_range(1..=16);
            for _ in 0..flips {
                if mutated.is_empty() {
                    break;
                }
                let pos = rng.gen_range(0..mutated.len());
                mutated[pos] = (rng.next_u32() & 0xFF) as u8;
            }
        } else {
            // Truncation at an arbitrary byte.
            let cut = rng.gen_range(0..=mutated.len());
            mutated.truncate(cut);
        }

        let (entries, warnings) = parse_transcript(&mutated);
        let non_empty_lines = mutated
            .split(|b| *b == b'\n')
            .filter(|l| l.iter().any(|b| !b.is_ascii_whitespace()))
            .count();
        assert!(
            entries.len() <= non_empty_lines,
            "mutation {i}: more entries than lines"
        );
        assert!(
            entries.len() + warnings.len() >= non_empty_lines,
            "mutation {i}: conservation violated: {} entries + {} warnings < {} lines",
            entries.len(),
            warnings.len(),
            non_empty_lines
        );
    }
    println!("ACCEPTANCE C7 PASS — 100 mutated transcripts parsed without panic; conservation held");
}

// ---------------------------------------------------------------------------
// C8
// ---------------------------------------------------------------------------

#[test]
fn c8_read_only_guarantee() {
    let scenarios = standard_scenarios();
    let spec = scenarios.iter().find(|s| s.name == "full").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (generated, _truth) = generate_store(spec, dir.path()).unwrap();

    let before_store =
        examiner_core::diffkit::snapshot_manifest(&generated.store_dir, "before").unwrap();
    let before_logs =
        examiner_core::diffkit::snapshot_manifest(&generated.log_dir, "before").unwrap();

    for command in ["scan", "timeline", "antiforensics"] {
        let output = Command::new(BIN)
            .arg(command)
            .arg(&generated.store_dir)
            .arg("--logs")
            .arg(&generated.log_dir)
            .arg("--format")
            .arg("json")
            .output()
            .expect("run binary");
        assert!(output.status.success(), "{command} failed");
    }

    let after_store =
        examiner_core::diffkit::snapshot_manifest(&generated.store_dir, "after").unwrap();
    let after_logs =
        examiner_core::diffkit::snapshot_manifest(&generated.log_dir, "after").unwrap();
    let store_changes = diff_manifests(&before_store, &after_store);
    let log_changes = diff_manifests(&before_logs, &after_logs);
    assert!(
        store_changes.records.is_empty(),
        "writes under store root: {:?}",
        store_changes.records
    );
    assert!(
        log_changes.records.is_empty(),
        "writes under log root: {:?}",
        log_changes.records
    );
    println!(
        "ACCEPTANCE C8 PASS — zero filesystem changes under store and log roots during \
         scan + timeline + antiforensics"
    );
}
