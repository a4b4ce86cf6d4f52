//! Ground truth emitted alongside a generated store, and the verification
//! that the analysis pipeline reproduces it exactly.
//!
//! The expectations are constructed by the generator from what it writes,
//! never by running the parsers, so a verification failure always points at
//! the production pipeline (or at an honest generator bug), not at a
//! tautology.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analyze::{CorrelatedStore, LoadedStore};
use crate::common::TimestampMs;
use crate::correlate::EdgeBasis;
use crate::examine::{
    classify_autonomy, detect_antiforensics, reconstruction_boundaries, trace_origin,
    AntiForensicsInputs, AutonomyClass, Severity,
};
use crate::transcript::{
    extract_user_attribution, visible_output, ContentBlock, EntryPayload, ProviderMode, Role,
    SessionFileStatus,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedIndexEntry {
    pub key: String,
    pub session_id: String,
    pub model: Option<String>,
    pub spawned_by: Option<String>,
    pub channel: Option<String>,
    pub has_prompt_report: bool,
    pub has_skills_snapshot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedAttribution {
    pub display_name: String,
    pub handle: Option<String>,
    pub user_id: String,
    pub time: TimestampMs,
    pub message_id: u64,
    pub media_paths: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedSession {
    pub session_id: String,
    pub key: Option<String>,
    pub file_name: String,
    /// "indexed" | "soft_deleted:<ms>" | "orphaned"
    pub status_tag: String,
    pub spawned_by: Option<String>,
    pub entry_tags: Vec<String>,
    pub tool_call_ids: Vec<String>,
    /// Per assistant message, in order: the tag-filtered visible output.
    pub visible_tag_filtered: Vec<String>,
    pub attributions: Vec<ExpectedAttribution>,
    pub native_thinking: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpectedExecution {
    pub tool_call_id: String,
    pub tool_name: String,
    pub session_id: String,
    pub has_details: bool,
    pub is_error: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExpectedEdge {
    pub parent: String,
    pub child: String,
    pub cleanup_observed: bool,
    pub via_spawn: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCronJob {
    pub job_id: String,
    /// "at" | "every" | "cron"
    pub schedule_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCronRun {
    pub job_id: String,
    pub time: TimestampMs,
    /// "isolated" | "main" | "unlocated"
    pub venue_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedCapability {
    pub time: TimestampMs,
    pub tools: BTreeSet<String>,
    /// "snapshot" | "report" | "config"
    pub source_tag: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedMedia {
    pub file_name: String,
    pub original: Option<String>,
    pub uuid: String,
    pub ext: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    pub scenario_name: String,
    pub seed: u64,
    pub agent_id: String,
    pub capture_time: TimestampMs,
    /// (kind tag, path) for every artifact; runtime logs use the bare
    /// file name (they live in the log dir).
    pub artifacts: Vec<(String, String)>,
    /// SHA-256 (hex) per store-tree file, computed over the bytes at
    /// generation time.
    pub manifest_sha256: BTreeMap<String, String>,
    pub index_sessions: Vec<ExpectedIndexEntry>,
    pub sessions: Vec<ExpectedSession>,
    pub executions: Vec<ExpectedExecution>,
    pub expected_unpaired_calls: usize,
    pub expected_unpaired_results: usize,
    pub edges: Vec<ExpectedEdge>,
    pub cron_jobs: Vec<ExpectedCronJob>,
    pub cron_runs: Vec<ExpectedCronRun>,
    pub capabilities: Vec<ExpectedCapability>,
    /// (toolCallId, autonomy tag) for scripted actions with declared labels.
    pub autonomy: Vec<(String, String)>,
    pub media: Vec<ExpectedMedia>,
    pub config_order: Vec<String>,
    pub config_probes: Vec<(TimestampMs, Option<String>)>,
    pub mtime_fallback_paths: Vec<String>,
    pub log_kind_counts: BTreeMap<String, usize>,
    pub logged_tool_call_ids: Vec<String>,
    /// Rules that must be present on the pristine store (R2/R3/R6 arising
    /// from scripted lifecycle events).
    pub expected_rules: Vec<String>,
    pub expected_extra_caveats: usize,
    pub expected_unassigned_units: usize,
    pub expect_zero_parse_warnings: bool,
    pub activity_in_window: bool,
    pub daily_memory_dates: Vec<String>,
    pub identity_files_present: Vec<String>,
    /// (skill name, "global" | "agent-local")
    pub skills: Vec<(String, String)>,
}

fn autonomy_tag(class: AutonomyClass) -> &'static str {
    match class {
        AutonomyClass::DirectlyInstructed => "direct",
        AutonomyClass::InterpretivelyDerived => "interpretive",
        AutonomyClass::AutonomouslyInitiated => "autonomous",
        AutonomyClass::Indeterminate => "indeterminate",
    }
}

/// Compact, order-preserving projection of a parsed transcript entry,
/// mirrored by the generator.
pub fn entry_tag(payload: &EntryPayload) -> String {
    match payload {
        EntryPayload::SessionHeader(h) => format!("header:v{}", h.version),
        EntryPayload::Message(m) => match m.role {
            Role::User => "user".to_string(),
            Role::Assistant => {
                let mut think = 0;
                let mut finals = 0;
                let mut text = 0;
                let mut calls = 0;
                for b in &m.blocks {
                    match b {
                        ContentBlock::Thinking { .. } | ContentBlock::ThinkTagged { .. } => {
                            think += 1
                        }
                        ContentBlock::FinalTagged { .. } => finals += 1,
                        ContentBlock::Text { .. } => text += 1,
                        ContentBlock::ToolCall { .. } => calls += 1,
                    }
                }
                format!("assistant:t{think}f{finals}x{text}c{calls}")
            }
            Role::ToolResult => {
                format!(
                    "tool_result:{}",
                    if m.is_error == Some(true) { "err" } else { "ok" }
                )
            }
        },
        EntryPayload::ModelChange { .. } => "model_change".to_string(),
        EntryPayload::Compaction { .. } => "compaction".to_string(),
        EntryPayload::Custom { .. } => "custom".to_string(),
    }
}

pub fn status_tag(status: &SessionFileStatus) -> String {
    match status {
        SessionFileStatus::Indexed => "indexed".to_string(),
        SessionFileStatus::SoftDeleted { deleted_at } => format!("soft_deleted:{}", deleted_at.0),
        SessionFileStatus::Orphaned => "orphaned".to_string(),
    }
}

impl GroundTruth {
    /// Compare the analysis pipeline's output against this ground truth.
    /// Returns human-readable mismatch descriptions; empty means the
    /// round-trip reproduced the model exactly.
    pub fn verify(
        &self,
        store_dir: &Path,
        loaded: &LoadedStore,
        correlated: &CorrelatedStore,
    ) -> Vec<String> {
        let mut errs: Vec<String> = Vec::new();
        let mut check = |cond: bool, msg: String| {
            if !cond {
                errs.push(msg);
            }
        };

        // Inventory: exact (kind, path) multiset.
        let mut got_artifacts: Vec<(String, String)> = loaded
            .inventory
            .descriptors
            .iter()
            .map(|d| (d.kind.as_str().to_string(), d.path.clone()))
            .collect();
        got_artifacts.sort();
        let mut want_artifacts = self.artifacts.clone();
        want_artifacts.sort();
        if got_artifacts != want_artifacts {
            let got: BTreeSet<_> = got_artifacts.iter().collect();
            let want: BTreeSet<_> = want_artifacts.iter().collect();
            for missing in want.difference(&got) {
                check(false, format!("inventory: missing {missing:?}"));
            }
            for extra in got.difference(&want) {
                check(false, format!("inventory: unexpected {extra:?}"));
            }
        }
        check(
            loaded.inventory.unclassified.is_empty(),
            format!(
                "inventory: unclassified files present: {:?}",
                loaded
                    .inventory
                    .unclassified
                    .iter()
                    .map(|u| &u.path)
                    .collect::<Vec<_>>()
            ),
        );

        // Manifest: independent hash comparison over the real tree.
        match crate::diffkit::snapshot_manifest(store_dir, "verify") {
            Ok(snapshot) => {
                let got: BTreeMap<&String, &String> = snapshot
                    .entries
                    .iter()
                    .filter_map(|(p, e)| e.content_hash.as_ref().map(|h| (p, h)))
                    .collect();
                for (path, want_hash) in &self.manifest_sha256 {
                    match got.get(path) {
                        Some(h) if *h == want_hash => {}
                        Some(h) => check(false, format!("manifest: {path} hash {h} != {want_hash}")),
                        None => check(false, format!("manifest: {path} missing from tree")),
                    }
                }
                check(
                    got.len() == self.manifest_sha256.len(),
                    format!(
                        "manifest: {} files on disk vs {} expected",
                        got.len(),
                        self.manifest_sha256.len()
                    ),
                );
            }
            Err(e) => check(false, format!("manifest: snapshot failed: {e}")),
        }

        // Session index.
        check(
            loaded.index.entries.len() == self.index_sessions.len(),
            format!(
                "index: {} entries vs {} expected",
                loaded.index.entries.len(),
                self.index_sessions.len()
            ),
        );
        for want in &self.index_sessions {
            match loaded.index.entries.get(&want.key) {
                None => check(false, format!("index: key {} missing", want.key)),
                Some(meta) => {
                    check(
                        meta.session_id.as_deref() == Some(want.session_id.as_str()),
                        format!("index {}: sessionId {:?}", want.key, meta.session_id),
                    );
                    check(
                        meta.model_name == want.model,
                        format!("index {}: model {:?} != {:?}", want.key, meta.model_name, want.model),
                    );
                    check(
                        meta.spawned_by == want.spawned_by,
                        format!("index {}: spawnedBy {:?}", want.key, meta.spawned_by),
                    );
                    check(
                        meta.channel == want.channel,
                        format!("index {}: channel {:?}", want.key, meta.channel),
                    );
                    check(
                        meta.system_prompt_report.is_some() == want.has_prompt_report,
                        format!("index {}: prompt report presence", want.key),
                    );
                    check(
                        meta.skills_snapshot.is_some() == want.has_skills_snapshot,
                        format!("index {}: skills snapshot presence", want.key),
                    );
                }
            }
        }

        // Sessions: tags, ids, attribution, visibility.
        check(
            loaded.sessions.len() == self.sessions.len(),
            format!(
                "sessions: {} parsed vs {} expected",
                loaded.sessions.len(),
                self.sessions.len()
            ),
        );
        for want in &self.sessions {
            let Some(got) = loaded
                .sessions
                .iter()
                .find(|s| s.session_id == want.session_id)
            else {
                check(false, format!("session {} not parsed", want.session_id));
                continue;
            };
            check(
                got.file_path.ends_with(&want.file_name),
                format!("session {}: file {}", want.session_id, got.file_path),
            );
            check(
                status_tag(&got.status) == want.status_tag,
                format!(
                    "session {}: status {} != {}",
                    want.session_id,
                    status_tag(&got.status),
                    want.status_tag
                ),
            );
            check(
                got.session_key == want.key,
                format!("session {}: key {:?} != {:?}", want.session_id, got.session_key, want.key),
            );

            let got_tags: Vec<String> = got.entries.iter().map(|e| entry_tag(&e.payload)).collect();
            check(
                got_tags == want.entry_tags,
                format!(
                    "session {}: entry tags\n  got  {:?}\n  want {:?}",
                    want.session_id, got_tags, want.entry_tags
                ),
            );

            let got_ids: Vec<String> = got
                .entries
                .iter()
                .filter_map(|e| e.as_message())
                .filter(|m| m.role == Role::Assistant)
                .flat_map(|m| m.blocks.iter())
                .filter_map(|b| match b {
                    ContentBlock::ToolCall { id, .. } => Some(id.clone()),
                    _ => None,
                })
                .collect();
            check(
                got_ids == want.tool_call_ids,
                format!(
                    "session {}: tool call ids {:?} != {:?}",
                    want.session_id, got_ids, want.tool_call_ids
                ),
            );

            let mut got_attributions = Vec::new();
            for entry in &got.entries {
                let Some(m) = entry.as_message() else { continue };
                if m.role != Role::User {
                    continue;
                }
                let (attr, warns) = extract_user_attribution(m);
                check(
                    warns.is_empty(),
                    format!("session {}: attribution warnings {warns:?}", want.session_id),
                );
                if let Some(a) = attr {
                    got_attributions.push(ExpectedAttribution {
                        display_name: a.display_name,
                        handle: a.handle,
                        user_id: a.platform_user_id,
                        time: a.message_time,
                        message_id: a.platform_message_id.unwrap_or(0),
                        media_paths: a.media_refs.into_iter().map(|m| m.path).collect(),
                    });
                }
            }
            check(
                got_attributions == want.attributions,
                format!(
                    "session {}: attributions\n  got  {:?}\n  want {:?}",
                    want.session_id, got_attributions, want.attributions
                ),
            );

            let assistant_msgs: Vec<_> = got
                .entries
                .iter()
                .filter_map(|e| e.as_message())
                .filter(|m| m.role == Role::Assistant)
                .collect();
            let got_visible: Vec<String> = assistant_msgs
                .iter()
                .map(|m| visible_output(m, ProviderMode::TagFiltered))
                .collect();
            check(
                got_visible == want.visible_tag_filtered,
                format!(
                    "session {}: tag-filtered visibility\n  got  {:?}\n  want {:?}",
                    want.session_id, got_visible, want.visible_tag_filtered
                ),
            );
            for m in &assistant_msgs {
                let filtered = visible_output(m, ProviderMode::TagFiltered);
                let native = visible_output(m, ProviderMode::NativeThinking);
                check(
                    native.contains(&filtered),
                    format!(
                        "session {}: native output does not contain tag-filtered output",
                        want.session_id
                    ),
                );
                // Thinking sentinels must never surface in filtered output.
                for block in &m.blocks {
                    if let ContentBlock::Thinking { text } | ContentBlock::ThinkTagged { text } =
                        block
                    {
                        check(
                            text.len() < 8 || !filtered.contains(text.as_str()),
                            format!(
                                "session {}: thinking text leaked into filtered output",
                                want.session_id
                            ),
                        );
                    }
                }
            }
        }

        // Pairings.
        let mut got_execs: Vec<ExpectedExecution> = Vec::new();
        let mut unpaired_calls = 0;
        let mut unpaired_results = 0;
        for pairing in correlated.pairings.values() {
            unpaired_calls += pairing.unpaired_calls.len();
            unpaired_results += pairing.unpaired_results.len();
            for e in &pairing.executions {
                got_execs.push(ExpectedExecution {
                    tool_call_id: e.tool_call_id.clone(),
                    tool_name: e.tool_name.clone(),
                    session_id: e.session_id.clone(),
                    has_details: e.details.is_some(),
                    is_error: e.is_error == Some(true),
                });
            }
        }
        got_execs.sort();
        let mut want_execs = self.executions.clone();
        want_execs.sort();
        check(
            got_execs == want_execs,
            format!(
                "executions mismatch\n  got  {} items\n  want {} items",
                got_execs.len(),
                want_execs.len()
            ),
        );
        check(
            unpaired_calls == self.expected_unpaired_calls,
            format!("unpaired calls {unpaired_calls} != {}", self.expected_unpaired_calls),
        );
        check(
            unpaired_results == self.expected_unpaired_results,
            format!(
                "unpaired results {unpaired_results} != {}",
                self.expected_unpaired_results
            ),
        );

        // Delegation edges.
        let mut got_edges: Vec<ExpectedEdge> = correlated
            .graph
            .edges
            .iter()
            .map(|e| ExpectedEdge {
                parent: e.parent.clone(),
                child: e.child.clone(),
                cleanup_observed: e.cleanup_observed,
                via_spawn: e.bases.contains(&EdgeBasis::SpawnCall),
            })
            .collect();
        got_edges.sort();
        let mut want_edges = self.edges.clone();
        want_edges.sort();
        check(
            got_edges == want_edges,
            format!("edges\n  got  {got_edges:?}\n  want {want_edges:?}"),
        );
        check(
            correlated.graph.cycles.is_empty(),
            format!("unexpected delegation cycles {:?}", correlated.graph.cycles),
        );

        // Cron.
        let got_jobs: Vec<ExpectedCronJob> = loaded
            .cron
            .jobs
            .iter()
            .map(|j| ExpectedCronJob {
                job_id: j.job_id.clone(),
                schedule_tag: match &j.schedule {
                    Some(crate::peripheral::CronSchedule::At { .. }) => "at".into(),
                    Some(crate::peripheral::CronSchedule::Every { .. }) => "every".into(),
                    Some(crate::peripheral::CronSchedule::CronExpr { .. }) => "cron".into(),
                    None => "none".into(),
                },
            })
            .collect();
        check(
            got_jobs == self.cron_jobs,
            format!("cron jobs\n  got  {got_jobs:?}\n  want {:?}", self.cron_jobs),
        );
        let got_runs: Vec<ExpectedCronRun> = correlated
            .cron_attributions
            .iter()
            .map(|a| ExpectedCronRun {
                job_id: a.job_id.clone(),
                time: a.run_time,
                venue_tag: match a.venue {
                    crate::correlate::CronVenue::IsolatedSession => "isolated".into(),
                    crate::correlate::CronVenue::MainSession => "main".into(),
                    crate::correlate::CronVenue::Unlocated => "unlocated".into(),
                },
            })
            .collect();
        check(
            got_runs == self.cron_runs,
            format!("cron runs\n  got  {got_runs:?}\n  want {:?}", self.cron_runs),
        );

        // Capability history.
        let timeline = crate::examine::capability_timeline(
            &loaded.logs,
            &loaded.sessions,
            &loaded.index,
            &loaded.config_history,
        );
        let got_caps: Vec<ExpectedCapability> = timeline
            .entries
            .iter()
            .map(|e| ExpectedCapability {
                time: e.time,
                tools: e.capability_set.clone(),
                source_tag: if e.source.starts_with("tool_schema_snapshot") {
                    "snapshot".into()
                } else if e.source.starts_with("system_prompt_report") {
                    "report".into()
                } else {
                    "config".into()
                },
            })
            .collect();
        check(
            got_caps == self.capabilities,
            format!(
                "capabilities\n  got  {got_caps:?}\n  want {:?}",
                self.capabilities
            ),
        );

        // Autonomy labels for scripted actions.
        for (tool_call_id, want_tag) in &self.autonomy {
            let Some((session_id, exec)) = correlated.pairings.iter().find_map(|(sid, p)| {
                p.executions
                    .iter()
                    .find(|e| &e.tool_call_id == tool_call_id)
                    .map(|e| (sid.clone(), e))
            }) else {
                check(false, format!("autonomy: execution {tool_call_id} not found"));
                continue;
            };
            let session = loaded
                .sessions
                .iter()
                .find(|s| s.session_id == session_id)
                .expect("session of execution");
            let chain = trace_origin(exec, session, &correlated.graph, &correlated.cron_attributions);
            let assessment = classify_autonomy(&chain, exec);
            check(
                autonomy_tag(assessment.class) == want_tag,
                format!(
                    "autonomy {tool_call_id}: got {} (origin {:?}, rule {}), want {want_tag}",
                    autonomy_tag(assessment.class),
                    chain.origin_kind,
                    chain.rule
                ),
            );
        }

        // Media filename grammar.
        for want in &self.media {
            match crate::transcript::parse_media_filename(&want.file_name) {
                Ok(parsed) => {
                    check(
                        parsed.original.as_deref() == want.original.as_deref()
                            && parsed.uuid.to_string() == want.uuid
                            && parsed.ext == want.ext,
                        format!("media {}: parsed {parsed:?}", want.file_name),
                    );
                }
                Err(e) => check(false, format!("media {}: {e}", want.file_name)),
            }
        }

        // Config history and point-in-time queries.
        let got_order: Vec<String> = loaded
            .config_history
            .snapshots
            .iter()
            .map(|s| s.source_path.clone())
            .collect();
        check(
            got_order == self.config_order,
            format!("config order {got_order:?} != {:?}", self.config_order),
        );
        let got_fallback: Vec<String> = loaded
            .config_history
            .snapshots
            .iter()
            .filter(|s| s.ordering_basis == crate::peripheral::OrderingBasis::MtimeFallback)
            .map(|s| s.source_path.clone())
            .collect();
        check(
            got_fallback == self.mtime_fallback_paths,
            format!(
                "mtime-fallback {got_fallback:?} != {:?}",
                self.mtime_fallback_paths
            ),
        );
        for (t, want_path) in &self.config_probes {
            let got = crate::peripheral::config_at(&loaded.config_history, *t)
                .map(|s| s.source_path.clone());
            check(
                got.as_deref() == want_path.as_deref(),
                format!("config_at({}) = {got:?}, want {want_path:?}", t.to_rfc3339()),
            );
        }

        // Log classification counts.
        let mut got_counts: BTreeMap<String, usize> = BTreeMap::new();
        for log in &loaded.logs {
            for ev in &log.events {
                let tag = match ev.kind {
                    crate::peripheral::LogEventKind::ToolStart => "tool_start",
                    crate::peripheral::LogEventKind::ToolEnd => "tool_end",
                    crate::peripheral::LogEventKind::ToolSchemaSnapshot => "tool_schema_snapshot",
                    crate::peripheral::LogEventKind::RunStage => "run_stage",
                    crate::peripheral::LogEventKind::ChannelHealth => "channel_health",
                    crate::peripheral::LogEventKind::Other => "other",
                };
                *got_counts.entry(tag.to_string()).or_default() += 1;
            }
        }
        check(
            got_counts == self.log_kind_counts,
            format!(
                "log kind counts\n  got  {got_counts:?}\n  want {:?}",
                self.log_kind_counts
            ),
        );

        // Findings: pristine precision plus required lifecycle rules.
        let findings = detect_antiforensics(&AntiForensicsInputs {
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
        });
        let anomalous: Vec<_> = findings
            .iter()
            .filter(|f| f.severity == Severity::Anomalous)
            .collect();
        check(
            anomalous.is_empty(),
            format!(
                "pristine store produced anomalous findings: {:?}",
                anomalous.iter().map(|f| (&f.rule, &f.summary)).collect::<Vec<_>>()
            ),
        );
        let got_rules: BTreeSet<&str> = findings.iter().map(|f| f.rule.as_str()).collect();
        for rule in &self.expected_rules {
            check(
                got_rules.contains(rule.as_str()),
                format!("expected rule {rule} not emitted (got {got_rules:?})"),
            );
        }

        // Reconstruction boundaries.
        let caveats = reconstruction_boundaries(
            &loaded.index,
            &correlated.associations,
            &correlated.cron_attributions,
        );
        check(
            caveats.len() == 3 + self.expected_extra_caveats,
            format!(
                "boundaries: {} caveats, want {}: {caveats:?}",
                caveats.len(),
                3 + self.expected_extra_caveats
            ),
        );

        // Run associations.
        let unassigned = correlated
            .associations
            .iter()
            .filter(|a| a.session_id.is_none())
            .count();
        check(
            unassigned == self.expected_unassigned_units,
            format!(
                "unassigned associations {unassigned} != {}",
                self.expected_unassigned_units
            ),
        );

        // Workspace.
        let got_dates: Vec<String> = loaded
            .workspace
            .daily_memory
            .iter()
            .map(|f| f.date.to_string())
            .collect();
        check(
            got_dates == self.daily_memory_dates,
            format!("daily memory {got_dates:?} != {:?}", self.daily_memory_dates),
        );
        let got_present: Vec<String> = loaded
            .workspace
            .identity_files
            .iter()
            .filter(|(_, f)| f.present)
            .map(|(n, _)| n.clone())
            .collect();
        check(
            got_present == self.identity_files_present,
            format!(
                "identity files {got_present:?} != {:?}",
                self.identity_files_present
            ),
        );
        let got_skills: Vec<(String, String)> = loaded
            .workspace
            .skills
            .iter()
            .map(|s| {
                (
                    s.name.clone(),
                    match s.scope {
                        crate::peripheral::SkillScope::Global => "global".to_string(),
                        crate::peripheral::SkillScope::AgentLocal => "agent-local".to_string(),
                    },
                )
            })
            .collect();
        check(
            got_skills == self.skills,
            format!("skills {got_skills:?} != {:?}", self.skills),
        );

        // Parse hygiene: pristine stores parse without warnings.
        if self.expect_zero_parse_warnings {
            check(
                loaded.warnings.is_empty(),
                format!("loader warnings: {:?}", loaded.warnings),
            );
            for s in &loaded.sessions {
                check(
                    s.warnings.is_empty(),
                    format!("session {} warnings: {:?}", s.session_id, s.warnings),
                );
            }
            for log in &loaded.logs {
                check(
                    log.warnings.is_empty(),
                    format!("log {} warnings: {:?}", log.file_name, log.warnings),
                );
            }
        }

        errs
    }
}
