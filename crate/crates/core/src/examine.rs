//! Investigator-facing conclusions: anti-forensics indicators, capability
//! evolution, context estimates, origin chains, autonomy classification, and
//! the standing limits of any reconstruction.
//!
//! Every conclusion is a deterministic rule application; the rule id rides
//! along in the finding so a report can be defended line by line.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::common::{EvidenceRef, TimestampMs};
use crate::correlate::{
    pair_tool_calls, CronAttribution, CronVenue, DelegationGraph, ParsedSession, RunAssociation,
    ToolExecution,
};
use crate::peripheral::{
    ConfigHistory, CronState, LogEventKind, ParsedLogFile, RetentionFlag, RetentionReport,
    SubagentRegistry, WorkspaceSnapshot,
};
use crate::transcript::{
    ContentBlock, EntryPayload, InjectedFile, Role, SessionFileStatus, SessionIndex,
    SessionResolution,
};

// ---------------------------------------------------------------------------
// Findings
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingCategory {
    AntiForensics,
    CapabilityChange,
    ContextGap,
    AttributionConflict,
    RetentionAnomaly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Info,
    Noteworthy,
    Anomalous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    /// Stable content-derived id (`F-` + 12 hex of a SHA-256 over rule,
    /// summary, and evidence).
    pub id: String,
    pub rule: String,
    pub category: FindingCategory,
    pub severity: Severity,
    pub summary: String,
    pub evidence: Vec<EvidenceRef>,
    pub confidence_basis: String,
}

fn finding_id(rule: &str, summary: &str, evidence: &[EvidenceRef]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(rule.as_bytes());
    hasher.update(b"\x1f");
    hasher.update(summary.as_bytes());
    for e in evidence {
        hasher.update(b"\x1f");
        hasher.update(e.to_string().as_bytes());
    }
    format!("F-{}", &hex::encode(hasher.finalize())[..12])
}

fn make_finding(
    rule: &str,
    category: FindingCategory,
    severity: Severity,
    summary: String,
    evidence: Vec<EvidenceRef>,
    confidence_basis: String,
) -> Finding {
    debug_assert!(!evidence.is_empty(), "findings must cite evidence");
    Finding {
        id: finding_id(rule, &summary, &evidence),
        rule: rule.to_string(),
        category,
        severity,
        summary,
        evidence,
        confidence_basis,
    }
}

// ---------------------------------------------------------------------------
// Anti-forensics detection
// ---------------------------------------------------------------------------

pub struct AntiForensicsInputs<'a> {
    pub logs: &'a [ParsedLogFile],
    pub resolution: &'a SessionResolution,
    pub sessions: &'a [ParsedSession],
    pub index: &'a SessionIndex,
    /// Store-relative path of the session index file, for evidence refs.
    pub index_path: &'a str,
    pub cron: &'a CronState,
    pub registry: &'a SubagentRegistry,
    pub retention: &'a RetentionReport,
    pub graph: &'a DelegationGraph,
    pub capture_time: TimestampMs,
}

/// Apply the anti-forensics rule set:
///
/// - R1 (Anomalous): tool call in logs without transcript counterpart.
/// - R2 (Noteworthy): soft-deleted transcript (lifecycle-normal).
/// - R3 (Noteworthy): orphaned transcript (on disk, not indexed).
/// - R4 (Anomalous): dangling index entry (transcript file missing).
/// - R5 (Anomalous): no logs in the retention window despite session
///   activity inside it.
/// - R6 (Noteworthy): cron run whose job no longer exists.
/// - D1 (Anomalous) / D2 (Noteworthy): delegation cycle / conflicting parents.
pub fn detect_antiforensics(inputs: &AntiForensicsInputs) -> Vec<Finding> {
    let mut findings = Vec::new();

    // Transcript-side toolCallId sets, across every transcript on disk
    // (indexed, orphaned, and soft-deleted alike).
    let mut call_ids: BTreeSet<&str> = BTreeSet::new();
    let mut result_ids: BTreeSet<&str> = BTreeSet::new();
    for session in inputs.sessions {
        for entry in &session.entries {
            if let Some(m) = entry.as_message() {
                match m.role {
                    Role::Assistant => {
                        for b in &m.blocks {
                            if let ContentBlock::ToolCall { id, .. } = b {
                                call_ids.insert(id);
                            }
                        }
                    }
                    Role::ToolResult => {
                        if let Some(id) = &m.tool_call_id {
                            result_ids.insert(id);
                        }
                    }
                    Role::User => {}
                }
            }
        }
    }

    // R1: collect log tool events per toolCallId.
    let mut log_tool_events: BTreeMap<&str, Vec<(&ParsedLogFile, &crate::peripheral::LogEvent)>> =
        BTreeMap::new();
    for log in inputs.logs {
        for ev in &log.events {
            if matches!(ev.kind, LogEventKind::ToolStart | LogEventKind::ToolEnd) {
                if let Some(id) = &ev.tool_call_id {
                    log_tool_events.entry(id).or_default().push((log, ev));
                }
            }
        }
    }
    for (id, events) in &log_tool_events {
        let evidence: Vec<EvidenceRef> = events
            .iter()
            .map(|(log, ev)| EvidenceRef::line(&log.file_name, ev.line))
            .collect();
        let has_end = events
            .iter()
            .any(|(_, ev)| ev.kind == LogEventKind::ToolEnd);
        if !call_ids.contains(id) && !result_ids.contains(id) {
            findings.push(make_finding(
                "R1",
                FindingCategory::AntiForensics,
                Severity::Anomalous,
                format!(
                    "tool call {id} appears in runtime logs but has no counterpart in any session transcript"
                ),
                evidence,
                "R1: logged toolCallId absent from every transcript on disk; \
                 consistent with transcript line deletion"
                    .into(),
            ));
        } else if has_end && call_ids.contains(id) && !result_ids.contains(id) {
            findings.push(make_finding(
                "R1",
                FindingCategory::AntiForensics,
                Severity::Anomalous,
                format!(
                    "tool call {id} completed per runtime logs but its toolResult is missing from the transcript"
                ),
                evidence,
                "R1: log records tool end, transcript retains the call but not \
                 the result; consistent with selective line deletion"
                    .into(),
            ));
        }
    }

    // R2 / R3 over the session-file resolution. Evidence points at the
    // parsed transcript when we have it, else at the bare file name.
    for record in &inputs.resolution.records {
        let file_path = inputs
            .sessions
            .iter()
            .find(|s| s.session_id == record.session_id && s.status == record.status)
            .map(|s| s.file_path.clone())
            .unwrap_or_else(|| record.file_name.clone());
        let evidence = vec![EvidenceRef::file(file_path)];
        match &record.status {
            SessionFileStatus::SoftDeleted { deleted_at } => findings.push(make_finding(
                "R2",
                FindingCategory::AntiForensics,
                Severity::Noteworthy,
                format!(
                    "session {} was soft-deleted at {} (transcript retained with suffix)",
                    record.session_id,
                    deleted_at.to_rfc3339()
                ),
                evidence,
                "R2: .deleted.<timestamp> rename is the normal deletion lifecycle; \
                 content remains recoverable"
                    .into(),
            )),
            SessionFileStatus::Orphaned => findings.push(make_finding(
                "R3",
                FindingCategory::AntiForensics,
                Severity::Noteworthy,
                format!(
                    "transcript {} exists on disk but session {} is absent from the index",
                    record.file_name, record.session_id
                ),
                evidence,
                "R3: index entry removed while the transcript survives; common \
                 after subagent cleanup, otherwise worth explaining"
                    .into(),
            )),
            SessionFileStatus::Indexed => {}
        }
    }

    // R4: dangling index entries.
    for dangling in &inputs.resolution.dangling {
        findings.push(make_finding(
            "R4",
            FindingCategory::AntiForensics,
            Severity::Anomalous,
            format!(
                "index entry {} references session {} but no transcript file exists",
                dangling.session_key, dangling.session_id
            ),
            vec![EvidenceRef::json_path(
                inputs.index_path,
                dangling.session_key.clone(),
            )],
            "R4: transcripts are never removed by the normal lifecycle while \
             indexed; a missing file indicates out-of-band deletion"
                .into(),
        ));
    }

    // R5: missing expected logs, gated on actual activity inside the window.
    if inputs
        .retention
        .flags
        .contains(&RetentionFlag::MissingExpectedLogs)
    {
        let window_start = inputs.retention.window_start;
        let window_end = inputs.retention.window_end;
        let activity: Vec<EvidenceRef> = inputs
            .sessions
            .iter()
            .flat_map(|s| {
                s.entries.iter().filter_map(move |e| {
                    e.timestamp()
                        .filter(|t| *t >= window_start && *t <= window_end)
                        .map(|_| EvidenceRef::line(&s.file_path, e.line))
                })
            })
            .take(5)
            .collect();
        if !activity.is_empty() {
            findings.push(make_finding(
                "R5",
                FindingCategory::RetentionAnomaly,
                Severity::Anomalous,
                format!(
                    "no runtime logs survive inside the 24-hour retention window [{} .. {}] despite session activity in it",
                    window_start.to_rfc3339(),
                    window_end.to_rfc3339()
                ),
                activity,
                "R5: the retention policy deletes only logs older than 24 hours, \
                 so in-window activity should have left log files"
                    .into(),
            ));
        }
    }

    // R6: cron runs for jobs that no longer exist.
    let job_ids: BTreeSet<&str> = inputs.cron.jobs.iter().map(|j| j.job_id.as_str()).collect();
    let mut orphan_runs: BTreeMap<&str, Vec<EvidenceRef>> = BTreeMap::new();
    for run in &inputs.cron.runs {
        if !job_ids.contains(run.job_id.as_str()) {
            orphan_runs
                .entry(&run.job_id)
                .or_default()
                .push(EvidenceRef::line(
                    format!("cron/runs/{}.jsonl", run.job_id),
                    run.line,
                ));
        }
    }
    for (job_id, evidence) in orphan_runs {
        findings.push(make_finding(
            "R6",
            FindingCategory::AntiForensics,
            Severity::Noteworthy,
            format!("run history exists for cron job {job_id}, which is no longer defined"),
            evidence,
            "R6: job deleted after execution; the runs file is itself evidence \
             of the removed automation"
                .into(),
        ));
    }

    // D1 / D2: delegation anomalies.
    for cycle in &inputs.graph.cycles {
        findings.push(make_finding(
            "D1",
            FindingCategory::AttributionConflict,
            Severity::Anomalous,
            format!("delegation cycle detected: {}", cycle.join(" -> ")),
            vec![EvidenceRef::file(inputs.index_path)],
            "D1: spawn relationships must be acyclic; a cycle implies \
             manufactured or corrupted linkage"
                .into(),
        ));
    }
    let mut conflicted: BTreeSet<&str> = BTreeSet::new();
    for edge in &inputs.graph.edges {
        if edge.conflict && conflicted.insert(&edge.child) {
            findings.push(make_finding(
                "D2",
                FindingCategory::AttributionConflict,
                Severity::Noteworthy,
                format!("session {} is claimed by more than one parent", edge.child),
                vec![EvidenceRef::file(inputs.index_path)],
                "D2: conflicting spawn evidence; both edges retained".into(),
            ));
        }
    }

    findings.sort_by(|a, b| {
        (std::cmp::Reverse(a.severity), &a.rule, &a.summary)
            .cmp(&(std::cmp::Reverse(b.severity), &b.rule, &b.summary))
    });
    findings
}

// ---------------------------------------------------------------------------
// Capability evolution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapabilityEntry {
    pub time: TimestampMs,
    pub capability_set: BTreeSet<String>,
    /// Where the set came from: a schema snapshot, a prompt report, or a
    /// carried-forward set across a config write.
    pub source: String,
    pub added: Vec<String>,
    pub removed: Vec<String>,
    pub evidence: EvidenceRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config_note: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CapabilityTimeline {
    pub entries: Vec<CapabilityEntry>,
    /// Tools that were exposed at some point and are absent from the latest
    /// observed set.
    pub orphaned_tools: Vec<String>,
}

/// Merge schema snapshots, prompt-report tool lists, and configuration
/// writes into one ordered capability history with consecutive-set deltas.
pub fn capability_timeline(
    logs: &[ParsedLogFile],
    sessions: &[ParsedSession],
    index: &SessionIndex,
    config_history: &ConfigHistory,
) -> CapabilityTimeline {
    struct Probe {
        time: TimestampMs,
        set: Option<BTreeSet<String>>,
        source: String,
        evidence: EvidenceRef,
        config_note: Option<String>,
    }
    let mut probes: Vec<Probe> = Vec::new();

    for log in logs {
        for ev in &log.events {
            if ev.kind == LogEventKind::ToolSchemaSnapshot {
                probes.push(Probe {
                    time: ev.time,
                    set: Some(ev.tool_names.iter().cloned().collect()),
                    source: "tool_schema_snapshot".into(),
                    evidence: EvidenceRef::line(&log.file_name, ev.line),
                    config_note: None,
                });
            }
        }
    }

    for (key, meta) in &index.entries {
        let Some(report) = &meta.system_prompt_report else {
            continue;
        };
        let Some(tools) = &report.tool_names else {
            continue;
        };
        // The report reflects the latest recorded state of the session, so
        // it is pinned to the session's last entry time.
        let time = meta
            .session_id
            .as_deref()
            .and_then(|id| sessions.iter().find(|s| s.session_id == id))
            .and_then(|s| s.entries.iter().rev().find_map(|e| e.timestamp()))
            .unwrap_or(TimestampMs(0));
        let agent = crate::transcript::parse_session_key(key)
            .agent_id
            .unwrap_or_else(|| "main".to_string());
        probes.push(Probe {
            time,
            set: Some(tools.iter().cloned().collect()),
            source: format!("system_prompt_report:{key}"),
            evidence: EvidenceRef::json_path(
                format!("agents/{agent}/sessions/sessions.json"),
                format!("{key}.systemPromptReport.toolNames"),
            ),
            config_note: None,
        });
    }

    for window in config_history.snapshots.windows(2) {
        let deltas = crate::peripheral::diff_configs(&window[0].config, &window[1].config);
        if deltas.is_empty() {
            continue;
        }
        probes.push(Probe {
            time: window[1].ordering_key,
            set: None,
            source: format!("config:{}", window[1].source_path),
            evidence: EvidenceRef::json_path(&window[1].source_path, "meta.lastTouchedAt"),
            config_note: Some(format!("{} configuration change(s)", deltas.len())),
        });
    }

    probes.sort_by(|a, b| (a.time, &a.source).cmp(&(b.time, &b.source)));

    let mut timeline = CapabilityTimeline::default();
    let mut current: BTreeSet<String> = BTreeSet::new();
    let mut ever: BTreeSet<String> = BTreeSet::new();
    let mut have_set = false;
    for probe in probes {
        let set = match probe.set {
            Some(s) => s,
            None => current.clone(), // config write: capability set carried forward
        };
        let (added, removed) = if have_set {
            (
                set.difference(&current).cloned().collect::<Vec<_>>(),
                current.difference(&set).cloned().collect::<Vec<_>>(),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        ever.extend(set.iter().cloned());
        timeline.entries.push(CapabilityEntry {
            time: probe.time,
            capability_set: set.clone(),
            source: probe.source,
            added,
            removed,
            evidence: probe.evidence,
            config_note: probe.config_note,
        });
        current = set;
        have_set = true;
    }
    timeline.orphaned_tools = ever.difference(&current).cloned().collect();
    timeline
}

/// Orphaned or removed tools become findings for the capability report.
pub fn capability_findings(timeline: &CapabilityTimeline) -> Vec<Finding> {
    let mut findings = Vec::new();
    for entry in &timeline.entries {
        if !entry.removed.is_empty() {
            findings.push(make_finding(
                "C1",
                FindingCategory::CapabilityChange,
                Severity::Noteworthy,
                format!(
                    "capability set shrank at {}: removed {}",
                    entry.time.to_rfc3339(),
                    entry.removed.join(", ")
                ),
                vec![entry.evidence.clone()],
                "C1: consecutive capability snapshots differ; earlier tools no \
                 longer exposed"
                    .into(),
            ));
        }
    }
    findings
}

// ---------------------------------------------------------------------------
// Context reconstruction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayBasis {
    ReadToolPayload,
    WriteToolPayload,
    EditReplay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayedFile {
    pub content_as_of: TimestampMs,
    pub basis: ReplayBasis,
    pub content: String,
    pub evidence: EvidenceRef,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ContextEstimate {
    pub at_time: TimestampMs,
    pub injected_files: Vec<InjectedFile>,
    pub replayed_files: BTreeMap<String, ReplayedFile>,
    pub compaction_boundaries: Vec<EvidenceRef>,
    pub caveats: Vec<String>,
}

fn tool_path_argument(arguments: &Value) -> Option<String> {
    arguments
        .as_object()
        .and_then(|o| crate::jsonx::pick_str(o, &["path", "file", "filePath", "file_path"]))
}

/// Approximate the knowledge available to the model at time `t`: injected
/// files per the prompt report, plus file contents replayed from read/write/
/// edit tool payloads up to `t`. Caveats spell out what the estimate cannot
/// know.
pub fn reconstruct_context(
    session: &ParsedSession,
    meta: Option<&crate::transcript::SessionMeta>,
    workspace: &WorkspaceSnapshot,
    t: TimestampMs,
) -> ContextEstimate {
    let mut estimate = ContextEstimate {
        at_time: t,
        ..Default::default()
    };

    match meta.and_then(|m| m.system_prompt_report.as_ref()) {
        Some(report) => {
            estimate.injected_files = report.injected_files.clone();
            estimate.caveats.push(
                "injected-file report may only reflect the latest recorded state, \
                 not the state at the requested time"
                    .into(),
            );
        }
        None => estimate.caveats.push(
            "no prompt report recorded for this session (prompt reporting may not \
             persist reliably); injected context approximated from tool replay alone"
                .into(),
        ),
    }

    // Replay file-tool payloads in transcript order, stopping at t.
    let pairing = pair_tool_calls(session);
    let mut executions: Vec<&ToolExecution> = pairing.executions.iter().collect();
    executions.sort_by_key(|e| e.call_line);
    let mut last_agent_write: BTreeMap<String, TimestampMs> = BTreeMap::new();
    for exec in executions {
        let Some(path) = tool_path_argument(&exec.arguments) else {
            continue;
        };
        match exec.tool_name.as_str() {
            "write" => {
                let Some(time) = exec.call_time.filter(|ct| *ct <= t) else {
                    continue;
                };
                let content = exec
                    .arguments
                    .get("content")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string();
                last_agent_write.insert(path.clone(), time);
                estimate.replayed_files.insert(
                    path,
                    ReplayedFile {
                        content_as_of: time,
                        basis: ReplayBasis::WriteToolPayload,
                        content,
                        evidence: exec.call_ref.clone(),
                    },
                );
            }
            "read" => {
                let Some(time) = exec.result_time.filter(|rt| *rt <= t) else {
                    continue;
                };
                let Some(content) = exec.result_content.clone() else {
                    continue;
                };
                estimate.replayed_files.insert(
                    path,
                    ReplayedFile {
                        content_as_of: time,
                        basis: ReplayBasis::ReadToolPayload,
                        content,
                        evidence: exec.result_ref.clone().unwrap_or_else(|| exec.call_ref.clone()),
                    },
                );
            }
            "edit" => {
                let Some(time) = exec.call_time.filter(|ct| *ct <= t) else {
                    continue;
                };
                let old = exec
                    .arguments
                    .get("old")
                    .or_else(|| exec.arguments.get("old_string"))
                    .and_then(Value::as_str);
                let new = exec
                    .arguments
                    .get("new")
                    .or_else(|| exec.arguments.get("new_string"))
                    .and_then(Value::as_str);
                match (estimate.replayed_files.get(&path), old, new) {
                    (Some(prev), Some(old), Some(new)) => {
                        let content = prev.content.replacen(old, new, 1);
                        last_agent_write.insert(path.clone(), time);
                        estimate.replayed_files.insert(
                            path,
                            ReplayedFile {
                                content_as_of: time,
                                basis: ReplayBasis::EditReplay,
                                content,
                                evidence: exec.call_ref.clone(),
                            },
                        );
                    }
                    _ => estimate.caveats.push(format!(
                        "edit to {path} observed without known base content; post-edit state unknown"
                    )),
                }
            }
            _ => {}
        }
    }

    for entry in &session.entries {
        if let EntryPayload::Compaction { timestamp, .. } = &entry.payload {
            if timestamp.map(|ts| ts <= t).unwrap_or(true) {
                estimate
                    .compaction_boundaries
                    .push(EvidenceRef::line(&session.file_path, entry.line));
            }
        }
    }
    if !estimate.compaction_boundaries.is_empty() {
        estimate.caveats.push(format!(
            "{} compaction boundary(ies) at or before the requested time: the \
             live context was summarized and may omit earlier detail",
            estimate.compaction_boundaries.len()
        ));
    }

    // Daily-memory loading is a documented convention, not a recorded fact.
    let recent: Vec<&crate::peripheral::DailyMemoryFile> = workspace
        .daily_memory
        .iter()
        .rev()
        .take(2)
        .collect();
    if !recent.is_empty() {
        let names: Vec<&str> = recent.iter().rev().map(|f| f.path.as_str()).collect();
        estimate.caveats.push(format!(
            "by convention the agent loads the two most recent daily memory files \
             at session start (inference from workspace instructions, not a recorded \
             fact): {}",
            names.join(", ")
        ));
    }

    // External modification: on-disk mtime past the last agent write.
    for (name, file) in &workspace.identity_files {
        let (Some(mtime), true) = (file.mtime, file.present) else {
            continue;
        };
        let written = estimate
            .replayed_files
            .iter()
            .find(|(p, _)| p.ends_with(name))
            .map(|(_, r)| r.content_as_of);
        if let Some(w) = written {
            if mtime > w {
                estimate.caveats.push(format!(
                    "external modification possible for {name}: on-disk mtime {} is \
                     later than the last agent write {}",
                    mtime.to_rfc3339(),
                    w.to_rfc3339()
                ));
            }
        }
    }

    estimate.caveats.push(
        "the exact context window assembled at inference time is not stored \
         persistently; this estimate is an approximation"
            .into(),
    );
    estimate
}

// ---------------------------------------------------------------------------
// Origin tracing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginKind {
    UserMessage,
    MemoryEntry,
    CronTrigger,
    PriorReasoning,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginLink {
    pub evidence: EvidenceRef,
    pub role: String,
    pub excerpt: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginChain {
    pub tool_call_id: String,
    pub origin_kind: OriginKind,
    /// Ordered by transcript position, ending at the action itself.
    pub links: Vec<OriginLink>,
    pub rule: String,
}

fn excerpt(text: &str) -> String {
    let collapsed: String = text.split_whitespace().collect::<Vec<_>>().join(" ");
    if collapsed.chars().count() > 160 {
        collapsed.chars().take(157).collect::<String>() + "..."
    } else {
        collapsed
    }
}

/// Walk backward from a tool execution to the event that prompted it.
///
/// Rules, first match wins:
/// - O1 CronTrigger: the session is a cron venue, or the seeding entry is a
///   cron-injected event.
/// - O2 PriorReasoning: the session is an agent-spawned child; its user-role
///   seed is agent-authored.
/// - O3 UserMessage: a genuine user entry precedes the action in-session.
/// - O4 PriorReasoning: only assistant entries precede the action.
/// - O5 MemoryEntry: reasoning in this run names a memory file that was read.
/// - O6 Unresolved.
pub fn trace_origin(
    action: &ToolExecution,
    session: &ParsedSession,
    graph: &DelegationGraph,
    cron_attributions: &[CronAttribution],
) -> OriginChain {
    let call_line = action.call_line;
    let before: Vec<&crate::transcript::TranscriptEntry> = session
        .entries
        .iter()
        .filter(|e| e.line <= call_line)
        .collect();

    let action_link = OriginLink {
        evidence: action.call_ref.clone(),
        role: "tool_call".into(),
        excerpt: format!("{}({})", action.tool_name, excerpt(&action.arguments.to_string())),
    };

    // Nearest preceding user entry (the run boundary).
    let seed = before.iter().rev().find_map(|e| {
        e.as_message()
            .filter(|m| m.role == Role::User)
            .map(|m| (*e, m))
    });

    // Links from the seed (or session start) to the action: the seed itself,
    // then any assistant reasoning in between.
    let mut links = Vec::new();
    let run_start_line = seed.map(|(e, _)| e.line).unwrap_or(0);
    if let Some((entry, m)) = seed {
        links.push(OriginLink {
            evidence: EvidenceRef::line(&session.file_path, entry.line),
            role: "user".into(),
            excerpt: excerpt(&m.plain_text()),
        });
    }
    for entry in before.iter().filter(|e| e.line > run_start_line) {
        if let Some(m) = entry.as_message() {
            if m.role == Role::Assistant {
                let thinking: String = m
                    .blocks
                    .iter()
                    .filter_map(|b| match b {
                        ContentBlock::Thinking { text } | ContentBlock::ThinkTagged { text } => {
                            Some(text.as_str())
                        }
                        _ => None,
                    })
                    .collect::<Vec<_>>()
                    .join(" ");
                if !thinking.is_empty() {
                    links.push(OriginLink {
                        evidence: EvidenceRef::line(&session.file_path, entry.line),
                        role: "assistant-thinking".into(),
                        excerpt: excerpt(&thinking),
                    });
                }
            }
        }
    }
    links.push(action_link);

    let finish = |origin_kind: OriginKind, rule: &str, links: Vec<OriginLink>| OriginChain {
        tool_call_id: action.tool_call_id.clone(),
        origin_kind,
        links,
        rule: rule.to_string(),
    };

    // O1: cron venue.
    let cron_isolated = cron_attributions.iter().any(|a| {
        a.venue == CronVenue::IsolatedSession && a.linked_session.as_deref() == Some(&session.session_id)
    });
    let cron_injected_seed = seed.is_some_and(|(_, m)| {
        cron_attributions.iter().any(|a| {
            a.venue == CronVenue::MainSession
                && a.linked_session.as_deref() == Some(&session.session_id)
                && m.plain_text().contains(&a.job_id)
        })
    });
    if cron_isolated || cron_injected_seed {
        return finish(OriginKind::CronTrigger, "O1", links);
    }

    // O2: agent-spawned child; the seed is agent-authored.
    if graph.agent_driven_sessions().contains(&session.session_id) {
        if let Some(first) = links.first_mut() {
            if first.role == "user" {
                first.role = "user(agent-driven)".into();
            }
        }
        return finish(OriginKind::PriorReasoning, "O2", links);
    }

    // O3: genuine user message.
    if seed.is_some() {
        return finish(OriginKind::UserMessage, "O3", links);
    }

    // O4: only assistant entries precede.
    let only_assistant = before.iter().all(|e| match &e.payload {
        EntryPayload::Message(m) => m.role == Role::Assistant,
        EntryPayload::SessionHeader(_) => true,
        _ => true,
    }) && before
        .iter()
        .any(|e| e.as_message().is_some_and(|m| m.role == Role::Assistant));
    if only_assistant {
        return finish(OriginKind::PriorReasoning, "O4", links);
    }

    // O5: reasoning cites a memory file read in this run.
    let memory_reads: Vec<String> = before
        .iter()
        .filter(|e| e.line > run_start_line)
        .filter_map(|e| e.as_message())
        .filter(|m| m.role == Role::Assistant)
        .flat_map(|m| m.blocks.iter())
        .filter_map(|b| match b {
            ContentBlock::ToolCall { name, arguments, .. } if name == "read" => {
                tool_path_argument(arguments)
            }
            _ => None,
        })
        .filter(|p| p.contains("memory/") || p.ends_with("MEMORY.md"))
        .collect();
    let thinking_text: String = before
        .iter()
        .filter_map(|e| e.as_message())
        .filter(|m| m.role == Role::Assistant)
        .flat_map(|m| m.blocks.iter())
        .filter_map(|b| match b {
            ContentBlock::Thinking { text } | ContentBlock::ThinkTagged { text } => {
                Some(text.as_str())
            }
            _ => None,
        })
        .collect::<Vec<_>>()
        .join(" ");
    if memory_reads.iter().any(|p| {
        thinking_text.contains(p.as_str())
            || std::path::Path::new(p)
                .file_name()
                .map(|n| thinking_text.contains(&n.to_string_lossy().to_string()))
                .unwrap_or(false)
    }) {
        return finish(OriginKind::MemoryEntry, "O5", links);
    }

    finish(OriginKind::Unresolved, "O6", links)
}

// ---------------------------------------------------------------------------
// Autonomy classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutonomyClass {
    DirectlyInstructed,
    InterpretivelyDerived,
    AutonomouslyInitiated,
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutonomyAssessment {
    pub class: AutonomyClass,
    pub rationale: String,
}

fn normalize(s: &str) -> String {
    s.to_lowercase().split_whitespace().collect::<Vec<_>>().join(" ")
}

/// The objects a tool call operates on: paths, commands, recipients.
/// These are what a direct instruction would have to name.
fn operation_objects(tool_name: &str, arguments: &Value) -> Vec<String> {
    let obj = arguments.as_object();
    match tool_name {
        "read" | "write" | "edit" => obj
            .and_then(|o| crate::jsonx::pick_str(o, &["path", "file", "filePath", "file_path"]))
            .into_iter()
            .collect(),
        "exec" => {
            let command = obj
                .and_then(|o| crate::jsonx::pick_str(o, &["command", "cmd"]))
                .unwrap_or_default();
            let mut objects: Vec<String> = command
                .split_whitespace()
                .skip(1)
                .filter(|t| !t.starts_with('-'))
                .map(str::to_owned)
                .collect();
            objects.push(command);
            objects
        }
        "message_send" | "telegram_send" | "send" => obj
            .and_then(|o| crate::jsonx::pick_str(o, &["to", "recipient"]))
            .into_iter()
            .collect(),
        "sessions_spawn" => obj
            .and_then(|o| crate::jsonx::pick_str(o, &["task"]))
            .into_iter()
            .collect(),
        _ => obj
            .map(|o| {
                o.values()
                    .filter_map(Value::as_str)
                    .map(str::to_owned)
                    .collect()
            })
            .unwrap_or_default(),
    }
}

/// Place an action on the autonomy spectrum.
///
/// - A1 DirectlyInstructed: user-originated and the user excerpt names the
///   operation object (normalized substring containment).
/// - A2 InterpretivelyDerived: user-originated otherwise.
/// - A3 AutonomouslyInitiated: cron-, reasoning-, or memory-originated.
/// - A4 Indeterminate: unresolved origin.
pub fn classify_autonomy(chain: &OriginChain, action: &ToolExecution) -> AutonomyAssessment {
    match chain.origin_kind {
        OriginKind::UserMessage => {
            let user_text = chain
                .links
                .iter()
                .find(|l| l.role == "user")
                .map(|l| normalize(&l.excerpt))
                .unwrap_or_default();
            let objects = operation_objects(&action.tool_name, &action.arguments);
            let named = objects.iter().find(|o| {
                let n = normalize(o);
                n.len() >= 2 && user_text.contains(&n)
            });
            match named {
                Some(object) => AutonomyAssessment {
                    class: AutonomyClass::DirectlyInstructed,
                    rationale: format!(
                        "A1: user instruction names the operation object {object:?}"
                    ),
                },
                None => AutonomyAssessment {
                    class: AutonomyClass::InterpretivelyDerived,
                    rationale: "A2: user-originated, but the instruction does not name \
                                the acted-on object; the agent interpreted it"
                        .into(),
                },
            }
        }
        OriginKind::CronTrigger | OriginKind::PriorReasoning | OriginKind::MemoryEntry => {
            AutonomyAssessment {
                class: AutonomyClass::AutonomouslyInitiated,
                rationale: format!(
                    "A3: origin {} involves no direct user instruction for this action",
                    match chain.origin_kind {
                        OriginKind::CronTrigger => "cron trigger",
                        OriginKind::PriorReasoning => "prior agent reasoning",
                        OriginKind::MemoryEntry => "memory recall",
                        _ => unreachable!(),
                    }
                ),
            }
        }
        OriginKind::Unresolved => AutonomyAssessment {
            class: AutonomyClass::Indeterminate,
            rationale: "A4: no originating user message, cron trigger, or reasoning \
                        chain could be resolved"
                .into(),
        },
    }
}

// ---------------------------------------------------------------------------
// Reconstruction boundaries
// ---------------------------------------------------------------------------

/// The standing limitations plus instance-specific gaps. Always nonempty.
pub fn reconstruction_boundaries(
    index: &SessionIndex,
    associations: &[RunAssociation],
    cron_attributions: &[CronAttribution],
) -> Vec<String> {
    let mut caveats = vec![
        "reasoning is only partially observable: thinking traces are a sample of \
         the model's internal process, not a complete record"
            .to_string(),
        "the context window assembled at inference time is not stored persistently; \
         memory and configuration may have changed between incident and examination"
            .to_string(),
        "model decisions are nondeterministic: identical inputs do not guarantee a \
         unique explanation for the observed behavior"
            .to_string(),
    ];
    for (key, meta) in &index.entries {
        if meta.system_prompt_report.is_none() {
            caveats.push(format!(
                "session {key}: no prompt report recorded (prompt reporting may not \
                 persist reliably); injected context cannot be confirmed"
            ));
        }
    }
    for assoc in associations {
        if assoc.session_id.is_none() {
            caveats.push(format!(
                "log unit {}: not associated to a session ({} candidate run starts in window)",
                assoc.unit,
                assoc.candidates.len()
            ));
        }
    }
    for attr in cron_attributions {
        if attr.venue == CronVenue::Unlocated {
            caveats.push(format!(
                "cron job {} run at {}: execution venue not located in any session",
                attr.job_id,
                attr.run_time.to_rfc3339()
            ));
        }
    }
    caveats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::parse_transcript;

    const UUID_A: &str = "0f8fad5b-d9cb-469f-a165-70867728950e";

    fn session(jsonl: &str) -> ParsedSession {
        let (entries, warnings) = parse_transcript(jsonl.as_bytes());
        ParsedSession {
            session_id: UUID_A.to_string(),
            session_key: Some("agent:main:main".to_string()),
            file_path: format!("agents/main/sessions/{UUID_A}.jsonl"),
            status: SessionFileStatus::Indexed,
            entries,
            warnings,
        }
    }

    fn user_then_exec(user_text: &str, command: &str) -> ParsedSession {
        session(&format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312001000,"content":{user}}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"thinking","thinking":"deciding"}},{{"type":"toolCall","id":"c1","name":"exec","arguments":{{"command":{cmd}}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[{{"type":"text","text":"done"}}]}}"#,
                "\n"
            ),
            u = UUID_A,
            user = serde_json::json!(user_text),
            cmd = serde_json::json!(command),
        ))
    }

    #[test]
    fn origin_user_message_chain_of_three() {
        let s = user_then_exec("list files", "ls");
        let pairing = pair_tool_calls(&s);
        let chain = trace_origin(&pairing.executions[0], &s, &DelegationGraph::default(), &[]);
        assert_eq!(chain.origin_kind, OriginKind::UserMessage);
        assert_eq!(chain.links.len(), 3);
        assert_eq!(chain.links[0].role, "user");
        assert_eq!(chain.links[1].role, "assistant-thinking");
        assert_eq!(chain.links[2].role, "tool_call");
    }

    #[test]
    fn autonomy_direct_vs_interpretive() {
        let s = user_then_exec("please delete /tmp/x", "rm /tmp/x");
        let pairing = pair_tool_calls(&s);
        let chain = trace_origin(&pairing.executions[0], &s, &DelegationGraph::default(), &[]);
        let assessment = classify_autonomy(&chain, &pairing.executions[0]);
        assert_eq!(assessment.class, AutonomyClass::DirectlyInstructed);
        assert!(assessment.rationale.starts_with("A1"));

        let s = user_then_exec("tidy my notes", "rm /tmp/scratch-notes.txt");
        let pairing = pair_tool_calls(&s);
        let chain = trace_origin(&pairing.executions[0], &s, &DelegationGraph::default(), &[]);
        let assessment = classify_autonomy(&chain, &pairing.executions[0]);
        assert_eq!(assessment.class, AutonomyClass::InterpretivelyDerived);
    }

    #[test]
    fn cron_origin_is_autonomous() {
        let s = session(&format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312001000,"content":"[cron:job-1] scheduled"}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"message_send","arguments":{{"to":"telegram:42","text":"hi"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[]}}"#,
                "\n"
            ),
            u = UUID_A
        ));
        let pairing = pair_tool_calls(&s);
        let attributions = vec![CronAttribution {
            job_id: "job-1".into(),
            run_time: TimestampMs(1_767_312_000_500),
            venue: CronVenue::MainSession,
            linked_session: Some(UUID_A.into()),
            evidence: EvidenceRef::line("cron/runs/job-1.jsonl", 1),
        }];
        let chain = trace_origin(
            &pairing.executions[0],
            &s,
            &DelegationGraph::default(),
            &attributions,
        );
        assert_eq!(chain.origin_kind, OriginKind::CronTrigger);
        let assessment = classify_autonomy(&chain, &pairing.executions[0]);
        assert_eq!(assessment.class, AutonomyClass::AutonomouslyInitiated);
    }

    #[test]
    fn unresolved_when_nothing_precedes() {
        let s = session(&format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m0","role":"toolResult","toolCallId":"cx","timestamp":1767312000500,"content":[]}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"exec","arguments":{{"command":"ls"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[]}}"#,
                "\n"
            ),
            u = UUID_A
        ));
        let pairing = pair_tool_calls(&s);
        let exec = pairing
            .executions
            .iter()
            .find(|e| e.tool_call_id == "c1")
            .unwrap();
        let chain = trace_origin(exec, &s, &DelegationGraph::default(), &[]);
        assert_eq!(chain.origin_kind, OriginKind::Unresolved);
        assert_eq!(
            classify_autonomy(&chain, exec).class,
            AutonomyClass::Indeterminate
        );
    }

    #[test]
    fn capability_timeline_deltas_and_orphans() {
        let markers = crate::peripheral::MarkerTable::default();
        let lines = [
            serde_json::json!({"time": 1_767_312_000_000i64, "subsystem": "agent/run", "msg": "google tool schema snapshot", "tools": ["read","write","exec"]}),
            serde_json::json!({"time": 1_767_312_100_000i64, "subsystem": "agent/run", "msg": "google tool schema snapshot", "tools": ["read","write"]}),
        ]
        .map(|v| v.to_string())
        .join("\n");
        let log = crate::peripheral::parse_log_file(
            lines.as_bytes(),
            "openclaw-2026-01-02.log",
            &markers,
        );
        let timeline = capability_timeline(
            std::slice::from_ref(&log),
            &[],
            &SessionIndex::default(),
            &ConfigHistory::default(),
        );
        assert_eq!(timeline.entries.len(), 2);
        assert!(timeline.entries[0].added.is_empty());
        assert!(timeline.entries[0].removed.is_empty());
        assert_eq!(timeline.entries[1].removed, vec!["exec".to_string()]);
        assert_eq!(timeline.orphaned_tools, vec!["exec".to_string()]);
        let findings = capability_findings(&timeline);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].rule, "C1");
    }

    #[test]
    fn context_replay_respects_time_bound() {
        let s = session(&format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312001000,"content":"save my profile"}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"write","arguments":{{"path":"workspace/USER.md","content":"v1"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[]}}"#,
                "\n",
                r#"{{"type":"message","id":"m4","role":"assistant","timestamp":1767312010000,"content":[{{"type":"toolCall","id":"c2","name":"write","arguments":{{"path":"workspace/USER.md","content":"v2"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m5","role":"toolResult","toolCallId":"c2","timestamp":1767312011000,"content":[]}}"#,
                "\n"
            ),
            u = UUID_A
        ));
        let ws = WorkspaceSnapshot::default();
        // t between the two writes: only v1 is known.
        let estimate = reconstruct_context(&s, None, &ws, TimestampMs(1_767_312_005_000));
        let file = &estimate.replayed_files["workspace/USER.md"];
        assert_eq!(file.content, "v1");
        assert_eq!(file.basis, ReplayBasis::WriteToolPayload);
        assert!(file.content_as_of <= TimestampMs(1_767_312_005_000));
        // After both → v2.
        let estimate = reconstruct_context(&s, None, &ws, TimestampMs(1_767_313_000_000));
        assert_eq!(estimate.replayed_files["workspace/USER.md"].content, "v2");
        // Missing report caveat + approximation caveat → nonempty.
        assert!(!estimate.caveats.is_empty());
    }

    #[test]
    fn external_modification_raises_caveat() {
        // Agent wrote USER.md at t0, but the on-disk copy is newer: the
        // replayed content cannot be trusted as current.
        let s = session(&format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312001000,"content":"save it"}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"write","arguments":{{"path":"workspace/USER.md","content":"v1"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[]}}"#,
                "\n"
            ),
            u = UUID_A
        ));
        let mut ws = WorkspaceSnapshot::default();
        ws.identity_files.insert(
            "USER.md".into(),
            crate::peripheral::IdentityFile {
                present: true,
                content: Some("v1 plus manual edits".into()),
                mtime: Some(TimestampMs(1_767_312_002_000 + 3_600_000)),
            },
        );
        let estimate = reconstruct_context(&s, None, &ws, TimestampMs(1_767_320_000_000));
        assert!(estimate
            .caveats
            .iter()
            .any(|c| c.contains("external modification possible for USER.md")));

        // Same store, on-disk mtime older than the write: no such caveat.
        ws.identity_files.get_mut("USER.md").unwrap().mtime =
            Some(TimestampMs(1_767_312_000_000));
        let estimate = reconstruct_context(&s, None, &ws, TimestampMs(1_767_320_000_000));
        assert!(!estimate
            .caveats
            .iter()
            .any(|c| c.contains("external modification")));
    }

    #[test]
    fn boundaries_always_include_standing_caveats() {
        let caveats = reconstruction_boundaries(&SessionIndex::default(), &[], &[]);
        assert_eq!(caveats.len(), 3);
    }
}
