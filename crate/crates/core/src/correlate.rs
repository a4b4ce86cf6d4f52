//! Cross-source correlation: pairs tool calls with their results, merges all
//! parsed artifacts into one deterministic timeline, associates log runs
//! with sessions, reconstructs delegation chains, and attributes cron runs
//! to their execution venue.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::common::{EvidenceRef, ParseWarning, TimestampMs};
use crate::peripheral::{
    ConfigHistory, CronRun, CronState, LogEventKind, OrderingBasis, ParsedLogFile,
    SubagentRegistry,
};
use crate::store::{ArtifactKind, Plane};
use crate::transcript::{
    parse_session_key, ContentBlock, EntryPayload, ExecDetails, Role, SessionFileStatus,
    SessionIndex, SessionKeyKind, TranscriptEntry,
};

/// One session transcript bound to its on-disk identity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParsedSession {
    pub session_id: String,
    /// sessionKey from the index, when the session is (still) indexed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_key: Option<String>,
    /// Transcript path relative to the store root.
    pub file_path: String,
    pub status: SessionFileStatus,
    pub entries: Vec<TranscriptEntry>,
    pub warnings: Vec<ParseWarning>,
}

impl ParsedSession {
    pub fn is_main(&self) -> bool {
        self.session_key
            .as_deref()
            .map(|k| parse_session_key(k).kind == SessionKeyKind::Main)
            .unwrap_or(false)
    }
}

// ---------------------------------------------------------------------------
// Tool call / result pairing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolExecution {
    pub tool_call_id: String,
    pub tool_name: String,
    pub arguments: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_content: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_error: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub call_time: Option<TimestampMs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_time: Option<TimestampMs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<ExecDetails>,
    pub session_id: String,
    pub call_ref: EvidenceRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_ref: Option<EvidenceRef>,
    /// Transcript line of the assistant entry carrying the call.
    pub call_line: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result_line: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnpairedCall {
    pub tool_call_id: String,
    pub tool_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimestampMs>,
    pub evidence: EvidenceRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnpairedResult {
    pub tool_call_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<TimestampMs>,
    pub evidence: EvidenceRef,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct PairingResult {
    pub executions: Vec<ToolExecution>,
    pub unpaired_calls: Vec<UnpairedCall>,
    pub unpaired_results: Vec<UnpairedResult>,
    /// toolCallIds seen on more than one call (or more than one result);
    /// all occurrences are retained.
    pub duplicate_ids: Vec<String>,
}

fn result_text(entry: &TranscriptEntry) -> Option<String> {
    entry.as_message().map(|m| m.full_text())
}

/// Match each toolCall block to the first later unconsumed toolResult with
/// the same toolCallId. Unmatched items are reported, never dropped;
/// conservation holds: executions + unpaired calls = total calls, and
/// executions + unpaired results = total results.
pub fn pair_tool_calls(session: &ParsedSession) -> PairingResult {
    struct Call<'a> {
        id: String,
        name: String,
        arguments: &'a Value,
        time: Option<TimestampMs>,
        line: u64,
    }
    struct ResultEntry<'a> {
        id: String,
        entry: &'a TranscriptEntry,
        consumed: bool,
    }

    let mut calls = Vec::new();
    let mut results = Vec::new();
    for entry in &session.entries {
        let Some(m) = entry.as_message() else { continue };
        match m.role {
            Role::Assistant => {
                for block in &m.blocks {
                    if let ContentBlock::ToolCall { id, name, arguments } = block {
                        calls.push(Call {
                            id: id.clone(),
                            name: name.clone(),
                            arguments,
                            time: m.timestamp,
                            line: entry.line,
                        });
                    }
                }
            }
            Role::ToolResult => {
                results.push(ResultEntry {
                    id: m.tool_call_id.clone().unwrap_or_default(),
                    entry,
                    consumed: false,
                });
            }
            Role::User => {}
        }
    }

    let mut duplicate_ids: BTreeSet<String> = BTreeSet::new();
    let mut seen_call_ids: BTreeSet<&str> = BTreeSet::new();
    for c in &calls {
        if !c.id.is_empty() && !seen_call_ids.insert(&c.id) {
            duplicate_ids.insert(c.id.clone());
        }
    }
    let mut seen_result_ids: BTreeSet<&str> = BTreeSet::new();
    for r in &results {
        if !r.id.is_empty() && !seen_result_ids.insert(&r.id) {
            duplicate_ids.insert(r.id.clone());
        }
    }

    let mut pairing = PairingResult {
        duplicate_ids: duplicate_ids.into_iter().collect(),
        ..Default::default()
    };

    for call in &calls {
        let matched = results.iter_mut().find(|r| {
            !r.consumed && !call.id.is_empty() && r.id == call.id && r.entry.line > call.line
        });
        match matched {
            Some(r) => {
                r.consumed = true;
                let m = r.entry.as_message().expect("results are messages");
                pairing.executions.push(ToolExecution {
                    tool_call_id: call.id.clone(),
                    tool_name: call.name.clone(),
                    arguments: call.arguments.clone(),
                    result_content: result_text(r.entry),
                    is_error: m.is_error,
                    call_time: call.time,
                    result_time: m.timestamp,
                    details: m.details.clone(),
                    session_id: session.session_id.clone(),
                    call_ref: EvidenceRef::line(&session.file_path, call.line),
                    result_ref: Some(EvidenceRef::line(&session.file_path, r.entry.line)),
                    call_line: call.line,
                    result_line: Some(r.entry.line),
                });
            }
            None => pairing.unpaired_calls.push(UnpairedCall {
                tool_call_id: call.id.clone(),
                tool_name: call.name.clone(),
                time: call.time,
                evidence: EvidenceRef::line(&session.file_path, call.line),
            }),
        }
    }
    for r in &results {
        if !r.consumed {
            pairing.unpaired_results.push(UnpairedResult {
                tool_call_id: r.id.clone(),
                time: r.entry.as_message().and_then(|m| m.timestamp),
                evidence: EvidenceRef::line(&session.file_path, r.entry.line),
            });
        }
    }
    pairing
}

// ---------------------------------------------------------------------------
// Unified timeline
// ---------------------------------------------------------------------------

/// Source rank for tie-breaking simultaneous events.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum EventSource {
    Transcript,
    Log,
    CronRuns,
    SubagentRegistry,
    ConfigMeta,
    FileMtime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub time: TimestampMs,
    pub source: EventSource,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
    pub plane: Plane,
    pub kind: String,
    pub summary: String,
    pub evidence: EvidenceRef,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Timeline {
    pub events: Vec<TimelineEvent>,
    /// Events whose source record had no parseable time.
    pub undated: Vec<TimelineEvent>,
}

/// File-metadata evidence for artifacts without internal timestamps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MtimeEvidence {
    pub path: String,
    pub kind: ArtifactKind,
    pub mtime: TimestampMs,
}

pub struct TimelineInputs<'a> {
    pub sessions: &'a [ParsedSession],
    pub logs: &'a [ParsedLogFile],
    pub cron: &'a CronState,
    pub registry: &'a SubagentRegistry,
    pub config_history: &'a ConfigHistory,
    pub mtime_events: &'a [MtimeEvidence],
    /// Session ids whose user-role entries were seeded by a spawning agent.
    pub agent_driven_sessions: &'a BTreeSet<String>,
}

fn truncate_summary(text: &str) -> String {
    let line = text.lines().next().unwrap_or("");
    if line.chars().count() > 80 {
        let cut: String = line.chars().take(77).collect();
        format!("{cut}...")
    } else {
        line.to_string()
    }
}

/// Merge every parsed source into one chronologically sorted event list.
/// Ties break by source rank (Transcript < Log < CronRuns < SubagentRegistry
/// < ConfigMeta < FileMtime), then evidence path, then line.
pub fn build_timeline(inputs: &TimelineInputs) -> Timeline {
    let mut dated: Vec<TimelineEvent> = Vec::new();
    let mut undated: Vec<TimelineEvent> = Vec::new();
    let mut push = |ev: TimelineEvent, has_time: bool| {
        if has_time {
            dated.push(ev);
        } else {
            undated.push(ev);
        }
    };

    for session in inputs.sessions {
        let agent_driven = inputs.agent_driven_sessions.contains(&session.session_id);
        for entry in &session.entries {
            let evidence = EvidenceRef::line(&session.file_path, entry.line);
            let time = entry.timestamp();
            let base = TimelineEvent {
                time: time.unwrap_or(TimestampMs(0)),
                source: EventSource::Transcript,
                session_id: Some(session.session_id.clone()),
                run_id: None,
                tool_call_id: None,
                plane: Plane::CommunicationIO,
                kind: String::new(),
                summary: String::new(),
                evidence,
            };
            match &entry.payload {
                EntryPayload::SessionHeader(h) => push(
                    TimelineEvent {
                        plane: Plane::IdentityConfiguration,
                        kind: "session_start".into(),
                        summary: format!("session {} created", h.session_uuid),
                        ..base
                    },
                    time.is_some(),
                ),
                EntryPayload::Message(m) => match m.role {
                    Role::User => {
                        let prefix = if agent_driven { "[agent-driven] " } else { "" };
                        push(
                            TimelineEvent {
                                plane: Plane::CommunicationIO,
                                kind: "user_message".into(),
                                summary: format!("{prefix}{}", truncate_summary(&m.plain_text())),
                                ..base
                            },
                            time.is_some(),
                        );
                    }
                    Role::Assistant => {
                        let has_thinking = m.blocks.iter().any(|b| {
                            matches!(
                                b,
                                ContentBlock::Thinking { .. } | ContentBlock::ThinkTagged { .. }
                            )
                        });
                        if has_thinking {
                            push(
                                TimelineEvent {
                                    plane: Plane::ReasoningCognition,
                                    kind: "thinking".into(),
                                    summary: "assistant reasoning trace".into(),
                                    ..base.clone()
                                },
                                time.is_some(),
                            );
                        }
                        let has_text = m.blocks.iter().any(|b| {
                            matches!(
                                b,
                                ContentBlock::Text { .. } | ContentBlock::FinalTagged { .. }
                            )
                        });
                        if has_text {
                            push(
                                TimelineEvent {
                                    plane: Plane::CommunicationIO,
                                    kind: "assistant_message".into(),
                                    summary: truncate_summary(&m.full_text()),
                                    ..base.clone()
                                },
                                time.is_some(),
                            );
                        }
                        for block in &m.blocks {
                            if let ContentBlock::ToolCall { id, name, .. } = block {
                                push(
                                    TimelineEvent {
                                        plane: Plane::ActionsEffects,
                                        kind: "tool_call".into(),
                                        tool_call_id: Some(id.clone()),
                                        summary: format!("tool call {name}"),
                                        ..base.clone()
                                    },
                                    time.is_some(),
                                );
                            }
                        }
                    }
                    Role::ToolResult => push(
                        TimelineEvent {
                            plane: Plane::ActionsEffects,
                            kind: "tool_result".into(),
                            tool_call_id: m.tool_call_id.clone(),
                            summary: format!(
                                "tool result{}",
                                if m.is_error == Some(true) { " (error)" } else { "" }
                            ),
                            ..base
                        },
                        time.is_some(),
                    ),
                },
                EntryPayload::ModelChange { provider, model, .. } => push(
                    TimelineEvent {
                        plane: Plane::ReasoningCognition,
                        kind: "model_change".into(),
                        summary: format!(
                            "model changed to {}/{}",
                            provider.as_deref().unwrap_or("?"),
                            model.as_deref().unwrap_or("?")
                        ),
                        ..base
                    },
                    time.is_some(),
                ),
                EntryPayload::Compaction { .. } => push(
                    TimelineEvent {
                        plane: Plane::KnowledgeRecall,
                        kind: "compaction".into(),
                        summary: "context window compacted".into(),
                        ..base
                    },
                    time.is_some(),
                ),
                EntryPayload::Custom { .. } => {}
            }
        }
    }

    for log in inputs.logs {
        for ev in &log.events {
            let (kind, plane, summary) = match ev.kind {
                LogEventKind::ToolStart => (
                    "log_tool_start",
                    Plane::ActionsEffects,
                    format!("tool start {}", ev.tool_name.as_deref().unwrap_or("?")),
                ),
                LogEventKind::ToolEnd => (
                    "log_tool_end",
                    Plane::ActionsEffects,
                    format!("tool end {}", ev.tool_name.as_deref().unwrap_or("?")),
                ),
                LogEventKind::ToolSchemaSnapshot => (
                    "tool_schema_snapshot",
                    Plane::IdentityConfiguration,
                    format!("tool schema snapshot ({} tools)", ev.tool_names.len()),
                ),
                LogEventKind::RunStage => (
                    "run_stage",
                    Plane::ActionsEffects,
                    ev.message.clone().unwrap_or_default(),
                ),
                LogEventKind::ChannelHealth => (
                    "channel_health",
                    Plane::CommunicationIO,
                    format!(
                        "{}: {}",
                        ev.subsystem,
                        ev.message.as_deref().unwrap_or("")
                    ),
                ),
                LogEventKind::Other => (
                    "log_event",
                    Plane::ActionsEffects,
                    ev.message.clone().unwrap_or_default(),
                ),
            };
            push(TimelineEvent {
                time: ev.time,
                source: EventSource::Log,
                session_id: None,
                run_id: ev.run_id.clone(),
                tool_call_id: ev.tool_call_id.clone(),
                plane,
                kind: kind.into(),
                summary,
                evidence: EvidenceRef::line(&log.file_name, ev.line),
            }, true);
        }
    }

    for run in &inputs.cron.runs {
        let ev = TimelineEvent {
            time: run.time,
            source: EventSource::CronRuns,
            session_id: None,
            run_id: None,
            tool_call_id: None,
            plane: Plane::ActionsEffects,
            kind: "cron_run".into(),
            summary: format!(
                "cron job {} run ({})",
                run.job_id,
                run.outcome.as_deref().unwrap_or("?")
            ),
            evidence: EvidenceRef::line(format!("cron/runs/{}.jsonl", run.job_id), run.line),
        };
        push(ev, run.time.0 != 0);
    }

    for (i, rec) in inputs.registry.records.iter().enumerate() {
        let ev = TimelineEvent {
            time: rec.started.unwrap_or(TimestampMs(0)),
            source: EventSource::SubagentRegistry,
            session_id: rec.child_session.clone(),
            run_id: Some(rec.run_id.clone()),
            tool_call_id: None,
            plane: Plane::ActionsEffects,
            kind: "subagent_run".into(),
            summary: format!(
                "subagent run {} ({})",
                rec.run_id,
                rec.task.as_deref().unwrap_or("?")
            ),
            evidence: EvidenceRef::json_path("subagents/runs.json", i.to_string()),
        };
        push(ev, rec.started.is_some());
    }

    for snap in &inputs.config_history.snapshots {
        if snap.ordering_basis != OrderingBasis::LastTouchedAt {
            continue;
        }
        push(TimelineEvent {
            time: snap.ordering_key,
            source: EventSource::ConfigMeta,
            session_id: None,
            run_id: None,
            tool_call_id: None,
            plane: Plane::IdentityConfiguration,
            kind: "config_touched".into(),
            summary: format!("configuration written: {}", snap.source_path),
            evidence: EvidenceRef::json_path(&snap.source_path, "meta.lastTouchedAt"),
        }, true);
    }

    for m in inputs.mtime_events {
        let plane = match m.kind {
            ArtifactKind::InboundMedia => Plane::CommunicationIO,
            ArtifactKind::DailyMemoryLog | ArtifactKind::SemanticMemoryDb => Plane::KnowledgeRecall,
            _ => Plane::IdentityConfiguration,
        };
        push(TimelineEvent {
            time: m.mtime,
            source: EventSource::FileMtime,
            session_id: None,
            run_id: None,
            tool_call_id: None,
            plane,
            kind: "file_mtime".into(),
            summary: format!("{} last modified", m.path),
            evidence: EvidenceRef::file(&m.path),
        }, true);
    }

    let sort_key = |ev: &TimelineEvent| {
        let line = match &ev.evidence.locator {
            crate::common::Locator::Line(l) => *l,
            _ => 0,
        };
        (ev.time, ev.source, ev.evidence.path.clone(), line)
    };
    dated.sort_by_key(|a| sort_key(a));
    Timeline {
        events: dated,
        undated,
    }
}

// ---------------------------------------------------------------------------
// Run association (logs ↔ sessions)
// ---------------------------------------------------------------------------

pub const DEFAULT_PROXIMITY_WINDOW_MS: i64 = 5_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociationBasis {
    /// Exact toolCallId match between log and transcript; always outranks
    /// proximity.
    SharedToolCallId,
    TemporalProximity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCandidate {
    pub session_id: String,
    pub run_start_time: TimestampMs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunAssociation {
    /// runId from the logs, or a synthetic unit key for runId-less snapshots.
    pub unit: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<AssociationBasis>,
    /// Populated when the association is ambiguous or out of window.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub candidates: Vec<RunCandidate>,
    pub evidence: EvidenceRef,
}

/// Assign log runs (and schema snapshots) to sessions. A shared toolCallId
/// is decisive; otherwise the run start (user message) nearest in time wins,
/// but only when it is the single candidate within the window.
pub fn associate_runs(
    logs: &[ParsedLogFile],
    sessions: &[ParsedSession],
    window_ms: i64,
) -> Vec<RunAssociation> {
    // Index transcript toolCallIds and run starts per session.
    let mut ids_by_session: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    let mut run_starts: Vec<(TimestampMs, &str)> = Vec::new();
    for session in sessions {
        let ids = ids_by_session.entry(&session.session_id).or_default();
        for entry in &session.entries {
            if let Some(m) = entry.as_message() {
                match m.role {
                    Role::Assistant => {
                        for b in &m.blocks {
                            if let ContentBlock::ToolCall { id, .. } = b {
                                ids.insert(id.clone());
                            }
                        }
                    }
                    Role::ToolResult => {
                        if let Some(id) = &m.tool_call_id {
                            ids.insert(id.clone());
                        }
                    }
                    Role::User => {
                        if let Some(t) = m.timestamp {
                            run_starts.push((t, &session.session_id));
                        }
                    }
                }
            }
        }
    }
    run_starts.sort();

    // Group log events into association units.
    struct Unit<'a> {
        key: String,
        run_id: Option<String>,
        times: Vec<TimestampMs>,
        tool_call_ids: Vec<String>,
        evidence: EvidenceRef,
        _marker: std::marker::PhantomData<&'a ()>,
    }
    let mut units: Vec<Unit> = Vec::new();
    let mut by_run_id: BTreeMap<String, usize> = BTreeMap::new();
    for log in logs {
        for ev in &log.events {
            let relevant = ev.run_id.is_some() || ev.kind == LogEventKind::ToolSchemaSnapshot;
            if !relevant {
                continue;
            }
            let idx = match &ev.run_id {
                Some(rid) => *by_run_id.entry(rid.clone()).or_insert_with(|| {
                    units.push(Unit {
                        key: rid.clone(),
                        run_id: Some(rid.clone()),
                        times: Vec::new(),
                        tool_call_ids: Vec::new(),
                        evidence: EvidenceRef::line(&log.file_name, ev.line),
                        _marker: std::marker::PhantomData,
                    });
                    units.len() - 1
                }),
                None => {
                    units.push(Unit {
                        key: format!("snapshot@{}:{}", log.file_name, ev.line),
                        run_id: None,
                        times: Vec::new(),
                        tool_call_ids: Vec::new(),
                        evidence: EvidenceRef::line(&log.file_name, ev.line),
                        _marker: std::marker::PhantomData,
                    });
                    units.len() - 1
                }
            };
            units[idx].times.push(ev.time);
            if let Some(id) = &ev.tool_call_id {
                units[idx].tool_call_ids.push(id.clone());
            }
        }
    }

    let mut out = Vec::new();
    for unit in units {
        // Basis 1: shared toolCallId.
        let mut shared: BTreeSet<&str> = BTreeSet::new();
        for id in &unit.tool_call_ids {
            for (session_id, ids) in &ids_by_session {
                if ids.contains(id) {
                    shared.insert(session_id);
                }
            }
        }
        if shared.len() == 1 {
            out.push(RunAssociation {
                unit: unit.key,
                run_id: unit.run_id,
                session_id: Some(shared.iter().next().unwrap().to_string()),
                basis: Some(AssociationBasis::SharedToolCallId),
                candidates: Vec::new(),
                evidence: unit.evidence,
            });
            continue;
        }

        // Basis 2: temporal proximity to a unique run start.
        let t = unit.times.iter().min().copied().unwrap_or(TimestampMs(0));
        let candidates: Vec<RunCandidate> = run_starts
            .iter()
            .filter(|(start, _)| (start.0 - t.0).abs() <= window_ms)
            .map(|(start, sid)| RunCandidate {
                session_id: sid.to_string(),
                run_start_time: *start,
            })
            .collect();
        match candidates.len() {
            1 => out.push(RunAssociation {
                unit: unit.key,
                run_id: unit.run_id,
                session_id: Some(candidates[0].session_id.clone()),
                basis: Some(AssociationBasis::TemporalProximity),
                candidates: Vec::new(),
                evidence: unit.evidence,
            }),
            _ => out.push(RunAssociation {
                unit: unit.key,
                run_id: unit.run_id,
                session_id: None,
                basis: None,
                candidates,
                evidence: unit.evidence,
            }),
        }
    }
    out.sort_by(|a, b| a.unit.cmp(&b.unit));
    out
}

// ---------------------------------------------------------------------------
// Delegation graph
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeBasis {
    /// `sessions_spawn` tool call naming the child.
    SpawnCall,
    /// Child index entry records the parent in spawnedBy.
    SpawnedBy,
    /// sessionKey of the form `agent:<id>:subagent:<uuid>`.
    KeyPattern,
    /// Registry record in subagents/runs.json.
    Registry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelegationEdge {
    pub parent: String,
    pub child: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spawn_tool_call_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    /// True when the child's index entry is gone (cleanup policy) while
    /// evidence of the delegation survives.
    pub cleanup_observed: bool,
    pub bases: Vec<EdgeBasis>,
    /// Set when another edge claims the same child with a different parent.
    pub conflict: bool,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DelegationGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<DelegationEdge>,
    /// Cycles are structurally impossible in honest data; any found are
    /// surfaced for the examiner rather than silently accepted.
    pub cycles: Vec<Vec<String>>,
}

impl DelegationGraph {
    /// Child sessions reached by delegation: their user-role entries are
    /// agent-driven, not human-authored.
    pub fn agent_driven_sessions(&self) -> BTreeSet<String> {
        self.edges.iter().map(|e| e.child.clone()).collect()
    }
}

fn spawn_child_from_value(v: &Value) -> Option<String> {
    let obj = v.as_object()?;
    crate::jsonx::pick_id(
        obj,
        &["childSessionId", "child_session_id", "childSession", "sessionId", "session_id"],
    )
}

/// Reconstruct parent→child delegation from spawn calls, spawnedBy metadata,
/// subagent key patterns, and the registry.
pub fn link_subagents(
    index: &SessionIndex,
    sessions: &[ParsedSession],
    registry: &SubagentRegistry,
) -> DelegationGraph {
    let id_by_key: BTreeMap<&str, &str> = index
        .entries
        .iter()
        .filter_map(|(k, m)| m.session_id.as_deref().map(|id| (k.as_str(), id)))
        .collect();
    let indexed_ids: BTreeSet<&str> = id_by_key.values().copied().collect();
    let known_ids: BTreeSet<&str> = sessions
        .iter()
        .map(|s| s.session_id.as_str())
        .chain(indexed_ids.iter().copied())
        .collect();

    // Main session per agent id, for key-pattern and registry edges.
    let mut main_by_agent: BTreeMap<String, &str> = BTreeMap::new();
    for (key, id) in &id_by_key {
        let parsed = parse_session_key(key);
        if parsed.kind == SessionKeyKind::Main {
            if let Some(agent) = parsed.agent_id {
                main_by_agent.insert(agent, id);
            }
        }
    }
    let sole_main: Option<&str> = if main_by_agent.len() == 1 {
        main_by_agent.values().next().copied()
    } else {
        None
    };

    // (parent, child) → edge under construction.
    let mut edges: BTreeMap<(String, String), DelegationEdge> = BTreeMap::new();
    let mut add_edge = |parent: &str, child: &str, basis: EdgeBasis, call_id: Option<String>, task: Option<String>| {
        let e = edges
            .entry((parent.to_string(), child.to_string()))
            .or_insert_with(|| DelegationEdge {
                parent: parent.to_string(),
                child: child.to_string(),
                spawn_tool_call_id: None,
                task: None,
                cleanup_observed: false,
                bases: Vec::new(),
                conflict: false,
            });
        if !e.bases.contains(&basis) {
            e.bases.push(basis);
        }
        if e.spawn_tool_call_id.is_none() {
            e.spawn_tool_call_id = call_id;
        }
        if e.task.is_none() {
            e.task = task;
        }
    };

    // (a) sessions_spawn tool calls: child named in arguments or result.
    for session in sessions {
        let pairing = pair_tool_calls(session);
        for exec in &pairing.executions {
            if exec.tool_name != "sessions_spawn" {
                continue;
            }
            let child = spawn_child_from_value(&exec.arguments).or_else(|| {
                exec.result_content
                    .as_deref()
                    .and_then(|t| serde_json::from_str::<Value>(t).ok())
                    .and_then(|v| spawn_child_from_value(&v))
            });
            if let Some(child) = child {
                let task = exec
                    .arguments
                    .get("task")
                    .and_then(Value::as_str)
                    .map(str::to_owned);
                add_edge(
                    &session.session_id,
                    &child,
                    EdgeBasis::SpawnCall,
                    Some(exec.tool_call_id.clone()),
                    task,
                );
            }
        }
        for call in &pairing.unpaired_calls {
            if call.tool_name != "sessions_spawn" {
                continue;
            }
            // Child only recoverable from arguments when the result is gone.
            if let Some(entry) = session.entries.iter().find(|e| {
                e.as_message().is_some_and(|m| {
                    m.blocks.iter().any(
                        |b| matches!(b, ContentBlock::ToolCall { id, .. } if *id == call.tool_call_id),
                    )
                })
            }) {
                if let Some(m) = entry.as_message() {
                    for b in &m.blocks {
                        if let ContentBlock::ToolCall { id, arguments, .. } = b {
                            if *id == call.tool_call_id {
                                if let Some(child) = spawn_child_from_value(arguments) {
                                    add_edge(
                                        &session.session_id,
                                        &child,
                                        EdgeBasis::SpawnCall,
                                        Some(id.clone()),
                                        arguments.get("task").and_then(Value::as_str).map(str::to_owned),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // (b) spawnedBy metadata and (c) subagent key pattern.
    for (key, meta) in &index.entries {
        let Some(child_id) = meta.session_id.as_deref() else {
            continue;
        };
        if let Some(parent_key) = &meta.spawned_by {
            if let Some(parent_id) = id_by_key.get(parent_key.as_str()) {
                add_edge(parent_id, child_id, EdgeBasis::SpawnedBy, None, None);
            }
        }
        let parsed = parse_session_key(key);
        if let SessionKeyKind::Subagent { .. } = parsed.kind {
            let parent = parsed
                .agent_id
                .as_ref()
                .and_then(|a| main_by_agent.get(a).copied())
                .or(sole_main);
            if let Some(parent_id) = parent {
                if parent_id != child_id {
                    add_edge(parent_id, child_id, EdgeBasis::KeyPattern, None, None);
                }
            }
        }
    }

    // (d) registry records.
    for rec in &registry.records {
        if let Some(child) = &rec.child_session {
            if let Some(parent_id) = sole_main.or_else(|| main_by_agent.values().next().copied()) {
                if parent_id != child {
                    add_edge(parent_id, child, EdgeBasis::Registry, None, rec.task.clone());
                }
            }
        }
    }

    let mut edges: Vec<DelegationEdge> = edges.into_values().collect();

    // Cleanup detection: delegation evidence survives but the index entry
    // does not.
    for e in &mut edges {
        e.cleanup_observed = !indexed_ids.contains(e.child.as_str());
    }

    // Conflicting parents for the same child.
    let mut parents_of: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &edges {
        parents_of.entry(&e.child).or_default().insert(&e.parent);
    }
    let conflicted: BTreeSet<String> = parents_of
        .iter()
        .filter(|(_, ps)| ps.len() > 1)
        .map(|(c, _)| c.to_string())
        .collect();
    for e in &mut edges {
        e.conflict = conflicted.contains(&e.child);
    }

    // Node set: every known session plus every edge endpoint.
    let mut nodes: BTreeSet<String> = known_ids.iter().map(|s| s.to_string()).collect();
    for e in &edges {
        nodes.insert(e.parent.clone());
        nodes.insert(e.child.clone());
    }

    let cycles = find_cycles(&nodes, &edges);
    DelegationGraph {
        nodes: nodes.into_iter().collect(),
        edges,
        cycles,
    }
}

fn find_cycles(nodes: &BTreeSet<String>, edges: &[DelegationEdge]) -> Vec<Vec<String>> {
    let mut adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in edges {
        adj.entry(&e.parent).or_default().push(&e.child);
    }
    let mut cycles = Vec::new();
    let mut visited: BTreeSet<&str> = BTreeSet::new();
    for start in nodes {
        if visited.contains(start.as_str()) {
            continue;
        }
        let mut stack: Vec<(&str, Vec<&str>)> = vec![(start.as_str(), vec![start.as_str()])];
        while let Some((node, path)) = stack.pop() {
            visited.insert(node);
            for next in adj.get(node).into_iter().flatten() {
                if let Some(pos) = path.iter().position(|p| p == next) {
                    let cycle: Vec<String> = path[pos..].iter().map(|s| s.to_string()).collect();
                    if !cycles.contains(&cycle) {
                        cycles.push(cycle);
                    }
                } else {
                    let mut p = path.clone();
                    p.push(next);
                    stack.push((next, p));
                }
            }
        }
    }
    cycles
}

// ---------------------------------------------------------------------------
// Cron attribution
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CronVenue {
    /// Injected system event in the main session.
    MainSession,
    /// Dedicated `cron:<jobId>` session.
    IsolatedSession,
    Unlocated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CronAttribution {
    pub job_id: String,
    pub run_time: TimestampMs,
    pub venue: CronVenue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linked_session: Option<String>,
    pub evidence: EvidenceRef,
}

/// Match each cron run to its execution venue: an isolated `cron:<jobId>`
/// session when one exists in the index, else an injected main-session entry
/// naming the jobId within the proximity window, else unlocated.
pub fn attribute_cron_runs(
    cron: &CronState,
    sessions: &[ParsedSession],
    index: &SessionIndex,
    window_ms: i64,
) -> Vec<CronAttribution> {
    let mut isolated_by_job: BTreeMap<String, &str> = BTreeMap::new();
    for (key, meta) in &index.entries {
        if let SessionKeyKind::Cron { job_id } = parse_session_key(key).kind {
            if let Some(id) = meta.session_id.as_deref() {
                isolated_by_job.insert(job_id, id);
            }
        }
    }

    let mains: Vec<&ParsedSession> = sessions.iter().filter(|s| s.is_main()).collect();

    cron.runs
        .iter()
        .map(|run: &CronRun| {
            let evidence =
                EvidenceRef::line(format!("cron/runs/{}.jsonl", run.job_id), run.line);
            if let Some(session_id) = isolated_by_job.get(&run.job_id) {
                return CronAttribution {
                    job_id: run.job_id.clone(),
                    run_time: run.time,
                    venue: CronVenue::IsolatedSession,
                    linked_session: Some(session_id.to_string()),
                    evidence,
                };
            }
            for main in &mains {
                let hit = main.entries.iter().any(|entry| {
                    let close = entry
                        .timestamp()
                        .map(|t| (t.0 - run.time.0).abs() <= window_ms)
                        .unwrap_or(false);
                    if !close {
                        return false;
                    }
                    match &entry.payload {
                        EntryPayload::Message(m) => m.raw.to_string().contains(&run.job_id),
                        EntryPayload::Custom { raw, .. } => raw.to_string().contains(&run.job_id),
                        _ => false,
                    }
                });
                if hit {
                    return CronAttribution {
                        job_id: run.job_id.clone(),
                        run_time: run.time,
                        venue: CronVenue::MainSession,
                        linked_session: Some(main.session_id.clone()),
                        evidence,
                    };
                }
            }
            CronAttribution {
                job_id: run.job_id.clone(),
                run_time: run.time,
                venue: CronVenue::Unlocated,
                linked_session: None,
                evidence,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transcript::parse_transcript;

    const UUID_A: &str = "0f8fad5b-d9cb-469f-a165-70867728950e";
    const UUID_B: &str = "11111111-2222-3333-4444-555555555555";

    fn session_from_jsonl(id: &str, key: Option<&str>, jsonl: &str) -> ParsedSession {
        let (entries, warnings) = parse_transcript(jsonl.as_bytes());
        ParsedSession {
            session_id: id.to_string(),
            session_key: key.map(str::to_owned),
            file_path: format!("agents/main/sessions/{id}.jsonl"),
            status: SessionFileStatus::Indexed,
            entries,
            warnings,
        }
    }

    fn transcript_with_tool_pair() -> String {
        format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312001000,"content":"list files"}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"exec","arguments":{{"command":"ls"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":1767312003000,"content":[{{"type":"text","text":"ok"}}],"details":{{"durationMs":120,"exitCode":0,"status":"ok"}}}}"#,
                "\n"
            ),
            u = UUID_A
        )
    }

    #[test]
    fn pairing_matches_call_to_result() {
        let s = session_from_jsonl(UUID_A, Some("agent:main:main"), &transcript_with_tool_pair());
        let pairing = pair_tool_calls(&s);
        assert_eq!(pairing.executions.len(), 1);
        assert!(pairing.unpaired_calls.is_empty());
        assert!(pairing.unpaired_results.is_empty());
        let exec = &pairing.executions[0];
        assert_eq!(exec.tool_call_id, "c1");
        assert_eq!(exec.tool_name, "exec");
        assert_eq!(exec.details.as_ref().unwrap().duration_ms, Some(120));
        assert!(exec.result_time.unwrap() >= exec.call_time.unwrap());
    }

    #[test]
    fn unpaired_call_is_reported() {
        let jsonl = format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767312002000,"content":[{{"type":"toolCall","id":"c1","name":"exec","arguments":{{}}}}]}}"#,
                "\n"
            ),
            u = UUID_A
        );
        let s = session_from_jsonl(UUID_A, None, &jsonl);
        let pairing = pair_tool_calls(&s);
        assert!(pairing.executions.is_empty());
        assert_eq!(pairing.unpaired_calls.len(), 1);
        assert_eq!(pairing.unpaired_calls[0].tool_call_id, "c1");
    }

    #[test]
    fn duplicate_call_ids_flagged_and_conserved() {
        let jsonl = format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"assistant","timestamp":1,"content":[{{"type":"toolCall","id":"c1","name":"a","arguments":{{}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"assistant","timestamp":2,"content":[{{"type":"toolCall","id":"c1","name":"b","arguments":{{}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m3","role":"toolResult","toolCallId":"c1","timestamp":3,"content":[]}}"#,
                "\n"
            ),
            u = UUID_A
        );
        let s = session_from_jsonl(UUID_A, None, &jsonl);
        let pairing = pair_tool_calls(&s);
        // Conservation: 2 calls = executions + unpaired calls; 1 result.
        assert_eq!(pairing.executions.len() + pairing.unpaired_calls.len(), 2);
        assert_eq!(pairing.executions.len() + pairing.unpaired_results.len(), 1);
        assert_eq!(pairing.duplicate_ids, vec!["c1".to_string()]);
        // First call in file order wins the result.
        assert_eq!(pairing.executions[0].tool_name, "a");
    }

    #[test]
    fn timeline_orders_and_tie_breaks() {
        let s = session_from_jsonl(UUID_A, Some("agent:main:main"), &transcript_with_tool_pair());
        let log = crate::peripheral::parse_log_file(
            format!(
                "{}\n",
                serde_json::json!({
                    "time": 1_767_312_001_000i64,
                    "subsystem": "agent/run",
                    "msg": "tool start",
                    "runId": "r1",
                    "toolCallId": "c1"
                })
            )
            .as_bytes(),
            "openclaw-2026-01-02.log",
            &crate::peripheral::MarkerTable::default(),
        );
        let cron = CronState::default();
        let registry = SubagentRegistry::default();
        let history = ConfigHistory::default();
        let agent_driven = BTreeSet::new();
        let timeline = build_timeline(&TimelineInputs {
            sessions: std::slice::from_ref(&s),
            logs: std::slice::from_ref(&log),
            cron: &cron,
            registry: &registry,
            config_history: &history,
            mtime_events: &[],
            agent_driven_sessions: &agent_driven,
        });
        let times: Vec<i64> = timeline.events.iter().map(|e| e.time.0).collect();
        let mut sorted = times.clone();
        sorted.sort();
        assert_eq!(times, sorted);
        // Same millisecond: transcript user message ranks before the log event.
        let same_ms: Vec<&TimelineEvent> = timeline
            .events
            .iter()
            .filter(|e| e.time.0 == 1_767_312_001_000)
            .collect();
        assert_eq!(same_ms.len(), 2);
        assert_eq!(same_ms[0].source, EventSource::Transcript);
        assert_eq!(same_ms[0].kind, "user_message");
        assert_eq!(same_ms[0].plane, Plane::CommunicationIO);
        assert_eq!(same_ms[1].source, EventSource::Log);
    }

    #[test]
    fn associate_by_proximity_and_ambiguity() {
        let make = |id: &str, t: i64| {
            session_from_jsonl(
                id,
                None,
                &format!(
                    concat!(
                        r#"{{"type":"session","version":3,"id":"h","sessionId":"{id}","timestamp":{t0}}}"#,
                        "\n",
                        r#"{{"type":"message","id":"m1","role":"user","timestamp":{t},"content":"go"}}"#,
                        "\n"
                    ),
                    id = id,
                    t0 = t - 10,
                    t = t
                ),
            )
        };
        let snapshot_line = serde_json::json!({
            "time": 1_767_312_000_300i64,
            "subsystem": "agent/run",
            "msg": "google tool schema snapshot",
            "tools": ["read"]
        })
        .to_string();
        let log = crate::peripheral::parse_log_file(
            format!("{snapshot_line}\n").as_bytes(),
            "openclaw-2026-01-02.log",
            &crate::peripheral::MarkerTable::default(),
        );

        // Single run start 300 ms before the snapshot → assigned.
        let s1 = make(UUID_A, 1_767_312_000_000);
        let assoc = associate_runs(std::slice::from_ref(&log), std::slice::from_ref(&s1), 5_000);
        assert_eq!(assoc.len(), 1);
        assert_eq!(assoc[0].session_id.as_deref(), Some(UUID_A));
        assert_eq!(assoc[0].basis, Some(AssociationBasis::TemporalProximity));

        // Two run starts inside the window → unassigned with two candidates.
        let s2 = make(UUID_B, 1_767_312_000_100);
        let sessions = vec![s1, s2];
        let assoc = associate_runs(std::slice::from_ref(&log), &sessions, 5_000);
        assert_eq!(assoc[0].session_id, None);
        assert_eq!(assoc[0].candidates.len(), 2);
    }

    #[test]
    fn shared_tool_call_id_outranks_proximity() {
        // Session A has the matching toolCallId but its run start is far away;
        // session B is temporally closer.
        let s_a = session_from_jsonl(
            UUID_A,
            None,
            &format!(
                concat!(
                    r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767311000000}}"#,
                    "\n",
                    r#"{{"type":"message","id":"m1","role":"user","timestamp":1767311000000,"content":"go"}}"#,
                    "\n",
                    r#"{{"type":"message","id":"m2","role":"assistant","timestamp":1767311001000,"content":[{{"type":"toolCall","id":"c9","name":"exec","arguments":{{}}}}]}}"#,
                    "\n"
                ),
                u = UUID_A
            ),
        );
        let s_b = session_from_jsonl(
            UUID_B,
            None,
            &format!(
                concat!(
                    r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                    "\n",
                    r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312000000,"content":"hi"}}"#,
                    "\n"
                ),
                u = UUID_B
            ),
        );
        let log_line = serde_json::json!({
            "time": 1_767_312_000_200i64,
            "subsystem": "agent/run",
            "msg": "tool start",
            "runId": "r7",
            "toolCallId": "c9"
        })
        .to_string();
        let log = crate::peripheral::parse_log_file(
            format!("{log_line}\n").as_bytes(),
            "openclaw-2026-01-02.log",
            &crate::peripheral::MarkerTable::default(),
        );
        let sessions = vec![s_a, s_b];
        let assoc = associate_runs(std::slice::from_ref(&log), &sessions, 5_000);
        assert_eq!(assoc[0].session_id.as_deref(), Some(UUID_A));
        assert_eq!(assoc[0].basis, Some(AssociationBasis::SharedToolCallId));
    }

    #[test]
    fn spawn_call_creates_edge() {
        let jsonl = format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"assistant","timestamp":1767312001000,"content":[{{"type":"toolCall","id":"sp1","name":"sessions_spawn","arguments":{{"task":"summarize","childSessionId":"{c}"}}}}]}}"#,
                "\n",
                r#"{{"type":"message","id":"m2","role":"toolResult","toolCallId":"sp1","timestamp":1767312002000,"content":[{{"type":"text","text":"{{\"childSessionId\":\"{c}\"}}"}}]}}"#,
                "\n"
            ),
            u = UUID_A,
            c = UUID_B
        );
        let parent = session_from_jsonl(UUID_A, Some("agent:main:main"), &jsonl);
        let mut index = SessionIndex::default();
        index.entries.insert(
            "agent:main:main".into(),
            crate::transcript::SessionMeta::for_session_id(UUID_A),
        );
        let graph = link_subagents(&index, std::slice::from_ref(&parent), &SubagentRegistry::default());
        assert_eq!(graph.edges.len(), 1);
        let e = &graph.edges[0];
        assert_eq!(e.parent, UUID_A);
        assert_eq!(e.child, UUID_B);
        assert_eq!(e.spawn_tool_call_id.as_deref(), Some("sp1"));
        assert_eq!(e.task.as_deref(), Some("summarize"));
        // Child is not in the index → cleanup observed.
        assert!(e.cleanup_observed);
        assert!(graph.cycles.is_empty());
        assert!(graph.agent_driven_sessions().contains(UUID_B));
    }

    #[test]
    fn registry_alone_links_child_when_transcript_evidence_is_gone() {
        // Parent spawn call lost (e.g. truncated transcript); only the
        // registry still names the child.
        let main = session_from_jsonl(UUID_A, Some("agent:main:main"), &transcript_with_tool_pair());
        let mut index = SessionIndex::default();
        index.entries.insert(
            "agent:main:main".into(),
            crate::transcript::SessionMeta::for_session_id(UUID_A),
        );
        let registry = crate::peripheral::parse_subagent_registry(Some(
            format!(
                r#"[{{"runId":"sar-1","task":"research","childSessionId":"{UUID_B}","started":1767312000000,"ended":1767312060000}}]"#
            )
            .as_bytes(),
        ));
        let graph = link_subagents(&index, std::slice::from_ref(&main), &registry);
        assert_eq!(graph.edges.len(), 1);
        let e = &graph.edges[0];
        assert_eq!((e.parent.as_str(), e.child.as_str()), (UUID_A, UUID_B));
        assert_eq!(e.bases, vec![EdgeBasis::Registry]);
        assert!(e.cleanup_observed);
        assert_eq!(e.task.as_deref(), Some("research"));
    }

    #[test]
    fn no_spawns_yields_isolated_nodes() {
        let s = session_from_jsonl(UUID_A, Some("agent:main:main"), &transcript_with_tool_pair());
        let graph = link_subagents(
            &SessionIndex::default(),
            std::slice::from_ref(&s),
            &SubagentRegistry::default(),
        );
        assert!(graph.edges.is_empty());
        assert_eq!(graph.nodes, vec![UUID_A.to_string()]);
    }

    #[test]
    fn cron_isolated_venue_from_index_key() {
        let mut index = SessionIndex::default();
        index.entries.insert(
            "agent:main:cron:backup".into(),
            crate::transcript::SessionMeta::for_session_id(UUID_B),
        );
        let cron = crate::peripheral::parse_cron(
            Some(br#"{"jobs":[{"id":"backup","schedule":{"every":"1h"}}]}"#),
            &[("backup.jsonl".into(), br#"{"time":1767312000000,"outcome":"ok"}"#.to_vec())],
        );
        let attributions = attribute_cron_runs(&cron, &[], &index, 5_000);
        assert_eq!(attributions.len(), 1);
        assert_eq!(attributions[0].venue, CronVenue::IsolatedSession);
        assert_eq!(attributions[0].linked_session.as_deref(), Some(UUID_B));
    }

    #[test]
    fn cron_main_venue_by_injected_event() {
        let jsonl = format!(
            concat!(
                r#"{{"type":"session","version":3,"id":"h","sessionId":"{u}","timestamp":1767312000000}}"#,
                "\n",
                r#"{{"type":"message","id":"m1","role":"user","timestamp":1767312002000,"content":"[cron:job-rem0] reminder due"}}"#,
                "\n"
            ),
            u = UUID_A
        );
        let main = session_from_jsonl(UUID_A, Some("agent:main:main"), &jsonl);
        let cron = crate::peripheral::parse_cron(
            Some(br#"{"jobs":[{"id":"job-rem0","schedule":{"at":1767312000}}]}"#),
            &[("job-rem0.jsonl".into(), br#"{"time":1767312000000,"outcome":"ok"}"#.to_vec())],
        );
        let attributions =
            attribute_cron_runs(&cron, std::slice::from_ref(&main), &SessionIndex::default(), 5_000);
        assert_eq!(attributions[0].venue, CronVenue::MainSession);
        assert_eq!(attributions[0].linked_session.as_deref(), Some(UUID_A));
    }

    #[test]
    fn cron_unlocated_without_evidence() {
        let cron = crate::peripheral::parse_cron(
            None,
            &[("ghost.jsonl".into(), br#"{"time":1767312000000}"#.to_vec())],
        );
        let attributions = attribute_cron_runs(&cron, &[], &SessionIndex::default(), 5_000);
        assert_eq!(attributions[0].venue, CronVenue::Unlocated);
    }
}
