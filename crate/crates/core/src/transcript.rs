//! Session index and session transcript parsing.
//!
//! Transcripts are JSONL files: one self-contained JSON object per line,
//! beginning with a version-3 session header. Parsing is salvage-oriented:
//! a malformed line becomes a warning, never an abort, and any record whose
//! shape is not recognized is retained raw as a `Custom` entry.

use std::collections::BTreeMap;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use uuid::Uuid;

use crate::common::{ParseWarning, TimestampMs};
use crate::jsonx::{
    pick, pick_array, pick_bool, pick_f64, pick_i64, pick_id, pick_object, pick_str,
    pick_timestamp, pick_u64, string_list, JsonMap,
};

// ---------------------------------------------------------------------------
// Session index
// ---------------------------------------------------------------------------

/// `sessions.json`: sessionKey (e.g. `agent:main:main`) → session metadata.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SessionIndex {
    pub entries: BTreeMap<String, SessionMeta>,
    pub warnings: Vec<ParseWarning>,
}

impl SessionIndex {
    /// Look up the sessionKey that maps to a given sessionId.
    pub fn key_for_session_id(&self, session_id: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(_, m)| m.session_id.as_deref() == Some(session_id))
            .map(|(k, _)| k.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Idle,
    Processing,
    Waiting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginInfo {
    pub provider: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedSkill {
    pub name: String,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SkillsSnapshot {
    pub skills: Vec<String>,
    pub resolved: Vec<ResolvedSkill>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prompt_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InjectedFile {
    pub name: String,
    pub path: String,
    pub injected_chars: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SystemPromptReport {
    pub injected_files: Vec<InjectedFile>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub schema_metrics: BTreeMap<String, i64>,
}

/// Per-session metadata from the index. Unknown fields survive in `raw`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionMeta {
    pub session_id: Option<String>,
    pub state: Option<SessionState>,
    pub transcript_path: Option<String>,
    pub model_provider: Option<String>,
    pub model_name: Option<String>,
    pub thinking_level: Option<String>,
    pub working_dir: Option<String>,
    pub channel: Option<String>,
    pub last_recipient: Option<String>,
    pub origin: Option<OriginInfo>,
    pub spawned_by: Option<String>,
    pub skills_snapshot: Option<SkillsSnapshot>,
    pub system_prompt_report: Option<SystemPromptReport>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub token_usage: BTreeMap<String, i64>,
    /// The complete original object, for forensic display.
    pub raw: Value,
}

impl SessionMeta {
    /// Minimal metadata carrying only a sessionId.
    pub fn for_session_id(id: impl Into<String>) -> Self {
        SessionMeta {
            session_id: Some(id.into()),
            state: None,
            transcript_path: None,
            model_provider: None,
            model_name: None,
            thinking_level: None,
            working_dir: None,
            channel: None,
            last_recipient: None,
            origin: None,
            spawned_by: None,
            skills_snapshot: None,
            system_prompt_report: None,
            token_usage: BTreeMap::new(),
            raw: Value::Null,
        }
    }
}

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("session index is not a structured object (byte offset {offset})")]
    MalformedIndex { offset: usize },
}

/// Parse `sessions.json`. Tolerates both a flat sessionKey → meta map and a
/// map nested under a `sessions` field; side arrays are skipped with a
/// warning so every key/value pair is accounted for.
pub fn parse_session_index(content: &[u8]) -> Result<SessionIndex, IndexError> {
    let text = match std::str::from_utf8(content) {
        Ok(t) => t,
        Err(e) => {
            return Err(IndexError::MalformedIndex {
                offset: e.valid_up_to(),
            })
        }
    };
    let value: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            return Err(IndexError::MalformedIndex {
                offset: byte_offset(text, e.line(), e.column()),
            })
        }
    };
    let top = match value.as_object() {
        Some(o) => o,
        None => return Err(IndexError::MalformedIndex { offset: 0 }),
    };
    let map = match top.get("sessions").and_then(Value::as_object) {
        Some(nested) => nested,
        None => top,
    };

    let mut index = SessionIndex::default();
    for (key, val) in map {
        match val.as_object() {
            Some(obj) => {
                let (meta, mut warns) = parse_session_meta(obj, val);
                for w in &mut warns {
                    w.reason = format!("session {key}: {}", w.reason);
                }
                index.warnings.append(&mut warns);
                index.entries.insert(key.clone(), meta);
            }
            None => {
                // Side arrays and scalar bookkeeping fields are not sessions.
                if key != "sessions" {
                    index.warnings.push(ParseWarning::new(format!(
                        "index key {key} is not a session object; skipped"
                    )));
                }
            }
        }
    }
    Ok(index)
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let mut offset = 0;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return offset + column.saturating_sub(1).min(l.len());
        }
        offset += l.len() + 1;
    }
    offset.min(text.len())
}

fn parse_session_meta(obj: &JsonMap, raw: &Value) -> (SessionMeta, Vec<ParseWarning>) {
    let mut warnings = Vec::new();

    let session_id = pick_id(obj, &["sessionId", "session_id", "id"]);
    match &session_id {
        Some(id) if Uuid::parse_str(id).is_err() => {
            warnings.push(ParseWarning::new(format!("sessionId {id} is not a UUID")));
        }
        None => warnings.push(ParseWarning::new("missing sessionId")),
        _ => {}
    }

    let state = match pick_str(obj, &["state", "status"]).as_deref() {
        Some("idle") => Some(SessionState::Idle),
        Some("processing") => Some(SessionState::Processing),
        Some("waiting") => Some(SessionState::Waiting),
        Some(other) => {
            warnings.push(ParseWarning::new(format!("unknown session state {other:?}")));
            None
        }
        None => None,
    };

    let origin = pick_object(obj, &["origin"]).map(|o| {
        let provider = pick_str(o, &["provider", "channel"]).unwrap_or_default();
        if provider.is_empty() {
            warnings.push(ParseWarning::new("origin.provider empty"));
        }
        OriginInfo {
            provider,
            from: pick_id(o, &["from", "sender"]),
            label: pick_str(o, &["label"]),
        }
    });

    let skills_snapshot = pick_object(obj, &["skillsSnapshot", "skills_snapshot"]).map(|o| {
        let resolved: Vec<ResolvedSkill> = pick_array(o, &["resolvedSkills", "resolved_skills", "resolved"])
            .map(|items| {
                items
                    .iter()
                    .filter_map(Value::as_object)
                    .map(|r| ResolvedSkill {
                        name: pick_str(r, &["name"]).unwrap_or_default(),
                        path: pick_str(r, &["path"]).unwrap_or_default(),
                        source: pick_str(r, &["source"]),
                    })
                    .collect()
            })
            .unwrap_or_default();
        for skill in &resolved {
            if !skill.path.is_empty() && !skill.path.ends_with("SKILL.md") {
                warnings.push(ParseWarning::new(format!(
                    "resolved skill {} points at {:?}, not a SKILL.md",
                    skill.name, skill.path
                )));
            }
        }
        SkillsSnapshot {
            skills: pick(o, &["skills"]).map(string_list).unwrap_or_default(),
            resolved,
            prompt_text: pick_str(o, &["promptText", "prompt_text", "prompt"]),
        }
    });

    let system_prompt_report =
        pick_object(obj, &["systemPromptReport", "system_prompt_report"]).map(|o| {
            let injected_files = pick_array(
                o,
                &["injectedWorkspaceFiles", "injected_workspace_files", "injectedFiles", "injected_files"],
            )
            .map(|items| {
                items
                    .iter()
                    .filter_map(Value::as_object)
                    .map(|f| InjectedFile {
                        name: pick_str(f, &["name"]).unwrap_or_default(),
                        path: pick_str(f, &["path"]).unwrap_or_default(),
                        injected_chars: pick_u64(f, &["injectedChars", "injected_chars", "chars"])
                            .unwrap_or(0),
                    })
                    .collect()
            })
            .unwrap_or_default();
            let schema_metrics = pick_object(o, &["schemaMetrics", "schema_metrics", "metrics"])
                .map(|m| {
                    m.iter()
                        .filter_map(|(k, v)| v.as_i64().map(|i| (k.clone(), i)))
                        .collect()
                })
                .unwrap_or_default();
            SystemPromptReport {
                injected_files,
                tool_names: pick(o, &["toolNames", "tool_names", "tools"]).map(string_list),
                schema_metrics,
            }
        });

    let token_usage = pick_object(obj, &["tokenUsage", "token_usage", "usage"])
        .map(|m| {
            m.iter()
                .filter_map(|(k, v)| v.as_i64().map(|i| (k.clone(), i)))
                .collect()
        })
        .unwrap_or_default();

    let meta = SessionMeta {
        session_id,
        state,
        transcript_path: pick_str(obj, &["transcriptPath", "transcript_path", "transcript"]),
        model_provider: pick_str(obj, &["provider", "modelProvider", "model_provider"]),
        model_name: pick_str(obj, &["model", "modelName", "model_name"]),
        thinking_level: pick_str(obj, &["thinkingLevel", "thinking_level", "thinking"]),
        working_dir: pick_str(obj, &["cwd", "workingDir", "working_dir", "workspaceDir"]),
        channel: pick_str(obj, &["channel", "lastChannel", "last_channel"]),
        last_recipient: pick_str(obj, &["lastRecipient", "last_recipient", "lastTo", "last_to"]),
        origin,
        spawned_by: pick_str(obj, &["spawnedBy", "spawned_by"]),
        skills_snapshot,
        system_prompt_report,
        token_usage,
        raw: raw.clone(),
    };
    (meta, warnings)
}

// ---------------------------------------------------------------------------
// Transcript entries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Role {
    User,
    Assistant,
    ToolResult,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct UsageMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_tokens: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_tokens: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stop_reason: Option<String>,
    /// The raw usage object, including provider-specific fields.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provider_data: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ExecDetails {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duration_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exit_code: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

/// One typed content block of a message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContentBlock {
    Text { text: String },
    Thinking { text: String },
    ToolCall { id: String, name: String, arguments: Value },
    /// Text recognized inside `<final>` tags (user-visible for tag-filtered providers).
    FinalTagged { text: String },
    /// Text recognized inside `<think>` tags (internal for tag-filtered providers).
    ThinkTagged { text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub timestamp: Option<TimestampMs>,
    pub blocks: Vec<ContentBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub usage: Option<UsageMeta>,
    /// Set on toolResult messages: the toolCall id being answered.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub is_error: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<ExecDetails>,
    pub raw: Value,
}

impl Message {
    /// Concatenated plain-text content (Text blocks only).
    pub fn plain_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            if let ContentBlock::Text { text } = b {
                out.push_str(text);
            }
        }
        out
    }

    /// All text content in original order, tags stripped.
    pub fn full_text(&self) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            match b {
                ContentBlock::Text { text }
                | ContentBlock::FinalTagged { text }
                | ContentBlock::ThinkTagged { text } => out.push_str(text),
                _ => {}
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionHeader {
    pub version: i64,
    pub session_uuid: String,
    pub created: Option<TimestampMs>,
    pub working_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum EntryPayload {
    SessionHeader(SessionHeader),
    Message(Message),
    ModelChange {
        provider: Option<String>,
        model: Option<String>,
        timestamp: Option<TimestampMs>,
    },
    /// Context-window summarization marker; representation varies, so the
    /// raw record is what matters.
    Compaction {
        timestamp: Option<TimestampMs>,
        raw: Value,
    },
    Custom {
        entry_type: Option<String>,
        raw: Value,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub id: String,
    pub parent_id: Option<String>,
    /// 1-based line number in the transcript file.
    pub line: u64,
    pub payload: EntryPayload,
}

impl TranscriptEntry {
    pub fn timestamp(&self) -> Option<TimestampMs> {
        match &self.payload {
            EntryPayload::SessionHeader(h) => h.created,
            EntryPayload::Message(m) => m.timestamp,
            EntryPayload::ModelChange { timestamp, .. } => *timestamp,
            EntryPayload::Compaction { timestamp, .. } => *timestamp,
            EntryPayload::Custom { .. } => None,
        }
    }

    pub fn as_message(&self) -> Option<&Message> {
        match &self.payload {
            EntryPayload::Message(m) => Some(m),
            _ => None,
        }
    }
}

/// Parse a transcript byte-for-byte. Never fails: malformed lines become
/// warnings, one entry per well-formed line, in file order.
pub fn parse_transcript(content: &[u8]) -> (Vec<TranscriptEntry>, Vec<ParseWarning>) {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    let mut saw_header = false;
    let mut seen_ids: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();

    for (idx, raw_line) in content.split(|b| *b == b'\n').enumerate() {
        let line_no = (idx + 1) as u64;
        let trimmed = trim_ascii(raw_line);
        if trimmed.is_empty() {
            continue;
        }
        let text = match std::str::from_utf8(trimmed) {
            Ok(t) => t,
            Err(e) => {
                warnings.push(ParseWarning::at_line(line_no, format!("invalid UTF-8: {e}")));
                continue;
            }
        };
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                warnings.push(ParseWarning::at_line(line_no, format!("malformed JSON: {e}")));
                continue;
            }
        };
        let obj = match value.as_object() {
            Some(o) => o,
            None => {
                warnings.push(ParseWarning::at_line(line_no, "line is not a JSON object"));
                continue;
            }
        };

        let id = pick_id(obj, &["id", "uuid"]).unwrap_or_else(|| {
            warnings.push(ParseWarning::at_line(line_no, "entry has no id"));
            format!("#line{line_no}")
        });
        if !seen_ids.insert(id.clone()) {
            warnings.push(ParseWarning::at_line(
                line_no,
                format!("entry id {id} duplicates an earlier entry"),
            ));
        }
        let parent_id = match pick(obj, &["parentId", "parent_id"]) {
            Some(Value::Null) | None => None,
            Some(v) => v.as_str().map(str::to_owned),
        };

        let payload = parse_payload(obj, &value, line_no, &mut warnings);

        if let EntryPayload::SessionHeader(h) = &payload {
            if saw_header {
                warnings.push(ParseWarning::at_line(line_no, "duplicate session header"));
            } else if entries.is_empty() && h.version != 3 {
                warnings.push(ParseWarning::at_line(
                    line_no,
                    format!("session header version {} (expected 3)", h.version),
                ));
            }
            saw_header = true;
        } else if entries.is_empty() && !saw_header {
            warnings.push(ParseWarning::at_line(
                line_no,
                "transcript does not begin with a session header",
            ));
            saw_header = true; // warn once
        }

        entries.push(TranscriptEntry {
            id,
            parent_id,
            line: line_no,
            payload,
        });
    }
    (entries, warnings)
}

fn trim_ascii(bytes: &[u8]) -> &[u8] {
    let start = bytes.iter().position(|b| !b.is_ascii_whitespace());
    match start {
        None => &[],
        Some(s) => {
            let end = bytes.iter().rposition(|b| !b.is_ascii_whitespace()).unwrap();
            &bytes[s..=end]
        }
    }
}

fn parse_payload(
    obj: &JsonMap,
    raw: &Value,
    line_no: u64,
    warnings: &mut Vec<ParseWarning>,
) -> EntryPayload {
    let entry_type = pick_str(obj, &["type", "kind"]);
    match entry_type.as_deref() {
        Some("session") | Some("header") | Some("session_header") => {
            let version = pick_i64(obj, &["version", "v"]).unwrap_or_else(|| {
                warnings.push(ParseWarning::at_line(line_no, "session header missing version"));
                -1
            });
            let session_uuid = pick_id(obj, &["sessionId", "session_id", "sessionUuid", "uuid"])
                .unwrap_or_default();
            if Uuid::parse_str(&session_uuid).is_err() {
                warnings.push(ParseWarning::at_line(
                    line_no,
                    format!("session header uuid {session_uuid:?} is not a UUID"),
                ));
            }
            EntryPayload::SessionHeader(SessionHeader {
                version,
                session_uuid,
                created: pick_timestamp(obj, &["created", "createdAt", "timestamp", "time"]),
                working_dir: pick_str(obj, &["cwd", "workingDir", "working_dir"]),
            })
        }
        Some("message") | Some("msg") => parse_message(obj, raw, line_no, warnings),
        Some("model_change") | Some("modelChange") | Some("model-change") => {
            EntryPayload::ModelChange {
                provider: pick_str(obj, &["provider"]),
                model: pick_str(obj, &["model", "modelName"]),
                timestamp: pick_timestamp(obj, &["timestamp", "time", "ts"]),
            }
        }
        Some("compaction") | Some("compact") | Some("summary_compaction") => {
            EntryPayload::Compaction {
                timestamp: pick_timestamp(obj, &["timestamp", "time", "ts"]),
                raw: raw.clone(),
            }
        }
        // Some dialects put `role` at the top level without a type tag.
        None if obj.contains_key("role") => parse_message(obj, raw, line_no, warnings),
        other => EntryPayload::Custom {
            entry_type: other.map(str::to_owned),
            raw: raw.clone(),
        },
    }
}

fn parse_message(
    obj: &JsonMap,
    raw: &Value,
    line_no: u64,
    warnings: &mut Vec<ParseWarning>,
) -> EntryPayload {
    // Message bodies are either inline or nested under `message`.
    let body = pick_object(obj, &["message"]).unwrap_or(obj);
    let role = match pick_str(body, &["role"]).as_deref() {
        Some("user") => Role::User,
        Some("assistant") => Role::Assistant,
        Some("toolResult") | Some("tool_result") | Some("tool-result") => Role::ToolResult,
        other => {
            warnings.push(ParseWarning::at_line(
                line_no,
                format!("unrecognized message role {other:?}; retained raw"),
            ));
            return EntryPayload::Custom {
                entry_type: Some("message".into()),
                raw: raw.clone(),
            };
        }
    };

    let mut blocks = Vec::new();
    match pick(body, &["content", "blocks"]) {
        Some(Value::String(s)) => blocks.push(ContentBlock::Text { text: s.clone() }),
        Some(Value::Array(items)) => {
            for item in items {
                match item {
                    Value::String(s) => blocks.push(ContentBlock::Text { text: s.clone() }),
                    Value::Object(o) => {
                        if let Some(b) = parse_block(o, line_no, warnings) {
                            blocks.push(b);
                        }
                    }
                    _ => warnings.push(ParseWarning::at_line(
                        line_no,
                        "unrecognized content block shape; skipped",
                    )),
                }
            }
        }
        Some(_) => warnings.push(ParseWarning::at_line(line_no, "content is neither string nor array")),
        None => {}
    }

    // Reasoning-tag extraction applies only when the provider did not emit
    // structured thinking blocks (tag-filtered providers nest tags in text).
    let has_structured_thinking = blocks
        .iter()
        .any(|b| matches!(b, ContentBlock::Thinking { .. }));
    if role == Role::Assistant && !has_structured_thinking {
        blocks = expand_reasoning_tags(blocks, line_no, warnings);
    }

    let usage = pick_object(body, &["usage", "usageMeta", "usage_meta"]).map(|u| UsageMeta {
        input_tokens: pick_u64(u, &["input_tokens", "inputTokens", "input"]),
        output_tokens: pick_u64(u, &["output_tokens", "outputTokens", "output"]),
        cost: pick_f64(u, &["cost", "costUsd", "cost_usd"]),
        stop_reason: pick_str(u, &["stopReason", "stop_reason"]),
        provider_data: Some(Value::Object(u.clone())),
    });

    let details = pick_object(body, &["details"]).map(|d| ExecDetails {
        duration_ms: pick_u64(d, &["durationMs", "duration_ms"]),
        exit_code: pick_i64(d, &["exitCode", "exit_code"]),
        status: pick_str(d, &["status"]),
    });

    let tool_call_id = pick_id(body, &["toolCallId", "tool_call_id", "tool_use_id"]);
    if role == Role::ToolResult && tool_call_id.is_none() {
        warnings.push(ParseWarning::at_line(line_no, "toolResult without toolCallId"));
    }

    EntryPayload::Message(Message {
        role,
        timestamp: pick_timestamp(body, &["timestamp", "time", "ts"])
            .or_else(|| pick_timestamp(obj, &["timestamp", "time", "ts"])),
        blocks,
        usage,
        tool_call_id,
        is_error: pick_bool(body, &["isError", "is_error"]),
        details,
        raw: raw.clone(),
    })
}

fn parse_block(o: &JsonMap, line_no: u64, warnings: &mut Vec<ParseWarning>) -> Option<ContentBlock> {
    match pick_str(o, &["type", "kind"]).as_deref() {
        Some("text") => Some(ContentBlock::Text {
            text: pick_str(o, &["text", "value"]).unwrap_or_default(),
        }),
        Some("thinking") => Some(ContentBlock::Thinking {
            text: pick_str(o, &["thinking", "text", "value"]).unwrap_or_default(),
        }),
        Some("toolCall") | Some("tool_call") | Some("tool_use") | Some("tool-call") => {
            let id = pick_id(o, &["id", "toolCallId", "tool_call_id"]).unwrap_or_default();
            if id.is_empty() {
                warnings.push(ParseWarning::at_line(line_no, "toolCall block without id"));
            }
            Some(ContentBlock::ToolCall {
                id,
                name: pick_str(o, &["name", "tool", "toolName"]).unwrap_or_default(),
                arguments: pick(o, &["arguments", "args", "input", "params"])
                    .cloned()
                    .unwrap_or(Value::Null),
            })
        }
        other => {
            warnings.push(ParseWarning::at_line(
                line_no,
                format!("unknown content block type {other:?}; skipped"),
            ));
            None
        }
    }
}

/// Split `<final>`/`<think>` spans out of raw text blocks. Matching is
/// innermost-first; an unclosed tag extends to the end of the block and
/// emits a warning.
fn expand_reasoning_tags(
    blocks: Vec<ContentBlock>,
    line_no: u64,
    warnings: &mut Vec<ParseWarning>,
) -> Vec<ContentBlock> {
    let mut out = Vec::with_capacity(blocks.len());
    for block in blocks {
        match block {
            ContentBlock::Text { text }
                if text.contains("<final>") || text.contains("<think>") =>
            {
                split_tagged(&text, line_no, warnings, &mut out);
            }
            other => out.push(other),
        }
    }
    out
}

fn split_tagged(
    text: &str,
    line_no: u64,
    warnings: &mut Vec<ParseWarning>,
    out: &mut Vec<ContentBlock>,
) {
    #[derive(Clone, Copy, PartialEq)]
    enum Tag {
        Final,
        Think,
    }
    let open = |t: Tag| match t {
        Tag::Final => "<final>",
        Tag::Think => "<think>",
    };
    let close = |t: Tag| match t {
        Tag::Final => "</final>",
        Tag::Think => "</think>",
    };
    let make = |t: Tag, s: &str| match t {
        Tag::Final => ContentBlock::FinalTagged { text: s.to_string() },
        Tag::Think => ContentBlock::ThinkTagged { text: s.to_string() },
    };

    let mut rest = text;
    loop {
        let next_final = rest.find(open(Tag::Final));
        let next_think = rest.find(open(Tag::Think));
        let (pos, tag) = match (next_final, next_think) {
            (Some(f), Some(t)) if f <= t => (f, Tag::Final),
            (Some(_), Some(t)) => (t, Tag::Think),
            (Some(f), None) => (f, Tag::Final),
            (None, Some(t)) => (t, Tag::Think),
            (None, None) => {
                if !rest.is_empty() {
                    out.push(ContentBlock::Text { text: rest.to_string() });
                }
                return;
            }
        };
        if pos > 0 {
            out.push(ContentBlock::Text { text: rest[..pos].to_string() });
        }
        let after_open = &rest[pos + open(tag).len()..];
        // Innermost match: if another opener of the same kind appears before
        // the close, recurse on the inner region first.
        match after_open.find(close(tag)) {
            Some(end) => {
                let inner = &after_open[..end];
                if let Some(inner_open) = inner.find(open(tag)) {
                    out.push(ContentBlock::Text {
                        text: inner[..inner_open].to_string(),
                    });
                    out.push(make(tag, &inner[inner_open + open(tag).len()..]));
                } else {
                    out.push(make(tag, inner));
                }
                rest = &after_open[end + close(tag).len()..];
            }
            None => {
                warnings.push(ParseWarning::at_line(
                    line_no,
                    format!("unclosed {} tag; extended to end of block", open(tag)),
                ));
                out.push(make(tag, after_open));
                return;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Session resolution (index vs. files on disk)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SessionFileStatus {
    /// `<sessionId>.jsonl` referenced by the index.
    Indexed,
    /// `<sessionId>.jsonl.deleted.<timestamp>`: retired in place.
    SoftDeleted { deleted_at: TimestampMs },
    /// `.jsonl` on disk but absent from the index.
    Orphaned,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub file_name: String,
    pub session_id: String,
    pub status: SessionFileStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index_key: Option<String>,
}

/// An index entry whose transcript file is missing from disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DanglingIndexEntry {
    pub session_key: String,
    pub session_id: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SessionResolution {
    pub records: Vec<SessionRecord>,
    pub dangling: Vec<DanglingIndexEntry>,
    /// Directory entries that are neither transcripts nor soft-deleted
    /// transcripts (e.g. sessions.json itself).
    pub ignored: Vec<String>,
}

/// Soft-delete filename: `<stem>.jsonl.deleted.<integer-epoch>`.
pub fn parse_soft_delete_name(name: &str) -> Option<(String, TimestampMs)> {
    let (head, digits) = name.rsplit_once('.')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let stem = head.strip_suffix(".jsonl.deleted")?;
    if stem.is_empty() {
        return None;
    }
    let epoch: i64 = digits.parse().ok()?;
    Some((stem.to_string(), TimestampMs::from_epoch_any(epoch)))
}

/// Partition a sessions-directory listing into Indexed / SoftDeleted /
/// Orphaned transcript files, plus dangling index entries.
pub fn resolve_sessions(index: &SessionIndex, listing: &[String]) -> SessionResolution {
    let mut resolution = SessionResolution::default();
    let indexed: BTreeMap<&str, &str> = index
        .entries
        .iter()
        .filter_map(|(k, m)| m.session_id.as_deref().map(|id| (id, k.as_str())))
        .collect();

    let mut seen_on_disk: Vec<&str> = Vec::new();
    let mut sorted: Vec<&String> = listing.iter().collect();
    sorted.sort();

    for name in sorted {
        if let Some((stem, deleted_at)) = parse_soft_delete_name(name) {
            let index_key = indexed.get(stem.as_str()).map(|k| k.to_string());
            resolution.records.push(SessionRecord {
                file_name: name.clone(),
                session_id: stem,
                status: SessionFileStatus::SoftDeleted { deleted_at },
                index_key,
            });
        } else if let Some(stem) = name.strip_suffix(".jsonl") {
            match indexed.get(stem) {
                Some(key) => {
                    seen_on_disk.push(stem);
                    resolution.records.push(SessionRecord {
                        file_name: name.clone(),
                        session_id: stem.to_string(),
                        status: SessionFileStatus::Indexed,
                        index_key: Some(key.to_string()),
                    });
                }
                None => resolution.records.push(SessionRecord {
                    file_name: name.clone(),
                    session_id: stem.to_string(),
                    status: SessionFileStatus::Orphaned,
                    index_key: None,
                }),
            }
        } else {
            resolution.ignored.push(name.clone());
        }
    }

    for (id, key) in &indexed {
        if !seen_on_disk.contains(id) {
            resolution.dangling.push(DanglingIndexEntry {
                session_key: key.to_string(),
                session_id: id.to_string(),
            });
        }
    }
    resolution.dangling.sort_by(|a, b| a.session_key.cmp(&b.session_key));
    resolution
}

// ---------------------------------------------------------------------------
// Channel attribution and visibility
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaRef {
    pub path: String,
    pub mime: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

/// Sender identity and message metadata recovered from a channel message
/// header embedded in stored user text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelAttribution {
    pub channel: String,
    pub display_name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub handle: Option<String>,
    pub platform_user_id: String,
    /// Minute-granular UTC timestamp from the header.
    pub message_time: TimestampMs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub platform_message_id: Option<u64>,
    pub media_refs: Vec<MediaRef>,
}

fn header_regex() -> &'static Regex {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(
            r"^\[([A-Za-z][A-Za-z0-9_-]*) (.+?)(?: \(@([^)\s]+)\))? id:(\d+) (\d{4}-\d{2}-\d{2}) (\d{2}:\d{2}) UTC\]$",
        )
        .expect("header regex")
    })
}

fn message_id_regex() -> &'static Regex {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\[message_id:\s*(\d+)\]$").expect("message_id regex"))
}

fn media_note_regex() -> &'static Regex {
    static RE: std::sync::OnceLock<Regex> = std::sync::OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"^\[media attached:\s*(.+?) \(([^()]+)\)(?:\s*\|\s*(\S+))?\]$")
            .expect("media note regex")
    })
}

/// Parse `[media attached: PATH (mime/type) | URL]` notes from message text.
pub fn parse_media_notes(text: &str) -> Vec<MediaRef> {
    text.lines()
        .filter_map(|line| {
            media_note_regex().captures(line.trim()).map(|c| MediaRef {
                path: c[1].to_string(),
                mime: c[2].to_string(),
                url: c.get(3).map(|m| m.as_str().to_string()),
            })
        })
        .collect()
}

/// Parse the leading bracketed channel header of a stored user message.
/// Header-less channels are valid: returns `(None, [])`. A bracketed line
/// that looks like a header but violates the grammar yields best-effort
/// fields plus a warning.
pub fn extract_user_attribution(m: &Message) -> (Option<ChannelAttribution>, Vec<ParseWarning>) {
    debug_assert_eq!(m.role, Role::User);
    let text = m.plain_text();
    let first_line = match text.lines().next() {
        Some(l) => l.trim_end(),
        None => return (None, Vec::new()),
    };

    // Candidate headers carry an ` id:` token inside a bracketed first line;
    // ordinary bracketed prose is left alone.
    let is_candidate =
        first_line.starts_with('[') && first_line.ends_with(']') && first_line.contains(" id:");
    if !is_candidate {
        return (None, Vec::new());
    }

    let mut warnings = Vec::new();
    let platform_message_id = text
        .lines()
        .find_map(|l| message_id_regex().captures(l.trim()))
        .and_then(|c| c[1].parse().ok());
    let media_refs = parse_media_notes(&text);

    match header_regex().captures(first_line) {
        Some(c) => {
            let date = &c[5];
            let time = &c[6];
            let message_time = crate::common::parse_timestamp_str(&format!("{date} {time} UTC"))
                .unwrap_or_else(|| {
                    warnings.push(ParseWarning::new(format!(
                        "header timestamp {date} {time} not a valid date"
                    )));
                    TimestampMs(0)
                });
            (
                Some(ChannelAttribution {
                    channel: c[1].to_string(),
                    display_name: c[2].to_string(),
                    handle: c.get(3).map(|m| m.as_str().to_string()),
                    platform_user_id: c[4].to_string(),
                    message_time,
                    platform_message_id,
                    media_refs,
                }),
                warnings,
            )
        }
        None => {
            warnings.push(
                ParseWarning::new(format!("malformed channel header: {first_line:?}")),
            );
            // Best effort: channel word and id if present.
            let channel = first_line[1..]
                .split_whitespace()
                .next()
                .unwrap_or("")
                .trim_end_matches(']')
                .to_string();
            let platform_user_id = first_line
                .split(" id:")
                .nth(1)
                .map(|s| s.chars().take_while(|c| c.is_ascii_digit()).collect())
                .unwrap_or_default();
            (
                Some(ChannelAttribution {
                    channel,
                    display_name: String::new(),
                    handle: None,
                    platform_user_id,
                    message_time: TimestampMs(0),
                    platform_message_id,
                    media_refs,
                }),
                warnings,
            )
        }
    }
}

/// How the provider handles reasoning output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProviderMode {
    /// Only `<final>`-tagged text reaches the user.
    TagFiltered,
    /// Native thinking support: text content is forwarded unfiltered.
    NativeThinking,
}

/// The subset of an assistant message that the user actually saw.
pub fn visible_output(m: &Message, mode: ProviderMode) -> String {
    debug_assert_eq!(m.role, Role::Assistant);
    match mode {
        ProviderMode::TagFiltered => {
            let mut out = String::new();
            for b in &m.blocks {
                if let ContentBlock::FinalTagged { text } = b {
                    out.push_str(text);
                }
            }
            out
        }
        ProviderMode::NativeThinking => m.full_text(),
    }
}

// ---------------------------------------------------------------------------
// Media filenames
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaName {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub original: Option<String>,
    pub uuid: Uuid,
    pub ext: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MediaNameError {
    #[error("no UUID component in media filename {0:?}")]
    NotMediaName(String),
}

/// Inbound media names are `{sanitized_original}---{uuid}.{ext}` or just
/// `{uuid}.{ext}`. The original may itself contain `---`; only the last
/// separator yields a valid UUID, so split there.
pub fn parse_media_filename(name: &str) -> Result<MediaName, MediaNameError> {
    fn uuid_and_ext(s: &str) -> Option<(Uuid, String)> {
        if s.len() < 36 {
            return None;
        }
        let (uuid_part, rest) = s.split_at(36);
        let uuid = Uuid::parse_str(uuid_part).ok()?;
        let ext = match rest.strip_prefix('.') {
            Some(e) => e.to_string(),
            None if rest.is_empty() => String::new(),
            None => return None,
        };
        Some((uuid, ext))
    }

    if let Some((original, tail)) = name.rsplit_once("---") {
        if let Some((uuid, ext)) = uuid_and_ext(tail) {
            return Ok(MediaName {
                original: Some(original.to_string()),
                uuid,
                ext,
            });
        }
    }
    if let Some((uuid, ext)) = uuid_and_ext(name) {
        return Ok(MediaName {
            original: None,
            uuid,
            ext,
        });
    }
    Err(MediaNameError::NotMediaName(name.to_string()))
}

// ---------------------------------------------------------------------------
// Session keys
// ---------------------------------------------------------------------------

/// Parsed form of a sessionKey such as `agent:main:main`,
/// `agent:main:subagent:<uuid>`, or `cron:<jobId>`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionKeyKind {
    Main,
    Subagent { child_uuid: String },
    Cron { job_id: String },
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionKey {
    pub raw: String,
    pub agent_id: Option<String>,
    pub kind: SessionKeyKind,
}

pub fn parse_session_key(raw: &str) -> SessionKey {
    let parts: Vec<&str> = raw.split(':').collect();
    let (agent_id, tail): (Option<String>, &[&str]) = if parts.first() == Some(&"agent") && parts.len() >= 3 {
        (Some(parts[1].to_string()), &parts[2..])
    } else {
        (None, &parts[..])
    };
    let kind = match tail {
        ["main"] => SessionKeyKind::Main,
        ["subagent", uuid] => SessionKeyKind::Subagent {
            child_uuid: uuid.to_string(),
        },
        ["cron", job_id] => SessionKeyKind::Cron {
            job_id: job_id.to_string(),
        },
        _ => SessionKeyKind::Other,
    };
    SessionKey {
        raw: raw.to_string(),
        agent_id,
        kind,
    }
}

/// Syntactic validity for spawnedBy values: at least two `:`-separated,
/// non-empty segments.
pub fn is_valid_session_key(raw: &str) -> bool {
    let parts: Vec<&str> = raw.split(':').collect();
    parts.len() >= 2 && parts.iter().all(|p| !p.is_empty())
}
