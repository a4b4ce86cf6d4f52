//! Parsers for the non-transcript artifacts: configuration and its backup
//! chain, runtime logs, cron state, the subagent registry, and the agent
//! workspace (identity files, daily memory, skills).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::Digest;
use thiserror::Error;

use crate::common::{ParseWarning, TimestampMs};
use crate::jsonx::{
    pick, pick_array, pick_bool, pick_id, pick_object, pick_str, pick_timestamp, string_list,
    JsonMap,
};
use crate::store::log_file_date;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentEntry {
    pub id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workspace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agent_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub enabled: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bot_token: Option<String>,
    /// Policy and everything else the channel section carried.
    pub raw: Value,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ConfigMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_touched_at: Option<TimestampMs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub last_touched_version: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default_model: Option<String>,
    pub agents: Vec<AgentEntry>,
    pub channels: BTreeMap<String, ChannelConfig>,
    /// Relative to the store root unless absolute. Defaults to `workspace/`.
    pub workspace_root: String,
    pub meta: ConfigMeta,
    pub raw: Value,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed config (byte offset {offset}): {reason}")]
    MalformedConfig { offset: usize, reason: String },
}

pub const DEFAULT_WORKSPACE_ROOT: &str = "workspace/";

pub fn parse_config(content: &[u8]) -> Result<AgentConfig, ConfigError> {
    let text = std::str::from_utf8(content).map_err(|e| ConfigError::MalformedConfig {
        offset: e.valid_up_to(),
        reason: "invalid UTF-8".into(),
    })?;
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::MalformedConfig {
        offset: 0,
        reason: e.to_string(),
    })?;
    let top = value.as_object().ok_or(ConfigError::MalformedConfig {
        offset: 0,
        reason: "top level is not an object".into(),
    })?;

    let agents_section = pick_object(top, &["agents"]);
    let default_model = agents_section
        .and_then(|a| {
            pick_str(a, &["defaultModel", "default_model"])
                .or_else(|| pick_object(a, &["defaults"]).and_then(|d| pick_str(d, &["model"])))
        })
        .or_else(|| pick_str(top, &["defaultModel", "default_model", "model"]));

    let agents = agents_section
        .and_then(|a| pick_array(a, &["list"]))
        .map(|items| {
            items
                .iter()
                .filter_map(Value::as_object)
                .filter_map(|o| {
                    pick_id(o, &["id", "name"]).map(|id| AgentEntry {
                        id,
                        model: pick_str(o, &["model"]),
                        workspace: pick_str(o, &["workspace", "workspaceDir", "workspace_dir"]),
                        agent_dir: pick_str(o, &["agentDir", "agent_dir"]),
                    })
                })
                .collect()
        })
        .unwrap_or_default();

    let channels = pick_object(top, &["channels"])
        .map(|chs| {
            chs.iter()
                .filter_map(|(name, v)| {
                    v.as_object().map(|o| {
                        (
                            name.clone(),
                            ChannelConfig {
                                enabled: pick_bool(o, &["enabled"]).unwrap_or(false),
                                bot_token: pick_str(o, &["botToken", "bot_token", "token"]),
                                raw: v.clone(),
                            },
                        )
                    })
                })
                .collect()
        })
        .unwrap_or_default();

    let workspace_root = pick_str(top, &["workspaceRoot", "workspace_root"])
        .or_else(|| agents_section.and_then(|a| pick_str(a, &["workspaceRoot", "workspace_root"])))
        .unwrap_or_else(|| DEFAULT_WORKSPACE_ROOT.to_string());

    let meta = pick_object(top, &["meta"])
        .map(|m| ConfigMeta {
            last_touched_at: pick_timestamp(m, &["lastTouchedAt", "last_touched_at"]),
            last_touched_version: pick_str(m, &["lastTouchedVersion", "last_touched_version"]),
        })
        .unwrap_or_default();

    Ok(AgentConfig {
        default_model,
        agents,
        channels,
        workspace_root,
        meta,
        raw: value,
    })
}

/// Key substrings treated as credential material in reports.
const SENSITIVE_KEY_PARTS: &[&str] = &[
    "token", "secret", "password", "apikey", "api_key", "credential", "auth",
];

/// Replace credential-looking string values with a keyed digest so reports
/// stay comparable without exposing the material. Opt out with `--reveal`.
pub fn redact_credentials(value: &mut Value) {
    match value {
        Value::Object(map) => {
            for (key, val) in map.iter_mut() {
                let lower = key.to_ascii_lowercase();
                let sensitive = SENSITIVE_KEY_PARTS.iter().any(|p| lower.contains(p));
                if sensitive {
                    if let Value::String(s) = val {
                        let digest = hex::encode(sha2::Sha256::digest(s.as_bytes()));
                        *val = Value::String(format!("sha256:{}", &digest[..16]));
                        continue;
                    }
                }
                redact_credentials(val);
            }
        }
        Value::Array(items) => {
            for item in items {
                redact_credentials(item);
            }
        }
        _ => {}
    }
}

// ---------------------------------------------------------------------------
// Configuration history
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingBasis {
    LastTouchedAt,
    MtimeFallback,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub source_path: String,
    pub ordering_key: TimestampMs,
    pub ordering_basis: OrderingBasis,
    pub config: AgentConfig,
}

/// Live config plus every backup, ordered by lastTouchedAt ascending.
/// Backup filename numbering is not trusted; a snapshot without `meta`
/// falls back to file mtime and is flagged as such.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConfigHistory {
    pub snapshots: Vec<ConfigSnapshot>,
    pub warnings: Vec<ParseWarning>,
}

/// Raw material for one history entry: relative path, file bytes, file mtime.
pub struct ConfigSource {
    pub path: String,
    pub content: Vec<u8>,
    pub mtime: TimestampMs,
}

pub fn load_config_history(sources: Vec<ConfigSource>) -> ConfigHistory {
    let mut history = ConfigHistory::default();
    for src in sources {
        match parse_config(&src.content) {
            Ok(config) => {
                let (ordering_key, ordering_basis) = match config.meta.last_touched_at {
                    Some(t) => (t, OrderingBasis::LastTouchedAt),
                    None => (src.mtime, OrderingBasis::MtimeFallback),
                };
                history.snapshots.push(ConfigSnapshot {
                    source_path: src.path,
                    ordering_key,
                    ordering_basis,
                    config,
                });
            }
            Err(e) => history
                .warnings
                .push(ParseWarning::new(e.to_string()).with_path(src.path)),
        }
    }
    history
        .snapshots
        .sort_by(|a, b| (a.ordering_key, &a.source_path).cmp(&(b.ordering_key, &b.source_path)));
    history
}

/// The snapshot in effect at time `t`: greatest ordering key ≤ t.
/// `None` when `t` precedes every snapshot.
pub fn config_at(history: &ConfigHistory, t: TimestampMs) -> Option<&ConfigSnapshot> {
    history
        .snapshots
        .iter()
        .rev()
        .find(|s| s.ordering_key <= t)
}

// ---------------------------------------------------------------------------
// Config diffing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChangeKind {
    Added,
    Removed,
    Changed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDelta {
    /// Canonical dotted path, e.g. `agents.default_model` or `channels.discord`.
    pub path: String,
    pub change: ChangeKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub before: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub after: Option<Value>,
}

/// Structural deep diff over the raw config documents, leaf-first, in
/// deterministic path order.
pub fn diff_configs(a: &AgentConfig, b: &AgentConfig) -> Vec<ConfigDelta> {
    let mut deltas = Vec::new();
    diff_values("", &a.raw, &b.raw, &mut deltas);
    deltas.sort_by(|x, y| x.path.cmp(&y.path));
    deltas
}

fn join_path(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<ConfigDelta>) {
    match (a, b) {
        (Value::Object(ao), Value::Object(bo)) => {
            let mut keys: Vec<&String> = ao.keys().chain(bo.keys()).collect();
            keys.sort();
            keys.dedup();
            for key in keys {
                let p = join_path(path, key);
                match (ao.get(key), bo.get(key)) {
                    (Some(av), Some(bv)) => diff_values(&p, av, bv, out),
                    (Some(av), None) => out.push(ConfigDelta {
                        path: p,
                        change: ChangeKind::Removed,
                        before: Some(av.clone()),
                        after: None,
                    }),
                    (None, Some(bv)) => out.push(ConfigDelta {
                        path: p,
                        change: ChangeKind::Added,
                        before: None,
                        after: Some(bv.clone()),
                    }),
                    (None, None) => unreachable!(),
                }
            }
        }
        (Value::Array(aa), Value::Array(ba)) => {
            for i in 0..aa.len().max(ba.len()) {
                let p = join_path(path, &i.to_string());
                match (aa.get(i), ba.get(i)) {
                    (Some(av), Some(bv)) => diff_values(&p, av, bv, out),
                    (Some(av), None) => out.push(ConfigDelta {
                        path: p,
                        change: ChangeKind::Removed,
                        before: Some(av.clone()),
                        after: None,
                    }),
                    (None, Some(bv)) => out.push(ConfigDelta {
                        path: p,
                        change: ChangeKind::Added,
                        before: None,
                        after: Some(bv.clone()),
                    }),
                    (None, None) => unreachable!(),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(ConfigDelta {
            path: path.to_string(),
            change: ChangeKind::Changed,
            before: Some(a.clone()),
            after: Some(b.clone()),
        }),
    }
}

// ---------------------------------------------------------------------------
// Runtime logs
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogEventKind {
    ToolStart,
    ToolEnd,
    ToolSchemaSnapshot,
    RunStage,
    ChannelHealth,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEvent {
    pub time: TimestampMs,
    pub subsystem: String,
    pub kind: LogEventKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub run_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tool_name: Option<String>,
    /// Populated for schema snapshots: the tool set exposed for the run.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// 1-based line in the log file.
    pub line: u64,
    pub raw: Value,
}

/// Marker strings that drive log-event classification. Snapshot markers in
/// particular vary by provider, so the set is caller-configurable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkerTable {
    pub schema_snapshot: Vec<String>,
    pub tool_start: Vec<String>,
    pub tool_end: Vec<String>,
    pub run_stages: Vec<String>,
}

impl Default for MarkerTable {
    fn default() -> Self {
        MarkerTable {
            schema_snapshot: vec![
                "google tool schema snapshot".into(),
                "tool schema snapshot".into(),
            ],
            tool_start: vec!["tool start".into()],
            tool_end: vec!["tool end".into()],
            run_stages: vec![
                "prompt start".into(),
                "agent start".into(),
                "agent end".into(),
                "prompt end".into(),
            ],
        }
    }
}

impl MarkerTable {
    fn classify(&self, message: &str, subsystem: &str) -> LogEventKind {
        let msg = message.to_ascii_lowercase();
        if self.schema_snapshot.iter().any(|m| msg.contains(m)) {
            LogEventKind::ToolSchemaSnapshot
        } else if self.tool_start.iter().any(|m| msg.contains(m)) {
            LogEventKind::ToolStart
        } else if self.tool_end.iter().any(|m| msg.contains(m)) {
            LogEventKind::ToolEnd
        } else if self.run_stages.iter().any(|m| msg.contains(m)) {
            LogEventKind::RunStage
        } else if subsystem.starts_with("gateway/channels/") {
            LogEventKind::ChannelHealth
        } else {
            LogEventKind::Other
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParsedLogFile {
    pub file_name: String,
    /// Calendar date baked into the filename, when valid.
    pub file_date: Option<chrono::NaiveDate>,
    pub events: Vec<LogEvent>,
    pub warnings: Vec<ParseWarning>,
}

/// Line-salvage parse of one `openclaw-YYYY-MM-DD.log` file. Every non-empty
/// line becomes exactly one event or one warning.
pub fn parse_log_file(content: &[u8], file_name: &str, markers: &MarkerTable) -> ParsedLogFile {
    let mut parsed = ParsedLogFile {
        file_name: file_name.to_string(),
        file_date: log_file_date(file_name),
        events: Vec::new(),
        warnings: Vec::new(),
    };
    if parsed.file_date.is_none() {
        parsed.warnings.push(
            ParseWarning::new("filename does not match openclaw-YYYY-MM-DD.log")
                .with_path(file_name),
        );
    }

    for (idx, raw_line) in content.split(|b| *b == b'\n').enumerate() {
        let line_no = (idx + 1) as u64;
        let trimmed: Vec<u8> = raw_line
            .iter()
            .copied()
            .skip_while(|b| b.is_ascii_whitespace())
            .collect();
        if trimmed.is_empty() {
            continue;
        }
        let text = match std::str::from_utf8(raw_line) {
            Ok(t) => t.trim(),
            Err(e) => {
                parsed
                    .warnings
                    .push(ParseWarning::at_line(line_no, format!("invalid UTF-8: {e}")));
                continue;
            }
        };
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => {
                parsed
                    .warnings
                    .push(ParseWarning::at_line(line_no, format!("malformed JSON: {e}")));
                continue;
            }
        };
        let obj = match value.as_object() {
            Some(o) => o,
            None => {
                parsed
                    .warnings
                    .push(ParseWarning::at_line(line_no, "line is not a JSON object"));
                continue;
            }
        };
        let time = match pick_timestamp(obj, &["time", "timestamp", "ts"]) {
            Some(t) => t,
            None => {
                parsed
                    .warnings
                    .push(ParseWarning::at_line(line_no, "log entry has no parseable time"));
                continue;
            }
        };
        let subsystem =
            pick_str(obj, &["subsystem", "module", "scope", "name"]).unwrap_or_default();
        let message = pick_str(obj, &["msg", "message", "event"]);
        let kind = markers.classify(message.as_deref().unwrap_or(""), &subsystem);
        let tool_names = match kind {
            LogEventKind::ToolSchemaSnapshot => pick(obj, &["tools", "toolNames", "tool_names"])
                .map(string_list)
                .unwrap_or_default(),
            _ => Vec::new(),
        };
        parsed.events.push(LogEvent {
            time,
            subsystem,
            kind,
            run_id: pick_id(obj, &["runId", "run_id"]),
            tool_call_id: pick_id(obj, &["toolCallId", "tool_call_id"]),
            tool_name: pick_str(obj, &["tool", "toolName", "tool_name"]),
            tool_names,
            message,
            line: line_no,
            raw: value,
        });
    }
    parsed
}

// ---------------------------------------------------------------------------
// Log retention
// ---------------------------------------------------------------------------

/// Hard-coded runtime policy: log files older than 24 hours are deleted
/// (cleanup runs at logger init or config change, so stale files survive).
pub const LOG_RETENTION_MS: i64 = 24 * 60 * 60 * 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "flag", rename_all = "kebab-case")]
pub enum RetentionFlag {
    /// No logs inside the expected-surviving window.
    MissingExpectedLogs,
    /// A log older than the window survived. Possible, not proof of anything:
    /// cleanup only runs at logger init or config change.
    StaleSurvivor { file: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetentionReport {
    pub window_start: TimestampMs,
    pub window_end: TimestampMs,
    pub logs_in_window: Vec<String>,
    pub flags: Vec<RetentionFlag>,
}

/// One log file as seen on disk, for retention reasoning.
#[derive(Debug, Clone)]
pub struct LogFileStat {
    pub file_name: String,
    pub date: Option<chrono::NaiveDate>,
    pub mtime: TimestampMs,
}

pub fn log_retention_gaps(log_files: &[LogFileStat], capture_time: TimestampMs) -> RetentionReport {
    let window_start = capture_time.saturating_sub_ms(LOG_RETENTION_MS);
    let mut report = RetentionReport {
        window_start,
        window_end: capture_time,
        logs_in_window: Vec::new(),
        flags: Vec::new(),
    };
    for f in log_files {
        // A file is "inside the window" if it could contain events from it:
        // judge by mtime (last write), which postdates every entry in it.
        if f.mtime >= window_start && f.mtime <= capture_time.saturating_add_ms(LOG_RETENTION_MS) {
            report.logs_in_window.push(f.file_name.clone());
        } else if f.mtime < window_start {
            report.flags.push(RetentionFlag::StaleSurvivor {
                file: f.file_name.clone(),
            });
        }
    }
    report.logs_in_window.sort();
    if report.logs_in_window.is_empty() {
        report.flags.push(RetentionFlag::MissingExpectedLogs);
    }
    report
}

// ---------------------------------------------------------------------------
// Cron state
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CronSchedule {
    /// One-shot execution at a fixed time.
    At { at: TimestampMs },
    /// Fixed interval, preserved as written (e.g. `15m` or milliseconds).
    Every { every: String },
    /// Cron expression with optional timezone; validated for 5–6 field arity
    /// only.
    CronExpr {
        expression: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        timezone: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionTarget {
    /// Injected as a system event into the main session.
    MainSessionEvent,
    /// Runs in an isolated `cron:<jobId>` session.
    IsolatedRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CronJob {
    pub job_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<CronSchedule>,
    /// Often absent from the file; correlate falls back to `cron:<jobId>`
    /// session-key evidence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub execution_target: Option<ExecutionTarget>,
    pub raw: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CronRun {
    pub job_id: String,
    pub time: TimestampMs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    /// 1-based line in `cron/runs/<jobId>.jsonl`.
    pub line: u64,
    pub raw: Value,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct CronState {
    pub jobs: Vec<CronJob>,
    pub runs: Vec<CronRun>,
    pub warnings: Vec<ParseWarning>,
}

fn parse_schedule(obj: &JsonMap, warnings: &mut Vec<ParseWarning>, job_id: &str) -> Option<CronSchedule> {
    // Schedule lives either in a `schedule` object or flattened on the job.
    let sched_obj = pick_object(obj, &["schedule"]).unwrap_or(obj);
    let at = pick_timestamp(sched_obj, &["at"]);
    let every = pick(sched_obj, &["every", "interval"]).and_then(|v| match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    });
    let cron = pick_str(sched_obj, &["cron", "expr", "expression"]);

    let variants = [at.is_some(), every.is_some(), cron.is_some()]
        .iter()
        .filter(|b| **b)
        .count();
    if variants > 1 {
        warnings.push(ParseWarning::new(format!(
            "job {job_id}: multiple schedule variants present; precedence at > every > cron"
        )));
    }
    if let Some(at) = at {
        return Some(CronSchedule::At { at });
    }
    if let Some(every) = every {
        return Some(CronSchedule::Every { every });
    }
    if let Some(expression) = cron {
        let fields = expression.split_whitespace().count();
        if !(5..=6).contains(&fields) {
            warnings.push(ParseWarning::new(format!(
                "job {job_id}: cron expression has {fields} fields (expected 5-6)"
            )));
        }
        return Some(CronSchedule::CronExpr {
            expression,
            timezone: pick_str(sched_obj, &["tz", "timezone"]),
        });
    }
    warnings.push(ParseWarning::new(format!("job {job_id}: no schedule variant found")));
    None
}

/// Parse `cron/jobs.json` plus the per-job run logs. Run files are named
/// `<jobId>.jsonl`; runs stay in file order.
pub fn parse_cron(
    jobs_content: Option<&[u8]>,
    runs_files: &[(String, Vec<u8>)],
) -> CronState {
    let mut state = CronState::default();

    if let Some(content) = jobs_content {
        match serde_json::from_slice::<Value>(content) {
            Ok(value) => {
                let jobs_arr = match &value {
                    Value::Array(items) => Some(items.clone()),
                    Value::Object(o) => pick_array(o, &["jobs"]).cloned(),
                    _ => None,
                };
                match jobs_arr {
                    Some(items) => {
                        for item in items {
                            let Some(obj) = item.as_object() else {
                                state
                                    .warnings
                                    .push(ParseWarning::new("job entry is not an object"));
                                continue;
                            };
                            let job_id = pick_id(obj, &["id", "jobId", "job_id"])
                                .unwrap_or_else(|| "<missing-id>".into());
                            let schedule = parse_schedule(obj, &mut state.warnings, &job_id);
                            let execution_target =
                                match pick_str(obj, &["target", "sessionTarget", "session_target", "mode"])
                                    .as_deref()
                                {
                                    Some("main") | Some("mainSession") | Some("main_session") => {
                                        Some(ExecutionTarget::MainSessionEvent)
                                    }
                                    Some("isolated") | Some("isolatedRun") | Some("isolated_run") => {
                                        Some(ExecutionTarget::IsolatedRun)
                                    }
                                    _ => None,
                                };
                            state.jobs.push(CronJob {
                                job_id,
                                schedule,
                                execution_target,
                                raw: item.clone(),
                            });
                        }
                    }
                    None => state
                        .warnings
                        .push(ParseWarning::new("cron jobs file has no jobs list")),
                }
            }
            Err(e) => state
                .warnings
                .push(ParseWarning::new(format!("malformed cron jobs file: {e}"))),
        }
    }

    for (file_name, content) in runs_files {
        let job_id = file_name
            .strip_suffix(".jsonl")
            .unwrap_or(file_name)
            .to_string();
        for (idx, raw_line) in content.split(|b| *b == b'\n').enumerate() {
            let line_no = (idx + 1) as u64;
            let text = match std::str::from_utf8(raw_line) {
                Ok(t) => t.trim(),
                Err(_) => {
                    state.warnings.push(
                        ParseWarning::at_line(line_no, "invalid UTF-8 in cron run")
                            .with_path(file_name.clone()),
                    );
                    continue;
                }
            };
            if text.is_empty() {
                continue;
            }
            match serde_json::from_str::<Value>(text) {
                Ok(value) => {
                    let obj = value.as_object();
                    let time = obj
                        .and_then(|o| pick_timestamp(o, &["time", "ts", "at", "timestamp"]))
                        .unwrap_or(TimestampMs(0));
                    if time.0 == 0 {
                        state.warnings.push(
                            ParseWarning::at_line(line_no, "cron run has no parseable time")
                                .with_path(file_name.clone()),
                        );
                    }
                    state.runs.push(CronRun {
                        job_id: job_id.clone(),
                        time,
                        outcome: obj
                            .and_then(|o| pick_str(o, &["outcome", "status", "result"])),
                        line: line_no,
                        raw: value,
                    });
                }
                Err(e) => state.warnings.push(
                    ParseWarning::at_line(line_no, format!("malformed cron run: {e}"))
                        .with_path(file_name.clone()),
                ),
            }
        }
    }
    state
}

// ---------------------------------------------------------------------------
// Subagent registry
// ---------------------------------------------------------------------------

/// Sweep deadline default: entries are archived 60 minutes after creation.
pub const DEFAULT_ARCHIVE_WINDOW_MS: i64 = 60 * 60 * 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubagentRunRecord {
    pub run_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub child_session: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started: Option<TimestampMs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ended: Option<TimestampMs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub archive_at: Option<TimestampMs>,
    /// True when archive_at sits exactly one default window after creation.
    pub archive_at_is_default_window: bool,
    pub raw: Value,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SubagentRegistry {
    pub records: Vec<SubagentRunRecord>,
    /// Absence of the registry file is itself a valid, noteworthy state.
    pub file_present: bool,
    pub warnings: Vec<ParseWarning>,
}

pub fn parse_subagent_registry(content: Option<&[u8]>) -> SubagentRegistry {
    let mut registry = SubagentRegistry::default();
    let Some(content) = content else {
        registry.warnings.push(ParseWarning::new(
            "subagents/runs.json absent; entries may have been swept or cleanup removes them immediately",
        ));
        return registry;
    };
    registry.file_present = true;
    let value: Value = match serde_json::from_slice(content) {
        Ok(v) => v,
        Err(e) => {
            registry
                .warnings
                .push(ParseWarning::new(format!("malformed subagent registry: {e}")));
            return registry;
        }
    };
    let items = match &value {
        Value::Array(items) => items.clone(),
        Value::Object(o) => pick_array(o, &["runs"]).cloned().unwrap_or_default(),
        _ => {
            registry
                .warnings
                .push(ParseWarning::new("subagent registry is neither array nor object"));
            Vec::new()
        }
    };
    for item in items {
        let Some(obj) = item.as_object() else {
            registry
                .warnings
                .push(ParseWarning::new("registry entry is not an object"));
            continue;
        };
        let started = pick_timestamp(obj, &["started", "startedAt", "started_at", "created", "createdAt"]);
        let ended = pick_timestamp(obj, &["ended", "endedAt", "ended_at", "finished"]);
        if let (Some(s), Some(e)) = (started, ended) {
            if e < s {
                registry
                    .warnings
                    .push(ParseWarning::new("registry entry ended before it started"));
            }
        }
        let archive_at = pick_timestamp(obj, &["archiveAtMs", "archiveAt", "archive_at"]);
        let archive_at_is_default_window = match (archive_at, started) {
            (Some(a), Some(s)) => a.0 - s.0 == DEFAULT_ARCHIVE_WINDOW_MS,
            _ => false,
        };
        registry.records.push(SubagentRunRecord {
            run_id: pick_id(obj, &["runId", "run_id", "id"]).unwrap_or_default(),
            task: pick_str(obj, &["task", "prompt", "label"]),
            child_session: pick_id(
                obj,
                &["childSessionId", "child_session_id", "childSession", "sessionId", "session_id"],
            ),
            started,
            ended,
            archive_at,
            archive_at_is_default_window,
            raw: item.clone(),
        });
    }
    registry
}

// ---------------------------------------------------------------------------
// Workspace inventory
// ---------------------------------------------------------------------------

/// The identity-file slots that define persona and operating boundaries.
/// BOOTSTRAP.md is expected to be absent after initialization.
pub const IDENTITY_FILES: [&str; 8] = [
    "AGENTS.md",
    "BOOTSTRAP.md",
    "IDENTITY.md",
    "SOUL.md",
    "TOOLS.md",
    "HEARTBEAT.md",
    "MEMORY.md",
    "USER.md",
];

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct IdentityFile {
    pub present: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mtime: Option<TimestampMs>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DailyMemoryFile {
    pub date: chrono::NaiveDate,
    pub path: String,
    pub content: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mtime: Option<TimestampMs>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SkillScope {
    Global,
    AgentLocal,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkillEntry {
    pub name: String,
    /// Path of the SKILL.md file, relative to the store root.
    pub path: String,
    pub scope: SkillScope,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct WorkspaceSnapshot {
    pub identity_files: BTreeMap<String, IdentityFile>,
    pub daily_memory: Vec<DailyMemoryFile>,
    pub skills: Vec<SkillEntry>,
    pub warnings: Vec<ParseWarning>,
}

fn file_mtime(path: &Path) -> Option<TimestampMs> {
    std::fs::metadata(path)
        .ok()?
        .modified()
        .ok()?
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| TimestampMs(d.as_millis() as i64))
}

/// Read the workspace of one agent: the eight identity-file slots, daily
/// memory logs sorted by date, and skills from both scopes.
pub fn inventory_workspace(store_root: &Path, workspace_rel: &str) -> WorkspaceSnapshot {
    let mut snapshot = WorkspaceSnapshot::default();
    let workspace = if Path::new(workspace_rel).is_absolute() {
        PathBuf::from(workspace_rel)
    } else {
        store_root.join(workspace_rel)
    };

    for name in IDENTITY_FILES {
        let path = workspace.join(name);
        let entry = if path.is_file() {
            match std::fs::read_to_string(&path) {
                Ok(content) => IdentityFile {
                    present: true,
                    content: Some(content),
                    mtime: file_mtime(&path),
                },
                Err(e) => {
                    snapshot.warnings.push(
                        ParseWarning::new(format!("unreadable: {e}"))
                            .with_path(path.display().to_string()),
                    );
                    IdentityFile {
                        present: true,
                        content: None,
                        mtime: file_mtime(&path),
                    }
                }
            }
        } else {
            IdentityFile::default()
        };
        snapshot.identity_files.insert(name.to_string(), entry);
    }

    let memory_dir = workspace.join("memory");
    if memory_dir.is_dir() {
        let mut entries: Vec<_> = match std::fs::read_dir(&memory_dir) {
            Ok(rd) => rd.filter_map(Result::ok).collect(),
            Err(e) => {
                snapshot.warnings.push(
                    ParseWarning::new(format!("unreadable memory dir: {e}"))
                        .with_path(memory_dir.display().to_string()),
                );
                Vec::new()
            }
        };
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let name = entry.file_name().to_string_lossy().to_string();
            let Some(date) = name
                .strip_suffix(".md")
                .and_then(|d| chrono::NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
            else {
                continue;
            };
            let path = entry.path();
            match std::fs::read_to_string(&path) {
                Ok(content) => snapshot.daily_memory.push(DailyMemoryFile {
                    date,
                    path: relative_to(store_root, &path),
                    content,
                    mtime: file_mtime(&path),
                }),
                Err(e) => snapshot.warnings.push(
                    ParseWarning::new(format!("unreadable: {e}"))
                        .with_path(path.display().to_string()),
                ),
            }
        }
        snapshot.daily_memory.sort_by_key(|f| f.date);
    }

    let scopes = [
        (store_root.join("skills"), SkillScope::Global),
        (workspace.join("skills"), SkillScope::AgentLocal),
    ];
    for (dir, scope) in scopes {
        if !dir.is_dir() {
            continue;
        }
        let mut entries: Vec<_> = match std::fs::read_dir(&dir) {
            Ok(rd) => rd.filter_map(Result::ok).collect(),
            Err(_) => continue,
        };
        entries.sort_by_key(|e| e.file_name());
        for entry in entries {
            let skill_md = entry.path().join("SKILL.md");
            if skill_md.is_file() {
                snapshot.skills.push(SkillEntry {
                    name: entry.file_name().to_string_lossy().to_string(),
                    path: relative_to(store_root, &skill_md),
                    scope,
                });
            }
        }
    }

    snapshot
}

fn relative_to(root: &Path, path: &Path) -> String {
    path.strip_prefix(root)
        .unwrap_or(path)
        .to_string_lossy()
        .replace('\\', "/")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_has_main_agent() {
        let config = parse_config(br#"{"agents":{"list":[{"id":"main"}]}}"#).unwrap();
        assert_eq!(config.agents.len(), 1);
        assert_eq!(config.agents[0].id, "main");
        assert_eq!(config.workspace_root, "workspace/");
    }

    #[test]
    fn empty_config_gets_defaults() {
        let config = parse_config(b"{}").unwrap();
        assert!(config.agents.is_empty());
        assert_eq!(config.workspace_root, "workspace/");
        assert!(config.meta.last_touched_at.is_none());
    }

    #[test]
    fn telegram_channel_with_token() {
        let config = parse_config(
            br#"{"channels":{"telegram":{"enabled":true,"botToken":"123:abc","allowFrom":[42]}}}"#,
        )
        .unwrap();
        let tg = &config.channels["telegram"];
        assert!(tg.enabled);
        assert_eq!(tg.bot_token.as_deref(), Some("123:abc"));
        assert!(tg.raw.get("allowFrom").is_some());
    }

    #[test]
    fn malformed_config_is_an_error() {
        assert!(parse_config(b"[not an object]").is_err());
        assert!(parse_config(b"{broken").is_err());
    }

    #[test]
    fn history_orders_by_last_touched_not_filename() {
        // Filenames suggest bak.1 is older, but lastTouchedAt says otherwise.
        let sources = vec![
            ConfigSource {
                path: "openclaw.json".into(),
                content: br#"{"meta":{"lastTouchedAt":3000000000000}}"#.to_vec(),
                mtime: TimestampMs(0),
            },
            ConfigSource {
                path: "openclaw.json.bak".into(),
                content: br#"{"meta":{"lastTouchedAt":1000000000000}}"#.to_vec(),
                mtime: TimestampMs(0),
            },
            ConfigSource {
                path: "openclaw.json.bak.1".into(),
                content: br#"{"meta":{"lastTouchedAt":2000000000000}}"#.to_vec(),
                mtime: TimestampMs(0),
            },
        ];
        let history = load_config_history(sources);
        let paths: Vec<_> = history.snapshots.iter().map(|s| s.source_path.as_str()).collect();
        assert_eq!(paths, ["openclaw.json.bak", "openclaw.json.bak.1", "openclaw.json"]);
        assert!(history
            .snapshots
            .iter()
            .all(|s| s.ordering_basis == OrderingBasis::LastTouchedAt));
    }

    #[test]
    fn missing_meta_falls_back_to_mtime() {
        let sources = vec![ConfigSource {
            path: "openclaw.json.bak".into(),
            content: b"{}".to_vec(),
            mtime: TimestampMs(1_500_000_000_000),
        }];
        let history = load_config_history(sources);
        assert_eq!(history.snapshots[0].ordering_basis, OrderingBasis::MtimeFallback);
        assert_eq!(history.snapshots[0].ordering_key.0, 1_500_000_000_000);
    }

    #[test]
    fn config_at_boundaries() {
        let sources = vec![
            ConfigSource {
                path: "a".into(),
                content: br#"{"meta":{"lastTouchedAt":1000000000000}}"#.to_vec(),
                mtime: TimestampMs(0),
            },
            ConfigSource {
                path: "b".into(),
                content: br#"{"meta":{"lastTouchedAt":2000000000000}}"#.to_vec(),
                mtime: TimestampMs(0),
            },
        ];
        let history = load_config_history(sources);
        // After all snapshots → last.
        assert_eq!(config_at(&history, TimestampMs(9_000_000_000_000)).unwrap().source_path, "b");
        // Strictly between → earlier one.
        assert_eq!(config_at(&history, TimestampMs(1_500_000_000_000)).unwrap().source_path, "a");
        // Exactly at a key → that snapshot.
        assert_eq!(config_at(&history, TimestampMs(2_000_000_000_000)).unwrap().source_path, "b");
        // Before all → none.
        assert!(config_at(&history, TimestampMs(1)).is_none());
    }

    #[test]
    fn diff_identical_is_empty() {
        let a = parse_config(br#"{"agents":{"default_model":"gemini-3"}}"#).unwrap();
        assert!(diff_configs(&a, &a).is_empty());
    }

    #[test]
    fn diff_detects_change_and_addition() {
        let a = parse_config(br#"{"agents":{"default_model":"gemini-3"},"channels":{}}"#).unwrap();
        let b = parse_config(
            br#"{"agents":{"default_model":"other"},"channels":{"discord":{"enabled":true}}}"#,
        )
        .unwrap();
        let deltas = diff_configs(&a, &b);
        assert_eq!(deltas.len(), 2);
        assert_eq!(deltas[0].path, "agents.default_model");
        assert_eq!(deltas[0].change, ChangeKind::Changed);
        assert_eq!(deltas[1].path, "channels.discord");
        assert_eq!(deltas[1].change, ChangeKind::Added);
    }

    #[test]
    fn diff_is_antisymmetric() {
        let a = parse_config(br#"{"x":1,"only_a":true}"#).unwrap();
        let b = parse_config(br#"{"x":2}"#).unwrap();
        let ab = diff_configs(&a, &b);
        let ba = diff_configs(&b, &a);
        assert_eq!(ab.len(), ba.len());
        for (d_ab, d_ba) in ab.iter().zip(ba.iter()) {
            assert_eq!(d_ab.path, d_ba.path);
            match (d_ab.change, d_ba.change) {
                (ChangeKind::Added, ChangeKind::Removed)
                | (ChangeKind::Removed, ChangeKind::Added) => {}
                (ChangeKind::Changed, ChangeKind::Changed) => {
                    assert_eq!(d_ab.before, d_ba.after);
                    assert_eq!(d_ab.after, d_ba.before);
                }
                other => panic!("not antisymmetric: {other:?}"),
            }
        }
    }

    #[test]
    fn log_lines_preserve_count() {
        let markers = MarkerTable::default();
        let content = concat!(
            r#"{"time":1767312000000,"subsystem":"gateway","msg":"listening"}"#,
            "\n",
            "garbage\n",
            r#"{"subsystem":"gateway","msg":"no time"}"#,
            "\n",
            r#"{"time":1767312001000,"subsystem":"agent/run","msg":"tool start","runId":"r1","toolCallId":"c1"}"#,
            "\n"
        );
        let parsed = parse_log_file(content.as_bytes(), "openclaw-2026-01-02.log", &markers);
        assert_eq!(parsed.events.len() + parsed.warnings.len(), 4);
        assert_eq!(parsed.events.len(), 2);
        assert_eq!(parsed.events[1].kind, LogEventKind::ToolStart);
        assert_eq!(parsed.events[1].run_id.as_deref(), Some("r1"));
        assert_eq!(parsed.events[1].tool_call_id.as_deref(), Some("c1"));
        assert_eq!(parsed.file_date.unwrap().to_string(), "2026-01-02");
    }

    #[test]
    fn schema_snapshot_collects_tool_names() {
        let markers = MarkerTable::default();
        let line = r#"{"time":1767312000000,"subsystem":"agent/run","msg":"google tool schema snapshot","runId":"r1","tools":["read","write","exec"]}"#;
        let parsed = parse_log_file(line.as_bytes(), "openclaw-2026-01-02.log", &markers);
        assert_eq!(parsed.events[0].kind, LogEventKind::ToolSchemaSnapshot);
        assert_eq!(parsed.events[0].tool_names, ["read", "write", "exec"]);
        // Provider-variant object list.
        let line = r#"{"time":1,"subsystem":"agent/run","msg":"tool schema snapshot","tools":[{"name":"read"},{"name":"exec"}]}"#;
        let parsed = parse_log_file(line.as_bytes(), "openclaw-2026-01-02.log", &markers);
        assert_eq!(parsed.events[0].tool_names, ["read", "exec"]);
    }

    #[test]
    fn channel_health_by_subsystem() {
        let markers = MarkerTable::default();
        let line = r#"{"time":1767312000000,"subsystem":"gateway/channels/telegram","msg":"connected"}"#;
        let parsed = parse_log_file(line.as_bytes(), "openclaw-2026-01-02.log", &markers);
        assert_eq!(parsed.events[0].kind, LogEventKind::ChannelHealth);
    }

    #[test]
    fn empty_log_file() {
        let parsed = parse_log_file(b"", "openclaw-2026-01-02.log", &MarkerTable::default());
        assert!(parsed.events.is_empty());
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn retention_window_logic() {
        let capture = TimestampMs(1_767_312_000_000);
        // One log written just now → in window, no flags.
        let report = log_retention_gaps(
            &[LogFileStat {
                file_name: "openclaw-2026-01-02.log".into(),
                date: None,
                mtime: capture.saturating_sub_ms(1000),
            }],
            capture,
        );
        assert!(report.flags.is_empty());
        assert_eq!(report.logs_in_window.len(), 1);

        // Log ten days old → stale survivor, plus missing-expected flag.
        let report = log_retention_gaps(
            &[LogFileStat {
                file_name: "openclaw-2025-12-23.log".into(),
                date: None,
                mtime: capture.saturating_sub_ms(10 * 24 * 3600 * 1000),
            }],
            capture,
        );
        assert!(report
            .flags
            .iter()
            .any(|f| matches!(f, RetentionFlag::StaleSurvivor { .. })));
        assert!(report.flags.contains(&RetentionFlag::MissingExpectedLogs));

        // No logs at all.
        let report = log_retention_gaps(&[], capture);
        assert_eq!(report.flags, vec![RetentionFlag::MissingExpectedLogs]);
    }

    #[test]
    fn cron_schedule_variants() {
        let jobs = br#"{"jobs":[
            {"id":"a","schedule":{"at":1767312000}},
            {"id":"b","schedule":{"every":"15m"}},
            {"id":"c","schedule":{"cron":"0 9 * * *","tz":"Europe/Berlin"},"target":"isolated"}
        ]}"#;
        let state = parse_cron(Some(jobs), &[]);
        assert_eq!(state.jobs.len(), 3);
        assert!(matches!(state.jobs[0].schedule, Some(CronSchedule::At { at }) if at.0 == 1_767_312_000_000));
        assert!(matches!(&state.jobs[1].schedule, Some(CronSchedule::Every { every }) if every == "15m"));
        match &state.jobs[2].schedule {
            Some(CronSchedule::CronExpr { expression, timezone }) => {
                assert_eq!(expression, "0 9 * * *");
                assert_eq!(timezone.as_deref(), Some("Europe/Berlin"));
            }
            other => panic!("unexpected schedule {other:?}"),
        }
        assert_eq!(state.jobs[2].execution_target, Some(ExecutionTarget::IsolatedRun));
        assert!(state.warnings.is_empty());
    }

    #[test]
    fn empty_cron_state() {
        let state = parse_cron(Some(br#"{"jobs":[]}"#), &[]);
        assert!(state.jobs.is_empty());
        assert!(state.runs.is_empty());
        let state = parse_cron(None, &[]);
        assert!(state.jobs.is_empty());
    }

    #[test]
    fn cron_runs_associate_to_job_by_filename() {
        let runs = vec![(
            "backup.jsonl".to_string(),
            concat!(
                r#"{"time":1767312000000,"outcome":"ok"}"#,
                "\n",
                r#"{"time":1767312060000,"outcome":"ok"}"#,
                "\n",
                r#"{"time":1767312120000,"outcome":"error"}"#,
                "\n"
            )
            .as_bytes()
            .to_vec(),
        )];
        let state = parse_cron(Some(br#"{"jobs":[{"id":"backup","schedule":{"every":"1m"}}]}"#), &runs);
        assert_eq!(state.runs.len(), 3);
        assert!(state.runs.iter().all(|r| r.job_id == "backup"));
        assert_eq!(state.runs[2].outcome.as_deref(), Some("error"));
    }

    #[test]
    fn registry_missing_file_is_noted() {
        let registry = parse_subagent_registry(None);
        assert!(!registry.file_present);
        assert!(registry.records.is_empty());
        assert_eq!(registry.warnings.len(), 1);
    }

    #[test]
    fn registry_default_archive_window_surfaced() {
        let content = br#"[{"runId":"r1","task":"summarize","childSessionId":"5b2fad5b-d9cb-469f-a165-708677289511","started":1767312000000,"ended":1767312060000,"archiveAtMs":1767315600000}]"#;
        let registry = parse_subagent_registry(Some(content));
        assert_eq!(registry.records.len(), 1);
        let rec = &registry.records[0];
        assert!(rec.started.unwrap() <= rec.ended.unwrap());
        assert!(rec.archive_at_is_default_window);
    }

    #[test]
    fn registry_salvages_malformed_content() {
        let registry = parse_subagent_registry(Some(b"{broken"));
        assert!(registry.file_present);
        assert!(registry.records.is_empty());
        assert!(!registry.warnings.is_empty());
    }

    #[test]
    fn workspace_inventory_reads_slots_memory_and_skills() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path();
        std::fs::create_dir_all(root.join("workspace/memory")).unwrap();
        std::fs::create_dir_all(root.join("workspace/skills/notes")).unwrap();
        std::fs::create_dir_all(root.join("skills/search")).unwrap();
        std::fs::write(root.join("workspace/SOUL.md"), "core truths").unwrap();
        std::fs::write(root.join("workspace/memory/2026-01-30.md"), "day 1").unwrap();
        std::fs::write(root.join("workspace/memory/2026-02-01.md"), "day 2").unwrap();
        std::fs::write(root.join("workspace/memory/notes.txt"), "not memory").unwrap();
        std::fs::write(root.join("workspace/skills/notes/SKILL.md"), "s").unwrap();
        std::fs::write(root.join("skills/search/SKILL.md"), "s").unwrap();

        let snap = inventory_workspace(root, "workspace/");
        assert_eq!(snap.identity_files.len(), 8);
        assert!(snap.identity_files["SOUL.md"].present);
        assert!(!snap.identity_files["BOOTSTRAP.md"].present);
        assert_eq!(snap.daily_memory.len(), 2);
        assert!(snap.daily_memory[0].date < snap.daily_memory[1].date);
        assert_eq!(snap.skills.len(), 2);
        let local = snap.skills.iter().find(|s| s.name == "notes").unwrap();
        assert_eq!(local.scope, SkillScope::AgentLocal);
        let global = snap.skills.iter().find(|s| s.name == "search").unwrap();
        assert_eq!(global.scope, SkillScope::Global);
    }
}
