//! Tamper application: modifies a generated store the way an anti-forensics
//! actor would, and derives mechanically which examiner rules the modified
//! store must trigger.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::common::TimestampMs;

use super::builder::GeneratedStore;
use super::verify::GroundTruth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeleteTarget {
    CallLine,
    ResultLine,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TamperOp {
    /// Remove the transcript line(s) carrying a toolCallId.
    DeleteTranscriptLine {
        tool_call_id: String,
        target: DeleteTarget,
    },
    /// Remove a session's entry from sessions.json, keeping the file.
    RemoveIndexEntry { session_id: String },
    /// Delete every runtime log file.
    DeleteLogs,
    /// Keep only the first `keep_lines` lines of a transcript.
    TruncateTranscript { session_id: String, keep_lines: usize },
    /// Rewrite a store file's mtime into the past.
    BackdateMtime { path: String, to: TimestampMs },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TamperSpec {
    pub operations: Vec<TamperOp>,
    /// Filled by `apply_tamper`: the rule ids the examiner must emit.
    #[serde(default)]
    pub expected_findings: Vec<String>,
}

fn transcript_path(store: &GeneratedStore, truth: &GroundTruth, session_id: &str) -> Option<std::path::PathBuf> {
    let session = truth.sessions.iter().find(|s| s.session_id == session_id)?;
    Some(
        store
            .store_dir
            .join(format!("agents/{}/sessions/{}", truth.agent_id, session.file_name)),
    )
}

fn line_mentions_call(line: &str, tool_call_id: &str, target: DeleteTarget) -> bool {
    if !line.contains(tool_call_id) {
        return false;
    }
    let is_result = line.contains("toolResult") || line.contains("tool_result");
    match target {
        DeleteTarget::CallLine => !is_result,
        DeleteTarget::ResultLine => is_result,
        DeleteTarget::Both => true,
    }
}

/// R1 reasoning over a set of surviving transcript lines: a logged id with a
/// missing call or missing result triggers the rule.
fn r1_expected(surviving: &[String], logged_ids: &[String]) -> bool {
    logged_ids.iter().any(|id| {
        let call_present = surviving
            .iter()
            .any(|l| l.contains(id.as_str()) && !l.contains("toolResult") && !l.contains("tool_result"));
        let result_present = surviving
            .iter()
            .any(|l| l.contains(id.as_str()) && (l.contains("toolResult") || l.contains("tool_result")));
        !call_present || !result_present
    })
}

/// Apply the operations to a generated store and return the rule ids the
/// examiner must emit on the result. Only stores produced by
/// `generate_store` are valid inputs.
pub fn apply_tamper(
    store: &GeneratedStore,
    truth: &GroundTruth,
    spec: &TamperSpec,
) -> io::Result<Vec<String>> {
    fn push_unique(rules: &mut Vec<String>, rule: &str) {
        if !rules.iter().any(|r| r == rule) {
            rules.push(rule.to_string());
        }
    }
    let mut expected: Vec<String> = Vec::new();

    for op in &spec.operations {
        match op {
            TamperOp::DeleteTranscriptLine { tool_call_id, target } => {
                let session_id = truth
                    .executions
                    .iter()
                    .find(|e| &e.tool_call_id == tool_call_id)
                    .map(|e| e.session_id.clone())
                    .ok_or_else(|| {
                        io::Error::new(
                            io::ErrorKind::InvalidInput,
                            format!("unknown toolCallId {tool_call_id}"),
                        )
                    })?;
                let path = transcript_path(store, truth, &session_id).ok_or_else(|| {
                    io::Error::new(io::ErrorKind::NotFound, "transcript for session")
                })?;
                let content = std::fs::read_to_string(&path)?;
                let surviving: Vec<String> = content
                    .lines()
                    .filter(|l| !line_mentions_call(l, tool_call_id, *target))
                    .map(str::to_owned)
                    .collect();
                std::fs::write(&path, format!("{}\n", surviving.join("\n")))?;
                if truth.logged_tool_call_ids.contains(tool_call_id) {
                    push_unique(&mut expected, "R1");
                }
            }
            TamperOp::RemoveIndexEntry { session_id } => {
                let index_path = store
                    .store_dir
                    .join(format!("agents/{}/sessions/sessions.json", truth.agent_id));
                let content = std::fs::read(&index_path)?;
                let mut value: serde_json::Value = serde_json::from_slice(&content)?;
                let removed = remove_index_entry(&mut value, session_id);
                std::fs::write(&index_path, serde_json::to_vec_pretty(&value)?)?;
                if removed {
                    // Transcript file stays behind: orphaned.
                    push_unique(&mut expected, "R3");
                }
            }
            TamperOp::DeleteLogs => {
                if store.log_dir.is_dir() {
                    for entry in std::fs::read_dir(&store.log_dir)? {
                        let entry = entry?;
                        if entry.path().extension().is_some_and(|e| e == "log") {
                            std::fs::remove_file(entry.path())?;
                        }
                    }
                }
                if truth.activity_in_window && !truth.log_kind_counts.is_empty() {
                    push_unique(&mut expected, "R5");
                }
            }
            TamperOp::TruncateTranscript { session_id, keep_lines } => {
                let path = transcript_path(store, truth, session_id).ok_or_else(|| {
                    io::Error::new(io::ErrorKind::NotFound, "transcript for session")
                })?;
                let content = std::fs::read_to_string(&path)?;
                let surviving: Vec<String> = content
                    .lines()
                    .take(*keep_lines)
                    .map(str::to_owned)
                    .collect();
                std::fs::write(&path, format!("{}\n", surviving.join("\n")))?;
                let session_logged: Vec<String> = truth
                    .executions
                    .iter()
                    .filter(|e| &e.session_id == session_id)
                    .filter(|e| truth.logged_tool_call_ids.contains(&e.tool_call_id))
                    .map(|e| e.tool_call_id.clone())
                    .collect();
                if r1_expected(&surviving, &session_logged) {
                    push_unique(&mut expected, "R1");
                }
            }
            TamperOp::BackdateMtime { path, to } => {
                let full = store.store_dir.join(path);
                let file = std::fs::File::options().write(true).open(&full)?;
                file.set_modified(
                    std::time::SystemTime::UNIX_EPOCH
                        + std::time::Duration::from_millis(to.0.max(0) as u64),
                )?;
                // Metadata-only manipulation: no rule fires on it today; the
                // op exists to prove the pipeline stays sound under it.
            }
        }
    }
    expected.sort();
    Ok(expected)
}

fn remove_index_entry(value: &mut serde_json::Value, session_id: &str) -> bool {
    let map = match value {
        serde_json::Value::Object(map) => {
            if let Some(serde_json::Value::Object(_)) = map.get("sessions") {
                match map.get_mut("sessions") {
                    Some(serde_json::Value::Object(nested)) => nested,
                    _ => map,
                }
            } else {
                map
            }
        }
        _ => return false,
    };
    let key = map.iter().find_map(|(k, v)| {
        let id = v
            .get("sessionId")
            .or_else(|| v.get("session_id"))
            .and_then(|s| s.as_str());
        (id == Some(session_id)).then(|| k.clone())
    });
    match key {
        Some(k) => {
            map.remove(&k);
            true
        }
        None => false,
    }
}

/// Convenience for tests: tamper a store at `out_dir` produced by
/// `generate_store`, reading the ground truth back from disk.
pub fn apply_tamper_at(out_dir: &Path, spec: &TamperSpec) -> io::Result<Vec<String>> {
    let truth: GroundTruth =
        serde_json::from_slice(&std::fs::read(out_dir.join("ground_truth.json"))?)?;
    let store = GeneratedStore {
        out_dir: out_dir.to_path_buf(),
        store_dir: out_dir.join("store"),
        log_dir: out_dir.join("logs"),
    };
    apply_tamper(&store, &truth, spec)
}
