//! Store generation: turns a scenario spec into a directory tree plus its
//! ground truth. All expectations are recorded at the moment the bytes are
//! produced, from construction knowledge alone.

use std::collections::BTreeMap;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};
use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};

use crate::common::TimestampMs;
use crate::diffkit::hash_bytes;
use crate::store::ArtifactKind;

use super::verify::{
    ExpectedAttribution, ExpectedCapability, ExpectedCronJob, ExpectedCronRun, ExpectedEdge,
    ExpectedExecution, ExpectedIndexEntry, ExpectedMedia, ExpectedSession, GroundTruth,
};
use super::{
    ActionShape, ChildShape, CronVenueShape, ExpectedAutonomy, ScenarioSpec, ScheduleShape,
    SessionKind, SessionShape, ToolKind, TurnShape,
};

/// Virtual clock origin: 2026-03-02 08:00:00 UTC.
fn base_time() -> TimestampMs {
    TimestampMs(
        Utc.with_ymd_and_hms(2026, 3, 2, 8, 0, 0)
            .single()
            .expect("valid base time")
            .timestamp_millis(),
    )
}

const SESSION_SPACING_MS: i64 = 600_000;
const TURN_SPACING_MS: i64 = 60_000;

#[derive(Debug, Clone)]
pub struct GeneratedStore {
    pub out_dir: PathBuf,
    pub store_dir: PathBuf,
    pub log_dir: PathBuf,
}

struct FileSpec {
    bytes: Vec<u8>,
    mtime: TimestampMs,
}

struct Persona {
    name: &'static str,
    handle: &'static str,
    user_id: u64,
}

const PERSONAS: &[(&str, &str)] = &[
    ("Ada", "ada"),
    ("Grace", "graceh"),
    ("Edsger", "ewd"),
    ("Barbara", "bliskov"),
];

struct Builder<'a> {
    spec: &'a ScenarioSpec,
    rng: ChaCha20Rng,
    store_files: BTreeMap<String, FileSpec>,
    log_lines: Vec<(TimestampMs, String, &'static str)>, // (time, json line, kind tag)
    truth: GroundTruth,
    index_entries: BTreeMap<String, Value>,
    tool_seq: u32,
    run_seq: u32,
    message_seq: u64,
    spawn_seq: u32,
    registry_records: Vec<Value>,
    persona: Persona,
    current_tool_set: Vec<String>,
    capability_probes: Vec<(TimestampMs, u8, Vec<String>)>, // (time, tag order, set)
    last_activity: TimestampMs,
}

struct SessionOut {
    session_id: String,
    key: String,
    lines: Vec<String>,
    entry_tags: Vec<String>,
    tool_call_ids: Vec<String>,
    visible: Vec<String>,
    attributions: Vec<ExpectedAttribution>,
    last_time: TimestampMs,
    entry_seq: u32,
    last_entry_id: Option<String>,
    native: bool,
    telegram: bool,
}

impl<'a> Builder<'a> {
    fn new(spec: &'a ScenarioSpec) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
        let pick = (rng.next_u32() as usize) % PERSONAS.len();
        let user_id = 10 + (rng.next_u32() as u64) % 90;
        Builder {
            spec,
            rng,
            store_files: BTreeMap::new(),
            log_lines: Vec::new(),
            truth: GroundTruth {
                scenario_name: spec.name.clone(),
                seed: spec.seed,
                agent_id: spec.agent_id.clone(),
                expect_zero_parse_warnings: true,
                ..GroundTruth::default()
            },
            index_entries: BTreeMap::new(),
            tool_seq: 0,
            run_seq: 0,
            message_seq: 0,
            spawn_seq: 0,
            registry_records: Vec::new(),
            persona: Persona {
                name: PERSONAS[pick].0,
                handle: PERSONAS[pick].1,
                user_id,
            },
            current_tool_set: spec.tool_set.clone(),
            capability_probes: Vec::new(),
            last_activity: base_time(),
        }
    }

    fn new_uuid(&mut self) -> String {
        let mut bytes = [0u8; 16];
        self.rng.fill_bytes(&mut bytes);
        uuid::Builder::from_random_bytes(bytes).into_uuid().to_string()
    }

    fn next_tool_id(&mut self) -> String {
        self.tool_seq += 1;
        format!("tc-{:04}", self.tool_seq)
    }

    fn next_run_id(&mut self) -> String {
        self.run_seq += 1;
        format!("run-{:04}", self.run_seq)
    }

    fn add_file(&mut self, path: &str, bytes: Vec<u8>, mtime: TimestampMs, kind: ArtifactKind) {
        self.truth
            .artifacts
            .push((kind.as_str().to_string(), path.to_string()));
        self.truth
            .manifest_sha256
            .insert(path.to_string(), hash_bytes(&bytes));
        self.store_files.insert(path.to_string(), FileSpec { bytes, mtime });
    }

    fn log(&mut self, time: TimestampMs, kind: &'static str, value: Value) {
        if !self.spec.with_logs {
            return;
        }
        self.log_lines.push((time, value.to_string(), kind));
    }

    fn ts(&self, time: TimestampMs) -> Value {
        // Default dialect: epoch ms. Variant: RFC 3339 string.
        if self.spec.variant_dialect {
            Value::String(time.to_rfc3339())
        } else {
            json!(time.0)
        }
    }

    // -- transcript entry emission -------------------------------------------

    fn push_entry(&mut self, out: &mut SessionOut, time: TimestampMs, mut obj: Value, tag: String) {
        out.entry_seq += 1;
        let id = format!("e{}", out.entry_seq);
        let map = obj.as_object_mut().expect("entry object");
        map.insert("id".into(), json!(id));
        let parent_key = if self.spec.variant_dialect { "parent_id" } else { "parentId" };
        map.insert(
            parent_key.into(),
            out.last_entry_id.as_ref().map(|p| json!(p)).unwrap_or(Value::Null),
        );
        out.last_entry_id = Some(id);
        out.lines.push(obj.to_string());
        out.entry_tags.push(tag);
        out.last_time = out.last_time.max(time);
        self.last_activity = self.last_activity.max(time);
    }

    fn header_entry(&mut self, out: &mut SessionOut, time: TimestampMs) {
        let obj = if self.spec.variant_dialect {
            json!({
                "type": "header",
                "version": 3,
                "uuid": out.session_id,
                "created": self.ts(time),
                "workingDir": "/home/user",
            })
        } else {
            json!({
                "type": "session",
                "version": 3,
                "sessionId": out.session_id,
                "timestamp": self.ts(time),
                "cwd": "/home/user",
            })
        };
        self.push_entry(out, time, obj, "header:v3".to_string());
    }

    fn message_entry(
        &mut self,
        out: &mut SessionOut,
        time: TimestampMs,
        role: &str,
        blocks: Vec<Value>,
        extra: Vec<(&str, Value)>,
        tag: String,
    ) {
        let (type_tag, content_key, time_key) = if self.spec.variant_dialect {
            ("msg", "blocks", "time")
        } else {
            ("message", "content", "timestamp")
        };
        let mut obj = json!({
            "type": type_tag,
            "role": role,
            content_key: blocks,
        });
        obj.as_object_mut()
            .unwrap()
            .insert(time_key.into(), self.ts(time));
        for (k, v) in extra {
            obj.as_object_mut().unwrap().insert(k.into(), v);
        }
        self.push_entry(out, time, obj, tag);
    }

    fn text_block(&self, text: &str) -> Value {
        json!({"type": "text", "text": text})
    }

    fn thinking_block(&self, text: &str) -> Value {
        json!({"type": "thinking", "thinking": text})
    }

    fn tool_call_block(&self, id: &str, name: &str, arguments: Value) -> Value {
        if self.spec.variant_dialect {
            json!({"type": "tool_use", "id": id, "tool": name, "input": arguments})
        } else {
            json!({"type": "toolCall", "id": id, "name": name, "arguments": arguments})
        }
    }

    // -- user message construction -------------------------------------------

    fn user_text(&mut self, out: &SessionOut, time: TimestampMs, body: &str, media: Option<&(String, String)>) -> (String, Option<ExpectedAttribution>) {
        if !out.telegram {
            return (body.to_string(), None);
        }
        self.message_seq += 1;
        let mid = self.message_seq;
        let dt = Utc.timestamp_millis_opt(time.0).single().expect("valid time");
        let header = format!(
            "[Telegram {} (@{}) id:{} {} UTC]",
            self.persona.name,
            self.persona.handle,
            self.persona.user_id,
            dt.format("%Y-%m-%d %H:%M"),
        );
        let mut text = format!("{header}\n[message_id: {mid}]\n{body}");
        let mut media_paths = Vec::new();
        if let Some((path, mime)) = media {
            text.push_str(&format!("\n[media attached: {path} ({mime})]"));
            media_paths.push(path.clone());
        }
        let attribution = ExpectedAttribution {
            display_name: self.persona.name.to_string(),
            handle: Some(self.persona.handle.to_string()),
            user_id: self.persona.user_id.to_string(),
            time: TimestampMs(time.0 - time.0.rem_euclid(60_000)),
            message_id: mid,
            media_paths,
        };
        (text, Some(attribution))
    }

    // -- media ---------------------------------------------------------------

    fn make_media(&mut self, time: TimestampMs, index: u32) -> (String, String) {
        let uuid = self.new_uuid();
        let (name, original, ext, mime) = match index % 3 {
            0 => (
                format!("invoice-{index}.pdf---{uuid}.pdf"),
                Some(format!("invoice-{index}.pdf")),
                "pdf",
                "application/pdf",
            ),
            1 => (format!("{uuid}.ogg"), None, "ogg", "audio/ogg"),
            _ => (
                format!("notes---v{index}---{uuid}.md"),
                Some(format!("notes---v{index}")),
                "md",
                "text/markdown",
            ),
        };
        let path = format!("media/inbound/{name}");
        self.add_file(
            &path,
            format!("synthetic media payload {index} ({ext})").into_bytes(),
            time,
            ArtifactKind::InboundMedia,
        );
        self.truth.media.push(ExpectedMedia {
            file_name: name,
            original,
            uuid,
            ext: ext.to_string(),
        });
        (path, mime.to_string())
    }

    // -- actions --------------------------------------------------------------

    fn action_arguments(&self, tool: &ToolKind, child_id: &str) -> (String, Value, String) {
        match tool {
            ToolKind::Exec { command } => (
                "exec".into(),
                json!({"command": command}),
                "exit 0".into(),
            ),
            ToolKind::Write { path, content } => (
                "write".into(),
                json!({"path": path, "content": content}),
                format!("wrote {} bytes", content.len()),
            ),
            ToolKind::Read { path, content } => {
                ("read".into(), json!({"path": path}), content.clone())
            }
            ToolKind::Edit { path, old, new } => (
                "edit".into(),
                json!({"path": path, "old": old, "new": new}),
                "edited".into(),
            ),
            ToolKind::Send { to, text } => (
                "message_send".into(),
                json!({"to": to, "text": text}),
                "sent".into(),
            ),
            ToolKind::Spawn { task, .. } => (
                "sessions_spawn".into(),
                json!({"task": task, "cleanup": "archive"}),
                json!({"childSessionId": child_id, "status": "ok"}).to_string(),
            ),
        }
    }

    /// Emit one action: assistant message with the call, tool result, log
    /// lines, ground-truth records, and (for spawns) the child session.
    #[allow(clippy::too_many_arguments)]
    fn emit_action(
        &mut self,
        out: &mut SessionOut,
        action: &ActionShape,
        call_time: TimestampMs,
        thinking: Option<&str>,
        run_id: &str,
        logged: bool,
        sessions_acc: &mut Vec<SessionOut>,
    ) {
        let tool_id = self.next_tool_id();
        let child_id = match &action.tool {
            ToolKind::Spawn { .. } => self.new_uuid(),
            _ => String::new(),
        };
        let (tool_name, arguments, result_text) = self.action_arguments(&action.tool, &child_id);

        // Assistant message carrying the call (thinking only with the first).
        let mut blocks = Vec::new();
        let mut think_count = 0;
        if let Some(t) = thinking {
            think_count = 1;
            if out.native {
                blocks.push(self.thinking_block(t));
            } else {
                blocks.push(self.text_block(&format!("<think>{t}</think>")));
            }
        }
        blocks.push(self.tool_call_block(&tool_id, &tool_name, arguments.clone()));
        self.message_entry(
            out,
            call_time,
            "assistant",
            blocks,
            vec![(
                "usage",
                json!({"input_tokens": 120, "output_tokens": 30, "stopReason": "toolUse"}),
            )],
            format!("assistant:t{think_count}f0x0c1"),
        );
        out.tool_call_ids.push(tool_id.clone());
        out.visible.push(String::new());

        // Tool result.
        let result_time = call_time.saturating_add_ms(1000);
        let mut extra: Vec<(&str, Value)> = Vec::new();
        let id_key = if self.spec.variant_dialect { "tool_call_id" } else { "toolCallId" };
        let err_key = if self.spec.variant_dialect { "is_error" } else { "isError" };
        extra.push((id_key, json!(tool_id)));
        extra.push((err_key, json!(action.is_error)));
        let has_details = action.with_exec_details && matches!(action.tool, ToolKind::Exec { .. });
        if has_details {
            let dur_key = if self.spec.variant_dialect { "duration_ms" } else { "durationMs" };
            let exit_key = if self.spec.variant_dialect { "exit_code" } else { "exitCode" };
            extra.push((
                "details",
                json!({dur_key: 120, exit_key: if action.is_error { 1 } else { 0 }, "status": if action.is_error { "error" } else { "ok" }}),
            ));
        }
        let result_blocks = vec![self.text_block(&result_text)];
        self.message_entry(
            out,
            result_time,
            if self.spec.variant_dialect { "tool_result" } else { "toolResult" },
            result_blocks,
            extra,
            format!("tool_result:{}", if action.is_error { "err" } else { "ok" }),
        );

        // Runtime log lines for the execution.
        if logged && self.spec.with_logs {
            self.log(
                call_time.saturating_add_ms(100),
                "tool_start",
                json!({
                    "time": call_time.saturating_add_ms(100).0,
                    "subsystem": "agents/tools",
                    "msg": "tool start",
                    "runId": run_id,
                    "toolCallId": tool_id,
                    "tool": tool_name,
                }),
            );
            self.log(
                result_time.saturating_sub_ms(100),
                "tool_end",
                json!({
                    "time": result_time.saturating_sub_ms(100).0,
                    "subsystem": "agents/tools",
                    "msg": "tool end",
                    "runId": run_id,
                    "toolCallId": tool_id,
                    "tool": tool_name,
                }),
            );
            self.truth.logged_tool_call_ids.push(tool_id.clone());
        }

        self.truth.executions.push(ExpectedExecution {
            tool_call_id: tool_id.clone(),
            tool_name: tool_name.clone(),
            session_id: out.session_id.clone(),
            has_details,
            is_error: action.is_error,
        });
        let autonomy_tag = match action.expect_autonomy {
            ExpectedAutonomy::Direct => Some("direct"),
            ExpectedAutonomy::Interpretive => Some("interpretive"),
            ExpectedAutonomy::Autonomous => Some("autonomous"),
            ExpectedAutonomy::Indeterminate => Some("indeterminate"),
            ExpectedAutonomy::Unchecked => None,
        };
        if let Some(tag) = autonomy_tag {
            self.truth.autonomy.push((tool_id.clone(), tag.to_string()));
        }

        // Spawned child: generate its session now, linked to this call.
        if let ToolKind::Spawn { task, child } = &action.tool {
            let task = task.clone();
            let child = child.clone();
            self.spawn_seq += 1;
            let run_record_id = format!("sar-{:02}", self.spawn_seq);
            let child_out = self.build_child_session(
                &child_id,
                &task,
                &child,
                call_time.saturating_add_ms(1500),
            );
            let started = call_time.saturating_add_ms(500);
            self.registry_records.push(json!({
                "runId": run_record_id,
                "task": task,
                "childSessionId": child_id,
                "started": started.0,
                "ended": child_out.last_time.0,
                "archiveAtMs": started.0 + crate::peripheral::DEFAULT_ARCHIVE_WINDOW_MS,
            }));
            self.truth.edges.push(ExpectedEdge {
                parent: out.session_id.clone(),
                child: child_id.clone(),
                cleanup_observed: child.cleanup,
                via_spawn: true,
            });
            if child.cleanup
                && !self.truth.expected_rules.contains(&"R3".to_string()) {
                    self.truth.expected_rules.push("R3".to_string());
                }
            sessions_acc.push(child_out);
        }
    }

    fn build_child_session(
        &mut self,
        child_id: &str,
        task: &str,
        child: &ChildShape,
        start: TimestampMs,
    ) -> SessionOut {
        let key = format!("agent:{}:subagent:{}", self.spec.agent_id, child_id);
        let mut out = SessionOut {
            session_id: child_id.to_string(),
            key: key.clone(),
            lines: Vec::new(),
            entry_tags: Vec::new(),
            tool_call_ids: Vec::new(),
            visible: Vec::new(),
            attributions: Vec::new(),
            last_time: start,
            entry_seq: 0,
            last_entry_id: None,
            native: false,
            telegram: false,
        };
        self.header_entry(&mut out, start);
        let seed_time = start.saturating_add_ms(200);
        let seed_text = format!("[subagent task] {task}");
        let blocks = vec![self.text_block(&seed_text)];
        self.message_entry(&mut out, seed_time, "user", blocks, Vec::new(), "user".into());

        let run_id = self.next_run_id();
        let mut call_time = seed_time.saturating_add_ms(2000);
        let mut dummy = Vec::new();
        for (k, action) in child.actions.iter().enumerate() {
            debug_assert!(
                !matches!(action.tool, ToolKind::Spawn { .. }),
                "children do not spawn"
            );
            let thinking = if k == 0 { Some("working on the delegated task") } else { None };
            self.emit_action(&mut out, action, call_time, thinking, &run_id, false, &mut dummy);
            call_time = call_time.saturating_add_ms(3000);
        }
        let final_time = call_time;
        let text = format!("<final>{}</final>", child.final_text);
        let blocks = vec![self.text_block(&text)];
        self.message_entry(
            &mut out,
            final_time,
            "assistant",
            blocks,
            vec![("usage", json!({"input_tokens": 90, "output_tokens": 40, "stopReason": "stop"}))],
            "assistant:t0f1x0c0".into(),
        );
        out.visible.push(child.final_text.clone());

        if !child.cleanup {
            let parent_key = format!("agent:{}:main", self.spec.agent_id);
            self.index_entry_for(&out, Some(&parent_key), true, false);
        }
        out
    }

    // -- turns ----------------------------------------------------------------

    #[allow(clippy::too_many_arguments)]
    fn emit_turn(
        &mut self,
        out: &mut SessionOut,
        turn: &TurnShape,
        t_user: TimestampMs,
        logged: bool,
        media_index: &mut u32,
        sessions_acc: &mut Vec<SessionOut>,
    ) {
        let run_id = self.next_run_id();

        if let Some(body) = &turn.user_text {
            let media = if turn.with_media {
                *media_index += 1;
                Some(self.make_media(t_user, *media_index))
            } else {
                None
            };
            let (text, attribution) = self.user_text(out, t_user, body, media.as_ref());
            if let Some(a) = attribution {
                out.attributions.push(a);
            }
            let blocks = vec![self.text_block(&text)];
            self.message_entry(out, t_user, "user", blocks, Vec::new(), "user".into());
        }

        if logged && self.spec.with_logs {
            self.log(
                t_user.saturating_add_ms(50),
                "run_stage",
                json!({"time": t_user.saturating_add_ms(50).0, "subsystem": "agent/run", "msg": "prompt start", "runId": run_id}),
            );
            // Capability envelope snapshot right after the run starts.
            if let Some((from_run, tool)) = &self.spec.capability_drop_from_run {
                if self.run_seq >= *from_run {
                    self.current_tool_set.retain(|t| t != tool);
                }
            }
            let snapshot_time = t_user.saturating_add_ms(150);
            let (msg, tools_value) = if self.spec.variant_dialect {
                (
                    "tool schema snapshot (acme)",
                    Value::Array(
                        self.current_tool_set
                            .iter()
                            .map(|t| json!({"name": t, "parameters": {}}))
                            .collect(),
                    ),
                )
            } else {
                (
                    "google tool schema snapshot",
                    json!(self.current_tool_set),
                )
            };
            self.log(
                snapshot_time,
                "tool_schema_snapshot",
                json!({"time": snapshot_time.0, "subsystem": "agent/run", "msg": msg, "runId": run_id, "tools": tools_value}),
            );
            self.capability_probes.push((
                snapshot_time,
                2,
                self.current_tool_set.clone(),
            ));
        }

        let mut call_time = t_user.saturating_add_ms(2000);
        for (k, action) in turn.actions.iter().enumerate() {
            let thinking = if k == 0 { turn.thinking.as_deref() } else { None };
            self.emit_action(out, action, call_time, thinking, &run_id, logged, sessions_acc);
            call_time = call_time.saturating_add_ms(3000);
        }

        // Final assistant message.
        let final_time = call_time;
        let mut blocks = Vec::new();
        let mut think_count = 0;
        let mut final_count = 0;
        let mut text_count = 0;
        if out.native {
            if turn.actions.is_empty() {
                if let Some(t) = &turn.thinking {
                    think_count = 1;
                    blocks.push(self.thinking_block(t));
                }
            }
            text_count = 1;
            blocks.push(self.text_block(&turn.final_text));
        } else {
            let mut text = String::new();
            if turn.actions.is_empty() {
                if let Some(t) = &turn.thinking {
                    think_count = 1;
                    text.push_str(&format!("<think>{t}</think>"));
                }
            }
            final_count = 1;
            text.push_str(&format!("<final>{}</final>", turn.final_text));
            blocks.push(self.text_block(&text));
        }
        self.message_entry(
            out,
            final_time,
            "assistant",
            blocks,
            vec![("usage", json!({"input_tokens": 150, "output_tokens": 60, "stopReason": "stop", "cost": 0.0012}))],
            format!("assistant:t{think_count}f{final_count}x{text_count}c0"),
        );
        out.visible.push(if out.native {
            String::new()
        } else {
            turn.final_text.clone()
        });

        if logged && self.spec.with_logs {
            self.log(
                final_time.saturating_add_ms(100),
                "run_stage",
                json!({"time": final_time.saturating_add_ms(100).0, "subsystem": "agent/run", "msg": "agent end", "runId": run_id}),
            );
            self.log(
                final_time.saturating_add_ms(200),
                "run_stage",
                json!({"time": final_time.saturating_add_ms(200).0, "subsystem": "agent/run", "msg": "prompt end", "runId": run_id}),
            );
        }
    }

    // -- sessions ---------------------------------------------------------------

    fn session_key(&self, kind: &SessionKind, session_index: usize) -> String {
        let agent = &self.spec.agent_id;
        match kind {
            SessionKind::Main => format!("agent:{agent}:main"),
            SessionKind::Named(n) => format!("agent:{agent}:{n}"),
            SessionKind::CronIsolated { job_index } => {
                let job = &self.spec.cron_jobs[*job_index];
                format!("agent:{agent}:cron:job-{}", job.name)
            }
            SessionKind::Headless => format!("agent:{agent}:heartbeat-{session_index}"),
        }
    }

    fn build_session(
        &mut self,
        shape: &SessionShape,
        session_index: usize,
        start: TimestampMs,
        sessions_acc: &mut Vec<SessionOut>,
    ) -> SessionOut {
        let session_id = self.new_uuid();
        let key = self.session_key(&shape.kind, session_index);
        let mut out = SessionOut {
            session_id,
            key,
            lines: Vec::new(),
            entry_tags: Vec::new(),
            tool_call_ids: Vec::new(),
            visible: Vec::new(),
            attributions: Vec::new(),
            last_time: start,
            entry_seq: 0,
            last_entry_id: None,
            native: shape.native_thinking,
            telegram: shape.telegram_headers,
        };
        self.header_entry(&mut out, start);

        if self.spec.with_logs {
            let t = start.saturating_sub_ms(500);
            self.log(
                t,
                "channel_health",
                json!({"time": t.0, "subsystem": "gateway/channels/telegram", "msg": "connected"}),
            );
        }

        let mut media_index = session_index as u32 * 100;
        for (j, turn) in shape.turns.iter().enumerate() {
            let t_user = TimestampMs(start.0 + (j as i64 + 1) * TURN_SPACING_MS);
            self.emit_turn(&mut out, turn, t_user, true, &mut media_index, sessions_acc);

            if shape.model_change_after_turn == Some(j as u32) {
                let t = TimestampMs(t_user.0 + TURN_SPACING_MS - 5000);
                let obj = if self.spec.variant_dialect {
                    json!({"type": "modelChange", "provider": "acme", "model": "nimbus-2", "time": self.ts(t)})
                } else {
                    json!({"type": "model_change", "provider": "acme", "model": "nimbus-2", "timestamp": self.ts(t)})
                };
                self.push_entry(&mut out, t, obj, "model_change".into());
            }
            if shape.compaction_after_turn == Some(j as u32) {
                let t = TimestampMs(t_user.0 + TURN_SPACING_MS - 3000);
                let obj = if self.spec.variant_dialect {
                    json!({"type": "compact", "time": self.ts(t), "summary": "earlier turns summarized"})
                } else {
                    json!({"type": "compaction", "timestamp": self.ts(t), "summary": "earlier turns summarized"})
                };
                self.push_entry(&mut out, t, obj, "compaction".into());
            }
        }
        out
    }

    fn index_entry_for(&mut self, out: &SessionOut, spawned_by: Option<&str>, prompt_report: bool, skills_snapshot: bool) {
        let model = if out.entry_tags.iter().any(|t| t == "model_change") {
            "nimbus-2"
        } else {
            "gemini-3"
        };
        let mut meta = if self.spec.variant_dialect {
            json!({
                "session_id": out.session_id,
                "state": "idle",
                "transcript_path": format!("agents/{}/sessions/{}.jsonl", self.spec.agent_id, out.session_id),
                "model_provider": "acme",
                "model_name": model,
                "thinking_level": "high",
                "working_dir": "/home/user",
            })
        } else {
            json!({
                "sessionId": out.session_id,
                "state": "idle",
                "transcriptPath": format!("agents/{}/sessions/{}.jsonl", self.spec.agent_id, out.session_id),
                "provider": "acme",
                "model": model,
                "thinkingLevel": "high",
                "cwd": "/home/user",
            })
        };
        let map = meta.as_object_mut().unwrap();
        let mut channel = None;
        if out.telegram {
            channel = Some("telegram".to_string());
            map.insert("channel".into(), json!("telegram"));
            let recipient_key = if self.spec.variant_dialect { "last_recipient" } else { "lastRecipient" };
            map.insert(
                recipient_key.into(),
                json!(format!("telegram:{}", self.persona.user_id)),
            );
            map.insert(
                "origin".into(),
                json!({
                    "provider": "telegram",
                    "from": self.persona.user_id.to_string(),
                    "label": self.persona.name,
                }),
            );
        }
        if let Some(parent) = spawned_by {
            let key = if self.spec.variant_dialect { "spawned_by" } else { "spawnedBy" };
            map.insert(key.into(), json!(parent));
        }
        if skills_snapshot {
            let key = if self.spec.variant_dialect { "skills_snapshot" } else { "skillsSnapshot" };
            map.insert(
                key.into(),
                json!({
                    "skills": ["notes-helper", "web-search"],
                    "resolvedSkills": [
                        {"name": "notes-helper", "path": "workspace/skills/notes-helper/SKILL.md", "source": "workspace"},
                        {"name": "web-search", "path": "skills/web-search/SKILL.md", "source": "openclaw-bundled"},
                    ],
                    "promptText": "Skills available: notes-helper, web-search.",
                }),
            );
        }
        if prompt_report {
            let injected = json!([
                {"name": "AGENTS.md", "path": "workspace/AGENTS.md", "injectedChars": 420},
                {"name": "MEMORY.md", "path": "workspace/MEMORY.md", "injectedChars": 180},
                {"name": "USER.md", "path": "workspace/USER.md", "injectedChars": 96},
            ]);
            let key = if self.spec.variant_dialect { "system_prompt_report" } else { "systemPromptReport" };
            let files_key = if self.spec.variant_dialect { "injected_files" } else { "injectedWorkspaceFiles" };
            let tools_key = if self.spec.variant_dialect { "tool_names" } else { "toolNames" };
            map.insert(
                key.into(),
                json!({
                    files_key: injected,
                    tools_key: self.current_tool_set,
                    "schemaMetrics": {"promptChars": 2048, "toolSchemaChars": 1024},
                }),
            );
            self.capability_probes.push((out.last_time, 1, self.current_tool_set.clone()));
        }
        let usage_key = if self.spec.variant_dialect { "token_usage" } else { "tokenUsage" };
        map.insert(usage_key.into(), json!({"input": 1234, "output": 567}));

        self.index_entries.insert(out.key.clone(), meta);
        self.truth.index_sessions.push(ExpectedIndexEntry {
            key: out.key.clone(),
            session_id: out.session_id.clone(),
            model: Some(model.to_string()),
            spawned_by: spawned_by.map(str::to_owned),
            channel,
            has_prompt_report: prompt_report,
            has_skills_snapshot: skills_snapshot,
        });
        if !prompt_report {
            self.truth.expected_extra_caveats += 1;
        }
    }

    fn finish_session(&mut self, out: SessionOut, soft_deleted: bool) {
        let sessions_dir = format!("agents/{}/sessions", self.spec.agent_id);
        let (file_name, status_tag) = if soft_deleted {
            let deleted_at_s = (out.last_time.0 + 300_000) / 1000;
            (
                format!("{}.jsonl.deleted.{}", out.session_id, deleted_at_s),
                format!("soft_deleted:{}", deleted_at_s * 1000),
            )
        } else {
            (format!("{}.jsonl", out.session_id), "indexed".to_string())
        };
        let mut content = out.lines.join("\n");
        content.push('\n');
        let kind = if soft_deleted {
            ArtifactKind::DeletedSessionTranscript
        } else {
            ArtifactKind::SessionTranscript
        };
        self.add_file(
            &format!("{sessions_dir}/{file_name}"),
            content.into_bytes(),
            out.last_time,
            kind,
        );
        let indexed = self.index_entries.contains_key(&out.key);
        let status_tag = if soft_deleted {
            if indexed {
                // Soft delete always removes the index entry in this builder.
                unreachable!("soft-deleted sessions are not indexed");
            }
            status_tag
        } else if indexed {
            status_tag
        } else {
            "orphaned".to_string()
        };
        self.truth.sessions.push(ExpectedSession {
            session_id: out.session_id.clone(),
            key: indexed.then(|| out.key.clone()),
            file_name,
            status_tag,
            spawned_by: None,
            entry_tags: out.entry_tags,
            tool_call_ids: out.tool_call_ids,
            visible_tag_filtered: out.visible,
            attributions: out.attributions,
            native_thinking: out.native,
        });
    }

    // -- static artifacts -------------------------------------------------------

    fn write_config_chain(&mut self) {
        let n = self.spec.config_backups as i64;
        let setup = TimestampMs(base_time().0 - 3 * 24 * 3600 * 1000);
        let models = ["gemini-3-flash", "gemini-3", "gemini-3-pro", "nimbus-1", "nimbus-2"];

        // Chronological snapshots: oldest first, live config last.
        let total = n + 1;
        let mut chrono_paths: Vec<String> = Vec::new();
        if self.spec.adversarial_backup_order && n >= 2 {
            // Filename order disagrees with time order: the bare .bak is the
            // oldest snapshot, not the most recent backup.
            chrono_paths.push("openclaw.json.bak".into());
            for i in 1..n {
                chrono_paths.push(format!("openclaw.json.bak.{i}"));
            }
        } else {
            // Natural order: higher suffixes are older.
            for i in (1..n).rev() {
                chrono_paths.push(format!("openclaw.json.bak.{i}"));
            }
            if n >= 1 {
                chrono_paths.push("openclaw.json.bak".into());
            }
        }
        chrono_paths.push("openclaw.json".into());

        let mut probe_mid: Option<(TimestampMs, Option<String>)> = None;
        for (i, path) in chrono_paths.iter().enumerate() {
            let t = TimestampMs(setup.0 + i as i64 * 24 * 3600 * 1000 / total.max(1));
            let model = models[i % models.len()];
            let is_live = path == "openclaw.json";
            let omit_meta = self.spec.backup_missing_meta && i == 0 && !is_live;
            let mut config = json!({
                "agents": {
                    "defaultModel": model,
                    "list": [
                        {"id": self.spec.agent_id, "workspace": "workspace/", "agentDir": format!("agents/{}", self.spec.agent_id)},
                    ],
                },
                "channels": {
                    "telegram": {"enabled": true, "botToken": "7723001122:AAsyntheticToken", "allowFrom": [self.persona.user_id]},
                },
                "workspaceRoot": "workspace/",
            });
            if !omit_meta {
                config.as_object_mut().unwrap().insert(
                    "meta".into(),
                    json!({"lastTouchedAt": t.0, "lastTouchedVersion": format!("2026.2.{}", i + 1)}),
                );
            } else {
                self.truth.mtime_fallback_paths.push(path.clone());
            }
            let kind = if is_live { ArtifactKind::Config } else { ArtifactKind::ConfigBackup };
            let bytes = serde_json::to_vec_pretty(&config).expect("config json");
            self.add_file(path, bytes, t, kind);
            self.truth.config_order.push(path.clone());

            if i + 1 < chrono_paths.len() {
                // Configuration change contributes a carried-forward
                // capability probe at the *next* snapshot's write time.
                let t_next =
                    TimestampMs(setup.0 + (i as i64 + 1) * 24 * 3600 * 1000 / total.max(1));
                self.capability_probes.push((t_next, 0, Vec::new()));
            }
            if i == 0 {
                self.truth
                    .config_probes
                    .push((TimestampMs(t.0 - 1000), None));
            }
            if i == 0 && chrono_paths.len() > 1 {
                let t_next = TimestampMs(setup.0 + 24 * 3600 * 1000 / total.max(1));
                probe_mid = Some((TimestampMs((t.0 + t_next.0) / 2), Some(path.clone())));
            }
        }
        if let Some(p) = probe_mid {
            self.truth.config_probes.push(p);
        }
        self.truth
            .config_probes
            .push((TimestampMs(base_time().0 + 365 * 24 * 3600 * 1000), Some("openclaw.json".into())));
    }

    fn write_workspace(&mut self) {
        let setup = TimestampMs(base_time().0 - 2 * 24 * 3600 * 1000);
        let ws = |name: &str| format!("workspace/{name}");
        let identity: &[(&str, &str)] = &[
            ("AGENTS.md", "# Operating notes\n\nAt session start, read the two most recent daily memory files from workspace/memory/.\n"),
            ("IDENTITY.md", "# Identity\n\nName: Clob\nCreature type: desk octopus\n"),
            ("SOUL.md", "# Core truths\n\nBe helpful. Never exfiltrate data.\n"),
            ("TOOLS.md", "# Environment\n\nssh host: homelab (alias hl)\n"),
            ("HEARTBEAT.md", "# Heartbeat\n\nEvery morning: check the calendar.\n"),
            ("MEMORY.md", "# Curated memory\n\nUser prefers short answers.\n"),
            ("USER.md", "# User\n\nTimezone: Europe/Berlin. Active project: garden.\n"),
        ];
        for (name, content) in identity {
            self.add_file(
                &ws(name),
                content.as_bytes().to_vec(),
                setup,
                ArtifactKind::WorkspaceIdentityFile,
            );
            self.truth.identity_files_present.push(name.to_string());
        }
        self.truth.identity_files_present.sort();

        for i in 0..self.spec.memory_files {
            let day = chrono::NaiveDate::from_ymd_opt(2026, 3, 1)
                .unwrap()
                .checked_sub_days(chrono::Days::new((self.spec.memory_files - 1 - i) as u64))
                .unwrap();
            let path = format!("workspace/memory/{day}.md");
            let t = TimestampMs(
                day.and_hms_opt(20, 0, 0).unwrap().and_utc().timestamp_millis(),
            );
            self.add_file(
                &path,
                format!("# {day}\n\n- daily note {i}\n").into_bytes(),
                t,
                ArtifactKind::DailyMemoryLog,
            );
            self.truth.daily_memory_dates.push(day.to_string());
        }

        self.add_file(
            "workspace/skills/notes-helper/SKILL.md",
            b"# notes-helper\n\nHow to keep tidy notes.\n".to_vec(),
            setup,
            ArtifactKind::SkillDefinition,
        );
        self.add_file(
            "skills/web-search/SKILL.md",
            b"# web-search\n\nHow to query the web.\n".to_vec(),
            setup,
            ArtifactKind::SkillDefinition,
        );
        self.truth.skills = vec![
            ("web-search".to_string(), "global".to_string()),
            ("notes-helper".to_string(), "agent-local".to_string()),
        ];

        self.add_file(
            "credentials/telegram-allowFrom.json",
            serde_json::to_vec_pretty(&json!({"allowFrom": [self.persona.user_id]})).unwrap(),
            setup,
            ArtifactKind::ChannelCredentials,
        );
        self.add_file(
            &format!("agents/{}/agent/auth-profiles.json", self.spec.agent_id),
            serde_json::to_vec_pretty(&json!({
                "profiles": {"acme": {"apiKey": "ak-synthetic-000111222333"}}
            }))
            .unwrap(),
            setup,
            ArtifactKind::AuthProfiles,
        );
        self.add_file(
            "devices/pairing.json",
            serde_json::to_vec_pretty(&json!({"devices": [{"id": "node-phone", "paired": true}]}))
                .unwrap(),
            setup,
            ArtifactKind::DeviceIdentity,
        );
        self.add_file(
            "identity/device-key.json",
            serde_json::to_vec_pretty(&json!({"publicKey": "ed25519:synthetic"})).unwrap(),
            setup,
            ArtifactKind::DeviceIdentity,
        );
        let mut sqlite = b"SQLite format 3\x00".to_vec();
        sqlite.resize(4096, 0);
        self.add_file(
            &format!("memory/{}.sqlite", self.spec.agent_id),
            sqlite,
            setup,
            ArtifactKind::SemanticMemoryDb,
        );
    }

    fn write_cron(&mut self, sessions_acc: &mut Vec<SessionOut>, main_out: Option<&mut SessionOut>) {
        if self.spec.cron_jobs.is_empty() && !self.spec.orphan_cron_run {
            return;
        }
        let cron_base = TimestampMs(
            base_time().0 + self.spec.sessions.len() as i64 * SESSION_SPACING_MS + 3_600_000,
        );
        let mut jobs_json = Vec::new();
        let mut main_turns: Vec<(TimestampMs, TurnShape, String)> = Vec::new();

        let cron_jobs = self.spec.cron_jobs.clone();
        for (g, job) in cron_jobs.iter().enumerate() {
            let job_id = format!("job-{}", job.name);
            let first_run = TimestampMs(cron_base.0 + g as i64 * 1_800_000);
            let schedule = match &job.schedule {
                ScheduleShape::At => json!({"at": first_run.0}),
                ScheduleShape::EveryMinutes(m) => json!({"every": format!("{m}m")}),
                ScheduleShape::CronExpr(expr) => json!({"cron": expr, "tz": "UTC"}),
            };
            jobs_json.push(json!({
                "id": job_id,
                "schedule": schedule,
                "target": match job.venue { CronVenueShape::Main => "main", CronVenueShape::Isolated => "isolated" },
                "payload": {"kind": "agentTurn", "message": format!("scheduled task due ({job_id})")},
                "state": {"nextRunAtMs": first_run.0 + 3_600_000},
            }));
            self.truth.cron_jobs.push(ExpectedCronJob {
                job_id: job_id.clone(),
                schedule_tag: match job.schedule {
                    ScheduleShape::At => "at".into(),
                    ScheduleShape::EveryMinutes(_) => "every".into(),
                    ScheduleShape::CronExpr(_) => "cron".into(),
                },
            });

            let mut run_lines = Vec::new();
            for r in 0..job.runs {
                let run_time = TimestampMs(first_run.0 + r as i64 * 120_000);
                run_lines.push(json!({"time": run_time.0, "outcome": "ok"}).to_string());
                let venue_tag = match job.venue {
                    CronVenueShape::Isolated => "isolated",
                    CronVenueShape::Main => "main",
                };
                self.truth.cron_runs.push(ExpectedCronRun {
                    job_id: job_id.clone(),
                    time: run_time,
                    venue_tag: venue_tag.into(),
                });
                if job.venue == CronVenueShape::Main {
                    let turn = TurnShape {
                        user_text: Some(format!("[cron:{job_id}] scheduled task due ({job_id})")),
                        thinking: Some("scheduled task fired; handling it".to_string()),
                        actions: job.actions_per_run.clone(),
                        final_text: "Scheduled task handled.".to_string(),
                        with_media: false,
                    };
                    main_turns.push((TimestampMs(run_time.0 + 2_000), turn, job_id.clone()));
                }
            }
            let mut content = run_lines.join("\n");
            content.push('\n');
            let last_run = TimestampMs(first_run.0 + (job.runs.max(1) as i64 - 1) * 120_000);
            self.add_file(
                &format!("cron/runs/{job_id}.jsonl"),
                content.into_bytes(),
                last_run,
                ArtifactKind::CronRunLog,
            );
            self.last_activity = self.last_activity.max(last_run);
        }

        // A runs file for a job that no longer exists.
        if self.spec.orphan_cron_run {
            let t = TimestampMs(cron_base.0 - 7_200_000);
            self.add_file(
                "cron/runs/job-ghost.jsonl",
                format!("{}\n", json!({"time": t.0, "outcome": "ok"})).into_bytes(),
                t,
                ArtifactKind::CronRunLog,
            );
            self.truth.cron_runs.push(ExpectedCronRun {
                job_id: "job-ghost".into(),
                time: t,
                venue_tag: "unlocated".into(),
            });
            if !self.truth.expected_rules.contains(&"R6".to_string()) {
                self.truth.expected_rules.push("R6".to_string());
            }
            self.truth.expected_extra_caveats += 1;
        }

        if !jobs_json.is_empty() || self.spec.orphan_cron_run {
            let t = TimestampMs(base_time().0 - 24 * 3600 * 1000);
            self.add_file(
                "cron/jobs.json",
                serde_json::to_vec_pretty(&json!({"jobs": jobs_json})).unwrap(),
                t,
                ArtifactKind::CronJobs,
            );
        }

        // Inject main-venue turns into the main session, chronologically.
        if let Some(main_out) = main_out {
            main_turns.sort_by_key(|(t, _, _)| *t);
            let mut media_index = 9_000;
            for (t, turn, _job_id) in main_turns {
                self.emit_turn(main_out, &turn, t, true, &mut media_index, sessions_acc);
            }
        } else {
            debug_assert!(
                main_turns.is_empty(),
                "main-venue cron jobs require a Main session"
            );
        }

        // Isolated venues get their own sessions keyed cron:<jobId>.
        for (g, job) in cron_jobs.iter().enumerate() {
            if job.venue != CronVenueShape::Isolated {
                continue;
            }
            let job_id = format!("job-{}", job.name);
            let first_run = TimestampMs(cron_base.0 + g as i64 * 1_800_000);
            let shape = SessionShape {
                kind: SessionKind::CronIsolated { job_index: g },
                turns: (0..job.runs)
                    .map(|_| TurnShape {
                        user_text: Some(format!("[cron:{job_id}] scheduled task due ({job_id})")),
                        thinking: Some("isolated scheduled run".to_string()),
                        actions: job.actions_per_run.clone(),
                        final_text: "Scheduled task handled.".to_string(),
                        with_media: false,
                    })
                    .collect(),
                soft_deleted: false,
                telegram_headers: false,
                native_thinking: false,
                model_change_after_turn: None,
                compaction_after_turn: None,
                with_prompt_report: true,
                with_skills_snapshot: false,
            };
            // The session "starts" just before the first run; venue
            // resolution rests on the index key, not on turn timing.
            let start = TimestampMs(first_run.0 - TURN_SPACING_MS + 2_000);
            let out = self.build_session(&shape, 1000 + g, start, sessions_acc);
            self.index_entry_for(&out, None, shape.with_prompt_report, false);
            self.finish_session(out, false);
        }
    }

    fn write_logs(&mut self, out_logs: &mut BTreeMap<String, FileSpec>) {
        if !self.spec.with_logs || self.log_lines.is_empty() {
            self.log_lines.clear();
            return;
        }
        self.log_lines.sort_by_key(|a| (a.0, a.1.clone()));
        let mut by_date: BTreeMap<String, (Vec<String>, TimestampMs)> = BTreeMap::new();
        for (time, line, kind) in &self.log_lines {
            let date = Utc
                .timestamp_millis_opt(time.0)
                .single()
                .expect("valid log time")
                .format("%Y-%m-%d")
                .to_string();
            let entry = by_date.entry(date).or_insert_with(|| (Vec::new(), *time));
            entry.0.push(line.clone());
            entry.1 = entry.1.max(*time);
            *self
                .truth
                .log_kind_counts
                .entry(kind.to_string())
                .or_default() += 1;
        }
        for (date, (lines, mtime)) in by_date {
            let name = format!("openclaw-{date}.log");
            let mut content = lines.join("\n");
            content.push('\n');
            self.truth
                .artifacts
                .push(("runtime_log".to_string(), name.clone()));
            out_logs.insert(
                name,
                FileSpec {
                    bytes: content.into_bytes(),
                    mtime,
                },
            );
        }
    }

    fn build(mut self) -> (BTreeMap<String, FileSpec>, BTreeMap<String, FileSpec>, GroundTruth) {
        self.write_config_chain();
        self.write_workspace();

        // Extra media not referenced from any message.
        for i in 0..self.spec.extra_media {
            let t = TimestampMs(base_time().0 - 3_600_000 + i as i64 * 60_000);
            self.make_media(t, 500 + i);
        }

        // Scripted sessions. The main session's index entry (and its
        // prompt-report capability probe) is deferred until cron turns have
        // been injected, so its recorded last activity is final.
        let mut finished: Vec<(SessionOut, bool)> = Vec::new();
        let mut children: Vec<SessionOut> = Vec::new();
        let mut main_out: Option<(SessionOut, SessionShape)> = None;
        let shapes = self.spec.sessions.clone();
        for (i, shape) in shapes.iter().enumerate() {
            debug_assert!(
                !matches!(shape.kind, SessionKind::CronIsolated { .. }),
                "isolated cron sessions are generated from cron job shapes"
            );
            let start = TimestampMs(base_time().0 + i as i64 * SESSION_SPACING_MS);
            let out = self.build_session(shape, i, start, &mut children);
            if shape.soft_deleted {
                if !self.truth.expected_rules.contains(&"R2".to_string()) {
                    self.truth.expected_rules.push("R2".to_string());
                }
                finished.push((out, true));
            } else if shape.kind == SessionKind::Main && main_out.is_none() {
                main_out = Some((out, shape.clone()));
            } else {
                self.index_entry_for(&out, None, shape.with_prompt_report, shape.with_skills_snapshot);
                finished.push((out, false));
            }
        }

        // Cron artifacts (may append injected turns to the main session and
        // spawn isolated sessions).
        self.write_cron(&mut children, main_out.as_mut().map(|(out, _)| out));
        if let Some((main, shape)) = main_out {
            self.index_entry_for(&main, None, shape.with_prompt_report, shape.with_skills_snapshot);
            finished.push((main, false));
        }
        for child in children {
            finished.push((child, false));
        }

        // The index file, then every transcript.
        let index_obj: Value = if self.spec.variant_dialect {
            json!({
                "sessions": Value::Object(self.index_entries.clone().into_iter().collect()),
                "order": self.index_entries.keys().cloned().collect::<Vec<_>>(),
            })
        } else {
            Value::Object(self.index_entries.clone().into_iter().collect())
        };
        let index_mtime = self.last_activity;
        self.add_file(
            &format!("agents/{}/sessions/sessions.json", self.spec.agent_id),
            serde_json::to_vec_pretty(&index_obj).unwrap(),
            index_mtime,
            ArtifactKind::SessionIndex,
        );
        for (out, soft_deleted) in finished {
            self.finish_session(out, soft_deleted);
        }

        // Subagent registry.
        if !self.registry_records.is_empty() {
            let t = self.last_activity;
            self.add_file(
                "subagents/runs.json",
                serde_json::to_vec_pretty(&json!({"runs": self.registry_records.clone()})).unwrap(),
                t,
                ArtifactKind::SubagentRegistry,
            );
        }

        // Runtime logs.
        let mut log_files = BTreeMap::new();
        self.write_logs(&mut log_files);

        // Capability expectations, ordered the way the analyzer orders them.
        self.capability_probes.sort_by_key(|a| (a.0, a.1));
        let mut current: Vec<String> = Vec::new();
        for (time, tag, set) in &self.capability_probes {
            let (source_tag, tools) = match tag {
                0 => ("config", current.clone()),
                1 => ("report", set.clone()),
                _ => ("snapshot", set.clone()),
            };
            self.truth.capabilities.push(ExpectedCapability {
                time: *time,
                tools: tools.iter().cloned().collect(),
                source_tag: source_tag.to_string(),
            });
            current = tools;
        }

        self.truth.capture_time = TimestampMs(self.last_activity.0 + 60_000);
        self.truth.activity_in_window = !self.truth.sessions.is_empty();
        self.truth.artifacts.sort();
        self.truth.sessions.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        self.truth.index_sessions.sort_by(|a, b| a.key.cmp(&b.key));
        self.truth.media.sort_by(|a, b| a.file_name.cmp(&b.file_name));
        self.truth.cron_runs.sort_by(|a, b| (&a.job_id, a.time).cmp(&(&b.job_id, b.time)));

        (self.store_files, log_files, self.truth)
    }
}

/// Generate a complete store under `out_dir`: the `.openclaw`-style tree in
/// `store/`, runtime logs in `logs/`, plus `ground_truth.json` and an echo
/// of the scenario in `scenario.json`.
pub fn generate_store(spec: &ScenarioSpec, out_dir: &Path) -> io::Result<(GeneratedStore, GroundTruth)> {
    let store_dir = out_dir.join("store");
    let log_dir = out_dir.join("logs");
    std::fs::create_dir_all(&store_dir)?;
    std::fs::create_dir_all(&log_dir)?;

    let (store_files, log_files, truth) = Builder::new(spec).build();

    write_tree(&store_dir, &store_files)?;
    write_tree(&log_dir, &log_files)?;

    std::fs::write(
        out_dir.join("ground_truth.json"),
        serde_json::to_vec_pretty(&truth)?,
    )?;
    std::fs::write(
        out_dir.join("scenario.json"),
        serde_json::to_vec_pretty(spec)?,
    )?;

    Ok((
        GeneratedStore {
            out_dir: out_dir.to_path_buf(),
            store_dir,
            log_dir,
        },
        truth,
    ))
}

fn write_tree(root: &Path, files: &BTreeMap<String, FileSpec>) -> io::Result<()> {
    for (rel, spec) in files {
        let path = root.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(&path, &spec.bytes)?;
    }
    // Set mtimes after all writes so directory churn cannot disturb them.
    for (rel, spec) in files {
        let path = root.join(rel);
        let mtime = std::time::SystemTime::UNIX_EPOCH
            + std::time::Duration::from_millis(spec.mtime.0.max(0) as u64);
        let file = std::fs::File::options().write(true).open(&path)?;
        file.set_modified(mtime)?;
    }
    Ok(())
}
