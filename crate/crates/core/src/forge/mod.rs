//! Deterministic synthesis of ground-truth artifact stores.
//!
//! A scenario spec fully scripts an installation's history: sessions, turns,
//! tool actions with declared autonomy labels, cron jobs and venues,
//! delegation, media, configuration backups, and runtime logs. Generation is
//! a pure function of (spec, seed) on a virtual clock — the same inputs
//! produce byte-identical trees — and emits a machine-readable ground truth
//! that the analysis pipeline is checked against, field for field.

mod builder;
mod scenarios;
mod tamper;
mod verify;

pub use builder::{generate_store, GeneratedStore};
pub use scenarios::standard_scenarios;
pub use tamper::{apply_tamper, apply_tamper_at, DeleteTarget, TamperOp, TamperSpec};
pub use verify::{
    entry_tag, status_tag, ExpectedAttribution, ExpectedCapability, ExpectedCronJob,
    ExpectedCronRun, ExpectedEdge, ExpectedExecution, ExpectedIndexEntry, ExpectedMedia,
    ExpectedSession, GroundTruth,
};

use serde::{Deserialize, Serialize};

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub version: u32,
    pub name: String,
    pub seed: u64,
    pub agent_id: String,
    pub sessions: Vec<SessionShape>,
    pub cron_jobs: Vec<CronJobShape>,
    /// Number of `openclaw.json.bak*` files in the backup chain.
    pub config_backups: u32,
    /// Assign lastTouchedAt against filename order.
    pub adversarial_backup_order: bool,
    /// One backup omits `meta`, forcing the mtime fallback.
    pub backup_missing_meta: bool,
    pub with_logs: bool,
    /// Media files beyond the ones referenced from messages.
    pub extra_media: u32,
    pub memory_files: u32,
    /// Rename fields to the alternate spellings to exercise alias tolerance.
    pub variant_dialect: bool,
    /// Leave a cron runs file behind for a job that no longer exists.
    pub orphan_cron_run: bool,
    /// The tool envelope reported by schema snapshots and prompt reports.
    pub tool_set: Vec<String>,
    /// From the Nth logged run onward, this tool disappears from snapshots.
    pub capability_drop_from_run: Option<(u32, String)>,
}

impl ScenarioSpec {
    pub fn new(name: &str, seed: u64) -> Self {
        ScenarioSpec {
            version: SCENARIO_SCHEMA_VERSION,
            name: name.to_string(),
            seed,
            agent_id: "main".to_string(),
            sessions: Vec::new(),
            cron_jobs: Vec::new(),
            config_backups: 0,
            adversarial_backup_order: false,
            backup_missing_meta: false,
            with_logs: true,
            extra_media: 0,
            memory_files: 0,
            variant_dialect: false,
            orphan_cron_run: false,
            tool_set: vec![
                "read".into(),
                "write".into(),
                "edit".into(),
                "exec".into(),
                "message_send".into(),
                "sessions_spawn".into(),
            ],
            capability_drop_from_run: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SessionKind {
    Main,
    Named(String),
    /// Dedicated `cron:<jobId>` session; populated from the job shape.
    CronIsolated { job_index: usize },
    /// No user seed: agent-initiated activity (heartbeat-style).
    Headless,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionShape {
    pub kind: SessionKind,
    pub turns: Vec<TurnShape>,
    pub soft_deleted: bool,
    pub telegram_headers: bool,
    /// Native-thinking provider: structured thinking blocks, no tags.
    /// Otherwise thinking and final text travel inside `<think>`/`<final>`
    /// tags in plain text blocks.
    pub native_thinking: bool,
    pub model_change_after_turn: Option<u32>,
    pub compaction_after_turn: Option<u32>,
    pub with_prompt_report: bool,
    pub with_skills_snapshot: bool,
}

impl SessionShape {
    pub fn new(kind: SessionKind) -> Self {
        SessionShape {
            kind,
            turns: Vec::new(),
            soft_deleted: false,
            telegram_headers: false,
            native_thinking: false,
            model_change_after_turn: None,
            compaction_after_turn: None,
            with_prompt_report: true,
            with_skills_snapshot: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TurnShape {
    /// None only in Headless sessions: the turn has no user seed.
    pub user_text: Option<String>,
    pub thinking: Option<String>,
    pub actions: Vec<ActionShape>,
    pub final_text: String,
    pub with_media: bool,
}

impl TurnShape {
    pub fn chat(user_text: &str, final_text: &str) -> Self {
        TurnShape {
            user_text: Some(user_text.to_string()),
            thinking: None,
            actions: Vec::new(),
            final_text: final_text.to_string(),
            with_media: false,
        }
    }

    pub fn with_thinking(mut self, thinking: &str) -> Self {
        self.thinking = Some(thinking.to_string());
        self
    }

    pub fn with_actions(mut self, actions: Vec<ActionShape>) -> Self {
        self.actions = actions;
        self
    }

    pub fn with_media(mut self) -> Self {
        self.with_media = true;
        self
    }
}

/// The autonomy label a scripted action is constructed to exhibit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpectedAutonomy {
    Direct,
    Interpretive,
    Autonomous,
    Indeterminate,
    /// Not asserted (e.g. helper actions).
    Unchecked,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionShape {
    pub tool: ToolKind,
    pub expect_autonomy: ExpectedAutonomy,
    pub with_exec_details: bool,
    pub is_error: bool,
}

impl ActionShape {
    pub fn exec(command: &str, expect: ExpectedAutonomy) -> Self {
        ActionShape {
            tool: ToolKind::Exec {
                command: command.to_string(),
            },
            expect_autonomy: expect,
            with_exec_details: true,
            is_error: false,
        }
    }

    pub fn write(path: &str, content: &str, expect: ExpectedAutonomy) -> Self {
        ActionShape {
            tool: ToolKind::Write {
                path: path.to_string(),
                content: content.to_string(),
            },
            expect_autonomy: expect,
            with_exec_details: false,
            is_error: false,
        }
    }

    pub fn read(path: &str, content: &str, expect: ExpectedAutonomy) -> Self {
        ActionShape {
            tool: ToolKind::Read {
                path: path.to_string(),
                content: content.to_string(),
            },
            expect_autonomy: expect,
            with_exec_details: false,
            is_error: false,
        }
    }

    pub fn edit(path: &str, old: &str, new: &str, expect: ExpectedAutonomy) -> Self {
        ActionShape {
            tool: ToolKind::Edit {
                path: path.to_string(),
                old: old.to_string(),
                new: new.to_string(),
            },
            expect_autonomy: expect,
            with_exec_details: false,
            is_error: false,
        }
    }

    pub fn send(to: &str, text: &str, expect: ExpectedAutonomy) -> Self {
        ActionShape {
            tool: ToolKind::Send {
                to: to.to_string(),
                text: text.to_string(),
            },
            expect_autonomy: expect,
            with_exec_details: false,
            is_error: false,
        }
    }

    pub fn spawn(task: &str, child: ChildShape) -> Self {
        ActionShape {
            tool: ToolKind::Spawn {
                task: task.to_string(),
                child,
            },
            expect_autonomy: ExpectedAutonomy::Unchecked,
            with_exec_details: false,
            is_error: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ToolKind {
    Exec { command: String },
    Write { path: String, content: String },
    /// `content` is what the read returns.
    Read { path: String, content: String },
    Edit { path: String, old: String, new: String },
    Send { to: String, text: String },
    Spawn { task: String, child: ChildShape },
}

/// A spawned child session: seeded by the agent, one working turn.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChildShape {
    pub actions: Vec<ActionShape>,
    pub final_text: String,
    /// Cleanup policy removed the child's index entry after completion.
    pub cleanup: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CronJobShape {
    /// Becomes `job-<name>`.
    pub name: String,
    pub schedule: ScheduleShape,
    pub venue: CronVenueShape,
    pub runs: u32,
    /// Actions executed per run (in the venue session).
    pub actions_per_run: Vec<ActionShape>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScheduleShape {
    At,
    EveryMinutes(u32),
    CronExpr(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CronVenueShape {
    Main,
    Isolated,
}
