//! Artifact store layout: discovery, inventory, and plane classification.
//!
//! An OpenClaw-style installation keeps almost everything under a hidden
//! `.openclaw` directory, with ephemeral runtime logs written to a separate
//! log directory (`/tmp/openclaw/` on a live system). Discovery walks a
//! captured copy of both trees, matches every file against the known path
//! patterns, and assigns each matched artifact to the five evidence planes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::common::{ParseWarning, TimestampMs};
use crate::glob::glob_match;

/// The captured store: the `.openclaw` tree plus the optional log directory.
#[derive(Debug, Clone)]
pub struct StoreRoot {
    pub base_path: PathBuf,
    pub log_dir: Option<PathBuf>,
}

impl StoreRoot {
    pub fn new(base_path: impl Into<PathBuf>) -> Self {
        StoreRoot {
            base_path: base_path.into(),
            log_dir: None,
        }
    }

    pub fn with_logs(mut self, log_dir: impl Into<PathBuf>) -> Self {
        self.log_dir = Some(log_dir.into());
        self
    }

    /// Resolve a descriptor's relative path to an absolute path on disk.
    pub fn resolve(&self, d: &ArtifactDescriptor) -> PathBuf {
        if d.kind == ArtifactKind::RuntimeLog {
            match &self.log_dir {
                Some(dir) => dir.join(&d.path),
                None => self.base_path.join(&d.path),
            }
        } else {
            self.base_path.join(&d.path)
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store root is not a readable directory: {0}")]
    UnreadableRoot(String),
}

/// Every artifact class the store layout defines.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum ArtifactKind {
    Config,
    ConfigBackup,
    ChannelCredentials,
    AuthProfiles,
    DeviceIdentity,
    WorkspaceIdentityFile,
    SkillDefinition,
    DailyMemoryLog,
    SemanticMemoryDb,
    SessionIndex,
    SessionTranscript,
    DeletedSessionTranscript,
    InboundMedia,
    CronJobs,
    CronRunLog,
    SubagentRegistry,
    RuntimeLog,
}

impl ArtifactKind {
    pub const ALL: &'static [ArtifactKind] = &[
        ArtifactKind::Config,
        ArtifactKind::ConfigBackup,
        ArtifactKind::ChannelCredentials,
        ArtifactKind::AuthProfiles,
        ArtifactKind::DeviceIdentity,
        ArtifactKind::WorkspaceIdentityFile,
        ArtifactKind::SkillDefinition,
        ArtifactKind::DailyMemoryLog,
        ArtifactKind::SemanticMemoryDb,
        ArtifactKind::SessionIndex,
        ArtifactKind::SessionTranscript,
        ArtifactKind::DeletedSessionTranscript,
        ArtifactKind::InboundMedia,
        ArtifactKind::CronJobs,
        ArtifactKind::CronRunLog,
        ArtifactKind::SubagentRegistry,
        ArtifactKind::RuntimeLog,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ArtifactKind::Config => "config",
            ArtifactKind::ConfigBackup => "config_backup",
            ArtifactKind::ChannelCredentials => "channel_credentials",
            ArtifactKind::AuthProfiles => "auth_profiles",
            ArtifactKind::DeviceIdentity => "device_identity",
            ArtifactKind::WorkspaceIdentityFile => "workspace_identity_file",
            ArtifactKind::SkillDefinition => "skill_definition",
            ArtifactKind::DailyMemoryLog => "daily_memory_log",
            ArtifactKind::SemanticMemoryDb => "semantic_memory_db",
            ArtifactKind::SessionIndex => "session_index",
            ArtifactKind::SessionTranscript => "session_transcript",
            ArtifactKind::DeletedSessionTranscript => "deleted_session_transcript",
            ArtifactKind::InboundMedia => "inbound_media",
            ArtifactKind::CronJobs => "cron_jobs",
            ArtifactKind::CronRunLog => "cron_run_log",
            ArtifactKind::SubagentRegistry => "subagent_registry",
            ArtifactKind::RuntimeLog => "runtime_log",
        }
    }
}

/// The five evidence planes of the agent artifact taxonomy.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Plane {
    ReasoningCognition,
    IdentityConfiguration,
    KnowledgeRecall,
    CommunicationIO,
    ActionsEffects,
}

impl Plane {
    pub const ALL: &'static [Plane] = &[
        Plane::ReasoningCognition,
        Plane::IdentityConfiguration,
        Plane::KnowledgeRecall,
        Plane::CommunicationIO,
        Plane::ActionsEffects,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Plane::ReasoningCognition => "reasoning_cognition",
            Plane::IdentityConfiguration => "identity_configuration",
            Plane::KnowledgeRecall => "knowledge_recall",
            Plane::CommunicationIO => "communication_io",
            Plane::ActionsEffects => "actions_effects",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Plane::ReasoningCognition => "Reasoning & Cognition",
            Plane::IdentityConfiguration => "Identity & Configuration",
            Plane::KnowledgeRecall => "Knowledge & Recall",
            Plane::CommunicationIO => "Communication & I/O",
            Plane::ActionsEffects => "Actions & Effects",
        }
    }
}

/// Evidential weight of an artifact on a given plane.
/// Total order: NotRelevant < Secondary < Primary.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum RelevanceLevel {
    NotRelevant,
    Secondary,
    Primary,
}

/// One located artifact with its classification and file metadata.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtifactDescriptor {
    pub kind: ArtifactKind,
    /// Relative to the store root; runtime logs are relative to the log dir.
    pub path: String,
    pub plane_relevance: BTreeMap<Plane, RelevanceLevel>,
    pub size_bytes: u64,
    pub mtime: TimestampMs,
}

/// A file under the store root that matched no known pattern. Kept in a
/// side list so nothing disappears from the inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnclassifiedFile {
    pub path: String,
    pub size_bytes: u64,
    pub mtime: TimestampMs,
}

/// Result of walking a captured store.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Inventory {
    pub descriptors: Vec<ArtifactDescriptor>,
    pub unclassified: Vec<UnclassifiedFile>,
    pub warnings: Vec<ParseWarning>,
}

// Path patterns, in match order. Variables like `{id}` in the layout docs
// are one non-separator segment, written here as `*`.
const PATTERNS: &[(&str, ArtifactKind)] = &[
    ("openclaw.json", ArtifactKind::Config),
    ("openclaw.json.bak*", ArtifactKind::ConfigBackup),
    ("credentials/**", ArtifactKind::ChannelCredentials),
    ("agents/*/agent/auth-profiles.json", ArtifactKind::AuthProfiles),
    ("devices/**", ArtifactKind::DeviceIdentity),
    ("identity/**", ArtifactKind::DeviceIdentity),
    ("workspace/*.md", ArtifactKind::WorkspaceIdentityFile),
    ("workspace/skills/**", ArtifactKind::SkillDefinition),
    ("skills/**", ArtifactKind::SkillDefinition),
    ("workspace/memory/**", ArtifactKind::DailyMemoryLog),
    ("memory/*.sqlite", ArtifactKind::SemanticMemoryDb),
    ("agents/*/sessions/sessions.json", ArtifactKind::SessionIndex),
    ("agents/*/sessions/*.jsonl", ArtifactKind::SessionTranscript),
    (
        "agents/*/sessions/*.jsonl.deleted.*",
        ArtifactKind::DeletedSessionTranscript,
    ),
    ("media/inbound/**", ArtifactKind::InboundMedia),
    ("cron/jobs.json", ArtifactKind::CronJobs),
    ("cron/runs/*.jsonl", ArtifactKind::CronRunLog),
    ("subagents/runs.json", ArtifactKind::SubagentRegistry),
];

/// The path patterns of the store layout, for taxonomy views.
pub fn pattern_table() -> &'static [(&'static str, ArtifactKind)] {
    PATTERNS
}

/// Classify one store-relative path; `None` means no pattern matched.
pub fn classify_path(rel_path: &str) -> Option<ArtifactKind> {
    PATTERNS
        .iter()
        .find(|(pat, _)| glob_match(pat, rel_path))
        .map(|(_, kind)| *kind)
}

/// Runtime log filename check: `openclaw-YYYY-MM-DD.log` with a real date.
pub fn is_runtime_log_name(name: &str) -> bool {
    log_file_date(name).is_some()
}

/// Extract the calendar date baked into a runtime log filename.
pub fn log_file_date(name: &str) -> Option<chrono::NaiveDate> {
    let rest = name.strip_prefix("openclaw-")?.strip_suffix(".log")?;
    chrono::NaiveDate::parse_from_str(rest, "%Y-%m-%d").ok()
}

/// Static per-kind plane mapping.
///
/// The four analysis-phase columns of the layout overview map onto the
/// Identity, Knowledge, Communication, and Actions planes; the Reasoning
/// plane is assigned from the taxonomy's representative artifacts
/// (transcripts carry reasoning traces directly; configuration and the
/// session index carry model identity).
pub fn classify_plane(kind: ArtifactKind) -> BTreeMap<Plane, RelevanceLevel> {
    use ArtifactKind as K;
    use RelevanceLevel::{NotRelevant as N, Primary as P, Secondary as S};
    // (reasoning, identity, knowledge, communication, actions)
    let (r, i, k, c, a) = match kind {
        K::Config => (S, P, N, P, N),
        K::ConfigBackup => (S, P, N, S, N),
        K::ChannelCredentials => (N, S, N, P, N),
        K::AuthProfiles => (N, P, N, N, N),
        K::DeviceIdentity => (N, N, N, P, N),
        K::WorkspaceIdentityFile => (N, P, P, N, N),
        K::SkillDefinition => (N, P, S, N, N),
        K::DailyMemoryLog => (N, N, P, S, N),
        K::SemanticMemoryDb => (N, N, P, N, N),
        K::SessionIndex => (S, P, S, P, S),
        K::SessionTranscript => (P, S, P, P, P),
        K::DeletedSessionTranscript => (P, S, P, P, P),
        K::InboundMedia => (N, N, S, P, N),
        K::CronJobs => (N, P, N, N, P),
        K::CronRunLog => (N, N, N, N, P),
        K::SubagentRegistry => (N, N, N, N, P),
        K::RuntimeLog => (N, S, N, S, P),
    };
    BTreeMap::from([
        (Plane::ReasoningCognition, r),
        (Plane::IdentityConfiguration, i),
        (Plane::KnowledgeRecall, k),
        (Plane::CommunicationIO, c),
        (Plane::ActionsEffects, a),
    ])
}

/// Walk the captured store and produce the artifact inventory.
///
/// Individual unreadable files become warnings; only a missing or unreadable
/// root aborts discovery. Output ordering is deterministic (by path, store
/// tree first, then runtime logs).
pub fn discover_store(root: &StoreRoot) -> Result<Inventory, StoreError> {
    if !root.base_path.is_dir() {
        return Err(StoreError::UnreadableRoot(
            root.base_path.display().to_string(),
        ));
    }
    let mut inv = Inventory::default();
    walk_classified(&root.base_path, &mut inv, classify_path);

    if let Some(log_dir) = &root.log_dir {
        if log_dir.is_dir() {
            walk_classified(log_dir, &mut inv, |rel| {
                // Only top-level daily log files are runtime logs.
                if !rel.contains('/') && is_runtime_log_name(rel) {
                    Some(ArtifactKind::RuntimeLog)
                } else {
                    None
                }
            });
        } else {
            inv.warnings.push(
                ParseWarning::new("log directory missing or not a directory")
                    .with_path(log_dir.display().to_string()),
            );
        }
    }

    inv.descriptors.sort_by(|a, b| {
        (a.kind == ArtifactKind::RuntimeLog, &a.path)
            .cmp(&(b.kind == ArtifactKind::RuntimeLog, &b.path))
    });
    inv.unclassified.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(inv)
}

fn walk_classified(
    root: &Path,
    inv: &mut Inventory,
    classify: impl Fn(&str) -> Option<ArtifactKind>,
) {
    for entry in walkdir::WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
    {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                inv.warnings.push(ParseWarning::new(format!(
                    "unreadable entry during discovery: {e}"
                )));
                continue;
            }
        };
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = match entry.path().strip_prefix(root) {
            Ok(r) => r.to_string_lossy().replace('\\', "/"),
            Err(_) => continue,
        };
        let meta = match entry.metadata() {
            Ok(m) => m,
            Err(e) => {
                inv.warnings.push(
                    ParseWarning::new(format!("stat failed: {e}")).with_path(rel.clone()),
                );
                continue;
            }
        };
        let mtime = meta
            .modified()
            .ok()
            .and_then(|t| t.duration_since(std::time::UNIX_EPOCH).ok())
            .map(|d| TimestampMs(d.as_millis() as i64))
            .unwrap_or_default();
        match classify(&rel) {
            Some(kind) => inv.descriptors.push(ArtifactDescriptor {
                kind,
                plane_relevance: classify_plane(kind),
                path: rel,
                size_bytes: meta.len(),
                mtime,
            }),
            None => inv.unclassified.push(UnclassifiedFile {
                path: rel,
                size_bytes: meta.len(),
                mtime,
            }),
        }
    }
}
