//! End-to-end store loading and correlation: the glue between discovery and
//! the per-artifact parsers, producing one immutable view every analysis
//! command works from. Reads are strictly read-only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::common::{ParseWarning, TimestampMs};
use crate::correlate::{
    associate_runs, attribute_cron_runs, build_timeline, link_subagents, pair_tool_calls,
    CronAttribution, DelegationGraph, MtimeEvidence, PairingResult, ParsedSession, RunAssociation,
    Timeline, TimelineInputs, DEFAULT_PROXIMITY_WINDOW_MS,
};
use crate::peripheral::{
    inventory_workspace, load_config_history, log_retention_gaps, parse_cron, parse_log_file,
    parse_subagent_registry, ConfigHistory, ConfigSource, CronState, LogFileStat, MarkerTable,
    ParsedLogFile, RetentionReport, SubagentRegistry, WorkspaceSnapshot,
};
use crate::store::{discover_store, ArtifactKind, Inventory, StoreError, StoreRoot};
use crate::transcript::{
    parse_session_index, parse_transcript, resolve_sessions, SessionIndex, SessionResolution,
};

/// Tunables for one analysis run; embedded in every report for
/// reproducibility.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LoadOptions {
    /// Reference time of the capture; defaults to the newest mtime observed.
    pub capture_time: Option<TimestampMs>,
    pub proximity_window_ms: i64,
    pub markers: MarkerTable,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            capture_time: None,
            proximity_window_ms: DEFAULT_PROXIMITY_WINDOW_MS,
            markers: MarkerTable::default(),
        }
    }
}

/// Everything parsed from one captured store.
#[derive(Debug)]
pub struct LoadedStore {
    pub root: StoreRoot,
    pub inventory: Inventory,
    pub config_history: ConfigHistory,
    pub index: SessionIndex,
    /// Store-relative path of the (first) session index file.
    pub index_path: String,
    pub resolution: SessionResolution,
    pub sessions: Vec<ParsedSession>,
    pub logs: Vec<ParsedLogFile>,
    pub retention: RetentionReport,
    pub cron: CronState,
    pub registry: SubagentRegistry,
    pub workspace: WorkspaceSnapshot,
    pub capture_time: TimestampMs,
    pub warnings: Vec<ParseWarning>,
}

/// Derived, cross-source state on top of a loaded store.
#[derive(Debug)]
pub struct CorrelatedStore {
    pub pairings: BTreeMap<String, PairingResult>,
    pub timeline: Timeline,
    pub associations: Vec<RunAssociation>,
    pub graph: DelegationGraph,
    pub cron_attributions: Vec<CronAttribution>,
}

pub fn load_store(root: &StoreRoot, options: &LoadOptions) -> Result<LoadedStore, StoreError> {
    let inventory = discover_store(root)?;
    let mut warnings = inventory.warnings.clone();

    let read =
        |desc: &crate::store::ArtifactDescriptor| std::fs::read(root.resolve(desc)).ok();

    // Configuration history: live config plus backups.
    let mut config_sources = Vec::new();
    for desc in &inventory.descriptors {
        if matches!(desc.kind, ArtifactKind::Config | ArtifactKind::ConfigBackup) {
            match std::fs::read(root.resolve(desc)) {
                Ok(content) => config_sources.push(ConfigSource {
                    path: desc.path.clone(),
                    content,
                    mtime: desc.mtime,
                }),
                Err(e) => warnings.push(
                    ParseWarning::new(format!("unreadable config: {e}")).with_path(&desc.path),
                ),
            }
        }
    }
    let config_history = load_config_history(config_sources);
    warnings.extend(config_history.warnings.clone());

    // Session indexes, grouped per agent directory.
    let mut index = SessionIndex::default();
    let mut index_path = String::new();
    let mut resolution = SessionResolution::default();
    let mut session_listings: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for desc in &inventory.descriptors {
        match desc.kind {
            ArtifactKind::SessionTranscript | ArtifactKind::DeletedSessionTranscript => {
                let (dir, name) = split_parent(&desc.path);
                session_listings
                    .entry(dir.to_string())
                    .or_default()
                    .push(name.to_string());
            }
            _ => {}
        }
    }
    for desc in &inventory.descriptors {
        if desc.kind != ArtifactKind::SessionIndex {
            continue;
        }
        if index_path.is_empty() {
            index_path = desc.path.clone();
        }
        let Some(content) = read(desc) else {
            warnings.push(ParseWarning::new("unreadable session index").with_path(&desc.path));
            continue;
        };
        match parse_session_index(&content) {
            Ok(parsed) => {
                for w in parsed.warnings {
                    warnings.push(w.with_path(&desc.path));
                }
                let (dir, _) = split_parent(&desc.path);
                let listing = session_listings.remove(dir).unwrap_or_default();
                let sub_resolution = resolve_sessions(
                    &SessionIndex {
                        entries: parsed.entries.clone(),
                        warnings: Vec::new(),
                    },
                    &listing,
                );
                resolution.records.extend(sub_resolution.records);
                resolution.dangling.extend(sub_resolution.dangling);
                resolution.ignored.extend(sub_resolution.ignored);
                index.entries.extend(parsed.entries);
            }
            Err(e) => {
                warnings.push(ParseWarning::new(e.to_string()).with_path(&desc.path));
            }
        }
    }
    // Transcript directories without any index file: everything is orphaned.
    for (dir, listing) in session_listings {
        let sub = resolve_sessions(&SessionIndex::default(), &listing);
        let _ = dir;
        resolution.records.extend(sub.records);
        resolution.ignored.extend(sub.ignored);
    }

    // Parse every transcript on disk, soft-deleted ones included.
    let mut sessions = Vec::new();
    for desc in &inventory.descriptors {
        if !matches!(
            desc.kind,
            ArtifactKind::SessionTranscript | ArtifactKind::DeletedSessionTranscript
        ) {
            continue;
        }
        let Some(content) = read(desc) else {
            warnings.push(ParseWarning::new("unreadable transcript").with_path(&desc.path));
            continue;
        };
        let (entries, mut parse_warnings) = parse_transcript(&content);
        for w in &mut parse_warnings {
            w.path = Some(desc.path.clone());
        }
        let (_, file_name) = split_parent(&desc.path);
        let record = resolution.records.iter().find(|r| r.file_name == file_name);
        let session_id = record
            .map(|r| r.session_id.clone())
            .unwrap_or_else(|| file_name.trim_end_matches(".jsonl").to_string());
        let session_key = index.key_for_session_id(&session_id).map(str::to_owned);
        sessions.push(ParsedSession {
            session_id,
            session_key,
            file_path: desc.path.clone(),
            status: record
                .map(|r| r.status.clone())
                .unwrap_or(crate::transcript::SessionFileStatus::Orphaned),
            entries,
            warnings: parse_warnings,
        });
    }

    // Runtime logs.
    let mut logs = Vec::new();
    let mut log_stats = Vec::new();
    for desc in &inventory.descriptors {
        if desc.kind != ArtifactKind::RuntimeLog {
            continue;
        }
        let Some(content) = read(desc) else {
            warnings.push(ParseWarning::new("unreadable log").with_path(&desc.path));
            continue;
        };
        let parsed = parse_log_file(&content, &desc.path, &options.markers);
        log_stats.push(LogFileStat {
            file_name: desc.path.clone(),
            date: parsed.file_date,
            mtime: desc.mtime,
        });
        logs.push(parsed);
    }

    // Cron state.
    let jobs_content = inventory
        .descriptors
        .iter()
        .find(|d| d.kind == ArtifactKind::CronJobs)
        .and_then(&read);
    let runs_files: Vec<(String, Vec<u8>)> = inventory
        .descriptors
        .iter()
        .filter(|d| d.kind == ArtifactKind::CronRunLog)
        .filter_map(|d| {
            let (_, name) = split_parent(&d.path);
            read(d).map(|content| (name.to_string(), content))
        })
        .collect();
    let cron = parse_cron(jobs_content.as_deref(), &runs_files);
    warnings.extend(cron.warnings.clone());

    // Subagent registry.
    let registry_content = inventory
        .descriptors
        .iter()
        .find(|d| d.kind == ArtifactKind::SubagentRegistry)
        .and_then(read);
    let registry = parse_subagent_registry(registry_content.as_deref());

    // Workspace of the live configuration.
    let workspace_root = config_history
        .snapshots
        .iter()
        .rev()
        .find(|s| s.source_path == "openclaw.json")
        .or_else(|| config_history.snapshots.last())
        .map(|s| s.config.workspace_root.clone())
        .unwrap_or_else(|| crate::peripheral::DEFAULT_WORKSPACE_ROOT.to_string());
    let workspace = inventory_workspace(&root.base_path, &workspace_root);
    warnings.extend(workspace.warnings.clone());

    // Capture time: explicit, else newest mtime seen anywhere.
    let capture_time = options.capture_time.unwrap_or_else(|| {
        inventory
            .descriptors
            .iter()
            .map(|d| d.mtime)
            .chain(inventory.unclassified.iter().map(|u| u.mtime))
            .max()
            .unwrap_or(TimestampMs(0))
    });
    let retention = log_retention_gaps(&log_stats, capture_time);

    Ok(LoadedStore {
        root: root.clone(),
        inventory,
        config_history,
        index,
        index_path,
        resolution,
        sessions,
        logs,
        retention,
        cron,
        registry,
        workspace,
        capture_time,
        warnings,
    })
}

fn split_parent(path: &str) -> (&str, &str) {
    match path.rsplit_once('/') {
        Some((dir, name)) => (dir, name),
        None => ("", path),
    }
}

pub fn correlate_store(loaded: &LoadedStore, window_ms: i64) -> CorrelatedStore {
    let pairings: BTreeMap<String, PairingResult> = loaded
        .sessions
        .iter()
        .map(|s| (s.session_id.clone(), pair_tool_calls(s)))
        .collect();
    let graph = link_subagents(&loaded.index, &loaded.sessions, &loaded.registry);
    let agent_driven: BTreeSet<String> = graph.agent_driven_sessions();
    let mtime_events: Vec<MtimeEvidence> = loaded
        .inventory
        .descriptors
        .iter()
        .filter(|d| {
            matches!(
                d.kind,
                ArtifactKind::InboundMedia
                    | ArtifactKind::DailyMemoryLog
                    | ArtifactKind::WorkspaceIdentityFile
            )
        })
        .map(|d| MtimeEvidence {
            path: d.path.clone(),
            kind: d.kind,
            mtime: d.mtime,
        })
        .collect();
    let timeline = build_timeline(&TimelineInputs {
        sessions: &loaded.sessions,
        logs: &loaded.logs,
        cron: &loaded.cron,
        registry: &loaded.registry,
        config_history: &loaded.config_history,
        mtime_events: &mtime_events,
        agent_driven_sessions: &agent_driven,
    });
    let associations = associate_runs(&loaded.logs, &loaded.sessions, window_ms);
    let cron_attributions =
        attribute_cron_runs(&loaded.cron, &loaded.sessions, &loaded.index, window_ms);
    CorrelatedStore {
        pairings,
        timeline,
        associations,
        graph,
        cron_attributions,
    }
}
