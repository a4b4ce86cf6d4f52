//! Investigator-facing CLI over captured OpenClaw-style artifact stores.
//!
//! Every analysis command is strictly read-only over the store. Exit codes:
//! 0 success, 1 findings present (`antiforensics --fail-on-findings`),
//! 2 usage error, 3 input error.

mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use examiner_core::analyze::{correlate_store, load_store, CorrelatedStore, LoadOptions, LoadedStore};
use examiner_core::common::{parse_timestamp_str, TimestampMs};
use examiner_core::correlate::DEFAULT_PROXIMITY_WINDOW_MS;
use examiner_core::diffkit::{diff_manifests, filter_noise, snapshot_manifest, HASH_ALGORITHM};
use examiner_core::examine::{
    capability_findings, capability_timeline, classify_autonomy, detect_antiforensics,
    reconstruct_context, reconstruction_boundaries, trace_origin, AntiForensicsInputs, Severity,
};
use examiner_core::forge;
use examiner_core::peripheral::{config_at, redact_credentials, MarkerTable};
use examiner_core::store::{classify_plane, pattern_table, ArtifactKind, Plane, StoreRoot};

use report::{body_items, emit, Format, Report, ReportParameters, TIE_BREAK_RANKING};

#[derive(Parser)]
#[command(
    name = "openclaw-examiner",
    version,
    about = "Forensic examination of OpenClaw-style agent artifact stores",
    after_help = "Examples:\n  openclaw-examiner scan ~/capture/.openclaw --logs ~/capture/tmp-openclaw\n  openclaw-examiner timeline --store ~/capture/.openclaw --format json\n  openclaw-examiner antiforensics ~/capture/.openclaw --fail-on-findings\n  openclaw-examiner forge generate --scenario full /tmp/fixture"
)]
struct Cli {
    /// Captured `.openclaw` directory (alternative to the positional arg).
    #[arg(long, global = true)]
    store: Option<PathBuf>,
    /// Captured runtime-log directory (counterpart of /tmp/openclaw).
    #[arg(long, global = true)]
    logs: Option<PathBuf>,
    /// Temporal proximity window in milliseconds for run/cron association.
    #[arg(long, global = true, default_value_t = DEFAULT_PROXIMITY_WINDOW_MS)]
    window_ms: i64,
    /// Noise-filter rules file (one path glob per line, # comments).
    #[arg(long, global = true)]
    filter: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Show credential values instead of their digests.
    #[arg(long, global = true)]
    reveal: bool,
    /// Override the capture reference time (epoch or RFC 3339); defaults to
    /// the newest mtime in the capture.
    #[arg(long, global = true)]
    capture_time: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inventory the store: every artifact with its plane classification.
    Scan { store: Option<PathBuf> },
    /// Unified chronological view across all sources.
    Timeline { store: Option<PathBuf> },
    /// Session-level views.
    Session {
        #[command(subcommand)]
        cmd: SessionCmd,
    },
    /// Tool executions: toolCall/toolResult pairs and unpaired remnants.
    Tools { store: Option<PathBuf> },
    /// Origin chain and autonomy classification for one tool call.
    Attribution {
        tool_call_id: String,
        store: Option<PathBuf>,
    },
    /// Autonomy classification for every tool execution.
    Autonomy { store: Option<PathBuf> },
    /// Anti-forensics indicators (rules R1-R6, D1-D2).
    Antiforensics {
        store: Option<PathBuf>,
        /// Exit 1 when any anomalous finding is present.
        #[arg(long)]
        fail_on_findings: bool,
    },
    /// Capability envelope evolution over time.
    Capabilities { store: Option<PathBuf> },
    /// Approximate the model context at a point in time.
    Context {
        /// Timestamp (epoch seconds/millis or RFC 3339).
        #[arg(long)]
        at: String,
        /// Session key or id; defaults to the main session.
        #[arg(long)]
        session: Option<String>,
        store: Option<PathBuf>,
    },
    /// Configuration in effect at a point in time.
    ConfigAt {
        at: String,
        store: Option<PathBuf>,
    },
    /// Manifest of a directory tree (sizes, mtimes, SHA-256).
    Manifest {
        root: PathBuf,
        #[arg(long, default_value = "state")]
        state_id: String,
    },
    /// Five-category change set between two tree states.
    Diff { root_a: PathBuf, root_b: PathBuf },
    /// Ground-truth fixture support.
    Forge {
        #[command(subcommand)]
        cmd: ForgeCmd,
    },
    /// The artifact-kind → evidence-plane taxonomy.
    Planes,
}

#[derive(Subcommand)]
enum SessionCmd {
    List { store: Option<PathBuf> },
    Show {
        key_or_id: String,
        store: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ForgeCmd {
    /// Generate a synthetic store with ground truth under OUT/.
    Generate {
        out: PathBuf,
        /// Named scenario from the standard matrix.
        #[arg(long, default_value = "full")]
        scenario: String,
        /// Load a scenario spec from a JSON file instead.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// List available scenario names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Apply a tamper spec to a generated store; prints expected rule ids.
    Tamper {
        /// Directory previously produced by `forge generate`.
        out: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
}

/// Input-level failure: exit code 3.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

struct Ctx {
    loaded: LoadedStore,
    correlated: CorrelatedStore,
    parameters: ReportParameters,
    reveal: bool,
}

fn parse_time_arg(s: &str) -> Result<TimestampMs, InputError> {
    parse_timestamp_str(s).ok_or_else(|| InputError(format!("unparseable timestamp {s:?}")))
}

fn load_filter_rules(path: Option<&Path>) -> Result<Vec<String>, InputError> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let content =
        std::fs::read_to_string(path).map_err(|e| InputError(format!("filter rules: {e}")))?;
    Ok(content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

fn open_store(cli: &Cli, positional: Option<&PathBuf>) -> Result<Ctx, InputError> {
    let store_path = positional
        .or(cli.store.as_ref())
        .ok_or_else(|| InputError("no store given (positional or --store)".into()))?;
    if !store_path.is_dir() {
        return Err(InputError(format!(
            "store root {} is not a directory",
            store_path.display()
        )));
    }
    let mut root = StoreRoot::new(store_path);
    if let Some(logs) = &cli.logs {
        root = root.with_logs(logs);
    }
    let capture_time = match &cli.capture_time {
        Some(s) => Some(parse_time_arg(s)?),
        None => None,
    };
    let options = LoadOptions {
        capture_time,
        proximity_window_ms: cli.window_ms,
        markers: MarkerTable::default(),
    };
    let loaded = load_store(&root, &options).map_err(|e| InputError(e.to_string()))?;
    let correlated = correlate_store(&loaded, cli.window_ms);
    let filter_rules = load_filter_rules(cli.filter.as_deref())?;
    let parameters = ReportParameters {
        store: store_path.display().to_string(),
        logs: cli.logs.as_ref().map(|p| p.display().to_string()),
        window_ms: cli.window_ms,
        capture_time: loaded.capture_time,
        markers: options.markers,
        filter_rules: filter_rules.clone(),
        redact: !cli.reveal,
        hash_algorithm: HASH_ALGORITHM.to_string(),
        tie_break_ranking: TIE_BREAK_RANKING.to_string(),
    };
    Ok(Ctx {
        loaded,
        correlated,
        parameters,
        reveal: cli.reveal,
    })
}

fn boundaries_of(ctx: &Ctx) -> Vec<String> {
    reconstruction_boundaries(
        &ctx.loaded.index,
        &ctx.correlated.associations,
        &ctx.correlated.cron_attributions,
    )
}

fn run(cli: Cli) -> Result<ExitCode, InputError> {
    match &cli.command {
        Command::Scan { store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_scan(&cli, &ctx);
            Ok(ExitCode::SUCCESS)
        }
        Command::Timeline { store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_timeline(&cli, &ctx);
            Ok(ExitCode::SUCCESS)
        }
        Command::Session { cmd } => match cmd {
            SessionCmd::List { store } => {
                let ctx = open_store(&cli, store.as_ref())?;
                cmd_session_list(&cli, &ctx);
                Ok(ExitCode::SUCCESS)
            }
            SessionCmd::Show { key_or_id, store } => {
                let ctx = open_store(&cli, store.as_ref())?;
                cmd_session_show(&cli, &ctx, key_or_id)
            }
        },
        Command::Tools { store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_tools(&cli, &ctx);
            Ok(ExitCode::SUCCESS)
        }
        Command::Attribution { tool_call_id, store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_attribution(&cli, &ctx, tool_call_id)
        }
        Command::Autonomy { store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_autonomy(&cli, &ctx);
            Ok(ExitCode::SUCCESS)
        }
        Command::Antiforensics { store, fail_on_findings } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_antiforensics(&cli, &ctx, *fail_on_findings)
        }
        Command::Capabilities { store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_capabilities(&cli, &ctx);
            Ok(ExitCode::SUCCESS)
        }
        Command::Context { at, session, store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_context(&cli, &ctx, at, session.as_deref())
        }
        Command::ConfigAt { at, store } => {
            let ctx = open_store(&cli, store.as_ref())?;
            cmd_config_at(&cli, &ctx, at)
        }
        Command::Manifest { root, state_id } => cmd_manifest(&cli, root, state_id),
        Command::Diff { root_a, root_b } => cmd_diff(&cli, root_a, root_b),
        Command::Forge { cmd } => cmd_forge(&cli, cmd),
        Command::Planes => {
            cmd_planes(&cli);
            Ok(ExitCode::SUCCESS)
        }
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_scan(cli: &Cli, ctx: &Ctx) {
    #[derive(serde::Serialize)]
    struct Body<'a> {
        descriptors: &'a [examiner_core::store::ArtifactDescriptor],
        unclassified: &'a [examiner_core::store::UnclassifiedFile],
        totals_by_kind: BTreeMap<&'static str, usize>,
    }
    let mut totals: BTreeMap<&'static str, usize> = BTreeMap::new();
    for d in &ctx.loaded.inventory.descriptors {
        *totals.entry(d.kind.as_str()).or_default() += 1;
    }
    let body = Body {
        descriptors: &ctx.loaded.inventory.descriptors,
        unclassified: &ctx.loaded.inventory.unclassified,
        totals_by_kind: totals,
    };
    let items = body_items(&body, "descriptors");
    let report = Report::new("scan", ctx.parameters.clone(), body)
        .with_warnings(ctx.loaded.warnings.clone())
        .with_caveats(boundaries_of(ctx));

    let mut text = format!(
        "artifact inventory: {} classified, {} unclassified\n",
        report.body.descriptors.len(),
        report.body.unclassified.len()
    );
    for d in report.body.descriptors {
        text.push_str(&format!(
            "  {:<28} {:>9}B  {}  {}\n",
            d.kind.as_str(),
            d.size_bytes,
            d.mtime.to_rfc3339(),
            d.path
        ));
    }
    for u in report.body.unclassified {
        text.push_str(&format!("  {:<28} {:>9}B  {}  {}\n", "(unclassified)", u.size_bytes, u.mtime.to_rfc3339(), u.path));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn cmd_timeline(cli: &Cli, ctx: &Ctx) {
    #[derive(serde::Serialize)]
    struct Body<'a> {
        events: &'a [examiner_core::correlate::TimelineEvent],
        undated: &'a [examiner_core::correlate::TimelineEvent],
        associations: &'a [examiner_core::correlate::RunAssociation],
    }
    let body = Body {
        events: &ctx.correlated.timeline.events,
        undated: &ctx.correlated.timeline.undated,
        associations: &ctx.correlated.associations,
    };
    let items = body_items(&body, "events");
    let report = Report::new("timeline", ctx.parameters.clone(), body)
        .with_warnings(ctx.loaded.warnings.clone())
        .with_caveats(boundaries_of(ctx));
    let mut text = format!("timeline: {} events\n", report.body.events.len());
    for e in report.body.events {
        text.push_str(&format!(
            "  {}  {:<22} {:<24} {}  [{}]\n",
            e.time.to_rfc3339(),
            e.kind,
            e.plane.label(),
            e.summary,
            e.evidence
        ));
    }
    if !report.body.undated.is_empty() {
        text.push_str(&format!("undated events: {}\n", report.body.undated.len()));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn cmd_session_list(cli: &Cli, ctx: &Ctx) {
    #[derive(serde::Serialize)]
    struct Row {
        session_id: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        key: Option<String>,
        status: String,
        entries: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        model: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        channel: Option<String>,
        file: String,
    }
    #[derive(serde::Serialize)]
    struct Body {
        sessions: Vec<Row>,
        dangling: Vec<examiner_core::transcript::DanglingIndexEntry>,
    }
    let rows: Vec<Row> = ctx
        .loaded
        .sessions
        .iter()
        .map(|s| {
            let meta = s
                .session_key
                .as_deref()
                .and_then(|k| ctx.loaded.index.entries.get(k));
            Row {
                session_id: s.session_id.clone(),
                key: s.session_key.clone(),
                status: examiner_core::forge::status_tag(&s.status),
                entries: s.entries.len(),
                model: meta.and_then(|m| m.model_name.clone()),
                channel: meta.and_then(|m| m.channel.clone()),
                file: s.file_path.clone(),
            }
        })
        .collect();
    let body = Body {
        sessions: rows,
        dangling: ctx.loaded.resolution.dangling.clone(),
    };
    let items = body_items(&body, "sessions");
    let report = Report::new("session list", ctx.parameters.clone(), body)
        .with_warnings(ctx.loaded.warnings.clone())
        .with_caveats(boundaries_of(ctx));
    let mut text = format!("sessions: {}\n", report.body.sessions.len());
    for r in &report.body.sessions {
        text.push_str(&format!(
            "  {}  {:<12} {:>4} entries  {}  {}\n",
            r.session_id,
            r.status,
            r.entries,
            r.key.as_deref().unwrap_or("-"),
            r.file
        ));
    }
    for d in &report.body.dangling {
        text.push_str(&format!(
            "  DANGLING index entry {} -> {} (no transcript on disk)\n",
            d.session_key, d.session_id
        ));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn cmd_session_show(cli: &Cli, ctx: &Ctx, key_or_id: &str) -> Result<ExitCode, InputError> {
    let session = ctx
        .loaded
        .sessions
        .iter()
        .find(|s| {
            s.session_id == key_or_id || s.session_key.as_deref() == Some(key_or_id)
        })
        .ok_or_else(|| InputError(format!("no session matches {key_or_id:?}")))?;
    let meta = session
        .session_key
        .as_deref()
        .and_then(|k| ctx.loaded.index.entries.get(k));

    #[derive(serde::Serialize)]
    struct Body<'a> {
        session: &'a examiner_core::correlate::ParsedSession,
        meta: Option<&'a examiner_core::transcript::SessionMeta>,
        pairing: Option<&'a examiner_core::correlate::PairingResult>,
        agent_driven: bool,
    }
    let body = Body {
        session,
        meta,
        pairing: ctx.correlated.pairings.get(&session.session_id),
        agent_driven: ctx
            .correlated
            .graph
            .agent_driven_sessions()
            .contains(&session.session_id),
    };
    let report = Report::new("session show", ctx.parameters.clone(), body)
        .with_warnings(session.warnings.clone())
        .with_caveats(boundaries_of(ctx));
    let mut text = format!(
        "session {} ({})\n",
        session.session_id,
        session.session_key.as_deref().unwrap_or("unindexed")
    );
    if report.body.agent_driven {
        text.push_str("  agent-driven: user-role entries in this transcript were seeded by a spawning agent\n");
    }
    for entry in &session.entries {
        let when = entry
            .timestamp()
            .map(|t| t.to_rfc3339())
            .unwrap_or_else(|| "-".into());
        text.push_str(&format!(
            "  L{:<4} {}  {}\n",
            entry.line,
            when,
            examiner_core::forge::entry_tag(&entry.payload)
        ));
    }
    emit(&report, cli.format, None, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_tools(cli: &Cli, ctx: &Ctx) {
    #[derive(serde::Serialize)]
    struct Body<'a> {
        executions: Vec<&'a examiner_core::correlate::ToolExecution>,
        unpaired_calls: Vec<&'a examiner_core::correlate::UnpairedCall>,
        unpaired_results: Vec<&'a examiner_core::correlate::UnpairedResult>,
        duplicate_ids: Vec<String>,
    }
    let mut body = Body {
        executions: Vec::new(),
        unpaired_calls: Vec::new(),
        unpaired_results: Vec::new(),
        duplicate_ids: Vec::new(),
    };
    for pairing in ctx.correlated.pairings.values() {
        body.executions.extend(pairing.executions.iter());
        body.unpaired_calls.extend(pairing.unpaired_calls.iter());
        body.unpaired_results.extend(pairing.unpaired_results.iter());
        body.duplicate_ids.extend(pairing.duplicate_ids.iter().cloned());
    }
    body.executions.sort_by_key(|e| (e.call_time, e.tool_call_id.clone()));
    let items = body_items(&body, "executions");
    let report = Report::new("tools", ctx.parameters.clone(), body)
        .with_warnings(ctx.loaded.warnings.clone())
        .with_caveats(boundaries_of(ctx));
    let mut text = format!(
        "tool executions: {} paired, {} unpaired calls, {} unpaired results\n",
        report.body.executions.len(),
        report.body.unpaired_calls.len(),
        report.body.unpaired_results.len()
    );
    for e in &report.body.executions {
        text.push_str(&format!(
            "  {}  {:<14} {}  {}{}\n",
            e.call_time.map(|t| t.to_rfc3339()).unwrap_or_else(|| "-".into()),
            e.tool_name,
            e.tool_call_id,
            e.session_id,
            match &e.details {
                Some(d) => format!(
                    "  [{}ms exit {}]",
                    d.duration_ms.unwrap_or(0),
                    d.exit_code.unwrap_or(0)
                ),
                None => String::new(),
            }
        ));
    }
    for u in &report.body.unpaired_calls {
        text.push_str(&format!("  UNPAIRED CALL {} ({})\n", u.tool_call_id, u.evidence));
    }
    for u in &report.body.unpaired_results {
        text.push_str(&format!("  UNPAIRED RESULT {} ({})\n", u.tool_call_id, u.evidence));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn find_execution<'a>(
    ctx: &'a Ctx,
    tool_call_id: &str,
) -> Option<(&'a examiner_core::correlate::ParsedSession, &'a examiner_core::correlate::ToolExecution)> {
    for (session_id, pairing) in &ctx.correlated.pairings {
        if let Some(exec) = pairing.executions.iter().find(|e| e.tool_call_id == tool_call_id) {
            let session = ctx.loaded.sessions.iter().find(|s| &s.session_id == session_id)?;
            return Some((session, exec));
        }
    }
    None
}

fn cmd_attribution(cli: &Cli, ctx: &Ctx, tool_call_id: &str) -> Result<ExitCode, InputError> {
    let (session, exec) = find_execution(ctx, tool_call_id)
        .ok_or_else(|| InputError(format!("no paired execution with toolCallId {tool_call_id:?}")))?;
    let chain = trace_origin(exec, session, &ctx.correlated.graph, &ctx.correlated.cron_attributions);
    let assessment = classify_autonomy(&chain, exec);

    #[derive(serde::Serialize)]
    struct Body<'a> {
        execution: &'a examiner_core::correlate::ToolExecution,
        chain: &'a examiner_core::examine::OriginChain,
        assessment: &'a examiner_core::examine::AutonomyAssessment,
    }
    let body = Body {
        execution: exec,
        chain: &chain,
        assessment: &assessment,
    };
    let report = Report::new("attribution", ctx.parameters.clone(), body)
        .with_caveats(boundaries_of(ctx));
    let mut text = format!(
        "attribution for {tool_call_id} ({} in session {})\norigin: {:?} (rule {})\nautonomy: {:?}\n  {}\nchain:\n",
        exec.tool_name, exec.session_id, chain.origin_kind, chain.rule, assessment.class, assessment.rationale
    );
    for link in &chain.links {
        text.push_str(&format!("  {:<20} {}  {}\n", link.role, link.evidence, link.excerpt));
    }
    emit(&report, cli.format, None, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_autonomy(cli: &Cli, ctx: &Ctx) {
    #[derive(serde::Serialize)]
    struct Row {
        tool_call_id: String,
        tool_name: String,
        session_id: String,
        origin: examiner_core::examine::OriginKind,
        origin_rule: String,
        class: examiner_core::examine::AutonomyClass,
        rationale: String,
    }
    #[derive(serde::Serialize)]
    struct Body {
        actions: Vec<Row>,
    }
    let mut rows = Vec::new();
    for (session_id, pairing) in &ctx.correlated.pairings {
        let Some(session) = ctx.loaded.sessions.iter().find(|s| &s.session_id == session_id) else {
            continue;
        };
        for exec in &pairing.executions {
            let chain =
                trace_origin(exec, session, &ctx.correlated.graph, &ctx.correlated.cron_attributions);
            let assessment = classify_autonomy(&chain, exec);
            rows.push(Row {
                tool_call_id: exec.tool_call_id.clone(),
                tool_name: exec.tool_name.clone(),
                session_id: session_id.clone(),
                origin: chain.origin_kind,
                origin_rule: chain.rule,
                class: assessment.class,
                rationale: assessment.rationale,
            });
        }
    }
    rows.sort_by(|a, b| a.tool_call_id.cmp(&b.tool_call_id));
    let body = Body { actions: rows };
    let items = body_items(&body, "actions");
    let report = Report::new("autonomy", ctx.parameters.clone(), body)
        .with_caveats(boundaries_of(ctx));
    let mut text = format!("autonomy classification: {} actions\n", report.body.actions.len());
    for r in &report.body.actions {
        text.push_str(&format!(
            "  {}  {:<14} {:?} via {:?} ({})\n",
            r.tool_call_id, r.tool_name, r.class, r.origin, r.origin_rule
        ));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn cmd_antiforensics(cli: &Cli, ctx: &Ctx, fail_on_findings: bool) -> Result<ExitCode, InputError> {
    let findings = detect_antiforensics(&AntiForensicsInputs {
        logs: &ctx.loaded.logs,
        resolution: &ctx.loaded.resolution,
        sessions: &ctx.loaded.sessions,
        index: &ctx.loaded.index,
        index_path: &ctx.loaded.index_path,
        cron: &ctx.loaded.cron,
        registry: &ctx.loaded.registry,
        retention: &ctx.loaded.retention,
        graph: &ctx.correlated.graph,
        capture_time: ctx.loaded.capture_time,
    });
    let anomalous = findings.iter().filter(|f| f.severity == Severity::Anomalous).count();

    #[derive(serde::Serialize)]
    struct Body<'a> {
        findings: &'a [examiner_core::examine::Finding],
        anomalous_count: usize,
        retention: &'a examiner_core::peripheral::RetentionReport,
    }
    let body = Body {
        findings: &findings,
        anomalous_count: anomalous,
        retention: &ctx.loaded.retention,
    };
    let items = body_items(&body, "findings");
    let report = Report::new("antiforensics", ctx.parameters.clone(), body)
        .with_warnings(ctx.loaded.warnings.clone())
        .with_caveats(boundaries_of(ctx));
    let mut text = format!(
        "anti-forensics findings: {} total, {} anomalous\n",
        findings.len(),
        anomalous
    );
    for f in &findings {
        text.push_str(&format!(
            "  [{:?}] {} ({}) {}\n",
            f.severity, f.rule, f.id, f.summary
        ));
        for e in &f.evidence {
            text.push_str(&format!("      evidence: {e}\n"));
        }
    }
    emit(&report, cli.format, Some(&items), text);
    if fail_on_findings && anomalous > 0 {
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_capabilities(cli: &Cli, ctx: &Ctx) {
    let timeline = capability_timeline(
        &ctx.loaded.logs,
        &ctx.loaded.sessions,
        &ctx.loaded.index,
        &ctx.loaded.config_history,
    );
    let findings = capability_findings(&timeline);

    #[derive(serde::Serialize)]
    struct Body<'a> {
        entries: &'a [examiner_core::examine::CapabilityEntry],
        orphaned_tools: &'a [String],
        findings: &'a [examiner_core::examine::Finding],
    }
    let body = Body {
        entries: &timeline.entries,
        orphaned_tools: &timeline.orphaned_tools,
        findings: &findings,
    };
    let items = body_items(&body, "entries");
    let report = Report::new("capabilities", ctx.parameters.clone(), body)
        .with_caveats(boundaries_of(ctx));
    let mut text = format!("capability history: {} entries\n", report.body.entries.len());
    for e in report.body.entries {
        text.push_str(&format!(
            "  {}  {:<36} [{}]{}{}\n",
            e.time.to_rfc3339(),
            e.source,
            e.capability_set.iter().cloned().collect::<Vec<_>>().join(","),
            if e.removed.is_empty() {
                String::new()
            } else {
                format!("  removed: {}", e.removed.join(","))
            },
            match &e.config_note {
                Some(n) => format!("  ({n})"),
                None => String::new(),
            }
        ));
    }
    if !report.body.orphaned_tools.is_empty() {
        text.push_str(&format!(
            "orphaned tools (seen earlier, absent now): {}\n",
            report.body.orphaned_tools.join(", ")
        ));
    }
    emit(&report, cli.format, Some(&items), text);
}

fn cmd_context(cli: &Cli, ctx: &Ctx, at: &str, session_sel: Option<&str>) -> Result<ExitCode, InputError> {
    let t = parse_time_arg(at)?;
    let session = match session_sel {
        Some(sel) => ctx
            .loaded
            .sessions
            .iter()
            .find(|s| s.session_id == sel || s.session_key.as_deref() == Some(sel))
            .ok_or_else(|| InputError(format!("no session matches {sel:?}")))?,
        None => ctx
            .loaded
            .sessions
            .iter()
            .find(|s| s.is_main())
            .or_else(|| ctx.loaded.sessions.first())
            .ok_or_else(|| InputError("store has no session transcripts".into()))?,
    };
    let meta = session
        .session_key
        .as_deref()
        .and_then(|k| ctx.loaded.index.entries.get(k));
    let estimate = reconstruct_context(session, meta, &ctx.loaded.workspace, t);

    let report = Report::new("context", ctx.parameters.clone(), &estimate)
        .with_caveats(boundaries_of(ctx));
    let mut text = format!(
        "context estimate for session {} at {}\ninjected files (per prompt report):\n",
        session.session_id,
        t.to_rfc3339()
    );
    for f in &estimate.injected_files {
        text.push_str(&format!("  {} ({} chars) {}\n", f.name, f.injected_chars, f.path));
    }
    text.push_str("replayed files (from tool payloads):\n");
    for (path, r) in &estimate.replayed_files {
        text.push_str(&format!(
            "  {}  as of {}  via {:?} ({} bytes)\n",
            path,
            r.content_as_of.to_rfc3339(),
            r.basis,
            r.content.len()
        ));
    }
    if !estimate.compaction_boundaries.is_empty() {
        text.push_str(&format!(
            "compaction boundaries at/before t: {}\n",
            estimate.compaction_boundaries.len()
        ));
    }
    for c in &estimate.caveats {
        text.push_str(&format!("  caveat: {c}\n"));
    }
    emit(&report, cli.format, None, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_config_at(cli: &Cli, ctx: &Ctx, at: &str) -> Result<ExitCode, InputError> {
    let t = parse_time_arg(at)?;
    let snapshot = config_at(&ctx.loaded.config_history, t);

    #[derive(serde::Serialize)]
    struct Body {
        at: TimestampMs,
        #[serde(skip_serializing_if = "Option::is_none")]
        source_path: Option<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        ordering_basis: Option<examiner_core::peripheral::OrderingBasis>,
        #[serde(skip_serializing_if = "Option::is_none")]
        config: Option<Value>,
        note: String,
    }
    let body = match snapshot {
        Some(s) => {
            let mut raw = s.config.raw.clone();
            if !ctx.reveal {
                redact_credentials(&mut raw);
            }
            Body {
                at: t,
                source_path: Some(s.source_path.clone()),
                ordering_basis: Some(s.ordering_basis),
                config: Some(raw),
                note: "most recent snapshot whose write time precedes t".into(),
            }
        }
        None => Body {
            at: t,
            source_path: None,
            ordering_basis: None,
            config: None,
            note: "t precedes every configuration snapshot; no configuration was in effect".into(),
        },
    };
    let report = Report::new("config-at", ctx.parameters.clone(), &body)
        .with_caveats(boundaries_of(ctx));
    let text = match &body.source_path {
        Some(p) => format!(
            "configuration in effect at {}: {} (basis {:?})\n{}",
            t.to_rfc3339(),
            p,
            body.ordering_basis.unwrap(),
            serde_json::to_string_pretty(body.config.as_ref().unwrap()).unwrap_or_default()
        ),
        None => format!("no configuration in effect at {} ({})", t.to_rfc3339(), body.note),
    };
    emit(&report, cli.format, None, text);
    Ok(ExitCode::SUCCESS)
}

fn bare_parameters(target: &str, cli: &Cli, filter_rules: Vec<String>) -> ReportParameters {
    ReportParameters {
        store: target.to_string(),
        logs: None,
        window_ms: cli.window_ms,
        capture_time: TimestampMs(0),
        markers: MarkerTable::default(),
        filter_rules,
        redact: !cli.reveal,
        hash_algorithm: HASH_ALGORITHM.to_string(),
        tie_break_ranking: TIE_BREAK_RANKING.to_string(),
    }
}

fn cmd_manifest(cli: &Cli, root: &Path, state_id: &str) -> Result<ExitCode, InputError> {
    let snapshot = snapshot_manifest(root, state_id).map_err(|e| InputError(e.to_string()))?;
    let parameters = bare_parameters(&root.display().to_string(), cli, Vec::new());
    let report = Report::new("manifest", parameters, &snapshot);
    let mut text = format!(
        "manifest {} over {} ({} entries, {})\n",
        snapshot.state_id,
        root.display(),
        snapshot.entries.len(),
        snapshot.hash_algorithm
    );
    for (path, e) in &snapshot.entries {
        text.push_str(&format!(
            "  {}  {:>9}B  {}  {}\n",
            e.content_hash.as_deref().unwrap_or(if e.is_dir { "(dir)" } else { "-" }),
            e.size,
            e.mtime.to_rfc3339(),
            path
        ));
    }
    emit(&report, cli.format, None, text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_diff(cli: &Cli, root_a: &Path, root_b: &Path) -> Result<ExitCode, InputError> {
    let a = snapshot_manifest(root_a, "q0").map_err(|e| InputError(e.to_string()))?;
    let b = snapshot_manifest(root_b, "q1").map_err(|e| InputError(e.to_string()))?;
    let mut change_set = diff_manifests(&a, &b);
    let filter_rules = load_filter_rules(cli.filter.as_deref())?;
    if !filter_rules.is_empty() {
        let rule_set_id = cli
            .filter
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "cli".into());
        change_set = filter_noise(&change_set, &filter_rules, &rule_set_id);
    }
    let parameters = bare_parameters(
        &format!("{} -> {}", root_a.display(), root_b.display()),
        cli,
        filter_rules,
    );
    let items = body_items(&change_set, "records");
    let report = Report::new("diff", parameters, &change_set);
    let mut text = format!(
        "changes {} -> {}: {} records{}\n",
        report.body.from_state,
        report.body.to_state,
        report.body.records.len(),
        match report.body.records_before_filter {
            Some(n) => format!(" ({} before noise filter)", n),
            None => String::new(),
        }
    );
    for r in &report.body.records {
        let line = match r {
            examiner_core::diffkit::ChangeRecord::Created { path, .. } => {
                format!("  created            {path}")
            }
            examiner_core::diffkit::ChangeRecord::Deleted { path, .. } => {
                format!("  deleted            {path}")
            }
            examiner_core::diffkit::ChangeRecord::Renamed { old_path, path, .. } => {
                format!("  renamed            {old_path} -> {path}")
            }
            examiner_core::diffkit::ChangeRecord::ContentModified { path, .. } => {
                format!("  content_modified   {path}")
            }
            examiner_core::diffkit::ChangeRecord::TimestampUpdated { path, .. } => {
                format!("  timestamp_updated  {path}")
            }
        };
        text.push_str(&line);
        text.push('\n');
    }
    emit(&report, cli.format, Some(&items), text);
    Ok(ExitCode::SUCCESS)
}

fn cmd_forge(_cli: &Cli, cmd: &ForgeCmd) -> Result<ExitCode, InputError> {
    match cmd {
        ForgeCmd::Generate { out, scenario, spec, seed, list } => {
            if *list {
                for s in forge::standard_scenarios() {
                    println!("{} (seed {})", s.name, s.seed);
                }
                return Ok(ExitCode::SUCCESS);
            }
            let mut scenario_spec = match spec {
                Some(path) => {
                    let content = std::fs::read(path)?;
                    serde_json::from_slice::<forge::ScenarioSpec>(&content)?
                }
                None => forge::standard_scenarios()
                    .into_iter()
                    .find(|s| &s.name == scenario)
                    .ok_or_else(|| {
                        InputError(format!(
                            "unknown scenario {scenario:?}; see `forge generate --list`"
                        ))
                    })?,
            };
            if let Some(seed) = seed {
                scenario_spec.seed = *seed;
            }
            let (generated, truth) = forge::generate_store(&scenario_spec, out)?;
            println!(
                "generated scenario {} (seed {}) under {}",
                scenario_spec.name,
                scenario_spec.seed,
                generated.out_dir.display()
            );
            println!("  store:        {}", generated.store_dir.display());
            println!("  logs:         {}", generated.log_dir.display());
            println!("  ground truth: {}", generated.out_dir.join("ground_truth.json").display());
            println!("  capture time: {}", truth.capture_time.to_rfc3339());
            Ok(ExitCode::SUCCESS)
        }
        ForgeCmd::Tamper { out, spec } => {
            let content = std::fs::read(spec)?;
            let tamper_spec: forge::TamperSpec = serde_json::from_slice(&content)?;
            let expected = forge::apply_tamper_at(out, &tamper_spec)?;
            println!("tamper applied; examiner must emit rules: {}", expected.join(", "));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_planes(cli: &Cli) {
    #[derive(serde::Serialize)]
    struct Row {
        kind: &'static str,
        patterns: Vec<&'static str>,
        relevance: BTreeMap<&'static str, &'static str>,
    }
    #[derive(serde::Serialize)]
    struct Body {
        planes: Vec<&'static str>,
        kinds: Vec<Row>,
    }
    let rel_tag = |r: examiner_core::store::RelevanceLevel| match r {
        examiner_core::store::RelevanceLevel::Primary => "primary",
        examiner_core::store::RelevanceLevel::Secondary => "secondary",
        examiner_core::store::RelevanceLevel::NotRelevant => "-",
    };
    let kinds: Vec<Row> = ArtifactKind::ALL
        .iter()
        .map(|&kind| {
            let patterns: Vec<&'static str> = pattern_table()
                .iter()
                .filter(|(_, k)| *k == kind)
                .map(|(p, _)| *p)
                .collect();
            let patterns = if kind == ArtifactKind::RuntimeLog {
                vec!["openclaw-YYYY-MM-DD.log (log dir)"]
            } else {
                patterns
            };
            Row {
                kind: kind.as_str(),
                patterns,
                relevance: classify_plane(kind)
                    .into_iter()
                    .map(|(p, r)| (p.as_str(), rel_tag(r)))
                    .collect(),
            }
        })
        .collect();
    let body = Body {
        planes: Plane::ALL.iter().map(|p| p.label()).collect(),
        kinds,
    };
    let parameters = bare_parameters("(static taxonomy)", cli, Vec::new());
    let items = body_items(&body, "kinds");
    let report = Report::new("planes", parameters, &body);
    let mut text = String::from("artifact kinds and evidence planes\n");
    text.push_str("  (columns: reasoning, identity, knowledge, communication, actions)\n");
    for row in &report.body.kinds {
        let cols = [
            "reasoning_cognition",
            "identity_configuration",
            "knowledge_recall",
            "communication_io",
            "actions_effects",
        ]
        .map(|c| format!("{:<9}", row.relevance.get(c).copied().unwrap_or("-")));
        text.push_str(&format!(
            "  {:<28} {}  {}\n",
            row.kind,
            cols.join(" "),
            row.patterns.join(", ")
        ));
    }
    emit(&report, cli.format, Some(&items), text);
}
