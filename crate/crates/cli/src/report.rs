//! Report envelope and output rendering.
//!
//! Every command emits the same envelope: schema and tool versions, the full
//! parameter set needed to reproduce the run bit-identically on the same
//! inputs, warnings, and caveats. `generated_at` is the analysis reference
//! time derived from the evidence itself (the capture time), never the wall
//! clock, so repeated runs over the same inputs are byte-identical.

use examiner_core::common::TimestampMs;
use examiner_core::peripheral::MarkerTable;
use serde::Serialize;
use serde_json::Value;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Tie-break ranking applied to simultaneous timeline events; stated in
/// every report header for reproducibility.
pub const TIE_BREAK_RANKING: &str =
    "transcript < log < cron_runs < subagent_registry < config_meta < file_mtime, then path, then line";

#[derive(Debug, Clone, Serialize)]
pub struct ReportParameters {
    pub store: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub logs: Option<String>,
    pub window_ms: i64,
    pub capture_time: TimestampMs,
    pub markers: MarkerTable,
    pub filter_rules: Vec<String>,
    pub redact: bool,
    pub hash_algorithm: String,
    pub tie_break_ranking: String,
}

#[derive(Debug, Serialize)]
pub struct Report<T: Serialize> {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Reference time of the analysis (capture time), not wall clock.
    pub generated_at: String,
    pub parameters: ReportParameters,
    pub body: T,
    pub warnings: Vec<examiner_core::common::ParseWarning>,
    pub caveats: Vec<String>,
}

impl<T: Serialize> Report<T> {
    pub fn new(command: &str, parameters: ReportParameters, body: T) -> Self {
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            generated_at: parameters.capture_time.to_rfc3339(),
            parameters,
            body,
            warnings: Vec::new(),
            caveats: Vec::new(),
        }
    }

    pub fn with_warnings(mut self, warnings: Vec<examiner_core::common::ParseWarning>) -> Self {
        self.warnings = warnings;
        self
    }

    pub fn with_caveats(mut self, caveats: Vec<String>) -> Self {
        self.caveats = caveats;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
    Jsonl,
}

/// Render a report. For jsonl, the envelope goes first (body elided), then
/// one line per body item when the body's primary content is a list.
pub fn emit<T: Serialize>(report: &Report<T>, format: Format, items: Option<&[Value]>, text: String) {
    match format {
        Format::Text => {
            println!("{text}");
            if !report.caveats.is_empty() {
                println!("caveats:");
                for c in &report.caveats {
                    println!("  - {c}");
                }
            }
            if !report.warnings.is_empty() {
                println!("warnings: {}", report.warnings.len());
                for w in &report.warnings {
                    println!("  - {w}");
                }
            }
        }
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(report).expect("report serializes")
            );
        }
        Format::Jsonl => {
            let mut envelope = serde_json::to_value(report).expect("report serializes");
            let body = envelope
                .as_object_mut()
                .expect("envelope object")
                .remove("body");
            println!("{envelope}");
            match items {
                Some(items) => {
                    for item in items {
                        println!("{item}");
                    }
                }
                None => {
                    if let Some(body) = body {
                        println!("{body}");
                    }
                }
            }
        }
    }
}

/// Pull a named array out of a serialized body for jsonl item streaming.
pub fn body_items<T: Serialize>(body: &T, key: &str) -> Vec<Value> {
    let value = serde_json::to_value(body).expect("body serializes");
    match value.get(key) {
        Some(Value::Array(items)) => items.clone(),
        _ => match value {
            Value::Array(items) => items,
            _ => Vec::new(),
        },
    }
}
