//! Shared primitives: timestamps, parse warnings, and evidence references.

use std::fmt;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

/// Epoch values at or above this magnitude are already milliseconds;
/// smaller values are seconds. 10^11 ms is 1973, 10^11 s is year 5138,
/// so the two ranges never overlap for plausible artifact timestamps.
pub const EPOCH_MS_THRESHOLD: i64 = 100_000_000_000;

/// A UTC timestamp in milliseconds since the Unix epoch.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct TimestampMs(pub i64);

impl TimestampMs {
    pub fn from_epoch_any(value: i64) -> Self {
        if value.abs() >= EPOCH_MS_THRESHOLD {
            TimestampMs(value)
        } else {
            TimestampMs(value.saturating_mul(1000))
        }
    }

    pub fn as_datetime(self) -> Option<DateTime<Utc>> {
        Utc.timestamp_millis_opt(self.0).single()
    }

    /// RFC 3339 with millisecond precision, always UTC.
    pub fn to_rfc3339(self) -> String {
        match self.as_datetime() {
            Some(dt) => dt.format("%Y-%m-%dT%H:%M:%S%.3fZ").to_string(),
            None => format!("epoch-ms:{}", self.0),
        }
    }

    pub fn saturating_add_ms(self, ms: i64) -> Self {
        TimestampMs(self.0.saturating_add(ms))
    }

    pub fn saturating_sub_ms(self, ms: i64) -> Self {
        TimestampMs(self.0.saturating_sub(ms))
    }
}

impl fmt::Display for TimestampMs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_rfc3339())
    }
}

/// Parse a timestamp from any of the shapes seen in the artifacts:
/// integer epoch (seconds or milliseconds), fractional epoch seconds,
/// ISO-8601 / RFC 3339 strings, and `YYYY-MM-DD HH:MM UTC` forms.
pub fn parse_timestamp_value(value: &serde_json::Value) -> Option<TimestampMs> {
    match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(TimestampMs::from_epoch_any(i))
            } else {
                n.as_f64().map(|f| {
                    if f.abs() >= EPOCH_MS_THRESHOLD as f64 {
                        TimestampMs(f as i64)
                    } else {
                        TimestampMs((f * 1000.0) as i64)
                    }
                })
            }
        }
        serde_json::Value::String(s) => parse_timestamp_str(s),
        _ => None,
    }
}

pub fn parse_timestamp_str(s: &str) -> Option<TimestampMs> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Ok(i) = s.parse::<i64>() {
        return Some(TimestampMs::from_epoch_any(i));
    }
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(TimestampMs(dt.with_timezone(&Utc).timestamp_millis()));
    }
    // "2026-02-02 14:05 UTC" and "2026-02-02 14:05:33 UTC"
    for fmt in ["%Y-%m-%d %H:%M:%S UTC", "%Y-%m-%d %H:%M UTC"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(TimestampMs(naive.and_utc().timestamp_millis()));
        }
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S%.f", "%Y-%m-%d %H:%M:%S%.f"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(TimestampMs(naive.and_utc().timestamp_millis()));
        }
    }
    None
}

/// Build a timestamp from a calendar date at midnight UTC.
pub fn date_to_timestamp(year: i32, month: u32, day: u32) -> Option<TimestampMs> {
    let date = NaiveDate::from_ymd_opt(year, month, day)?;
    let naive = date.and_hms_opt(0, 0, 0)?;
    Some(TimestampMs(naive.and_utc().timestamp_millis()))
}

/// A non-fatal problem encountered while parsing an artifact.
///
/// Salvage-oriented parsers never abort on bad input; they accumulate
/// warnings so the examiner can report exactly what was skipped and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseWarning {
    /// Artifact path the warning refers to, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// 1-based line number, when the source is line-oriented.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<u64>,
    pub reason: String,
}

impl ParseWarning {
    pub fn new(reason: impl Into<String>) -> Self {
        ParseWarning {
            path: None,
            line: None,
            reason: reason.into(),
        }
    }

    pub fn at_line(line: u64, reason: impl Into<String>) -> Self {
        ParseWarning {
            path: None,
            line: Some(line),
            reason: reason.into(),
        }
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.path, self.line) {
            (Some(p), Some(l)) => write!(f, "{p}:{l}: {}", self.reason),
            (Some(p), None) => write!(f, "{p}: {}", self.reason),
            (None, Some(l)) => write!(f, "line {l}: {}", self.reason),
            (None, None) => f.write_str(&self.reason),
        }
    }
}

/// Location of a piece of evidence inside a captured file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Locator {
    /// 1-based line number in a line-oriented file.
    Line(u64),
    /// Dotted path into a structured document, e.g. `agents.list.0.id`.
    JsonPath(String),
    /// The file as a whole (metadata-level evidence such as mtimes).
    File,
}

/// A resolvable reference from a conclusion back to a captured file location.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EvidenceRef {
    /// Path relative to the store root (or log root for runtime logs).
    pub path: String,
    pub locator: Locator,
}

impl EvidenceRef {
    pub fn line(path: impl Into<String>, line: u64) -> Self {
        EvidenceRef {
            path: path.into(),
            locator: Locator::Line(line),
        }
    }

    pub fn json_path(path: impl Into<String>, pointer: impl Into<String>) -> Self {
        EvidenceRef {
            path: path.into(),
            locator: Locator::JsonPath(pointer.into()),
        }
    }

    pub fn file(path: impl Into<String>) -> Self {
        EvidenceRef {
            path: path.into(),
            locator: Locator::File,
        }
    }
}

impl fmt::Display for EvidenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.locator {
            Locator::Line(l) => write!(f, "{}:{}", self.path, l),
            Locator::JsonPath(p) => write!(f, "{}#{}", self.path, p),
            Locator::File => f.write_str(&self.path),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_threshold_disambiguates_seconds_and_millis() {
        // 1767312000 is 2026-01-02 in seconds.
        assert_eq!(
            TimestampMs::from_epoch_any(1_767_312_000).0,
            1_767_312_000_000
        );
        // Already milliseconds.
        assert_eq!(
            TimestampMs::from_epoch_any(1_767_312_000_000).0,
            1_767_312_000_000
        );
    }

    #[test]
    fn parses_iso_and_space_utc_forms() {
        let a = parse_timestamp_str("2026-02-02T14:05:00Z").unwrap();
        let b = parse_timestamp_str("2026-02-02 14:05 UTC").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_rfc3339(), "2026-02-02T14:05:00.000Z");
    }

    #[test]
    fn parses_numeric_json_values() {
        let v = serde_json::json!(1767312000);
        assert_eq!(parse_timestamp_value(&v).unwrap().0, 1_767_312_000_000);
        let v = serde_json::json!(1767312000.5);
        assert_eq!(parse_timestamp_value(&v).unwrap().0, 1_767_312_000_500);
    }
}
