//! Lenient field access over `serde_json::Value`.
//!
//! Artifact schemas drift between releases, so every extractor reads through
//! a small alias list and tolerates missing or oddly-typed fields instead of
//! failing the whole record.

use serde_json::{Map, Value};

use crate::common::{parse_timestamp_value, TimestampMs};

pub type JsonMap = Map<String, Value>;

/// First value present under any of the candidate keys.
pub fn pick<'a>(obj: &'a JsonMap, keys: &[&str]) -> Option<&'a Value> {
    keys.iter().find_map(|k| obj.get(*k))
}

pub fn pick_str(obj: &JsonMap, keys: &[&str]) -> Option<String> {
    pick(obj, keys).and_then(Value::as_str).map(str::to_owned)
}

pub fn pick_i64(obj: &JsonMap, keys: &[&str]) -> Option<i64> {
    pick(obj, keys).and_then(value_as_i64)
}

pub fn pick_u64(obj: &JsonMap, keys: &[&str]) -> Option<u64> {
    pick(obj, keys).and_then(|v| v.as_u64().or_else(|| v.as_i64().filter(|i| *i >= 0).map(|i| i as u64)))
}

pub fn pick_f64(obj: &JsonMap, keys: &[&str]) -> Option<f64> {
    pick(obj, keys).and_then(Value::as_f64)
}

pub fn pick_bool(obj: &JsonMap, keys: &[&str]) -> Option<bool> {
    pick(obj, keys).and_then(Value::as_bool)
}

pub fn pick_object<'a>(obj: &'a JsonMap, keys: &[&str]) -> Option<&'a JsonMap> {
    pick(obj, keys).and_then(Value::as_object)
}

pub fn pick_array<'a>(obj: &'a JsonMap, keys: &[&str]) -> Option<&'a Vec<Value>> {
    pick(obj, keys).and_then(Value::as_array)
}

pub fn pick_timestamp(obj: &JsonMap, keys: &[&str]) -> Option<TimestampMs> {
    pick(obj, keys).and_then(parse_timestamp_value)
}

pub fn value_as_i64(v: &Value) -> Option<i64> {
    v.as_i64().or_else(|| v.as_f64().map(|f| f as i64))
}

/// String id fields occasionally arrive as numbers; accept both.
pub fn pick_id(obj: &JsonMap, keys: &[&str]) -> Option<String> {
    pick(obj, keys).and_then(|v| match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    })
}

/// A list of strings, tolerating `[{name: ...}]` object lists as produced
/// by provider-specific schema dumps.
pub fn string_list(v: &Value) -> Vec<String> {
    match v {
        Value::Array(items) => items
            .iter()
            .filter_map(|item| match item {
                Value::String(s) => Some(s.clone()),
                Value::Object(o) => pick_str(o, &["name", "toolName", "id"]),
                _ => None,
            })
            .collect(),
        Value::String(s) => vec![s.clone()],
        _ => Vec::new(),
    }
}
