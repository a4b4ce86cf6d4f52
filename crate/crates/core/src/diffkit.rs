//! Differential analysis: manifests of directory-tree states and the change
//! sets between them.
//!
//! A manifest stands in for a disk image at desk scale: every path with its
//! size, timestamps, and a SHA-256 content hash. Comparing two consecutive
//! states classifies every difference into exactly one of five categories:
//! creation, deletion, renaming, content modification, or timestamp update.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::common::TimestampMs;
use crate::glob::glob_match;

/// Hash algorithm pinned for evidential integrity; embedded in reports.
pub const HASH_ALGORITHM: &str = "sha-256";

/// The action that produced a state, when known (σ_i in a capture series).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionLabel {
    pub name: String,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub size: u64,
    pub mtime: TimestampMs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ctime: Option<TimestampMs>,
    /// Hex SHA-256 of file bytes; present for every readable regular file.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub content_hash: Option<String>,
    pub is_dir: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symlink_target: Option<String>,
    /// Set when the entry could not be read; the walk continues regardless.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub read_error: Option<String>,
}

/// A full manifest of one directory-tree state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub state_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<ActionLabel>,
    pub hash_algorithm: String,
    /// Relative, normalized, `/`-separated paths.
    pub entries: BTreeMap<String, ManifestEntry>,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot root is not a readable directory: {0}")]
    UnreadableRoot(String),
}

pub fn hash_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Walk `root` deterministically and record every entry. Symlinks are
/// recorded, not followed; per-entry read failures become entry flags.
pub fn snapshot_manifest(root: &Path, state_id: &str) -> Result<Snapshot, SnapshotError> {
    if !root.is_dir() {
        return Err(SnapshotError::UnreadableRoot(root.display().to_string()));
    }
    let mut entries = BTreeMap::new();
    for entry in walkdir::WalkDir::new(root)
        .follow_links(false)
        .sort_by_file_name()
        .into_iter()
        .filter_map(Result::ok)
    {
        let rel = match entry.path().strip_prefix(root) {
            Ok(r) if !r.as_os_str().is_empty() => r.to_string_lossy().replace('\\', "/"),
            _ => continue,
        };
        let meta = match entry.path().symlink_metadata() {
            Ok(m) => m,
            Err(e) => {
                entries.insert(
                    rel,
                    ManifestEntry {
                        size: 0,
                        mtime: TimestampMs(0),
                        ctime: None,
                        content_hash: None,
                        is_dir: false,
                        symlink_target: None,
                        read_error: Some(e.to_string()),
                    },
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
        let ctime = ctime_of(&meta);

        let mut manifest_entry = ManifestEntry {
            size: meta.len(),
            mtime,
            ctime,
            content_hash: None,
            is_dir: meta.is_dir(),
            symlink_target: None,
            read_error: None,
        };
        if meta.file_type().is_symlink() {
            manifest_entry.symlink_target = std::fs::read_link(entry.path())
                .ok()
                .map(|t| t.to_string_lossy().to_string());
        } else if meta.is_file() {
            match std::fs::read(entry.path()) {
                Ok(bytes) => manifest_entry.content_hash = Some(hash_bytes(&bytes)),
                Err(e) => manifest_entry.read_error = Some(e.to_string()),
            }
        }
        entries.insert(rel, manifest_entry);
    }
    Ok(Snapshot {
        state_id: state_id.to_string(),
        label: None,
        hash_algorithm: HASH_ALGORITHM.to_string(),
        entries,
    })
}

#[cfg(unix)]
fn ctime_of(meta: &std::fs::Metadata) -> Option<TimestampMs> {
    use std::os::unix::fs::MetadataExt;
    Some(TimestampMs(meta.ctime() * 1000 + meta.ctime_nsec() / 1_000_000))
}

#[cfg(not(unix))]
fn ctime_of(_meta: &std::fs::Metadata) -> Option<TimestampMs> {
    None
}

// ---------------------------------------------------------------------------
// Change sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "category", rename_all = "snake_case")]
pub enum ChangeRecord {
    Created {
        path: String,
        after: ManifestEntry,
    },
    Deleted {
        path: String,
        before: ManifestEntry,
    },
    Renamed {
        old_path: String,
        path: String,
        entry: ManifestEntry,
    },
    ContentModified {
        path: String,
        before: ManifestEntry,
        after: ManifestEntry,
    },
    TimestampUpdated {
        path: String,
        before: ManifestEntry,
        after: ManifestEntry,
    },
}

impl ChangeRecord {
    pub fn path(&self) -> &str {
        match self {
            ChangeRecord::Created { path, .. }
            | ChangeRecord::Deleted { path, .. }
            | ChangeRecord::Renamed { path, .. }
            | ChangeRecord::ContentModified { path, .. }
            | ChangeRecord::TimestampUpdated { path, .. } => path,
        }
    }

    pub fn category_name(&self) -> &'static str {
        match self {
            ChangeRecord::Created { .. } => "created",
            ChangeRecord::Deleted { .. } => "deleted",
            ChangeRecord::Renamed { .. } => "renamed",
            ChangeRecord::ContentModified { .. } => "content_modified",
            ChangeRecord::TimestampUpdated { .. } => "timestamp_updated",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeSet {
    pub from_state: String,
    pub to_state: String,
    pub records: Vec<ChangeRecord>,
    /// Identifier of the noise-filter rule set, when one was applied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter_applied: Option<String>,
    /// Record count before noise filtering.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records_before_filter: Option<usize>,
}

fn same_content(a: &ManifestEntry, b: &ManifestEntry) -> bool {
    if a.is_dir != b.is_dir {
        return false;
    }
    if a.is_dir {
        return true;
    }
    if a.symlink_target.is_some() || b.symlink_target.is_some() {
        return a.symlink_target == b.symlink_target;
    }
    a.content_hash == b.content_hash
}

/// Compare two manifests. Rename detection pairs a deletion with a creation
/// of identical (hash, size) when the match is unique on both sides;
/// ambiguous multi-matches degrade to separate Created + Deleted records.
/// Unchanged paths are omitted.
pub fn diff_manifests(a: &Snapshot, b: &Snapshot) -> ChangeSet {
    let mut records = Vec::new();
    let mut created: Vec<&String> = Vec::new();
    let mut deleted: Vec<&String> = Vec::new();

    let all_paths: BTreeSet<&String> = a.entries.keys().chain(b.entries.keys()).collect();
    for path in &all_paths {
        match (a.entries.get(*path), b.entries.get(*path)) {
            (None, Some(_)) => created.push(path),
            (Some(_), None) => deleted.push(path),
            (Some(ea), Some(eb)) => {
                if !same_content(ea, eb) {
                    records.push(ChangeRecord::ContentModified {
                        path: (*path).clone(),
                        before: ea.clone(),
                        after: eb.clone(),
                    });
                } else if ea.mtime != eb.mtime {
                    records.push(ChangeRecord::TimestampUpdated {
                        path: (*path).clone(),
                        before: ea.clone(),
                        after: eb.clone(),
                    });
                }
            }
            (None, None) => unreachable!(),
        }
    }

    // Rename pass over regular files with hashes.
    let fingerprint = |e: &ManifestEntry| -> Option<(String, u64)> {
        match (&e.content_hash, e.is_dir, &e.symlink_target) {
            (Some(h), false, None) => Some((h.clone(), e.size)),
            _ => None,
        }
    };
    let mut deleted_by_fp: BTreeMap<(String, u64), Vec<&String>> = BTreeMap::new();
    for path in &deleted {
        if let Some(fp) = fingerprint(&a.entries[*path]) {
            deleted_by_fp.entry(fp).or_default().push(path);
        }
    }
    let mut created_by_fp: BTreeMap<(String, u64), Vec<&String>> = BTreeMap::new();
    for path in &created {
        if let Some(fp) = fingerprint(&b.entries[*path]) {
            created_by_fp.entry(fp).or_default().push(path);
        }
    }

    let mut renamed_old: BTreeSet<String> = BTreeSet::new();
    let mut renamed_new: BTreeSet<String> = BTreeSet::new();
    for (fp, old_paths) in &deleted_by_fp {
        if old_paths.len() != 1 {
            continue;
        }
        let Some(new_paths) = created_by_fp.get(fp) else {
            continue;
        };
        if new_paths.len() != 1 {
            continue;
        }
        let old_path = (*old_paths[0]).clone();
        let new_path = (*new_paths[0]).clone();
        records.push(ChangeRecord::Renamed {
            entry: b.entries[&new_path].clone(),
            old_path: old_path.clone(),
            path: new_path.clone(),
        });
        renamed_old.insert(old_path);
        renamed_new.insert(new_path);
    }

    for path in created {
        if !renamed_new.contains(path.as_str()) {
            records.push(ChangeRecord::Created {
                path: path.clone(),
                after: b.entries[path].clone(),
            });
        }
    }
    for path in deleted {
        if !renamed_old.contains(path.as_str()) {
            records.push(ChangeRecord::Deleted {
                path: path.clone(),
                before: a.entries[path].clone(),
            });
        }
    }

    records.sort_by(|x, y| (x.path(), x.category_name()).cmp(&(y.path(), y.category_name())));
    ChangeSet {
        from_state: a.state_id.clone(),
        to_state: b.state_id.clone(),
        records,
        filter_applied: None,
        records_before_filter: None,
    }
}

/// Drop records whose path (either side, for renames) matches an exclude
/// glob. The original count is retained so reports can state what the
/// filter removed.
pub fn filter_noise(cs: &ChangeSet, rules: &[String], rule_set_id: &str) -> ChangeSet {
    let matches_any = |path: &str| rules.iter().any(|r| glob_match(r, path));
    let records: Vec<ChangeRecord> = cs
        .records
        .iter()
        .filter(|rec| {
            let hit = match rec {
                ChangeRecord::Renamed { old_path, path, .. } => {
                    matches_any(old_path) || matches_any(path)
                }
                other => matches_any(other.path()),
            };
            !hit
        })
        .cloned()
        .collect();
    ChangeSet {
        from_state: cs.from_state.clone(),
        to_state: cs.to_state.clone(),
        records_before_filter: Some(cs.records.len()),
        records,
        filter_applied: Some(rule_set_id.to_string()),
    }
}
