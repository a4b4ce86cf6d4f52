//! Forensic examination of OpenClaw-style agent artifact stores.
//!
//! The crate parses a captured `.openclaw` directory tree (plus its runtime
//! log directory), reconstructs timelines, configurations, delegation chains,
//! and tool executions, detects anti-forensics indicators, and classifies
//! every artifact into a five-plane evidence taxonomy. A snapshot
//! differential engine and a deterministic fixture generator round out the
//! toolkit; the generator doubles as the ground-truth oracle for the test
//! suite.

pub mod analyze;
pub mod common;
pub mod glob;
mod jsonx;
pub mod store;
pub mod correlate;
pub mod diffkit;
pub mod examine;
pub mod forge;
pub mod peripheral;
pub mod transcript;

pub use common::{EvidenceRef, Locator, ParseWarning, TimestampMs};
