//! Property tests for the parser and correlation invariants.

use proptest::prelude::*;

use examiner_core::common::{parse_timestamp_str, TimestampMs, EPOCH_MS_THRESHOLD};
use examiner_core::correlate::{pair_tool_calls, ParsedSession};
use examiner_core::peripheral::{config_at, load_config_history, ConfigSource};
use examiner_core::transcript::{
    parse_media_filename, parse_transcript, resolve_sessions, visible_output, ContentBlock,
    ProviderMode, Role, SessionFileStatus, SessionIndex, SessionMeta,
};

fn uuid_from(seed: u128) -> String {
    uuid::Builder::from_random_bytes(seed.to_le_bytes())
        .into_uuid()
        .to_string()
}

proptest! {
    // Media names built per the grammar round-trip exactly; the original may
    // itself contain the separator.
    #[test]
    fn media_filename_round_trip(
        original in proptest::option::of("[a-z0-9.]{1,12}(-{1,3}[a-z0-9.]{1,8})?"),
        seed in any::<u128>(),
        ext in "[a-z]{1,5}",
    ) {
        let uuid = uuid_from(seed);
        let name = match &original {
            Some(o) => format!("{o}---{uuid}.{ext}"),
            None => format!("{uuid}.{ext}"),
        };
        let parsed = parse_media_filename(&name).expect("grammar-conforming name");
        prop_assert_eq!(parsed.original, original);
        prop_assert_eq!(parsed.uuid.to_string(), uuid);
        prop_assert_eq!(parsed.ext, ext);
    }

    // Epoch values normalize identically whether given as numbers or strings,
    // and seconds inputs always land on a whole second.
    #[test]
    fn epoch_normalization_is_consistent(v in 0i64..4_000_000_000_000i64) {
        let from_num = TimestampMs::from_epoch_any(v);
        let from_str = parse_timestamp_str(&v.to_string()).unwrap();
        prop_assert_eq!(from_num, from_str);
        if v < EPOCH_MS_THRESHOLD {
            prop_assert_eq!(from_num.0 % 1000, 0);
        }
    }

    // Tag-filtered output shows exactly the final-tagged text and never leaks
    // thinking sentinels; native output always contains the filtered output.
    #[test]
    fn visibility_filtering_properties(
        plains in proptest::collection::vec("[a-z ]{0,12}", 0..3),
        thinks in proptest::collection::vec(0u8..3, 0..3),
        with_final in any::<bool>(),
    ) {
        let mut text = String::new();
        for (i, p) in plains.iter().enumerate() {
            text.push_str(p);
            if i < thinks.len() {
                text.push_str(&format!("<think>ZTHINKZ{i}</think>"));
            }
        }
        for i in plains.len()..thinks.len() {
            text.push_str(&format!("<think>ZTHINKZ{i}</think>"));
        }
        if with_final {
            text.push_str("<final>ZFINALZ</final>");
        }
        let line = serde_json::json!({
            "type": "message", "id": "m", "role": "assistant",
            "content": [{"type": "text", "text": text}],
        });
        let (entries, _warnings) = parse_transcript(format!("{line}\n").as_bytes());
        let m = entries[0].as_message().unwrap();
        let filtered = visible_output(m, ProviderMode::TagFiltered);
        let native = visible_output(m, ProviderMode::NativeThinking);
        prop_assert_eq!(&filtered, if with_final { "ZFINALZ" } else { "" });
        prop_assert!(!filtered.contains("ZTHINKZ"));
        prop_assert!(native.contains(&filtered));
    }

    // resolve_sessions partitions the listing: every transcript-shaped file
    // lands in exactly one status class, everything else is ignored.
    #[test]
    fn resolve_sessions_partitions(
        indexed in proptest::collection::vec(any::<u128>(), 0..4),
        orphans in proptest::collection::vec(any::<u128>(), 0..4),
        deleted in proptest::collection::vec((any::<u128>(), 1_000_000_000u32..2_000_000_000), 0..4),
        junk in proptest::collection::vec("[a-z]{1,8}(\\.txt)?", 0..3),
    ) {
        let mut index = SessionIndex::default();
        let mut listing = Vec::new();
        for (i, seed) in indexed.iter().enumerate() {
            let id = uuid_from(*seed);
            index.entries.insert(format!("agent:main:s{i}"), SessionMeta::for_session_id(&id));
            listing.push(format!("{id}.jsonl"));
        }
        for seed in &orphans {
            listing.push(format!("{}.jsonl", uuid_from(*seed ^ 0xABCD)));
        }
        for (seed, epoch) in &deleted {
            listing.push(format!("{}.jsonl.deleted.{epoch}", uuid_from(*seed ^ 0x1234)));
        }
        listing.extend(junk.iter().cloned());

        let res = resolve_sessions(&index, &listing);
        let transcript_like = listing
            .iter()
            .filter(|n| n.ends_with(".jsonl") || n.contains(".jsonl.deleted."))
            .count();
        prop_assert_eq!(res.records.len() + res.ignored.iter().filter(|n| n.ends_with(".jsonl") || n.contains(".jsonl.deleted.")).count(), transcript_like);
        // Distinct uuid seeds could collide only if the generators collide;
        // class counts then still partition the listing.
        prop_assert_eq!(res.records.len() + res.ignored.len(), listing.len());
        for record in &res.records {
            match &record.status {
                SessionFileStatus::Indexed => prop_assert!(record.index_key.is_some()),
                SessionFileStatus::SoftDeleted { deleted_at } => prop_assert!(deleted_at.0 > 0),
                SessionFileStatus::Orphaned => prop_assert!(record.index_key.is_none()),
            }
        }
    }

    // config_at is monotone in its ordering key.
    #[test]
    fn config_at_is_monotone(
        mut times in proptest::collection::vec(1_000_000_000_000i64..2_000_000_000_000, 1..6),
        probes in proptest::collection::vec(900_000_000_000i64..2_100_000_000_000, 2..6),
    ) {
        times.sort();
        times.dedup();
        let sources: Vec<ConfigSource> = times
            .iter()
            .enumerate()
            .map(|(i, t)| ConfigSource {
                path: format!("openclaw.json.bak.{i}"),
                content: format!("{{\"meta\":{{\"lastTouchedAt\":{t}}}}}").into_bytes(),
                mtime: TimestampMs(0),
            })
            .collect();
        let history = load_config_history(sources);
        let mut probes = probes;
        probes.sort();
        let mut last_key: Option<TimestampMs> = None;
        for p in probes {
            let key = config_at(&history, TimestampMs(p)).map(|s| s.ordering_key);
            if let (Some(prev), Some(cur)) = (last_key, key) {
                prop_assert!(cur >= prev);
            }
            if key.is_some() {
                last_key = key;
            }
        }
    }

    // Pairing conservation over arbitrary call/result id sequences.
    #[test]
    fn pairing_conservation(ops in proptest::collection::vec((any::<bool>(), 0u8..6), 0..24)) {
        let mut lines = vec![
            serde_json::json!({
                "type": "session", "version": 3, "id": "h",
                "sessionId": uuid_from(7), "timestamp": 1_000_000_000,
            })
            .to_string(),
        ];
        let mut calls = 0usize;
        let mut results = 0usize;
        for (i, (is_call, id)) in ops.iter().enumerate() {
            if *is_call {
                calls += 1;
                lines.push(serde_json::json!({
                    "type": "message", "id": format!("m{i}"), "role": "assistant",
                    "timestamp": 1_000_000_000 + i as i64,
                    "content": [{"type": "toolCall", "id": format!("c{id}"), "name": "exec", "arguments": {}}],
                }).to_string());
            } else {
                results += 1;
                lines.push(serde_json::json!({
                    "type": "message", "id": format!("m{i}"), "role": "toolResult",
                    "toolCallId": format!("c{id}"),
                    "timestamp": 1_000_000_000 + i as i64,
                    "content": [],
                }).to_string());
            }
        }
        let (entries, _): (Vec<_>, _) = parse_transcript(format!("{}\n", lines.join("\n")).as_bytes());
        let session = ParsedSession {
            session_id: "s".into(),
            session_key: None,
            file_path: "t.jsonl".into(),
            status: SessionFileStatus::Indexed,
            entries,
            warnings: Vec::new(),
        };
        let pairing = pair_tool_calls(&session);
        prop_assert_eq!(pairing.executions.len() + pairing.unpaired_calls.len(), calls);
        prop_assert_eq!(pairing.executions.len() + pairing.unpaired_results.len(), results);
        // Every execution pairs a call with a strictly later result.
        for exec in &pairing.executions {
            prop_assert!(exec.result_line.unwrap() > exec.call_line);
        }
    }

    // Arbitrary bytes never panic the transcript parser, and line accounting
    // holds (salvage property).
    #[test]
    fn transcript_parser_total_on_arbitrary_bytes(bytes in proptest::collection::vec(any::<u8>(), 0..2048)) {
        let (entries, warnings) = parse_transcript(&bytes);
        let non_empty = bytes
            .split(|b| *b == b'\n')
            .filter(|l| l.iter().any(|b| !b.is_ascii_whitespace()))
            .count();
        prop_assert!(entries.len() <= non_empty);
        prop_assert!(entries.len() + warnings.len() >= non_empty);
    }
}

#[test]
fn visibility_thinking_never_leaks_from_structured_blocks() {
    // Structured thinking blocks are excluded from both modes' visible text
    // only under tag filtering; native mode forwards text blocks verbatim.
    let line = serde_json::json!({
        "type": "message", "id": "m", "role": "assistant",
        "content": [
            {"type": "thinking", "thinking": "SECRET-PLAN"},
            {"type": "text", "text": "public answer"},
        ],
    });
    let (entries, _) = parse_transcript(format!("{line}\n").as_bytes());
    let m = entries[0].as_message().unwrap();
    assert!(!visible_output(m, ProviderMode::TagFiltered).contains("SECRET-PLAN"));
    assert!(!visible_output(m, ProviderMode::NativeThinking).contains("SECRET-PLAN"));
    assert_eq!(visible_output(m, ProviderMode::NativeThinking), "public answer");
    assert!(m.blocks.iter().any(|b| matches!(b, ContentBlock::Thinking { .. })));
    assert_eq!(m.role, Role::Assistant);
}
