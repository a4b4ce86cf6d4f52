//! Segment-wise glob matching over relative, `/`-separated paths.
//!
//! Deliberately least-power: `*` and `?` match within one path segment,
//! `**` matches any run of whole segments. Path variables in artifact
//! patterns are expressed as `*` segments by the caller.

/// Match `path` against `pattern`, both `/`-separated and relative.
pub fn glob_match(pattern: &str, path: &str) -> bool {
    let pat: Vec<&str> = pattern.split('/').filter(|s| !s.is_empty()).collect();
    let segs: Vec<&str> = path.split('/').filter(|s| !s.is_empty()).collect();
    match_segments(&pat, &segs)
}

fn match_segments(pat: &[&str], segs: &[&str]) -> bool {
    match pat.split_first() {
        None => segs.is_empty(),
        Some((&"**", rest)) => {
            // `**` consumes zero or more whole segments.
            (0..=segs.len()).any(|k| match_segments(rest, &segs[k..]))
        }
        Some((first, rest)) => match segs.split_first() {
            Some((seg, seg_rest)) => segment_match(first, seg) && match_segments(rest, seg_rest),
            None => false,
        },
    }
}

/// Match one pattern segment against one path segment (`*`, `?` wildcards).
pub fn segment_match(pattern: &str, segment: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let s: Vec<char> = segment.chars().collect();
    match_chars(&p, &s)
}

fn match_chars(p: &[char], s: &[char]) -> bool {
    match p.split_first() {
        None => s.is_empty(),
        Some(('*', rest)) => (0..=s.len()).any(|k| match_chars(rest, &s[k..])),
        Some(('?', rest)) => match s.split_first() {
            Some((_, s_rest)) => match_chars(rest, s_rest),
            None => false,
        },
        Some((c, rest)) => match s.split_first() {
            Some((sc, s_rest)) => c == sc && match_chars(rest, s_rest),
            None => false,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_stays_within_segment() {
        assert!(glob_match("workspace/*.md", "workspace/SOUL.md"));
        assert!(!glob_match("workspace/*.md", "workspace/memory/2026-01-01.md"));
    }

    #[test]
    fn double_star_spans_segments() {
        assert!(glob_match("credentials/**", "credentials/whatsapp/default/keys.json"));
        assert!(glob_match("var/log/**", "var/log/syslog"));
        assert!(!glob_match("var/log/**", "var/cache/x"));
        // `**` also matches zero segments followed by nothing.
        assert!(glob_match("credentials/**", "credentials/x"));
    }

    #[test]
    fn question_mark_matches_single_char() {
        assert!(segment_match("openclaw-????-??-??.log", "openclaw-2026-01-31.log"));
        assert!(!segment_match("openclaw-????-??-??.log", "openclaw-26-1-31.log"));
    }

    #[test]
    fn prefix_star_suffix() {
        assert!(segment_match("openclaw.json.bak*", "openclaw.json.bak"));
        assert!(segment_match("openclaw.json.bak*", "openclaw.json.bak.1"));
        assert!(!segment_match("openclaw.json.bak*", "openclaw.json"));
        assert!(segment_match("*.jsonl", "abc.jsonl"));
        assert!(!segment_match("*.jsonl", "abc.jsonl.deleted.5"));
    }
}
