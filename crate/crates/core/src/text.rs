//! Post-extraction formatting: URL removal, trailing-whitespace trimming and
//! newline collapsing.

use alloc::string::String;

/// Characters left in place when they end a URL-shaped token.
const TRAILING_PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', ')', '»', '"', '\''];

fn starts_with_ignore_case(hay: &str, prefix: &str) -> bool {
    hay.len() >= prefix.len()
        && hay.as_bytes()[..prefix.len()].eq_ignore_ascii_case(prefix.as_bytes())
}

/// Length in bytes of the URL starting at `rest`, if one starts there.
/// `prev` is the character immediately before `rest`.
fn url_len_at(rest: &str, prev: Option<char>) -> Option<usize> {
    let scheme_len = if starts_with_ignore_case(rest, "https://") {
        8
    } else if starts_with_ignore_case(rest, "http://") {
        7
    } else if starts_with_ignore_case(rest, "www.") && !prev.is_some_and(char::is_alphanumeric) {
        4
    } else {
        return None;
    };
    let token_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
    let end = rest[..token_end].trim_end_matches(TRAILING_PUNCT).len();
    if scheme_len == 4 && end <= scheme_len {
        // a bare "www." is not an address
        return None;
    }
    Some(end.max(scheme_len))
}

/// Removes every `http(s)://…` or `www.…` token, leaving trailing
/// punctuation and surrounding whitespace in place.
pub fn remove_urls(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut prev = None;
    let mut i = 0;
    while i < text.len() {
        let rest = &text[i..];
        if let Some(len) = url_len_at(rest, prev) {
            i += len;
            // what follows a removed URL is punctuation or whitespace, never
            // an alphanumeric continuation
            prev = None;
            continue;
        }
        let c = rest.chars().next().expect("non-empty remainder");
        out.push(c);
        prev = Some(c);
        i += c.len_utf8();
    }
    out
}

/// Trims trailing whitespace on every line, then limits runs of newlines to
/// two.
pub fn collapse_newlines(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_newlines = 0usize;
    let mut first = true;
    for line in text.split('\n') {
        if !first {
            pending_newlines += 1;
        }
        first = false;
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        for _ in 0..pending_newlines.min(2) {
            out.push('\n');
        }
        pending_newlines = 0;
        out.push_str(line);
    }
    for _ in 0..pending_newlines.min(2) {
        out.push('\n');
    }
    out
}

/// Formatting applied to extracted text. Idempotent.
pub fn format_text(text: &str) -> String {
    collapse_newlines(&remove_urls(text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn newline_runs_capped_at_two() {
        assert_eq!(format_text("a\n\n\n\nb"), "a\n\nb");
        assert_eq!(format_text("a\nb\n\nc"), "a\nb\n\nc");
        assert_eq!(format_text("a  \n \n\t\n\nb \n"), "a\n\nb\n");
    }

    #[test]
    fn urls_removed() {
        assert_eq!(format_text("see https://x.example/page now"), "see  now");
        assert_eq!(format_text("(at www.example.com)."), "(at ).");
        assert_eq!(format_text("HTTP://A.B/c, then"), ", then");
        assert_eq!(format_text("awww.example.com stays"), "awww.example.com stays");
        assert_eq!(format_text("a www. b"), "a www. b");
        assert_eq!(format_text("go to http://"), "go to");
    }

    fn oracle_has_url(s: &str) -> bool {
        let lower = s.to_ascii_lowercase();
        if lower.contains("http://") || lower.contains("https://") {
            return true;
        }
        lower.match_indices("www.").any(|(i, _)| {
            let prev_ok = lower[..i].chars().last().is_none_or(|c| !c.is_alphanumeric());
            let after = &lower[i + 4..];
            let tok = after.split(char::is_whitespace).next().unwrap_or("");
            prev_ok && !tok.trim_end_matches(TRAILING_PUNCT).is_empty()
        })
    }

    fn texty() -> impl Strategy<Value = String> {
        prop::collection::vec(
            prop::sample::select(vec![
                "a", "b", " ", "\n", "\n\n\n", "\t", ".", ",", ")", "http://", "https://x.y",
                "www.", "www.q.r", "w", "h", "ttp://", "é", "\r",
            ]),
            0..40,
        )
        .prop_map(|parts| parts.concat())
    }

    proptest! {
        #[test]
        fn format_is_idempotent(s in texty()) {
            let once = format_text(&s);
            prop_assert_eq!(format_text(&once), once.clone());
            prop_assert!(!once.contains("\n\n\n"));
            prop_assert!(!oracle_has_url(&once), "{:?}", once);
        }

        #[test]
        fn format_is_idempotent_any_unicode(s in "\\PC{0,80}") {
            let once = format_text(&s);
            prop_assert_eq!(format_text(&once), once);
        }
    }
}
