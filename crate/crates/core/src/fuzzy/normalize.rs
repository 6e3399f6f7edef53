use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use unicode_normalization::char::{decompose_canonical, is_combining_mark};

/// Lowercase, accent-free, punctuation-free word tokens.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DedupNormalizedText {
    tokens: Vec<String>,
}

impl DedupNormalizedText {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces.
    pub fn detokenize(&self) -> String {
        self.tokens.join(" ")
    }
}

/// A normalized token and the byte range of the source text it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedToken {
    pub text: String,
    pub span: Range<usize>,
}

/// Normalizes `text` and reports, for every token, the byte range of the
/// original characters it was built from.
///
/// Each source character is lowercased and canonically decomposed;
/// combining marks are dropped. Whitespace ends a token. Any other character
/// that is not alphanumeric is removed without splitting, so "don't" yields
/// "dont".
pub fn normalize_tokens_with_offsets(text: &str) -> Vec<NormalizedToken> {
    let mut out = Vec::new();
    let mut current = String::new();
    let mut span: Option<Range<usize>> = None;
    for (pos, ch) in text.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = span.take() {
                out.push(NormalizedToken { text: core::mem::take(&mut current), span: s });
            }
            continue;
        }
        let before = current.len();
        for lc in ch.to_lowercase() {
            decompose_canonical(lc, |d| {
                if !is_combining_mark(d) && d.is_alphanumeric() {
                    current.push(d);
                }
            });
        }
        if current.len() > before {
            let end = pos + ch.len_utf8();
            match &mut span {
                Some(s) => s.end = end,
                None => span = Some(pos..end),
            }
        }
    }
    if let Some(s) = span {
        out.push(NormalizedToken { text: current, span: s });
    }
    out
}

pub fn normalize_for_dedup(text: &str) -> DedupNormalizedText {
    DedupNormalizedText {
        tokens: normalize_tokens_with_offsets(text).into_iter().map(|t| t.text).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_examples() {
        assert_eq!(normalize_for_dedup("Héllo,  Wörld!").tokens(), ["hello", "world"]);
        assert!(normalize_for_dedup("").is_empty());
        assert_eq!(normalize_for_dedup("abc").tokens(), ["abc"]);
        assert_eq!(normalize_for_dedup("don't -- stop").tokens(), ["dont", "stop"]);
        assert_eq!(normalize_for_dedup("Ça\u{301}\tÉTÉ").tokens(), ["ca", "ete"]);
    }

    #[test]
    fn offsets_cover_source_words() {
        let text = "  Hello, World ";
        let toks = normalize_tokens_with_offsets(text);
        assert_eq!(toks.len(), 2);
        assert_eq!(&text[toks[0].span.clone()], "Hello");
        assert_eq!(&text[toks[1].span.clone()], "World");
    }

    proptest! {
        #[test]
        fn idempotent_on_detokenized_output(s in "\\PC{0,60}") {
            let once = normalize_for_dedup(&s);
            prop_assert_eq!(normalize_for_dedup(&once.detokenize()), once.clone());
            for t in once.tokens() {
                prop_assert!(!t.is_empty());
                prop_assert!(!t.chars().any(char::is_whitespace));
            }
        }

        #[test]
        fn spans_renormalize_to_their_token(s in "[a-zA-Zé,.' \u{301}\u{300}ÀΣς\n]{0,60}") {
            for t in normalize_tokens_with_offsets(&s) {
                let again = normalize_for_dedup(&s[t.span.clone()]);
                prop_assert_eq!(again.tokens(), &[t.text.clone()][..]);
            }
        }
    }
}
