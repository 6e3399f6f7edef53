use alloc::vec::Vec;
use core::ops::Range;

use super::suffix_array::{build_suffix_array, lcp_array};
use super::tokenize::{TokenizedCorpus, SEPARATOR};

/// Half-open range of token positions in the concatenated corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DuplicateRange {
    pub start: usize,
    pub end: usize,
}

impl DuplicateRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

pub fn find_duplicate_ranges(corpus: &TokenizedCorpus, min_match: usize) -> Vec<DuplicateRange> {
    find_duplicate_ranges_in(corpus.token_ids(), SEPARATOR, min_match)
}

/// Merged, sorted ranges covering every position that lies inside a
/// separator-free substring of at least `min_match` tokens occurring twice
/// or more. All occurrences are covered. A `min_match` of 0 is treated as 1.
pub fn find_duplicate_ranges_in(tokens: &[u32], separator: u32, min_match: usize) -> Vec<DuplicateRange> {
    let n = tokens.len();
    let min_match = min_match.max(1);
    if n < 2 {
        return Vec::new();
    }
    let sa = build_suffix_array(tokens);
    let lcp = lcp_array(tokens, &sa);

    // distance from each position to the next separator or the end
    let mut room = alloc::vec![0usize; n];
    let mut next = n;
    for p in (0..n).rev() {
        if tokens[p] == separator {
            next = p;
        }
        room[p] = next - p;
    }

    // longest repeated separator-free prefix of each suffix
    let mut best = alloc::vec![0usize; n];
    for (i, &l) in lcp.iter().enumerate() {
        let (a, b) = (sa[i], sa[i + 1]);
        let len = l.min(room[a]).min(room[b]);
        best[a] = best[a].max(len);
        best[b] = best[b].max(len);
    }

    let mut out: Vec<DuplicateRange> = Vec::new();
    for (p, &len) in best.iter().enumerate() {
        if len < min_match {
            continue;
        }
        match out.last_mut() {
            Some(last) if p <= last.end => last.end = last.end.max(p + len),
            _ => out.push(DuplicateRange { start: p, end: p + len }),
        }
    }
    out
}

/// Byte spans, per document, of the text behind `ranges`. Ranges must not
/// contain separators, which [`find_duplicate_ranges`] guarantees.
pub fn map_ranges_to_chars(corpus: &TokenizedCorpus, ranges: &[DuplicateRange]) -> Vec<Vec<Range<usize>>> {
    let mut out = alloc::vec![Vec::new(); corpus.num_docs()];
    for r in ranges.iter().filter(|r| !r.is_empty()) {
        let first = corpus.origin(r.start).expect("range starts on a token");
        let last = corpus.origin(r.end - 1).expect("range ends on a token");
        debug_assert_eq!(first.doc, last.doc);
        out[first.doc as usize].push(first.start as usize..last.end as usize);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::tokenize_reversible;
    use alloc::string::String;
    use alloc::vec;
    use proptest::prelude::*;

    /// Marks every position inside a repeated, separator-free window of
    /// exactly `m` tokens.
    pub(crate) fn oracle(tokens: &[u32], m: usize) -> Vec<bool> {
        let mut covered = vec![false; tokens.len()];
        if tokens.len() < m {
            return covered;
        }
        for i in 0..=tokens.len() - m {
            let w = &tokens[i..i + m];
            if w.contains(&SEPARATOR) {
                continue;
            }
            let count = (0..=tokens.len() - m).filter(|&j| &tokens[j..j + m] == w).count();
            if count >= 2 {
                covered[i..i + m].fill(true);
            }
        }
        covered
    }

    fn coverage(ranges: &[DuplicateRange], n: usize) -> Vec<bool> {
        let mut c = vec![false; n];
        for r in ranges {
            c[r.start..r.end].fill(true);
        }
        c
    }

    fn words(n: usize, tag: &str) -> String {
        (0..n).map(|i| alloc::format!("{tag}{i}")).collect::<Vec<_>>().join(" ")
    }

    #[test]
    fn shared_run_of_sixty() {
        let shared = words(60, "s");
        let a = alloc::format!("{} {shared} {}", words(10, "a"), words(5, "b"));
        let b = alloc::format!("{shared} {}", words(7, "c"));
        let corpus = tokenize_reversible(&[a.as_str(), b.as_str()]);
        let ranges = find_duplicate_ranges(&corpus, 50);
        assert_eq!(ranges, [DuplicateRange { start: 10, end: 70 }, DuplicateRange { start: 76, end: 136 }]);
        let spans = map_ranges_to_chars(&corpus, &ranges);
        assert_eq!(&a[spans[0][0].clone()], shared);
        assert_eq!(&b[spans[1][0].clone()], shared);
    }

    #[test]
    fn below_threshold_is_ignored() {
        let shared = words(49, "s");
        let a = alloc::format!("x {shared} y");
        let b = alloc::format!("z {shared} w");
        let corpus = tokenize_reversible(&[a.as_str(), b.as_str()]);
        assert!(find_duplicate_ranges(&corpus, 50).is_empty());
        assert!(map_ranges_to_chars(&corpus, &[]).iter().all(Vec::is_empty));
    }

    #[test]
    fn runs_do_not_cross_separators() {
        // "1 2 | 1 2" must not match "2 | 1" across the boundary
        let toks = [1, 2, 0, 1, 2, 0, 1, 2];
        assert_eq!(find_duplicate_ranges_in(&toks, 0, 3), []);
        assert_eq!(find_duplicate_ranges_in(&toks, 0, 2).len(), 3);
    }

    #[test]
    fn within_one_document() {
        let toks = [5, 6, 7, 5, 6, 7];
        assert_eq!(find_duplicate_ranges_in(&toks, 0, 3), [DuplicateRange { start: 0, end: 6 }]);
    }

    fn corpus_tokens() -> impl Strategy<Value = Vec<u32>> {
        (prop::collection::vec(prop::collection::vec(1u32..5, 0..30), 1..8), prop::collection::vec(1u32..5, 3..12))
            .prop_map(|(docs, shared)| {
                let mut out = Vec::new();
                for (i, mut d) in docs.into_iter().enumerate() {
                    if i > 0 {
                        out.push(SEPARATOR);
                    }
                    if i % 2 == 0 {
                        let at = d.len() / 2;
                        d.splice(at..at, shared.iter().copied());
                    }
                    out.extend(d);
                }
                out.truncate(200);
                out
            })
    }

    proptest! {
        #[test]
        fn equals_window_oracle(tokens in corpus_tokens(), m in 1usize..8) {
            let ranges = find_duplicate_ranges_in(&tokens, SEPARATOR, m);
            prop_assert_eq!(coverage(&ranges, tokens.len()), oracle(&tokens, m));
            for w in ranges.windows(2) {
                prop_assert!(w[0].end < w[1].start);
            }
            for r in &ranges {
                prop_assert!(r.len() >= m);
                prop_assert!(!tokens[r.start..r.end].contains(&SEPARATOR));
            }
        }
    }
}
