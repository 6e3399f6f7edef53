use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};

use crate::document::{RejectReason, Verdict};

use super::words;

/// Repetition statistics for one document.
///
/// Lines are newline-separated and paragraphs blank-line-separated, both
/// trimmed, with empty ones ignored. A line or paragraph counts as duplicate
/// when an identical one occurred earlier. N-gram fractions are over
/// whitespace words, measured in characters of the words they cover.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RepetitionProfile {
    pub dup_line_frac: f64,
    pub dup_para_frac: f64,
    pub dup_line_char_frac: f64,
    pub dup_para_char_frac: f64,
    /// Indexed by n - 2 for n in 2..=4.
    pub top_ngram_char_frac: [f64; 3],
    /// Indexed by n - 5 for n in 5..=10.
    pub dup_ngram_char_frac: [f64; 6],
}

impl RepetitionProfile {
    pub fn top_ngram(&self, n: usize) -> f64 {
        self.top_ngram_char_frac[n - 2]
    }

    pub fn dup_ngram(&self, n: usize) -> f64 {
        self.dup_ngram_char_frac[n - 5]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepetitionThresholds {
    pub dup_line_frac: f64,
    pub dup_para_frac: f64,
    pub dup_line_char_frac: f64,
    pub dup_para_char_frac: f64,
    pub top_ngram_char_frac: [f64; 3],
    pub dup_ngram_char_frac: [f64; 6],
}

impl Default for RepetitionThresholds {
    fn default() -> Self {
        Self {
            dup_line_frac: 0.30,
            dup_para_frac: 0.30,
            dup_line_char_frac: 0.20,
            dup_para_char_frac: 0.20,
            top_ngram_char_frac: [0.20, 0.18, 0.16],
            dup_ngram_char_frac: [0.15, 0.14, 0.13, 0.12, 0.11, 0.10],
        }
    }
}

/// (fraction of units that repeat an earlier unit, fraction of their chars)
fn duplicate_fractions<'a>(units: impl Iterator<Item = &'a str>) -> (f64, f64) {
    let mut seen = HashSet::new();
    let (mut total, mut dups, mut chars, mut dup_chars) = (0usize, 0usize, 0usize, 0usize);
    for u in units.map(str::trim).filter(|u| !u.is_empty()) {
        let len = u.chars().count();
        total += 1;
        chars += len;
        if !seen.insert(u) {
            dups += 1;
            dup_chars += len;
        }
    }
    (ratio(dups, total), ratio(dup_chars, chars))
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Maximal runs of non-blank lines.
fn paragraphs(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    let (mut end, mut offset) = (0, 0);
    for line in text.split_inclusive('\n') {
        if line.trim().is_empty() {
            if let Some(s) = start.take() {
                out.push(&text[s..end]);
            }
        } else {
            start.get_or_insert(offset);
            end = offset + line.len();
        }
        offset += line.len();
    }
    if let Some(s) = start {
        out.push(&text[s..end]);
    }
    out
}

/// Characters covered by the occurrences of one n-gram, overlaps counted
/// once. `starts` is ascending.
fn covered_by(starts: &[usize], word_lens: &[usize], n: usize) -> usize {
    let mut until = 0;
    let mut chars = 0;
    for &s in starts {
        for len in &word_lens[s.max(until)..s + n] {
            chars += len;
        }
        until = s + n;
    }
    chars
}

/// Returns the coverage of the most frequent repeated n-gram (ties broken
/// by coverage) and of all repeated n-grams together.
fn ngram_coverage(word_lens: &[usize], ids: &[u32], n: usize) -> (usize, usize) {
    if ids.len() < n {
        return (0, 0);
    }
    let mut positions: HashMap<&[u32], Vec<usize>> = HashMap::new();
    for (i, w) in ids.windows(n).enumerate() {
        positions.entry(w).or_default().push(i);
    }
    let mut all = alloc::vec![false; ids.len()];
    let mut best = (0usize, 0usize); // (count, chars)
    for starts in positions.values().filter(|s| s.len() >= 2) {
        for &s in starts {
            all[s..s + n].fill(true);
        }
        if starts.len() >= best.0 {
            best = best.max((starts.len(), covered_by(starts, word_lens, n)));
        }
    }
    let dup = all.iter().zip(word_lens).filter(|(m, _)| **m).map(|(_, l)| *l).sum();
    (best.1, dup)
}

pub fn repetition_profile(text: &str) -> RepetitionProfile {
    let (dup_line_frac, dup_line_char_frac) = duplicate_fractions(text.split('\n'));
    let (dup_para_frac, dup_para_char_frac) = duplicate_fractions(paragraphs(text).into_iter());

    let mut interner: HashMap<&str, u32> = HashMap::new();
    let mut ids = Vec::new();
    let mut lens = Vec::new();
    for w in words(text) {
        let next = interner.len() as u32;
        ids.push(*interner.entry(w).or_insert(next));
        lens.push(w.chars().count());
    }
    let total: usize = lens.iter().sum();
    let mut profile = RepetitionProfile {
        dup_line_frac,
        dup_para_frac,
        dup_line_char_frac,
        dup_para_char_frac,
        ..RepetitionProfile::default()
    };
    for n in 2..=4 {
        profile.top_ngram_char_frac[n - 2] = ratio(ngram_coverage(&lens, &ids, n).0, total);
    }
    for n in 5..=10 {
        profile.dup_ngram_char_frac[n - 5] = ratio(ngram_coverage(&lens, &ids, n).1, total);
    }
    profile
}

/// Rejects when any statistic strictly exceeds its threshold.
pub fn repetition_gate(p: &RepetitionProfile, t: &RepetitionThresholds) -> Verdict {
    let over = p.dup_line_frac > t.dup_line_frac
        || p.dup_para_frac > t.dup_para_frac
        || p.dup_line_char_frac > t.dup_line_char_frac
        || p.dup_para_char_frac > t.dup_para_char_frac
        || p.top_ngram_char_frac.iter().zip(&t.top_ngram_char_frac).any(|(v, m)| v > m)
        || p.dup_ngram_char_frac.iter().zip(&t.dup_ngram_char_frac).any(|(v, m)| v > m);
    if over {
        Verdict::Reject(RejectReason::Repetition)
    } else {
        Verdict::Keep
    }
}
