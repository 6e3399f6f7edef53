use alloc::vec::Vec;

use hashbrown::HashSet;

use crate::document::{RejectReason, Verdict};

use super::words;

/// Stop words whose presence marks running natural-language text.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

/// Document-level statistics used to spot non-prose pages.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QualityProfile {
    pub word_count: usize,
    /// Mean length of whitespace words, in characters.
    pub mean_word_length: f64,
    /// Hash runs and ellipses per word.
    pub symbol_word_ratio: f64,
    /// Share of non-empty lines starting with a bullet marker.
    pub bullet_line_frac: f64,
    /// Share of non-empty lines ending in an ellipsis.
    pub ellipsis_line_frac: f64,
    /// Share of words holding at least one alphabetic character.
    pub alpha_word_frac: f64,
    pub stopword_hits: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityThresholds {
    pub min_words: usize,
    pub max_words: usize,
    pub min_mean_word_length: f64,
    pub max_mean_word_length: f64,
    pub max_symbol_word_ratio: f64,
    pub max_bullet_line_frac: f64,
    pub max_ellipsis_line_frac: f64,
    pub min_alpha_word_frac: f64,
    pub min_stopword_hits: usize,
}

impl Default for QualityThresholds {
    fn default() -> Self {
        Self {
            min_words: 50,
            max_words: 100_000,
            min_mean_word_length: 3.0,
            max_mean_word_length: 10.0,
            max_symbol_word_ratio: 0.10,
            max_bullet_line_frac: 0.90,
            max_ellipsis_line_frac: 0.30,
            min_alpha_word_frac: 0.80,
            min_stopword_hits: 2,
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn count_symbols(text: &str) -> usize {
    let mut n = 0;
    let mut prev_hash = false;
    for c in text.chars() {
        let hash = c == '#';
        if hash && !prev_hash {
            n += 1;
        }
        prev_hash = hash;
    }
    n + text.matches("...").count() + text.matches('…').count()
}

fn is_bullet(line: &str) -> bool {
    let mut chars = line.chars();
    matches!(chars.next(), Some('•' | '-' | '*')) && chars.next().is_some_and(char::is_whitespace)
}

fn is_ellipsis_line(line: &str) -> bool {
    line.ends_with("...") || line.ends_with('…')
}

/// Computes a [`QualityProfile`] using the bundled stop-word list.
pub fn quality_profile(text: &str) -> QualityProfile {
    let stopwords: HashSet<&str> = DEFAULT_STOPWORDS.split_whitespace().collect();
    quality_profile_with(text, &stopwords)
}

/// Computes a [`QualityProfile`] against a caller-supplied stop-word set of
/// lowercase words.
pub fn quality_profile_with(text: &str, stopwords: &HashSet<&str>) -> QualityProfile {
    let ws: Vec<&str> = words(text).collect();
    let chars: usize = ws.iter().map(|w| w.chars().count()).sum();
    let alpha = ws.iter().filter(|w| w.chars().any(char::is_alphabetic)).count();
    let stopword_hits = ws
        .iter()
        .filter(|w| {
            let bare = w.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
            stopwords.contains(bare.as_str())
        })
        .count();
    let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    QualityProfile {
        word_count: ws.len(),
        mean_word_length: ratio(chars, ws.len()),
        symbol_word_ratio: ratio(count_symbols(text), ws.len()),
        bullet_line_frac: ratio(lines.iter().filter(|l| is_bullet(l)).count(), lines.len()),
        ellipsis_line_frac: ratio(lines.iter().filter(|l| is_ellipsis_line(l)).count(), lines.len()),
        alpha_word_frac: ratio(alpha, ws.len()),
        stopword_hits,
    }
}

/// Rejects when any bound is violated. All bounds are inclusive.
pub fn quality_gate(p: &QualityProfile, t: &QualityThresholds) -> Verdict {
    let ok = (t.min_words..=t.max_words).contains(&p.word_count)
        && p.mean_word_length >= t.min_mean_word_length
        && p.mean_word_length <= t.max_mean_word_length
        && p.symbol_word_ratio <= t.max_symbol_word_ratio
        && p.bullet_line_frac <= t.max_bullet_line_frac
        && p.ellipsis_line_frac <= t.max_ellipsis_line_frac
        && p.alpha_word_frac >= t.min_alpha_word_frac
        && p.stopword_hits >= t.min_stopword_hits;
    if ok {
        Verdict::Keep
    } else {
        Verdict::Reject(RejectReason::Quality)
    }
}
