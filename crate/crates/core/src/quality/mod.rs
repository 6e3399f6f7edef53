//! Document-wise repetition and quality heuristics, and line-wise corrections.

mod heuristics;
mod lines;
mod repetition;

pub use heuristics::{
    quality_gate, quality_profile, quality_profile_with, QualityProfile, QualityThresholds, DEFAULT_STOPWORDS,
};
pub use lines::{
    corrected_text, line_corrections, parse_pattern_list, LineFlag, LineRuleError, LineRuleSet, PatternPosition,
    ShortLinePattern, DEFAULT_ENGAGEMENT_WORDS, DEFAULT_LINE_PATTERNS,
};
pub use repetition::{repetition_gate, repetition_profile, RepetitionProfile, RepetitionThresholds};

/// Whitespace-delimited words.
pub(crate) fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
}
