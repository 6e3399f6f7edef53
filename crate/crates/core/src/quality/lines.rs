use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::document::{FilterVerdict, RejectReason};

use super::words;

pub const DEFAULT_LINE_PATTERNS: &str = include_str!("../../data/line_patterns.txt");
pub const DEFAULT_ENGAGEMENT_WORDS: &str = include_str!("../../data/engagement_words.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternPosition {
    Start,
    End,
    Anywhere,
}

/// A lowercase phrase that marks a short line as boilerplate when found at
/// `position`, on word boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortLinePattern {
    pub position: PatternPosition,
    pub phrase: String,
}

impl ShortLinePattern {
    pub fn new(position: PatternPosition, phrase: &str) -> Self {
        Self { position, phrase: phrase.trim().to_lowercase() }
    }

    /// `line` must already be lowercased and trimmed.
    fn matches(&self, line: &str) -> bool {
        let p = self.phrase.as_str();
        if p.is_empty() {
            return false;
        }
        match self.position {
            PatternPosition::Start => line.starts_with(p) && boundary_after(line, p.len()),
            PatternPosition::End => {
                let body = line.trim_end_matches(|c: char| !c.is_alphanumeric());
                body.ends_with(p) && boundary_before(body, body.len() - p.len())
            }
            PatternPosition::Anywhere => line
                .match_indices(p)
                .any(|(i, _)| boundary_before(line, i) && boundary_after(line, i + p.len())),
        }
    }
}

fn boundary_before(s: &str, i: usize) -> bool {
    !s[..i].chars().next_back().is_some_and(char::is_alphanumeric)
}

fn boundary_after(s: &str, i: usize) -> bool {
    !s[i..].chars().next().is_some_and(char::is_alphanumeric)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineRuleError {
    /// A pattern line lacks a `start:`, `end:` or `any:` prefix.
    UnknownPosition { line: usize },
    /// The discard budget must lie in (0, 1].
    BudgetOutOfRange,
}

impl fmt::Display for LineRuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LineRuleError::UnknownPosition { line } => {
                write!(f, "pattern on line {line} needs a start:, end: or any: prefix")
            }
            LineRuleError::BudgetOutOfRange => f.write_str("discard budget must be in (0, 1]"),
        }
    }
}

impl core::error::Error for LineRuleError {}

/// Parses one pattern per line, each prefixed with `start:`, `end:` or
/// `any:`. Blank lines and `#` comments are skipped.
pub fn parse_pattern_list(text: &str) -> Result<Vec<ShortLinePattern>, LineRuleError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (tag, phrase) = line.split_once(':').ok_or(LineRuleError::UnknownPosition { line: i + 1 })?;
        let position = match tag.trim() {
            "start" => PatternPosition::Start,
            "end" => PatternPosition::End,
            "any" => PatternPosition::Anywhere,
            _ => return Err(LineRuleError::UnknownPosition { line: i + 1 }),
        };
        out.push(ShortLinePattern::new(position, phrase));
    }
    Ok(out)
}

/// Why a line was removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LineFlag {
    /// More than half of the alphabetic characters are uppercase.
    Uppercase,
    /// No alphabetic characters at all.
    NonAlphabetic,
    /// A social counter such as "3 likes".
    Counter,
    SingleWord,
    /// A short line matching a boilerplate pattern.
    Boilerplate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineRuleSet {
    pub patterns: Vec<ShortLinePattern>,
    pub engagement_words: Vec<String>,
    /// Lines with at most this many words are checked against `patterns`.
    pub max_short_line_words: usize,
    doc_discard_budget: f64,
}

impl Default for LineRuleSet {
    fn default() -> Self {
        Self {
            patterns: parse_pattern_list(DEFAULT_LINE_PATTERNS).expect("bundled patterns parse"),
            engagement_words: DEFAULT_ENGAGEMENT_WORDS.split_whitespace().map(str::to_lowercase).collect(),
            max_short_line_words: 10,
            doc_discard_budget: 0.05,
        }
    }
}

fn is_count(tok: &str) -> bool {
    let tok = tok.strip_suffix(['k', 'K', 'm', 'M']).unwrap_or(tok);
    let mut parts = tok.splitn(2, ['.', ',']);
    let int = parts.next().unwrap_or("");
    let frac = parts.next().unwrap_or("0");
    !int.is_empty()
        && int.bytes().all(|b| b.is_ascii_digit())
        && !frac.is_empty()
        && frac.bytes().all(|b| b.is_ascii_digit())
}

impl LineRuleSet {
    pub fn with_budget(mut self, budget: f64) -> Result<Self, LineRuleError> {
        if !(budget > 0.0 && budget <= 1.0) {
            return Err(LineRuleError::BudgetOutOfRange);
        }
        self.doc_discard_budget = budget;
        Ok(self)
    }

    pub fn budget(&self) -> f64 {
        self.doc_discard_budget
    }

    fn is_engagement(&self, tok: &str) -> bool {
        let bare = tok.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
        self.engagement_words.contains(&bare)
    }

    /// The first rule that removes `line`, if any. Blank lines are kept.
    pub fn flag(&self, line: &str) -> Option<LineFlag> {
        let line = line.trim();
        if line.is_empty() {
            return None;
        }
        let (alpha, upper) = line
            .chars()
            .filter(|c| c.is_alphabetic())
            .fold((0usize, 0usize), |(a, u), c| (a + 1, u + c.is_uppercase() as usize));
        if alpha == 0 {
            return Some(LineFlag::NonAlphabetic);
        }
        if upper * 2 > alpha {
            return Some(LineFlag::Uppercase);
        }
        let ws: Vec<&str> = words(line).collect();
        let counter = match ws.as_slice() {
            [w] => self.is_engagement(w),
            [n, w] => is_count(n) && self.is_engagement(w),
            _ => false,
        };
        if counter {
            return Some(LineFlag::Counter);
        }
        if ws.len() == 1 {
            return Some(LineFlag::SingleWord);
        }
        if ws.len() <= self.max_short_line_words {
            let lower = line.to_lowercase();
            if self.patterns.iter().any(|p| p.matches(&lower)) {
                return Some(LineFlag::Boilerplate);
            }
        }
        None
    }
}

/// Removes flagged lines. Returns `Reject` when the flagged lines hold more
/// than the discard budget of the document's words, `Keep` when nothing is
/// flagged, and otherwise the remaining lines joined by newlines.
pub fn line_corrections(text: &str, rules: &LineRuleSet) -> FilterVerdict {
    let mut total = 0usize;
    let mut flagged = 0usize;
    let mut kept: Vec<&str> = Vec::new();
    for line in text.split('\n') {
        let n = words(line).count();
        total += n;
        if rules.flag(line).is_some() {
            flagged += n;
        } else {
            kept.push(line);
        }
    }
    if flagged as f64 > rules.doc_discard_budget * total as f64 {
        FilterVerdict::Reject(RejectReason::LineCorrectionBudget)
    } else if kept.len() == text.split('\n').count() {
        FilterVerdict::Keep
    } else {
        FilterVerdict::Edited(kept.join("\n"))
    }
}

/// Applies [`line_corrections`] and returns the resulting text, or `None`
/// when the document is rejected.
pub fn corrected_text(text: &str, rules: &LineRuleSet) -> Option<String> {
    match line_corrections(text, rules) {
        FilterVerdict::Keep => Some(text.to_string()),
        FilterVerdict::Edited(t) => Some(t),
        FilterVerdict::Reject(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    fn filler(words: usize) -> String {
        let base = ["the", "quiet", "harbour", "town", "wakes", "slowly", "under", "grey", "skies", "today"];
        let ws: Vec<&str> = base.iter().copied().cycle().take(words).collect();
        ws.chunks(10).map(|c| c.join(" ")).collect::<Vec<_>>().join("\n")
    }

    #[test]
    fn individual_rules() {
        let r = LineRuleSet::default();
        assert_eq!(r.flag("3 likes"), Some(LineFlag::Counter));
        assert_eq!(r.flag("1.2K views"), Some(LineFlag::Counter));
        assert_eq!(r.flag("READ THIS NOW MORE CAPS HERE"), Some(LineFlag::Uppercase));
        assert_eq!(r.flag("12/03/2024 - 14:00"), Some(LineFlag::NonAlphabetic));
        assert_eq!(r.flag("Menu"), Some(LineFlag::SingleWord));
        assert_eq!(r.flag("Sign in to your account"), Some(LineFlag::Boilerplate));
        assert_eq!(r.flag("Sign-in"), Some(LineFlag::SingleWord));
        assert_eq!(r.flag("Sign-in here please"), Some(LineFlag::Boilerplate));
        assert_eq!(r.flag("The full story. Read more..."), Some(LineFlag::Boilerplate));
        assert_eq!(r.flag("You have 3 items in cart now"), Some(LineFlag::Boilerplate));
        assert_eq!(r.flag("Signing into the river was hard"), None);
        assert_eq!(r.flag("NASA and ESA met in Paris last week"), None);
        assert_eq!(r.flag(""), None);
    }

    #[test]
    fn long_lines_skip_edit_patterns() {
        let r = LineRuleSet::default();
        let line = "sign in and then walk along the river for at least an hour";
        assert!(words(line).count() > 10);
        assert_eq!(r.flag(line), None);
    }

    #[test]
    fn budget_boundary() {
        let r = LineRuleSet::default();
        // 94 prose words plus 6 single-word lines: 6% flagged
        let over = format!("{}\n{}", filler(94), ["Home"; 6].join("\n"));
        assert_eq!(line_corrections(&over, &r), FilterVerdict::Reject(RejectReason::LineCorrectionBudget));
        // 95 + 5: exactly 5% is within budget
        let at = format!("{}\n{}", filler(95), ["Home"; 5].join("\n"));
        assert_eq!(line_corrections(&at, &r), FilterVerdict::Edited(filler(95)));
        // 49 of 1000 kept, 51 of 1000 rejected
        let under = format!("{}\n{}", filler(951), ["Home"; 49].join("\n"));
        assert!(matches!(line_corrections(&under, &r), FilterVerdict::Edited(_)));
        let above = format!("{}\n{}", filler(949), ["Home"; 51].join("\n"));
        assert!(matches!(line_corrections(&above, &r), FilterVerdict::Reject(_)));
    }

    #[test]
    fn clean_text_is_kept() {
        assert_eq!(line_corrections(&filler(40), &LineRuleSet::default()), FilterVerdict::Keep);
    }

    #[test]
    fn pattern_list_parsing() {
        let p = parse_pattern_list("# c\n\nstart: Sign In\nany:cookie policy\n").unwrap();
        assert_eq!(p, vec![
            ShortLinePattern::new(PatternPosition::Start, "sign in"),
            ShortLinePattern::new(PatternPosition::Anywhere, "cookie policy"),
        ]);
        assert_eq!(parse_pattern_list("middle:x"), Err(LineRuleError::UnknownPosition { line: 1 }));
        assert_eq!(parse_pattern_list("x"), Err(LineRuleError::UnknownPosition { line: 1 }));
    }

    #[test]
    fn budget_validation() {
        assert!(LineRuleSet::default().with_budget(0.0).is_err());
        assert!(LineRuleSet::default().with_budget(1.5).is_err());
        assert_eq!(LineRuleSet::default().with_budget(1.0).unwrap().budget(), 1.0);
    }

    fn doc() -> impl Strategy<Value = String> {
        let line = prop::sample::select(vec![
            "the tide came in over the flats",
            "3 likes",
            "Share",
            "READ ALL ABOUT IT",
            "--- 42 ---",
            "sign in to comment",
            "",
            "  ",
            "a long calm line that keeps going past the ten word mark for sure",
            "Continue reading",
        ]);
        prop::collection::vec(line, 0..40).prop_map(|ls| ls.join("\n"))
    }

    proptest! {
        #[test]
        fn idempotent_and_subsequence(text in doc()) {
            let rules = LineRuleSet::default().with_budget(1.0).unwrap();
            let out = corrected_text(&text, &rules).unwrap();
            prop_assert_eq!(line_corrections(&out, &rules), FilterVerdict::Keep);
            let mut input = text.split('\n');
            for line in out.split('\n').filter(|l| !out.is_empty() || !l.is_empty()) {
                prop_assert!(input.any(|l| l == line));
            }
        }
    }
}
