//! Document representation and the rejection taxonomy shared by all stages.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

/// One web page's text plus its provenance.
///
/// `char_count` is kept in sync with `content`; the only way to change the
/// content is [`Document::with_content`], which recomputes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    id: String,
    url: String,
    dump_id: String,
    part_id: u32,
    content: String,
    char_count: usize,
    token_count: Option<u64>,
    annotations: BTreeMap<String, String>,
}

impl Document {
    pub fn new(id: impl Into<String>, url: impl Into<String>, content: impl Into<String>) -> Self {
        let content = content.into();
        let char_count = content.chars().count();
        Self {
            id: id.into(),
            url: url.into(),
            dump_id: String::new(),
            part_id: 0,
            content,
            char_count,
            token_count: None,
            annotations: BTreeMap::new(),
        }
    }

    pub fn with_provenance(mut self, dump_id: impl Into<String>, part_id: u32) -> Self {
        self.dump_id = dump_id.into();
        self.part_id = part_id;
        self
    }

    /// Replaces the content. Any previously computed token count is cleared
    /// since it described the old text.
    pub fn with_content(mut self, content: impl Into<String>) -> Self {
        self.content = content.into();
        self.char_count = self.content.chars().count();
        self.token_count = None;
        self
    }

    pub fn with_token_count(mut self, tokens: u64) -> Self {
        self.token_count = Some(tokens);
        self
    }

    /// Records a stage's verdict summary, replacing any earlier entry for the
    /// same stage.
    pub fn annotate(&mut self, stage: impl Into<String>, summary: impl Into<String>) {
        self.annotations.insert(stage.into(), summary.into());
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn url(&self) -> &str {
        &self.url
    }

    pub fn dump_id(&self) -> &str {
        &self.dump_id
    }

    pub fn part_id(&self) -> u32 {
        self.part_id
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    pub fn char_count(&self) -> usize {
        self.char_count
    }

    pub fn byte_len(&self) -> usize {
        self.content.len()
    }

    pub fn token_count(&self) -> Option<u64> {
        self.token_count
    }

    pub fn annotations(&self) -> &BTreeMap<String, String> {
        &self.annotations
    }
}

/// Why a document was removed. Every rejected document carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RejectReason {
    UrlBlocklisted,
    UrlWordScore,
    UrlHqExcluded,
    ExtractionEmpty,
    LanguageScore,
    LanguageMismatch,
    Repetition,
    Quality,
    LineCorrectionBudget,
    FuzzyDuplicate,
    ExactDupResidue,
    UrlRevisit,
}

impl RejectReason {
    pub const ALL: [RejectReason; 12] = [
        RejectReason::UrlBlocklisted,
        RejectReason::UrlWordScore,
        RejectReason::UrlHqExcluded,
        RejectReason::ExtractionEmpty,
        RejectReason::LanguageScore,
        RejectReason::LanguageMismatch,
        RejectReason::Repetition,
        RejectReason::Quality,
        RejectReason::LineCorrectionBudget,
        RejectReason::FuzzyDuplicate,
        RejectReason::ExactDupResidue,
        RejectReason::UrlRevisit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::UrlBlocklisted => "url_blocklisted",
            RejectReason::UrlWordScore => "url_word_score",
            RejectReason::UrlHqExcluded => "url_hq_excluded",
            RejectReason::ExtractionEmpty => "extraction_empty",
            RejectReason::LanguageScore => "language_score",
            RejectReason::LanguageMismatch => "language_mismatch",
            RejectReason::Repetition => "repetition",
            RejectReason::Quality => "quality",
            RejectReason::LineCorrectionBudget => "line_correction_budget",
            RejectReason::FuzzyDuplicate => "fuzzy_duplicate",
            RejectReason::ExactDupResidue => "exact_dup_residue",
            RejectReason::UrlRevisit => "url_revisit",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownReason;

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown rejection reason")
    }
}

impl core::error::Error for UnknownReason {}

impl FromStr for RejectReason {
    type Err = UnknownReason;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RejectReason::ALL
            .iter()
            .copied()
            .find(|r| r.as_str() == s)
            .ok_or(UnknownReason)
    }
}

/// Outcome of a pure gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Keep,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_keep(self) -> bool {
        matches!(self, Verdict::Keep)
    }

    pub fn reason(self) -> Option<RejectReason> {
        match self {
            Verdict::Keep => None,
            Verdict::Reject(r) => Some(r),
        }
    }
}

/// Outcome of a stage that may also rewrite the content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FilterVerdict {
    Keep,
    Edited(String),
    Reject(RejectReason),
}
