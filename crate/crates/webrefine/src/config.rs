//! Pipeline configuration, loaded from TOML.
//!
//! Every section is optional and unknown keys are errors. Relative paths
//! are resolved against the directory holding the configuration file.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use webrefine_core::exact::{Strategy, StrategyConfig};
use webrefine_core::fuzzy::{MinHashParams, SurvivorPolicy};
use webrefine_core::lang::DEFAULT_THRESHOLD;
use webrefine_core::quality::{QualityThresholds, RepetitionThresholds};
use webrefine_core::url::DEFAULT_BLOCK_CATEGORIES;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("stage {later} is listed after {earlier}, but must run before it")]
    StageOrder { earlier: Stage, later: Stage },
    #[error("stage {0} is listed twice")]
    DuplicateStage(Stage),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Stages after ingest, in the only order they may run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    UrlFilter,
    UrlDedup,
    TextExtraction,
    LanguageId,
    Repetition,
    Quality,
    LineCorrections,
    FuzzyDedup,
    ExactDedup,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::UrlFilter,
        Stage::UrlDedup,
        Stage::TextExtraction,
        Stage::LanguageId,
        Stage::Repetition,
        Stage::Quality,
        Stage::LineCorrections,
        Stage::FuzzyDedup,
        Stage::ExactDedup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::UrlFilter => "url_filter",
            Stage::UrlDedup => "url_dedup",
            Stage::TextExtraction => "text_extraction",
            Stage::LanguageId => "language_id",
            Stage::Repetition => "repetition",
            Stage::Quality => "quality",
            Stage::LineCorrections => "line_corrections",
            Stage::FuzzyDedup => "fuzzy_dedup",
            Stage::ExactDedup => "exact_dedup",
        }
    }

    /// Whether the stage gates whole documents rather than deduplicating.
    pub fn is_document_level(self) -> bool {
        self < Stage::FuzzyDedup
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IoConfig {
    /// Archive paths or glob patterns.
    pub inputs: Vec<String>,
    pub output: Option<PathBuf>,
    /// Defaults to the output path with a `.report.json` extension.
    pub report: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    /// Overrides the dump label, which otherwise is each input's parent
    /// directory name.
    pub dump_id: Option<String>,
    pub part: usize,
    pub parts: usize,
    /// Worker threads; 0 picks one per core.
    pub workers: usize,
}

impl Default for IoConfig {
    fn default() -> Self {
        Self {
            inputs: Vec::new(),
            output: None,
            report: None,
            registry: None,
            dump_id: None,
            part: 0,
            parts: 1,
            workers: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UrlFilterConfig {
    /// Directory with one `<category>/domains` file per category.
    pub blocklist_dir: Option<PathBuf>,
    pub block_categories: Vec<String>,
    /// Directory with `strict_subword.txt`, `hard_whole_word.txt` and
    /// `soft_words.txt`; missing files fall back to the bundled lists.
    pub wordlists_dir: Option<PathBuf>,
    pub hq_exclusions: Option<PathBuf>,
    /// Domains removed from the blocklist after loading.
    pub allowlist: Option<PathBuf>,
    pub soft_threshold: usize,
}

impl Default for UrlFilterConfig {
    fn default() -> Self {
        Self {
            blocklist_dir: None,
            block_categories: DEFAULT_BLOCK_CATEGORIES.iter().map(|c| c.to_string()).collect(),
            wordlists_dir: None,
            hq_exclusions: None,
            allowlist: None,
            soft_threshold: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExtractionConfig {
    /// `baseline` or `external:<command>`.
    pub extractor: String,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self { extractor: "baseline".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LanguageConfig {
    pub target: String,
    pub threshold: f64,
    /// `builtin` or `external:<command>`.
    pub classifier: String,
}

impl Default for LanguageConfig {
    fn default() -> Self {
        Self { target: "en".into(), threshold: DEFAULT_THRESHOLD, classifier: "builtin".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RepetitionConfig {
    pub dup_line_frac: f64,
    pub dup_para_frac: f64,
    pub dup_line_char_frac: f64,
    pub dup_para_char_frac: f64,
    /// Top 2-, 3- and 4-gram character shares.
    pub top_ngram_char_frac: [f64; 3],
    /// Duplicated 5- to 10-gram character shares.
    pub dup_ngram_char_frac: [f64; 6],
}

impl Default for RepetitionConfig {
    fn default() -> Self {
        let t = RepetitionThresholds::default();
        Self {
            dup_line_frac: t.dup_line_frac,
            dup_para_frac: t.dup_para_frac,
            dup_line_char_frac: t.dup_line_char_frac,
            dup_para_char_frac: t.dup_para_char_frac,
            top_ngram_char_frac: t.top_ngram_char_frac,
            dup_ngram_char_frac: t.dup_ngram_char_frac,
        }
    }
}

impl RepetitionConfig {
    pub fn thresholds(&self) -> RepetitionThresholds {
        RepetitionThresholds {
            dup_line_frac: self.dup_line_frac,
            dup_para_frac: self.dup_para_frac,
            dup_line_char_frac: self.dup_line_char_frac,
            dup_para_char_frac: self.dup_para_char_frac,
            top_ngram_char_frac: self.top_ngram_char_frac,
            dup_ngram_char_frac: self.dup_ngram_char_frac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QualityConfig {
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

impl Default for QualityConfig {
    fn default() -> Self {
        let t = QualityThresholds::default();
        Self {
            min_words: t.min_words,
            max_words: t.max_words,
            min_mean_word_length: t.min_mean_word_length,
            max_mean_word_length: t.max_mean_word_length,
            max_symbol_word_ratio: t.max_symbol_word_ratio,
            max_bullet_line_frac: t.max_bullet_line_frac,
            max_ellipsis_line_frac: t.max_ellipsis_line_frac,
            min_alpha_word_frac: t.min_alpha_word_frac,
            min_stopword_hits: t.min_stopword_hits,
        }
    }
}

impl QualityConfig {
    pub fn thresholds(&self) -> QualityThresholds {
        QualityThresholds {
            min_words: self.min_words,
            max_words: self.max_words,
            min_mean_word_length: self.min_mean_word_length,
            max_mean_word_length: self.max_mean_word_length,
            max_symbol_word_ratio: self.max_symbol_word_ratio,
            max_bullet_line_frac: self.max_bullet_line_frac,
            max_ellipsis_line_frac: self.max_ellipsis_line_frac,
            min_alpha_word_frac: self.min_alpha_word_frac,
            min_stopword_hits: self.min_stopword_hits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineFilterConfig {
    pub budget: f64,
    pub max_short_line_words: usize,
    /// Pattern file with `start:`, `end:` and `any:` lines.
    pub patterns: Option<PathBuf>,
    pub engagement_words: Option<PathBuf>,
}

impl Default for LineFilterConfig {
    fn default() -> Self {
        Self { budget: 0.05, max_short_line_words: 10, patterns: None, engagement_words: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurvivorChoice {
    SmallestId,
    SeededRandom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FuzzyConfig {
    pub ngram: usize,
    pub hashes_per_bucket: usize,
    pub buckets: usize,
    pub survivor: SurvivorChoice,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        let p = MinHashParams::default();
        Self {
            ngram: p.ngram,
            hashes_per_bucket: p.hashes_per_bucket,
            buckets: p.buckets,
            survivor: SurvivorChoice::SmallestId,
        }
    }
}

impl FuzzyConfig {
    pub fn params(&self, seed: u64) -> MinHashParams {
        MinHashParams { ngram: self.ngram, hashes_per_bucket: self.hashes_per_bucket, buckets: self.buckets, seed }
    }

    pub fn policy(&self, seed: u64) -> SurvivorPolicy {
        match self.survivor {
            SurvivorChoice::SmallestId => SurvivorPolicy::SmallestId,
            SurvivorChoice::SeededRandom => SurvivorPolicy::SeededRandom(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExactConfig {
    /// Shortest duplicated run, in normalized word tokens.
    pub min_match: usize,
    pub strategy: Strategy,
    pub drop_partial_threshold: f64,
    pub min_remaining_chars: usize,
}

impl Default for ExactConfig {
    fn default() -> Self {
        let s = StrategyConfig::default();
        Self {
            min_match: 50,
            strategy: s.strategy,
            drop_partial_threshold: s.drop_partial_threshold,
            min_remaining_chars: s.min_remaining_chars,
        }
    }
}

impl ExactConfig {
    pub fn strategy_config(&self) -> StrategyConfig {
        StrategyConfig {
            strategy: self.strategy,
            min_remaining_chars: self.min_remaining_chars,
            drop_partial_threshold: self.drop_partial_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Enabled stages; must follow the canonical order.
    pub stages: Vec<Stage>,
    pub io: IoConfig,
    pub url_filter: UrlFilterConfig,
    pub extraction: ExtractionConfig,
    pub language: LanguageConfig,
    pub repetition: RepetitionConfig,
    pub quality: QualityConfig,
    pub line_filter: LineFilterConfig,
    pub fuzzy: FuzzyConfig,
    pub exact: ExactConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            stages: Stage::ALL.to_vec(),
            io: IoConfig::default(),
            url_filter: UrlFilterConfig::default(),
            extraction: ExtractionConfig::default(),
            language: LanguageConfig::default(),
            repetition: RepetitionConfig::default(),
            quality: QualityConfig::default(),
            line_filter: LineFilterConfig::default(),
            fuzzy: FuzzyConfig::default(),
            exact: ExactConfig::default(),
        }
    }
}

fn check(ok: bool, what: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid(what.to_owned()))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let mut cfg: PipelineConfig = toml::from_str(text)
            .map_err(|e| ConfigError::Parse { path: origin.to_owned(), source: Box::new(e) })?;
        if let Some(dir) = origin.parent() {
            cfg.resolve_paths(dir);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })?;
        Self::from_toml(&text, path)
    }

    pub fn enabled(&self, stage: Stage) -> bool {
        self.stages.contains(&stage)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        };
        fix(&mut self.io.output);
        fix(&mut self.io.report);
        fix(&mut self.io.registry);
        fix(&mut self.url_filter.blocklist_dir);
        fix(&mut self.url_filter.wordlists_dir);
        fix(&mut self.url_filter.hq_exclusions);
        fix(&mut self.url_filter.allowlist);
        fix(&mut self.line_filter.patterns);
        fix(&mut self.line_filter.engagement_words);
        for input in &mut self.io.inputs {
            if Path::new(input).is_relative() {
                *input = base.join(&*input).to_string_lossy().into_owned();
            }
        }
    }

    /// Checks stage order and value ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        for pair in self.stages.windows(2) {
            if pair[0] == pair[1] {
                return Err(ConfigError::DuplicateStage(pair[0]));
            }
            if pair[1] < pair[0] {
                return Err(ConfigError::StageOrder { earlier: pair[0], later: pair[1] });
            }
        }
        if let Some(dup) = self.stages.iter().find(|s| self.stages.iter().filter(|t| t == s).count() > 1) {
            return Err(ConfigError::DuplicateStage(*dup));
        }
        check(self.io.parts >= 1, "io.parts must be at least 1")?;
        check(self.io.part < self.io.parts, "io.part must be below io.parts")?;
        check((0.0..=1.0).contains(&self.language.threshold), "language.threshold must be in [0, 1]")?;
        check(
            self.line_filter.budget > 0.0 && self.line_filter.budget <= 1.0,
            "line_filter.budget must be in (0, 1]",
        )?;
        check(
            self.fuzzy.ngram >= 1 && self.fuzzy.hashes_per_bucket >= 1 && self.fuzzy.buckets >= 1,
            "fuzzy.ngram, fuzzy.hashes_per_bucket and fuzzy.buckets must be at least 1",
        )?;
        check(self.exact.min_match >= 1, "exact.min_match must be at least 1")?;
        check(
            (0.0..=1.0).contains(&self.exact.drop_partial_threshold),
            "exact.drop_partial_threshold must be in [0, 1]",
        )?;
        Ok(())
    }

    pub fn report_path(&self) -> Option<PathBuf> {
        self.io.report.clone().or_else(|| self.io.output.as_ref().map(|o| o.with_extension("report.json")))
    }
}
