//! Runs the stages over one part: ingest, document gates, then the two
//! corpus-level deduplication passes.
//!
//! Document gates run on a worker pool; results are collected back in input
//! order, so output never depends on the number of workers.

use std::collections::HashMap;
use std::fs;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use webrefine_core::exact::{apply_strategy, find_duplicate_ranges, map_ranges_to_chars, tokenize_reversible, StrategyOutcome};
use webrefine_core::fuzzy::{
    bucket_keys, cluster_duplicates, normalize_for_dedup, normalize_tokens_with_offsets, select_survivors,
    shingle_hashes, LshIndex, MinHashSignature, MinHasher,
};
use webrefine_core::lang::{language_gate, LangError};
use webrefine_core::quality::{
    line_corrections, parse_pattern_list, quality_gate, quality_profile, repetition_gate, repetition_profile,
    LineRuleSet, QualityThresholds, RepetitionThresholds,
};
use webrefine_core::url::{
    parse_list, url_gate, DomainBlocklist, DomainSet, ScoringWordLists, DEFAULT_HARD_WORDS, DEFAULT_SOFT_WORDS,
    DEFAULT_STRICT_WORDS,
};
use webrefine_core::{Document, FilterVerdict, RejectReason, Verdict};

use crate::candidates::to_candidate;
use crate::config::{ConfigError, PipelineConfig, Stage};
use crate::extract::{extractor_from_spec, Extractor};
use crate::language::{LanguageBackend, LanguageError};
use crate::records::{byte_to_char_range, read_records, write_records, Record, RecordError};
use crate::registry::{canonical_url, url_dedup_gate, KeptUrlRegistry, RegistryError};
use crate::report::{emit_report, IngestSummary, Issue, Report, ReportError, ReportFormat, StageReport};
use crate::signatures::{SignatureEntry, SignatureError, SignatureFile};
use crate::warc::iter_warc;

/// Environment variable read for the worker count when none is configured.
pub const WORKERS_ENV: &str = "WEBREFINE_WORKERS";

pub const INGEST_STAGE: &str = "ingest";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("input {path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Records(#[from] RecordError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error(transparent)]
    Signatures(#[from] SignatureError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("writing {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl PipelineError {
    /// 2 for configuration problems, 3 for unusable inputs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Input { .. }
            | PipelineError::Records(_)
            | PipelineError::Registry(_)
            | PipelineError::Signatures(_) => 3,
            _ => 1,
        }
    }
}

/// Lists, models and thresholds loaded once per run.
pub struct Resources {
    pub blocklist: DomainBlocklist,
    pub word_lists: ScoringWordLists,
    pub hq_domains: DomainSet,
    pub extractor: Box<dyn Extractor>,
    pub language: LanguageBackend,
    pub repetition: RepetitionThresholds,
    pub quality: QualityThresholds,
    pub line_rules: LineRuleSet,
}

fn read_text(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_owned(), source })
}

impl Resources {
    /// Blocklist categories without a `<dir>/<category>/domains` file are
    /// skipped.
    pub fn load(cfg: &PipelineConfig) -> Result<Self, ConfigError> {
        let uf = &cfg.url_filter;
        let mut blocklist = DomainBlocklist::new();
        if let Some(dir) = &uf.blocklist_dir {
            if !dir.is_dir() {
                return Err(ConfigError::Invalid(format!("blocklist directory {} not found", dir.display())));
            }
            for category in &uf.block_categories {
                let file = dir.join(category).join("domains");
                if file.is_file() {
                    for domain in parse_list(&read_text(&file)?) {
                        blocklist.insert(domain, category);
                    }
                }
            }
        }
        if let Some(allow) = &uf.allowlist {
            for domain in parse_list(&read_text(allow)?) {
                blocklist.remove(domain);
            }
        }

        let word_file = |name: &str, bundled: &str| -> Result<String, ConfigError> {
            match &uf.wordlists_dir {
                Some(dir) if dir.join(name).is_file() => read_text(&dir.join(name)),
                _ => Ok(bundled.to_owned()),
            }
        };
        let mut word_lists = ScoringWordLists::from_lists(
            &word_file("strict_subword.txt", DEFAULT_STRICT_WORDS)?,
            &word_file("hard_whole_word.txt", DEFAULT_HARD_WORDS)?,
            &word_file("soft_words.txt", DEFAULT_SOFT_WORDS)?,
        );
        word_lists.soft_threshold = uf.soft_threshold;

        let hq_domains = match &uf.hq_exclusions {
            Some(path) => DomainSet::from_list(&read_text(path)?),
            None => DomainSet::default_hq(),
        };

        let extractor =
            extractor_from_spec(&cfg.extraction.extractor).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let language =
            LanguageBackend::from_spec(&cfg.language.classifier).map_err(|e| ConfigError::Invalid(e.to_string()))?;

        let lf = &cfg.line_filter;
        let mut line_rules =
            LineRuleSet::default().with_budget(lf.budget).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        line_rules.max_short_line_words = lf.max_short_line_words;
        if let Some(path) = &lf.patterns {
            line_rules.patterns = parse_pattern_list(&read_text(path)?)
                .map_err(|e| ConfigError::Invalid(format!("{}: {e}", path.display())))?;
        }
        if let Some(path) = &lf.engagement_words {
            line_rules.engagement_words = parse_list(&read_text(path)?).map(str::to_lowercase).collect();
        }

        Ok(Self {
            blocklist,
            word_lists,
            hq_domains,
            extractor,
            language,
            repetition: cfg.repetition.thresholds(),
            quality: cfg.quality.thresholds(),
            line_rules,
        })
    }
}

/// A document removed by a stage.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rejection {
    pub id: String,
    pub url: String,
    pub stage: String,
    pub reason: RejectReason,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

/// Everything recorded while stages run.
#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub stages: Vec<StageReport>,
    pub rejections: Vec<Rejection>,
    pub issues: Vec<Issue>,
}

enum Step {
    Keep(Record),
    Reject(Record, RejectReason, String),
    Malformed(Record, String),
}

fn bytes(records: &[Record]) -> u64 {
    records.iter().map(|r| r.document.byte_len() as u64).sum()
}

fn set_content(record: &mut Record, text: String) {
    let doc = std::mem::replace(&mut record.document, Document::new("", "", ""));
    record.document = doc.with_content(text);
}

fn set_token_count(record: &mut Record, tokens: u64) {
    let doc = std::mem::replace(&mut record.document, Document::new("", "", ""));
    record.document = doc.with_token_count(tokens);
}

fn token_count(text: &str) -> u64 {
    normalize_tokens_with_offsets(text).len() as u64
}

impl RunLog {
    /// Tallies stage results in input order and returns the kept records.
    fn settle(&mut self, mut report: StageReport, steps: Vec<Step>) -> Vec<Record> {
        let stage = report.stats.stage.clone();
        let mut kept = Vec::with_capacity(steps.len());
        for step in steps {
            match step {
                Step::Keep(r) => kept.push(r),
                Step::Reject(r, reason, detail) => {
                    *report.rejected.entry(reason).or_insert(0) += 1;
                    self.rejections.push(Rejection {
                        id: r.document.id().to_owned(),
                        url: r.document.url().to_owned(),
                        stage: stage.clone(),
                        reason,
                        detail,
                    });
                }
                Step::Malformed(r, message) => {
                    report.malformed += 1;
                    self.issues.push(Issue { stage: stage.clone(), id: Some(r.document.id().to_owned()), message });
                }
            }
        }
        report.stats.docs_out = kept.len() as u64;
        report.stats.bytes_out = bytes(&kept);
        self.stages.push(report);
        kept
    }

    fn gate<F>(&mut self, stage: Stage, records: Vec<Record>, f: F) -> Vec<Record>
    where
        F: Fn(usize, Record) -> Step + Sync + Send,
    {
        let mut report = StageReport::new(stage.name());
        report.stats.docs_in = records.len() as u64;
        report.stats.bytes_in = bytes(&records);
        let steps: Vec<Step> = records.into_par_iter().enumerate().map(|(i, r)| f(i, r)).collect();
        self.settle(report, steps)
    }
}

fn verdict_step(mut r: Record, stage: Stage, v: Verdict, note: String) -> Step {
    match v {
        Verdict::Keep => {
            r.document.annotate(stage.name(), note);
            Step::Keep(r)
        }
        Verdict::Reject(reason) => Step::Reject(r, reason, note),
    }
}

/// Configured stages plus the resources they need.
pub struct Pipeline {
    config: PipelineConfig,
    resources: Resources,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let resources = Resources::load(&config)?;
        Ok(Self { config, resources })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    /// Runs every enabled stage, in canonical order.
    pub fn run_stages(
        &self,
        mut records: Vec<Record>,
        registry: &KeptUrlRegistry,
        log: &mut RunLog,
    ) -> Result<Vec<Record>, PipelineError> {
        for stage in Stage::ALL {
            if self.config.enabled(stage) {
                records = self.run_stage(stage, records, registry, log)?;
            }
        }
        Ok(records)
    }

    /// Runs one stage regardless of whether it is enabled.
    pub fn run_stage(
        &self,
        stage: Stage,
        records: Vec<Record>,
        registry: &KeptUrlRegistry,
        log: &mut RunLog,
    ) -> Result<Vec<Record>, PipelineError> {
        let res = &self.resources;
        let cfg = &self.config;
        Ok(match stage {
            Stage::UrlFilter => log.gate(stage, records, |_, r| {
                match url_gate(r.document.url(), &res.blocklist, &res.word_lists, &res.hq_domains) {
                    Ok(v) => {
                        let words: Vec<&str> = v.matches.iter().map(|m| m.word.as_str()).collect();
                        let host = webrefine_core::url::normalize_url(r.document.url()).map(|n| n.host).unwrap_or_default();
                        let note = match v.verdict.reason() {
                            Some(RejectReason::UrlBlocklisted) => {
                                let domain = res.blocklist.matching(&host).unwrap_or_default();
                                format!("{domain} ({})", res.blocklist.category_of(domain).unwrap_or("unknown"))
                            }
                            Some(RejectReason::UrlHqExcluded) => res.hq_domains.matching(&host).unwrap_or_default().to_owned(),
                            _ if words.is_empty() => "clean".into(),
                            _ => words.join(","),
                        };
                        verdict_step(r, stage, v.verdict, note)
                    }
                    Err(e) => Step::Malformed(r, format!("malformed URL: {e}")),
                }
            }),
            Stage::UrlDedup => log.gate(stage, records, |_, r| match url_dedup_gate(r.document.url(), registry) {
                Ok(v) => {
                    let note = if v.is_keep() { "new" } else { "kept by an earlier part" };
                    verdict_step(r, stage, v, note.into())
                }
                Err(e) => Step::Malformed(r, format!("malformed URL: {e}")),
            }),
            Stage::TextExtraction => log.gate(stage, records, |_, mut r| match res.extractor.extract(r.document.content()) {
                Ok(out) if out.discarded => Step::Reject(r, RejectReason::ExtractionEmpty, out.extractor_id),
                Ok(out) => {
                    set_content(&mut r, out.text);
                    r.document.annotate(stage.name(), out.extractor_id);
                    Step::Keep(r)
                }
                Err(e) => Step::Malformed(r, e.to_string()),
            }),
            Stage::LanguageId => {
                let texts: Vec<&str> = records.iter().map(|r| r.document.content()).collect();
                let scores = res.language.top_scores(&texts)?;
                log.gate(stage, records, |i, r| match &scores[i] {
                    Ok(top) => {
                        let note = format!("{}:{:.4}", top.language, top.score);
                        verdict_step(r, stage, language_gate(top, &cfg.language.target, cfg.language.threshold), note)
                    }
                    Err(LangError::EmptyText) => Step::Reject(r, RejectReason::LanguageScore, "no text".into()),
                })
            }
            Stage::Repetition => log.gate(stage, records, |_, r| {
                let p = repetition_profile(r.document.content());
                let note = format!("dup_lines={:.4}", p.dup_line_frac);
                verdict_step(r, stage, repetition_gate(&p, &res.repetition), note)
            }),
            Stage::Quality => log.gate(stage, records, |_, r| {
                let p = quality_profile(r.document.content());
                let note = format!("words={}", p.word_count);
                verdict_step(r, stage, quality_gate(&p, &res.quality), note)
            }),
            Stage::LineCorrections => log.gate(stage, records, |_, mut r| {
                match line_corrections(r.document.content(), &res.line_rules) {
                    FilterVerdict::Keep => {
                        r.document.annotate(stage.name(), "removed 0 lines");
                        Step::Keep(r)
                    }
                    FilterVerdict::Edited(text) => {
                        let removed = r.document.content().lines().count() - text.lines().count();
                        set_content(&mut r, text);
                        r.document.annotate(stage.name(), format!("removed {removed} lines"));
                        Step::Keep(r)
                    }
                    FilterVerdict::Reject(reason) => Step::Reject(r, reason, String::new()),
                }
            }),
            Stage::FuzzyDedup => self.fuzzy_dedup(records, None, log)?,
            Stage::ExactDedup => self.exact_dedup(records, log),
        })
    }

    pub fn hasher(&self) -> Result<MinHasher, ConfigError> {
        MinHasher::new(self.config.fuzzy.params(self.config.seed)).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Token count and signature of every record; documents without tokens
    /// get no signature.
    pub fn sign(&self, records: &[Record]) -> Result<SignatureFile, ConfigError> {
        let hasher = self.hasher()?;
        let entries = records
            .par_iter()
            .map(|r| {
                let (tokens, signature) = sign_text(&hasher, r.document.content());
                SignatureEntry { id: r.document.id().to_owned(), tokens, signature }
            })
            .collect();
        Ok(SignatureFile { params: *hasher.params(), entries })
    }

    /// Clusters near-duplicates and keeps one document per cluster.
    /// Signatures found in `cache` by document id are reused.
    pub fn fuzzy_dedup(
        &self,
        records: Vec<Record>,
        cache: Option<&SignatureFile>,
        log: &mut RunLog,
    ) -> Result<Vec<Record>, PipelineError> {
        let hasher = self.hasher()?;
        let params = *hasher.params();
        let cached: HashMap<&str, &SignatureEntry> = match cache {
            Some(c) if c.params != params => return Err(SignatureError::ParamMismatch.into()),
            Some(c) => c.entries.iter().map(|e| (e.id.as_str(), e)).collect(),
            None => HashMap::new(),
        };
        let prepared: Vec<(u64, Option<Vec<u128>>)> = records
            .par_iter()
            .map(|r| match cached.get(r.document.id()) {
                Some(e) => (e.tokens, e.signature.as_ref().map(bucket_keys)),
                None => {
                    let (tokens, sig) = sign_text(&hasher, r.document.content());
                    (tokens, sig.as_ref().map(bucket_keys))
                }
            })
            .collect();

        let mut index = LshIndex::new(params);
        for (i, (_, keys)) in prepared.iter().enumerate() {
            if let Some(keys) = keys {
                index.insert_keys(i as u64, keys).map_err(|e| ConfigError::Invalid(e.to_string()))?;
            }
        }
        let clusters = cluster_duplicates(&index);
        drop(index);
        let survivors = select_survivors(&clusters, self.config.fuzzy.policy(self.config.seed));
        let mut cluster_of: HashMap<u64, (usize, u64)> = HashMap::new();
        for c in clusters.clusters() {
            let keeper = *c.iter().find(|id| survivors.contains(id)).expect("one survivor per cluster");
            for &id in c {
                cluster_of.insert(id, (c.len(), keeper));
            }
        }

        let mut report = StageReport::new(Stage::FuzzyDedup.name());
        report.stats.docs_in = records.len() as u64;
        report.stats.bytes_in = bytes(&records);
        report.stats.tokens_in = Some(prepared.iter().map(|p| p.0).sum());
        let ids: Vec<String> = records.iter().map(|r| r.document.id().to_owned()).collect();
        let mut tokens_out = 0;
        let name = Stage::FuzzyDedup.name();
        let steps = records
            .into_iter()
            .zip(&prepared)
            .enumerate()
            .map(|(i, (mut r, &(tokens, _)))| {
                let i = i as u64;
                set_token_count(&mut r, tokens);
                match cluster_of.get(&i) {
                    Some(&(_, keeper)) if keeper != i => Step::Reject(
                        r,
                        RejectReason::FuzzyDuplicate,
                        format!("near-duplicate of {}", ids[keeper as usize]),
                    ),
                    found => {
                        tokens_out += tokens;
                        let note = found.map_or("no tokens".to_owned(), |(size, _)| format!("cluster of {size}"));
                        r.document.annotate(name, note);
                        Step::Keep(r)
                    }
                }
            })
            .collect();
        report.stats.tokens_out = Some(tokens_out);
        Ok(log.settle(report, steps))
    }

    /// Finds token runs repeated anywhere in the batch and applies the
    /// configured strategy to every document holding one.
    pub fn exact_dedup(&self, records: Vec<Record>, log: &mut RunLog) -> Vec<Record> {
        let exact = &self.config.exact;
        let strategy = exact.strategy_config();
        let (spans, tokens_in) = {
            let contents: Vec<&str> = records.iter().map(|r| r.document.content()).collect();
            let corpus = tokenize_reversible(&contents);
            let ranges = find_duplicate_ranges(&corpus, exact.min_match);
            let tokens: Vec<u64> = (0..corpus.num_docs()).map(|d| corpus.doc_token_count(d) as u64).collect();
            (map_ranges_to_chars(&corpus, &ranges), tokens)
        };

        let mut report = StageReport::new(Stage::ExactDedup.name());
        report.stats.docs_in = records.len() as u64;
        report.stats.bytes_in = bytes(&records);
        report.stats.tokens_in = Some(tokens_in.iter().sum());
        let name = Stage::ExactDedup.name();
        let steps: Vec<(Step, u64)> = records
            .into_par_iter()
            .zip(spans.into_par_iter())
            .zip(tokens_in.into_par_iter())
            .map(|((mut r, spans), tokens)| {
                let dup_bytes: usize = spans.iter().map(|s| s.len()).sum();
                let dup_chars: usize =
                    spans.iter().map(|s| byte_to_char_range(r.document.content(), s).len()).sum();
                match apply_strategy(r.document.content(), &spans, &strategy) {
                    Ok(StrategyOutcome::Dropped) => (
                        Step::Reject(r, RejectReason::ExactDupResidue, format!("{dup_chars} duplicated chars")),
                        0,
                    ),
                    Ok(StrategyOutcome::Kept { content, loss_mask }) => {
                        let mut tokens = tokens;
                        if content.len() != r.document.byte_len() {
                            tokens = token_count(&content);
                            set_content(&mut r, content);
                        }
                        set_token_count(&mut r, tokens);
                        r.loss_mask =
                            loss_mask.iter().map(|m| byte_to_char_range(r.document.content(), m)).collect();
                        let note = if dup_bytes == 0 {
                            "no duplicates".to_owned()
                        } else {
                            format!("{} {dup_chars} chars", exact.strategy.as_str())
                        };
                        r.document.annotate(name, note);
                        (Step::Keep(r), tokens)
                    }
                    Err(e) => (Step::Malformed(r, e.to_string()), 0),
                }
            })
            .collect();
        report.stats.tokens_out = Some(steps.iter().map(|s| s.1).sum());
        log.settle(report, steps.into_iter().map(|s| s.0).collect())
    }

    /// Ingests, filters and deduplicates the configured part, then writes
    /// the survivors and the report and commits kept URLs to the registry.
    pub fn run_part(&self) -> Result<PartOutcome, PipelineError> {
        let io_cfg = &self.config.io;
        let files = expand_inputs(&io_cfg.inputs)?;
        let mut registry = match &io_cfg.registry {
            Some(path) => KeptUrlRegistry::load(path)?,
            None => KeptUrlRegistry::in_memory(),
        };
        let ingested = ingest(&files, io_cfg.dump_id.as_deref(), io_cfg.part, io_cfg.parts)?;
        let mut log = RunLog { stages: vec![ingested.stage], issues: ingested.issues, rejections: Vec::new() };
        let survivors = self.run_stages(ingested.records, &registry, &mut log)?;

        if let Some(path) = &io_cfg.output {
            write_record_file(path, &survivors)?;
        }
        let mut report = Report::new(io_cfg.part, io_cfg.parts);
        report.input = Some(ingested.summary);
        report.stages = log.stages;
        report.issues = log.issues;
        if let Some(path) = self.config.report_path() {
            let json = emit_report(&report, ReportFormat::Json)?;
            write_file(&path, json.as_bytes())?;
        }
        registry.commit(survivors.iter().filter_map(|r| canonical_url(r.document.url()).ok()))?;
        Ok(PartOutcome { survivors, report, rejections: log.rejections })
    }
}

fn sign_text(hasher: &MinHasher, text: &str) -> (u64, Option<MinHashSignature>) {
    let tokens = normalize_for_dedup(text).into_tokens();
    let hashes = shingle_hashes(&tokens, hasher.params().ngram);
    (tokens.len() as u64, hasher.sign_hashes(&hashes).ok())
}

pub struct PartOutcome {
    pub survivors: Vec<Record>,
    pub report: Report,
    pub rejections: Vec<Rejection>,
}

/// Expands files, directories (their files, not recursively) and glob
/// patterns into a sorted list without repeats.
pub fn expand_inputs(patterns: &[String]) -> Result<Vec<PathBuf>, PipelineError> {
    let mut out = Vec::new();
    for pattern in patterns {
        let path = Path::new(pattern);
        if path.is_dir() {
            let entries = fs::read_dir(path)
                .map_err(|e| PipelineError::Input { path: path.to_owned(), message: e.to_string() })?;
            for entry in entries {
                let entry =
                    entry.map_err(|e| PipelineError::Input { path: path.to_owned(), message: e.to_string() })?;
                if entry.path().is_file() {
                    out.push(entry.path());
                }
            }
        } else if path.exists() {
            out.push(path.to_owned());
        } else {
            let matches = glob::glob(pattern)
                .map_err(|e| PipelineError::Input { path: path.to_owned(), message: e.to_string() })?;
            let before = out.len();
            for m in matches {
                let m = m.map_err(|e| PipelineError::Input { path: e.path().to_owned(), message: e.to_string() })?;
                if m.is_file() {
                    out.push(m);
                }
            }
            if out.len() == before {
                return Err(PipelineError::Input { path: path.to_owned(), message: "no such file".into() });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The dump an archive belongs to: the name of its directory.
pub fn dump_of(path: &Path) -> String {
    path.parent()
        .and_then(Path::file_name)
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dump".into())
}

pub fn document_id(dump: &str, ordinal: u64) -> String {
    format!("{dump}/{ordinal:010}")
}

pub struct Ingested {
    pub records: Vec<Record>,
    pub stage: StageReport,
    pub summary: IngestSummary,
    pub issues: Vec<Issue>,
}

enum Entry {
    Page(crate::candidates::Candidate),
    Broken(String),
}

/// Reads every archive and keeps the HTML responses of part `part`.
///
/// Within a dump, responses are numbered in file order, files taken in
/// path order; response `o` belongs to part `o % parts`. An unreadable
/// record also takes a number and is counted as malformed in its part.
pub fn ingest(files: &[PathBuf], dump_override: Option<&str>, part: usize, parts: usize) -> Result<Ingested, PipelineError> {
    let parts = parts.max(1);
    let per_file: Vec<(Vec<Entry>, u64, crate::candidates::SkipCounts)> = files
        .par_iter()
        .map(|path| {
            let file = fs::File::open(path)
                .map_err(|e| PipelineError::Input { path: path.clone(), message: e.to_string() })?;
            let mut entries = Vec::new();
            let mut skipped = crate::candidates::SkipCounts::default();
            let mut seen = 0;
            for rec in iter_warc(BufReader::new(file)) {
                match rec {
                    Ok(rec) => {
                        seen += 1;
                        match to_candidate(&rec) {
                            Ok(c) => entries.push(Entry::Page(c)),
                            Err(reason) => skipped.add(reason),
                        }
                    }
                    Err(e) => entries.push(Entry::Broken(format!("{}: {e}", path.display()))),
                }
            }
            Ok((entries, seen, skipped))
        })
        .collect::<Result<_, PipelineError>>()?;

    let mut summary = IngestSummary { files: files.len() as u64, ..IngestSummary::default() };
    let mut stage = StageReport::new(INGEST_STAGE);
    let mut issues = Vec::new();
    let mut records = Vec::new();
    let mut next: HashMap<String, u64> = HashMap::new();
    for (path, (entries, seen, skipped)) in files.iter().zip(per_file) {
        let dump = dump_override.map_or_else(|| dump_of(path), str::to_owned);
        summary.warc_records += seen;
        let s = &mut summary.skipped;
        s.not_response += skipped.not_response;
        s.no_target_uri += skipped.no_target_uri;
        s.not_http += skipped.not_http;
        s.status += skipped.status;
        s.not_html += skipped.not_html;
        let counter = next.entry(dump.clone()).or_insert(0);
        for entry in entries {
            let ordinal = *counter;
            *counter += 1;
            let mine = (ordinal % parts as u64) as usize == part;
            match entry {
                Entry::Page(c) => {
                    summary.candidates += 1;
                    if mine {
                        let mut doc =
                            Document::new(document_id(&dump, ordinal), c.url, c.html).with_provenance(&dump, part as u32);
                        doc.annotate(INGEST_STAGE, format!("http {}", c.http_status));
                        records.push(Record::from(doc));
                    }
                }
                Entry::Broken(message) => {
                    summary.unreadable += 1;
                    if mine {
                        stage.malformed += 1;
                        issues.push(Issue {
                            stage: INGEST_STAGE.into(),
                            id: Some(document_id(&dump, ordinal)),
                            message,
                        });
                    }
                }
            }
        }
    }
    stage.stats.docs_in = records.len() as u64 + stage.malformed;
    stage.stats.docs_out = records.len() as u64;
    stage.stats.bytes_in = bytes(&records);
    stage.stats.bytes_out = stage.stats.bytes_in;
    Ok(Ingested { records, stage, summary, issues })
}

fn write_file(path: &Path, data: &[u8]) -> Result<(), PipelineError> {
    let fail = |source| PipelineError::Output { path: path.to_owned(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    fs::write(path, data).map_err(fail)
}

pub fn write_record_file(path: &Path, records: &[Record]) -> Result<(), PipelineError> {
    let fail = |source| PipelineError::Output { path: path.to_owned(), source };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    let mut out = BufWriter::new(fs::File::create(path).map_err(fail)?);
    write_records(&mut out, records)?;
    out.flush().map_err(fail)
}

pub fn read_record_file(path: &Path) -> Result<Vec<Record>, PipelineError> {
    let file = fs::File::open(path).map_err(|e| PipelineError::Input { path: path.to_owned(), message: e.to_string() })?;
    Ok(read_records(BufReader::new(file))?)
}

/// Worker count: the explicit value, else the environment variable, else
/// one per core.
pub fn worker_count(configured: usize) -> usize {
    if configured > 0 {
        return configured;
    }
    std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()).filter(|&n| n > 0).unwrap_or(0)
}

/// Runs `f` on a dedicated pool of `workers` threads (0 for one per core).
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(workers))
        .build()
        .expect("thread pool");
    pool.install(f)
}
