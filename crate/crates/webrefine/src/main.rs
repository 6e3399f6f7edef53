use std::fs;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use webrefine::config::{ConfigError, PipelineConfig, Stage};
use webrefine::pipeline::{
    expand_inputs, ingest, read_record_file, with_workers, write_record_file, Pipeline, PipelineError, RunLog,
    WORKERS_ENV,
};
use webrefine::registry::KeptUrlRegistry;
use webrefine::report::{emit_report, parse_report, Report, ReportFormat};
use webrefine::signatures::{read_signatures, write_signatures};
use webrefine_core::exact::Strategy;
use webrefine_core::fuzzy::match_probability;

#[derive(Parser)]
#[command(name = "webrefine", version, about = "Filter and deduplicate web-crawl archives")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read WARC archives and write their HTML responses as records.
    Ingest {
        /// Archive files, directories or glob patterns.
        #[arg(required = true)]
        inputs: Vec<String>,
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the document-level stages enabled in the configuration.
    Filter(StageArgs),
    /// Compute MinHash signatures into a cache file.
    Sign {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, short)]
        output: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Remove near-duplicate documents.
    DedupFuzzy {
        #[command(flatten)]
        stage: StageArgs,
        /// Signature cache written by `sign`.
        #[arg(long)]
        signatures: Option<PathBuf>,
    },
    /// Remove repeated token runs.
    DedupExact(StageArgs),
    /// Run every enabled stage over one part.
    Run {
        /// Archive files, directories or glob patterns; replace the configured inputs.
        inputs: Vec<String>,
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        /// Write rejected documents (id, stage, reason) as JSON lines.
        #[arg(long)]
        rejections: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Render a JSON report.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Print the LSH detection probability over a range of similarities.
    LshCurve {
        #[arg(long, default_value_t = 20)]
        hashes_per_bucket: usize,
        #[arg(long, default_value_t = 450)]
        buckets: usize,
        #[arg(long, default_value_t = 0.5)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Args)]
struct StageArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    output: PathBuf,
    /// Where to write the JSON report.
    #[arg(long)]
    report: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

/// Configuration file plus flags overriding its keys.
#[derive(Args)]
struct Common {
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated stages to enable, in order.
    #[arg(long, value_delimiter = ',')]
    stages: Option<Vec<String>>,
    #[arg(long)]
    part: Option<usize>,
    #[arg(long)]
    parts: Option<usize>,
    #[arg(long)]
    dump_id: Option<String>,
    #[arg(long)]
    registry: Option<PathBuf>,
    #[arg(long)]
    blocklist_dir: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    block_categories: Option<Vec<String>>,
    #[arg(long)]
    wordlists_dir: Option<PathBuf>,
    #[arg(long)]
    hq_exclusions: Option<PathBuf>,
    #[arg(long)]
    allowlist: Option<PathBuf>,
    /// `baseline` or `external:<command>`.
    #[arg(long)]
    extractor: Option<String>,
    #[arg(long)]
    language: Option<String>,
    #[arg(long)]
    lang_threshold: Option<f64>,
    /// `builtin` or `external:<command>`.
    #[arg(long)]
    classifier: Option<String>,
    #[arg(long)]
    min_match: Option<usize>,
    #[arg(long)]
    strategy: Option<Strategy>,
    #[arg(long)]
    drop_partial_threshold: Option<f64>,
    #[arg(long)]
    min_remaining_chars: Option<usize>,
}

fn parse_stage(name: &str) -> Result<Stage, ConfigError> {
    Stage::ALL
        .into_iter()
        .find(|s| s.name() == name.trim())
        .ok_or_else(|| ConfigError::Invalid(format!("unknown stage {name:?}")))
}

impl Common {
    fn config(&self) -> Result<PipelineConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        macro_rules! set {
            ($field:ident => $target:expr) => {
                if let Some(v) = &self.$field {
                    $target = v.clone().into();
                }
            };
        }
        set!(workers => cfg.io.workers);
        set!(seed => cfg.seed);
        set!(part => cfg.io.part);
        set!(parts => cfg.io.parts);
        set!(dump_id => cfg.io.dump_id);
        set!(registry => cfg.io.registry);
        set!(blocklist_dir => cfg.url_filter.blocklist_dir);
        set!(block_categories => cfg.url_filter.block_categories);
        set!(wordlists_dir => cfg.url_filter.wordlists_dir);
        set!(hq_exclusions => cfg.url_filter.hq_exclusions);
        set!(allowlist => cfg.url_filter.allowlist);
        set!(extractor => cfg.extraction.extractor);
        set!(language => cfg.language.target);
        set!(lang_threshold => cfg.language.threshold);
        set!(classifier => cfg.language.classifier);
        set!(min_match => cfg.exact.min_match);
        set!(strategy => cfg.exact.strategy);
        set!(drop_partial_threshold => cfg.exact.drop_partial_threshold);
        set!(min_remaining_chars => cfg.exact.min_remaining_chars);
        if let Some(names) = &self.stages {
            cfg.stages = names.iter().map(|n| parse_stage(n)).collect::<Result<_, _>>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn write_json_report(path: Option<&Path>, report: &Report) -> Result<(), PipelineError> {
    let human = emit_report(report, ReportFormat::Human)?;
    eprint!("{human}");
    if let Some(path) = path {
        let json = emit_report(report, ReportFormat::Json)?;
        fs::write(path, json).map_err(|source| PipelineError::Output { path: path.to_owned(), source })?;
    }
    Ok(())
}

/// Runs `stages` over a record file.
fn run_record_stages(args: &StageArgs, stages: &[Stage], signatures: Option<&Path>) -> Result<(), PipelineError> {
    let cfg = args.common.config()?;
    let workers = cfg.io.workers;
    let pipeline = Pipeline::new(cfg)?;
    let records = read_record_file(&args.input)?;
    let cache = match signatures {
        Some(path) => {
            let file = fs::File::open(path)
                .map_err(|e| PipelineError::Input { path: path.to_owned(), message: e.to_string() })?;
            Some(read_signatures(&mut BufReader::new(file))?)
        }
        None => None,
    };
    let registry = match &pipeline.config().io.registry {
        Some(path) => KeptUrlRegistry::load(path)?,
        None => KeptUrlRegistry::in_memory(),
    };
    let mut log = RunLog::default();
    let survivors = with_workers(workers, || -> Result<_, PipelineError> {
        let mut records = records;
        for &stage in stages {
            records = match (stage, &cache) {
                (Stage::FuzzyDedup, Some(c)) => pipeline.fuzzy_dedup(records, Some(c), &mut log)?,
                _ => pipeline.run_stage(stage, records, &registry, &mut log)?,
            };
        }
        Ok(records)
    })?;
    write_record_file(&args.output, &survivors)?;
    let mut report = Report::new(pipeline.config().io.part, pipeline.config().io.parts);
    report.stages = log.stages;
    report.issues = log.issues;
    write_json_report(args.report.as_deref(), &report)
}

fn execute(command: Command) -> Result<(), PipelineError> {
    match command {
        Command::Ingest { inputs, output, common } => {
            let cfg = common.config()?;
            let files = expand_inputs(&inputs)?;
            let got = with_workers(cfg.io.workers, || {
                ingest(&files, cfg.io.dump_id.as_deref(), cfg.io.part, cfg.io.parts)
            })?;
            write_record_file(&output, &got.records)?;
            let mut report = Report::new(cfg.io.part, cfg.io.parts);
            report.input = Some(got.summary);
            report.stages.push(got.stage);
            report.issues = got.issues;
            write_json_report(None, &report)
        }
        Command::Filter(args) => {
            let cfg = args.common.config()?;
            let stages: Vec<Stage> = cfg.stages.iter().copied().filter(|s| s.is_document_level()).collect();
            run_record_stages(&args, &stages, None)
        }
        Command::Sign { input, output, common } => {
            let cfg = common.config()?;
            let workers = cfg.io.workers;
            let pipeline = Pipeline::new(cfg)?;
            let records = read_record_file(&input)?;
            let file = with_workers(workers, || pipeline.sign(&records))?;
            let fail = |source| PipelineError::Output { path: output.clone(), source };
            let mut out = BufWriter::new(fs::File::create(&output).map_err(fail)?);
            write_signatures(&mut out, &file)?;
            out.flush().map_err(fail)?;
            Ok(())
        }
        Command::DedupFuzzy { stage, signatures } => {
            run_record_stages(&stage, &[Stage::FuzzyDedup], signatures.as_deref())
        }
        Command::DedupExact(args) => run_record_stages(&args, &[Stage::ExactDedup], None),
        Command::Run { inputs, output, report, rejections, common } => {
            let mut cfg = common.config()?;
            if !inputs.is_empty() {
                cfg.io.inputs = inputs;
            }
            if output.is_some() {
                cfg.io.output = output;
            }
            if report.is_some() {
                cfg.io.report = report;
            }
            if cfg.io.inputs.is_empty() {
                return Err(ConfigError::Invalid("no inputs given".into()).into());
            }
            let workers = cfg.io.workers;
            let pipeline = Pipeline::new(cfg)?;
            let outcome = with_workers(workers, || pipeline.run_part())?;
            if let Some(path) = rejections {
                let mut text = String::new();
                for r in &outcome.rejections {
                    text.push_str(&serde_json::to_string(r).expect("rejection serializes"));
                    text.push('\n');
                }
                fs::write(&path, text).map_err(|source| PipelineError::Output { path, source })?;
            }
            print!("{}", emit_report(&outcome.report, ReportFormat::Human)?);
            Ok(())
        }
        Command::Report { path, format } => {
            let text = fs::read_to_string(&path)
                .map_err(|e| PipelineError::Input { path: path.clone(), message: e.to_string() })?;
            let report = parse_report(&text)
                .map_err(|e| PipelineError::Input { path: path.clone(), message: e.to_string() })?;
            let format = match format {
                Format::Human => ReportFormat::Human,
                Format::Json => ReportFormat::Json,
            };
            print!("{}", emit_report(&report, format)?);
            Ok(())
        }
        Command::LshCurve { hashes_per_bucket, buckets, from, to, step } => {
            if step.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || from > to {
                return Err(ConfigError::Invalid("need from <= to and step > 0".into()).into());
            }
            println!("similarity\tprobability");
            let steps = ((to - from) / step + 1e-9).floor() as usize;
            for i in 0..=steps {
                let s = (from + i as f64 * step).min(1.0);
                let p = match_probability(s, hashes_per_bucket, buckets)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                println!("{s:.4}\t{p:.6}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
