//! Command-line front end. Each pipeline stage is a subcommand over a
//! work directory, the analytics run over record files, and `pipeline
//! run` drives everything from a config file.
//!
//! Exit codes: 0 on success, 1 for command-line misuse, 2 when a stage
//! or analysis fails.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use policorpus::classifier::forest::ForestConfig;
use policorpus::classifier::{self, FeatureSchema, LabeledExample, TrainOptions, TrainedClassifier};
use policorpus::corpus::{
    read_records, write_records, CandidateDocument, DiscardReason, PolicyDocument, RawDocument,
    RawStore, StageManifest,
};
use policorpus::dedup::{self, DedupRecord};
use policorpus::error::Error;
use policorpus::keymine::{self, TextRankConfig};
use policorpus::pipeline::{self, Config};
use policorpus::readability;
use policorpus::stopwords::Stopwords;
use policorpus::topics::{self, FitConfig};
use policorpus::urlfilter;
use policorpus::Result;

#[derive(Parser)]
#[command(name = "policorpus", version, about = "Privacy-policy corpus construction and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select crawl candidates from a URL list
    FilterUrls {
        /// File with one URL per line
        #[arg(long = "in")]
        input: PathBuf,
        /// Output file of selected canonical URLs
        #[arg(long)]
        out: PathBuf,
    },
    /// Fetch selected URLs politely into a work directory
    Fetch {
        /// File of URLs to fetch (one per line)
        #[arg(long = "in")]
        input: PathBuf,
        /// Work directory; receives raw/, fetched.jsonl, fetch_errors.csv
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        politeness: PolitenessArgs,
    },
    /// Remove duplicate documents
    Dedup {
        #[command(subcommand)]
        command: DedupCommand,
    },
    /// Detect language and keep one
    DetectLang {
        /// Work directory holding unique.jsonl and raw/
        #[arg(long = "in")]
        dir: PathBuf,
        /// Language code to keep
        #[arg(long, default_value = "en")]
        keep: String,
    },
    /// Train or apply the policy classifier
    Classify {
        #[command(subcommand)]
        command: ClassifyCommand,
    },
    /// Keep candidates whose homepage links back to them
    CrossVerify {
        /// Work directory holding candidates.jsonl
        #[arg(long = "in")]
        dir: PathBuf,
        #[command(flatten)]
        politeness: PolitenessArgs,
    },
    /// Extract main text from verified candidates
    Extract {
        /// Work directory holding verified.jsonl and raw/
        #[arg(long = "in")]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ExtractMode::Heuristic)]
        mode: ExtractMode,
        /// Classifier model for --mode trained
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Corpus analytics
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
    /// Corpus composition report (CSV tables plus plot-ready JSON)
    Report {
        /// Final corpus record file
        #[arg(long = "in")]
        input: PathBuf,
        /// Directory for the report files
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "corpus")]
        stem: String,
    },
    /// Run the full pipeline from a config file
    Pipeline {
        #[command(subcommand)]
        command: PipelineCommand,
    },
}

#[derive(Args)]
struct PolitenessArgs {
    #[arg(long, default_value_t = 8)]
    concurrency: usize,
    /// Minimum per-domain spacing between request starts
    #[arg(long = "delay-ms", default_value_t = 1000)]
    delay_ms: u64,
    #[arg(long = "timeout-ms", default_value_t = 30_000)]
    timeout_ms: u64,
    #[arg(long, default_value_t = 1)]
    network_retries: u32,
    #[arg(long, default_value_t = 0)]
    http_retries: u32,
    #[arg(long, default_value_t = 5)]
    max_redirects: usize,
    /// Truncate bodies beyond this many bytes
    #[arg(long, default_value_t = 5 * 1024 * 1024)]
    body_cap: usize,
    /// Skip robots.txt (it is honored by default)
    #[arg(long)]
    ignore_robots: bool,
    #[arg(long)]
    user_agent: Option<String>,
}

impl PolitenessArgs {
    /// Writes these flags into `section` so stage manifests digest them.
    fn apply(&self, config: &mut Config, section: &str) {
        config.set(section, "concurrency", self.concurrency.to_string());
        config.set(section, "delay_ms", self.delay_ms.to_string());
        config.set(section, "timeout_ms", self.timeout_ms.to_string());
        config.set(section, "network_retries", self.network_retries.to_string());
        config.set(section, "http_retries", self.http_retries.to_string());
        config.set(section, "max_redirects", self.max_redirects.to_string());
        config.set(section, "body_cap", self.body_cap.to_string());
        config.set(section, "honor_robots", (!self.ignore_robots).to_string());
        if let Some(agent) = &self.user_agent {
            config.set(section, "user_agent", agent.clone());
        }
    }
}

#[derive(Subcommand)]
enum DedupCommand {
    /// Drop byte-identical bodies; the first URL in lexicographic order wins
    Exact {
        /// fetched.jsonl record file
        #[arg(long = "in")]
        input: PathBuf,
        /// Output record file of unique documents
        #[arg(long)]
        out: PathBuf,
    },
    /// Drop same-domain near duplicates by simhash distance
    Near {
        /// policies.jsonl record file
        #[arg(long = "in")]
        input: PathBuf,
        /// Output record file of surviving documents
        #[arg(long)]
        out: PathBuf,
        /// Maximum Hamming distance considered a duplicate
        #[arg(long, default_value_t = 3)]
        threshold: u32,
        /// Optional CSV of all within-threshold pairs
        #[arg(long)]
        pairs: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ClassifyCommand {
    /// Train a model from labelled examples and report holdout metrics
    Train {
        /// labeled-example record file
        #[arg(long)]
        labels: PathBuf,
        /// Output model record file
        #[arg(long)]
        out: PathBuf,
        /// Feature schema: url, document, or combined
        #[arg(long, default_value = "combined")]
        schema: String,
        #[arg(long, default_value_t = 100)]
        trees: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// SMOTE neighbor count (URL schema only)
        #[arg(long = "smote-k")]
        smote_k: Option<usize>,
        /// Disable SMOTE oversampling
        #[arg(long)]
        no_smote: bool,
        /// Train on all examples without the 80/20 evaluation
        #[arg(long)]
        no_holdout: bool,
    },
    /// Score candidates and keep probable policies
    Run {
        #[arg(long)]
        model: PathBuf,
        /// Work directory holding english.jsonl and raw/
        #[arg(long = "in")]
        dir: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ExtractMode {
    /// Deterministic cascade over chrome tokens, link density, and length
    Heuristic,
    /// Keep blocks the supplied classifier model accepts
    Trained,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum KeyphraseAlgo {
    Rake,
    #[value(name = "textrank")]
    TextRank,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Per-document readability scores plus a corpus summary
    Readability {
        /// Corpus record file
        #[arg(long = "in")]
        input: PathBuf,
        /// Per-document CSV; the summary lands beside it as *_summary.csv
        #[arg(long)]
        report: PathBuf,
    },
    /// Corpus-level keyphrases
    Keyphrases {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: KeyphraseAlgo,
        /// Phrases to keep after aggregation
        #[arg(long, default_value_t = 50)]
        top: usize,
        /// Output CSV
        #[arg(long)]
        out: PathBuf,
    },
    /// Paragraph-level topic model
    Topics {
        #[arg(long = "in")]
        input: PathBuf,
        /// Output directory for model and top-word files
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 7)]
        k: usize,
        #[arg(long, default_value_t = 1000)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "top-words", default_value_t = 20)]
        top_words: usize,
        /// Fit several topic counts instead (comma-separated), with a
        /// coherence report
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Pairwise similarity distributions between two corpus samples
    Similarity {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "sample-a", default_value_t = 1000)]
        sample_a: usize,
        #[arg(long = "sample-b", default_value_t = 10_000)]
        sample_b: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output stem; writes <stem>.json and <stem>_hamming.csv
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PipelineCommand {
    /// Execute all stages, reusing completed work
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory for all stage outputs and manifests
        #[arg(long)]
        workdir: PathBuf,
    },
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(2);
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::FilterUrls { input, out } => filter_urls(&input, &out),
        Command::Fetch { input, out, politeness } => fetch(&input, &out, &politeness),
        Command::Dedup { command } => match command {
            DedupCommand::Exact { input, out } => dedup_exact(&input, &out),
            DedupCommand::Near { input, out, threshold, pairs } => {
                dedup_near(&input, &out, threshold, pairs.as_deref())
            }
        },
        Command::DetectLang { dir, keep } => {
            let mut config = Config::new();
            config.set("lang-id", "keep", keep);
            let manifest = pipeline::run_stage("lang-id", &config, &dir)?;
            print_manifest(&manifest);
            Ok(())
        }
        Command::Classify { command } => match command {
            ClassifyCommand::Train { labels, out, schema, trees, seed, smote_k, no_smote, no_holdout } => {
                classify_train(&labels, &out, &schema, trees, seed, smote_k, no_smote, no_holdout)
            }
            ClassifyCommand::Run { model, dir, threshold } => {
                let mut config = Config::new();
                config.set("classify", "model", model.display().to_string());
                config.set("classify", "threshold", threshold.to_string());
                let manifest = pipeline::run_stage("classify", &config, &dir)?;
                print_manifest(&manifest);
                Ok(())
            }
        },
        Command::CrossVerify { dir, politeness } => {
            let mut config = Config::new();
            politeness.apply(&mut config, "cross-verify");
            let manifest = pipeline::run_stage("cross-verify", &config, &dir)?;
            print_manifest(&manifest);
            Ok(())
        }
        Command::Extract { dir, mode, model } => match mode {
            ExtractMode::Heuristic => {
                let manifest = pipeline::run_stage("extract", &Config::new(), &dir)?;
                print_manifest(&manifest);
                Ok(())
            }
            ExtractMode::Trained => extract_trained(&dir, model.as_deref()),
        },
        Command::Analyze { command } => match command {
            AnalyzeCommand::Readability { input, report } => analyze_readability(&input, &report),
            AnalyzeCommand::Keyphrases { input, algo, top, out } => {
                analyze_keyphrases(&input, algo, top, &out)
            }
            AnalyzeCommand::Topics { input, out, k, iters, seed, top_words, sweep } => {
                analyze_topics(&input, &out, k, iters, seed, top_words, sweep.as_deref())
            }
            AnalyzeCommand::Similarity { input, sample_a, sample_b, seed, out } => {
                analyze_similarity(&input, sample_a, sample_b, seed, &out)
            }
        },
        Command::Report { input, out, stem } => {
            let documents: Vec<PolicyDocument> = read_records(&input)?;
            std::fs::create_dir_all(&out)?;
            let report = pipeline::corpus_report(&documents);
            report.write(&out, &stem)?;
            println!(
                "{} documents over {} domains; reports under {}",
                report.document_count,
                report.domain_count,
                out.display()
            );
            Ok(())
        }
        Command::Pipeline { command } => match command {
            PipelineCommand::Run { config, workdir } => {
                let config = Config::from_file(&config)?;
                let run = pipeline::run_pipeline(&config, &workdir)?;
                for outcome in &run.outcomes {
                    let mark = if outcome.skipped { "cached" } else { "ran" };
                    println!(
                        "{:<12} {:>6} in {:>6} out {:>6} discarded  [{mark}]",
                        outcome.stage,
                        outcome.manifest.input_count,
                        outcome.manifest.output_count,
                        outcome.manifest.discarded.len(),
                    );
                }
                println!(
                    "final corpus: {} documents at {}",
                    run.final_count(),
                    run.corpus_path().display()
                );
                if !run.conserves_funnel() {
                    return Err(Error::stage("pipeline", "funnel accounting does not balance"));
                }
                Ok(())
            }
        },
    }
}

fn print_manifest(manifest: &StageManifest) {
    println!(
        "{}: {} in, {} kept, {} discarded",
        manifest.stage_name,
        manifest.input_count,
        manifest.output_count,
        manifest.discarded.len()
    );
}

fn parent_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn filter_urls(input: &Path, out: &Path) -> Result<()> {
    let mut config = Config::new();
    config.set("pipeline", "input_urls", input.display().to_string());
    let dir = parent_dir(out);
    std::fs::create_dir_all(&dir)?;
    let digest = config.stage_digest("url-filter");
    let mut builder = StageManifest::start("url-filter", &digest);

    let text = std::fs::read_to_string(input)?;
    let mut selected = Vec::new();
    let mut seen = HashSet::new();
    let mut input_count = 0usize;
    for line in text.lines() {
        let raw = line.trim();
        if raw.is_empty() {
            continue;
        }
        input_count += 1;
        if !urlfilter::select_url(raw) {
            builder.discard(raw, DiscardReason::UrlRejected);
            continue;
        }
        match urlfilter::canonicalize(raw) {
            Ok(canonical) => {
                if seen.insert(canonical.clone()) {
                    selected.push(canonical);
                } else {
                    builder.discard(raw, DiscardReason::DuplicateUrl);
                }
            }
            Err(_) => builder.discard(raw, DiscardReason::UrlRejected),
        }
    }
    std::fs::write(out, selected.join("\n") + if selected.is_empty() { "" } else { "\n" })?;
    let manifest = builder.finish(input_count, selected.len())?;
    manifest.append_to(&dir)?;
    print_manifest(&manifest);
    Ok(())
}

fn fetch(input: &Path, out: &Path, politeness: &PolitenessArgs) -> Result<()> {
    std::fs::create_dir_all(out)?;
    let selected = out.join("selected.txt");
    let same_file = selected.exists()
        && std::fs::canonicalize(&selected)? == std::fs::canonicalize(input)?;
    if !same_file {
        std::fs::copy(input, &selected)?;
    }
    let mut config = Config::new();
    politeness.apply(&mut config, "fetch");
    let manifest = pipeline::run_stage("fetch", &config, out)?;
    print_manifest(&manifest);
    for (key, value) in &manifest.annotations {
        if let Some(label) = key.strip_prefix("error:") {
            println!("  {label}: {value}");
        }
    }
    Ok(())
}

fn dedup_exact(input: &Path, out: &Path) -> Result<()> {
    let docs: Vec<RawDocument> = read_records(input)?;
    let input_count = docs.len();
    let digest = Config::new().stage_digest("exact-dedup");
    let mut builder = StageManifest::start("exact-dedup", &digest);
    let (mut kept, dropped) = dedup::exact_dedup(docs);
    for doc in &dropped {
        builder.discard(&doc.url, DiscardReason::DuplicateExact);
    }
    kept.sort_by(|a, b| a.url.cmp(&b.url));
    write_records(out, &kept)?;
    let manifest = builder.finish(input_count, kept.len())?;
    manifest.append_to(&parent_dir(out))?;
    print_manifest(&manifest);
    Ok(())
}

fn dedup_near(input: &Path, out: &Path, threshold: u32, pairs: Option<&Path>) -> Result<()> {
    let docs: Vec<PolicyDocument> = read_records(input)?;
    let input_count = docs.len();
    let mut config = Config::new();
    config.set("near-dedup", "threshold", threshold.to_string());
    let digest = config.stage_digest("near-dedup");
    let mut builder = StageManifest::start("near-dedup", &digest);
    builder.annotate("threshold_bits", threshold.to_string());

    let records: Vec<DedupRecord> = docs
        .iter()
        .map(|d| DedupRecord::from_text(d.url.clone(), d.domain.clone(), &d.text))
        .collect();
    let outcome = dedup::near_dedup(&records, threshold);
    let dropped: HashSet<&String> = outcome.dropped.iter().collect();
    for url in &outcome.dropped {
        builder.discard(url, DiscardReason::DuplicateNear);
    }
    let kept: Vec<&PolicyDocument> = docs.iter().filter(|d| !dropped.contains(&d.url)).collect();
    write_records(out, kept.iter().copied())?;

    if let Some(pairs_path) = pairs {
        let mut w = csv::Writer::from_path(pairs_path)?;
        w.write_record(["doc_a", "doc_b", "domain", "hamming", "jaccard"])?;
        for pair in &outcome.pairs {
            w.write_record([
                pair.id_a.as_str(),
                pair.id_b.as_str(),
                pair.domain.as_str(),
                &pair.hamming.to_string(),
                &format!("{:.6}", pair.jaccard),
            ])?;
        }
        w.flush()?;
    }
    let manifest = builder.finish(input_count, kept.len())?;
    manifest.append_to(&parent_dir(out))?;
    print_manifest(&manifest);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn classify_train(
    labels: &Path,
    out: &Path,
    schema: &str,
    trees: usize,
    seed: u64,
    smote_k: Option<usize>,
    no_smote: bool,
    no_holdout: bool,
) -> Result<()> {
    let schema: FeatureSchema = schema.parse()?;
    let examples: Vec<LabeledExample> = read_records(labels)?;
    let options = TrainOptions {
        forest: ForestConfig { trees, seed, ..ForestConfig::default() },
        smote_k: if no_smote { None } else { smote_k.or(TrainOptions::default().smote_k) },
    };
    let model = if no_holdout {
        classifier::train(&examples, schema, &options)?
    } else {
        let (model, metrics) = classifier::train_and_evaluate(&examples, schema, &options, seed)?;
        println!(
            "holdout: precision {:.4}, recall {:.4}, f1 {:.4}",
            metrics.precision, metrics.recall, metrics.f1
        );
        model
    };
    write_records(out, [&model])?;
    println!("model written to {}", out.display());
    Ok(())
}

/// Trained-mode extraction: segment each page and keep the blocks the
/// classifier accepts, in place of the heuristic cascade.
fn extract_trained(dir: &Path, model: Option<&Path>) -> Result<()> {
    let Some(model_path) = model else {
        return Err(Error::Config("--mode trained requires --model".to_string()));
    };
    let models: Vec<TrainedClassifier> = read_records(model_path)?;
    let model = models
        .into_iter()
        .next()
        .ok_or_else(|| Error::Model(format!("model file {model_path:?} holds no model record")))?;

    let mut config = Config::new();
    config.set("extract", "mode", "trained");
    config.set("extract", "model", model_path.display().to_string());
    let digest = config.stage_digest("extract");
    let mut builder = StageManifest::start("extract", &digest);
    builder.annotate("mode", "trained");

    let store = RawStore::open(dir.join("raw"))?;
    let docs: Vec<CandidateDocument> = read_records(&dir.join("verified.jsonl"))?;
    let input_count = docs.len();
    let mut kept = Vec::new();
    for candidate in docs {
        let body = store.get(&candidate.content_hash)?;
        let blocks = match policorpus::extractor::segment(&body) {
            Ok(blocks) => blocks,
            Err(_) => {
                builder.discard(&candidate.url, DiscardReason::ExtractionFailed);
                continue;
            }
        };
        let mut parts = Vec::new();
        for block in &blocks {
            if model.predict(&candidate.url, &block.text)?.0 {
                parts.push(block.text.clone());
            }
        }
        if parts.is_empty() {
            builder.discard(&candidate.url, DiscardReason::ExtractionEmpty);
            continue;
        }
        let text = parts.join("\n");
        kept.push(PolicyDocument {
            url: candidate.url,
            domain: candidate.domain,
            tld: candidate.tld,
            word_count: PolicyDocument::count_words(&text),
            text,
            language: candidate.language.unwrap_or_else(|| "und".to_string()),
            language_confidence: candidate.language_confidence.unwrap_or(0.0),
            source_hash: candidate.content_hash,
        });
    }
    write_records(&dir.join("policies.jsonl"), &kept)?;
    let manifest = builder.finish(input_count, kept.len())?;
    manifest.append_to(dir)?;
    print_manifest(&manifest);
    Ok(())
}

fn analyze_readability(input: &Path, report: &Path) -> Result<()> {
    let docs: Vec<PolicyDocument> = read_records(input)?;
    let dir = parent_dir(report);
    std::fs::create_dir_all(&dir)?;

    let mut fres = Vec::new();
    let mut fkg = Vec::new();
    let mut smog = Vec::new();
    let mut cli = Vec::new();
    let mut w = csv::Writer::from_path(report)?;
    w.write_record(["url", "words", "sentences", "fres", "fkg", "smog", "cli", "smog_short_sample"])?;
    for doc in &docs {
        let stats = readability::text_stats(&doc.text);
        let scores = readability::score(&stats);
        w.write_record([
            doc.url.as_str(),
            &stats.words.to_string(),
            &stats.sentences.to_string(),
            &format!("{:.4}", scores.fres),
            &format!("{:.4}", scores.fkg),
            &format!("{:.4}", scores.smog),
            &format!("{:.4}", scores.cli),
            &scores.smog_short_sample.to_string(),
        ])?;
        fres.push(scores.fres);
        fkg.push(scores.fkg);
        smog.push(scores.smog);
        cli.push(scores.cli);
    }
    w.flush()?;

    let summary_path = dir.join(format!(
        "{}_summary.csv",
        report.file_stem().and_then(|s| s.to_str()).unwrap_or("readability")
    ));
    let mut w = csv::Writer::from_path(&summary_path)?;
    w.write_record(["metric", "min", "max", "mean", "sd"])?;
    for (name, values) in [("fres", &fres), ("fkg", &fkg), ("smog", &smog), ("cli", &cli)] {
        if let Some(m) = readability::MetricSummary::from_values(values) {
            w.write_record([
                name,
                &format!("{:.4}", m.min),
                &format!("{:.4}", m.max),
                &format!("{:.4}", m.mean),
                &format!("{:.4}", m.sd),
            ])?;
            println!("{name}: min {:.2}, max {:.2}, mean {:.2}, sd {:.2}", m.min, m.max, m.mean, m.sd);
        }
    }
    w.flush()?;
    println!("{} documents scored; details in {}", docs.len(), report.display());
    Ok(())
}

fn analyze_keyphrases(input: &Path, algo: KeyphraseAlgo, top: usize, out: &Path) -> Result<()> {
    let docs: Vec<PolicyDocument> = read_records(input)?;
    let stopwords = Stopwords::bundled();
    let per_document: Vec<Vec<keymine::KeyphraseScore>> = docs
        .iter()
        .map(|doc| match algo {
            KeyphraseAlgo::Rake => keymine::rake(&doc.text, stopwords),
            KeyphraseAlgo::TextRank => {
                keymine::textrank(&doc.text, stopwords, &TextRankConfig::default())
            }
        })
        .collect();
    let ranked = keymine::aggregate_corpus(&per_document, top);

    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["rank", "phrase", "score", "doc_freq"])?;
    for (i, phrase) in ranked.iter().enumerate() {
        w.write_record([
            &(i + 1).to_string(),
            &phrase.phrase.join(" "),
            &format!("{:.6}", phrase.score),
            &phrase.doc_freq.to_string(),
        ])?;
    }
    w.flush()?;
    println!("{} phrases from {} documents written to {}", ranked.len(), docs.len(), out.display());
    Ok(())
}

fn analyze_topics(
    input: &Path,
    out: &Path,
    k: usize,
    iters: usize,
    seed: u64,
    top_words: usize,
    sweep: Option<&str>,
) -> Result<()> {
    let docs: Vec<PolicyDocument> = read_records(input)?;
    let paragraphs: Vec<Vec<String>> = docs
        .iter()
        .flat_map(|d| topics::policy_paragraphs(&d.text))
        .collect();
    std::fs::create_dir_all(out)?;
    let config = FitConfig { iterations: iters, seed, ..FitConfig::default() };

    let write_top_words = |path: &Path, model: &topics::LdaModel| -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["topic", "rank", "word", "probability"])?;
        for topic in 0..model.k {
            for (rank, (word, probability)) in topics::top_words(model, topic, top_words).iter().enumerate() {
                w.write_record([
                    &topic.to_string(),
                    &(rank + 1).to_string(),
                    word,
                    &format!("{probability:.6}"),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    };

    match sweep {
        None => {
            let model = topics::fit_lda(&paragraphs, k, &config)?;
            write_records(&out.join("lda_model.jsonl"), [&model])?;
            write_top_words(&out.join("top_words.csv"), &model)?;
            println!(
                "fitted {k} topics over {} paragraphs; outputs under {}",
                paragraphs.len(),
                out.display()
            );
        }
        Some(sizes) => {
            let sizes: Vec<usize> = sizes
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::Config(format!("bad sweep size {s:?}")))
                })
                .collect::<Result<_>>()?;
            let entries = topics::sweep_topic_sizes(&paragraphs, &sizes, &config)?;
            let mut w = csv::Writer::from_path(out.join("sweep.csv"))?;
            w.write_record(["k", "mean_coherence", "near_empty_topics"])?;
            for entry in &entries {
                w.write_record([
                    &entry.k.to_string(),
                    &format!("{:.6}", entry.mean_coherence),
                    &entry.near_empty_topics.len().to_string(),
                ])?;
                write_records(&out.join(format!("lda_model_k{}.jsonl", entry.k)), [&entry.model])?;
                write_top_words(&out.join(format!("top_words_k{}.csv", entry.k)), &entry.model)?;
                println!(
                    "k={}: coherence {:.4}, {} near-empty topics",
                    entry.k,
                    entry.mean_coherence,
                    entry.near_empty_topics.len()
                );
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn analyze_similarity(input: &Path, sample_a: usize, sample_b: usize, seed: u64, out: &Path) -> Result<()> {
    use rand::SeedableRng;
    let docs: Vec<PolicyDocument> = read_records(input)?;
    if docs.len() < 2 {
        return Err(Error::Config("similarity needs at least two documents".to_string()));
    }
    let records: Vec<DedupRecord> = docs
        .iter()
        .map(|d| DedupRecord::from_text(d.url.clone(), d.domain.clone(), &d.text))
        .collect();

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let take = (sample_a + sample_b).min(records.len());
    let mut picked: Vec<usize> = rand::seq::index::sample(&mut rng, records.len(), take).into_vec();
    picked.sort_unstable();
    let a_count = sample_a.min(picked.len() - 1).max(1);
    let group_a: Vec<DedupRecord> = picked[..a_count].iter().map(|&i| records[i].clone()).collect();
    let group_b: Vec<DedupRecord> = picked[a_count..].iter().map(|&i| records[i].clone()).collect();

    let report = dedup::similarity_study(&group_a, &group_b);
    let dir = parent_dir(out);
    std::fs::create_dir_all(&dir)?;
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("similarity");
    std::fs::write(out.with_extension("json"), serde_json::to_string_pretty(&report)?)?;

    let mut w = csv::Writer::from_path(dir.join(format!("{stem}_hamming.csv")))?;
    w.write_record(["hamming", "pairs"])?;
    for (distance, count) in report.hamming_histogram.iter().enumerate() {
        w.write_record([&distance.to_string(), &count.to_string()])?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(dir.join(format!("{stem}_jaccard.csv")))?;
    w.write_record(["bin_start", "pairs"])?;
    for (bin, count) in report.jaccard_histogram.iter().enumerate() {
        w.write_record([&format!("{:.2}", bin as f64 * 0.05), &count.to_string()])?;
    }
    w.flush()?;
    println!(
        "{} cross pairs: hamming mean {:.2}, sd {:.2}",
        report.pair_count, report.hamming_mean, report.hamming_sd
    );
    Ok(())
}
