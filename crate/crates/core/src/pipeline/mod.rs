//! End-to-end orchestration. Stages run in a fixed order, each reading
//! its predecessor's output from the work directory, appending one
//! manifest line, and leaving byte-stable files behind so a finished
//! run can be repeated or resumed without re-doing work.
//!
//! A stage is skipped when its outputs all exist and the latest
//! manifest carries the digest of the configuration currently in
//! effect. The first stage that cannot be skipped forces every stage
//! after it to run, since their inputs may have changed.

pub mod config;
pub mod report;

pub use config::Config;
pub use report::{corpus_report, CorpusReport};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::time::Duration;

use crate::classifier::TrainedClassifier;
use crate::corpus::{
    read_records, write_records, CandidateDocument, DiscardReason, PolicyDocument, RawDocument,
    RawStore, StageManifest,
};
use crate::dedup::{self, DedupRecord};
use crate::error::{Error, Result};
use crate::extractor;
use crate::fetcher::{self, FetchPolicy, FetchResult};
use crate::langid;
use crate::urlfilter;

/// Stage names in execution order. Manifest files take these names.
pub const STAGES: [&str; 8] = [
    "url-filter",
    "fetch",
    "exact-dedup",
    "lang-id",
    "classify",
    "cross-verify",
    "extract",
    "near-dedup",
];

#[derive(Debug)]
pub struct StageOutcome {
    pub stage: &'static str,
    /// True when outputs were reused instead of recomputed.
    pub skipped: bool,
    pub manifest: StageManifest,
}

#[derive(Debug)]
pub struct PipelineRun {
    pub outcomes: Vec<StageOutcome>,
    pub workdir: PathBuf,
}

impl PipelineRun {
    pub fn corpus_path(&self) -> PathBuf {
        self.workdir.join("corpus.jsonl")
    }

    pub fn final_count(&self) -> usize {
        self.outcomes.last().map(|o| o.manifest.output_count).unwrap_or(0)
    }

    /// Documents entering the funnel: the URL list size, or the raw page
    /// count when the run started from already-fetched pages.
    pub fn initial_count(&self) -> usize {
        let raw_mode = self
            .outcomes
            .first()
            .is_some_and(|o| o.manifest.annotations.get("input_mode").map(String::as_str) == Some("raw_pages"));
        let from = if raw_mode { 1 } else { 0 };
        self.outcomes.get(from).map(|o| o.manifest.input_count).unwrap_or(0)
    }

    pub fn total_discards(&self) -> usize {
        self.outcomes.iter().map(|o| o.manifest.discarded.len()).sum()
    }

    /// Whole-funnel conservation: what went in equals what came out plus
    /// every recorded discard.
    pub fn conserves_funnel(&self) -> bool {
        self.initial_count() == self.final_count() + self.total_discards()
    }
}

/// Paths a stage must have produced for its output to count as present.
fn stage_outputs(stage: &str, dir: &Path) -> Vec<PathBuf> {
    match stage {
        "url-filter" => vec![dir.join("selected.txt")],
        "fetch" => vec![dir.join("fetched.jsonl"), dir.join("fetch_errors.csv"), dir.join("raw")],
        "exact-dedup" => vec![dir.join("unique.jsonl")],
        "lang-id" => vec![dir.join("english.jsonl")],
        "classify" => vec![dir.join("candidates.jsonl")],
        "cross-verify" => vec![dir.join("verified.jsonl")],
        "extract" => vec![dir.join("policies.jsonl")],
        "near-dedup" => vec![dir.join("corpus.jsonl"), dir.join("near_pairs.csv")],
        other => unreachable!("unknown stage {other}"),
    }
}

fn can_skip(stage: &str, dir: &Path, digest: &str) -> Result<Option<StageManifest>> {
    if stage_outputs(stage, dir).iter().any(|p| !p.exists()) {
        return Ok(None);
    }
    let latest = StageManifest::read_latest(&dir.join(format!("{stage}.manifest")))?;
    Ok(latest.filter(|m| m.config_digest == digest))
}

/// Builds a [`FetchPolicy`] from one config section. Both the fetch and
/// the cross-verify stages use this, each with their own section.
pub fn fetch_policy_from(config: &Config, section: &str) -> Result<FetchPolicy> {
    let defaults = FetchPolicy::default();
    Ok(FetchPolicy {
        timeout: Duration::from_millis(config.parsed_or(section, "timeout_ms", defaults.timeout.as_millis() as u64)?),
        network_retries: config.parsed_or(section, "network_retries", defaults.network_retries)?,
        http_retries: config.parsed_or(section, "http_retries", defaults.http_retries)?,
        delay: Duration::from_millis(config.parsed_or(section, "delay_ms", defaults.delay.as_millis() as u64)?),
        user_agent: config.get_or(section, "user_agent", &defaults.user_agent).to_string(),
        max_redirects: config.parsed_or(section, "max_redirects", defaults.max_redirects)?,
        body_cap: config.parsed_or(section, "body_cap", defaults.body_cap)?,
        honor_robots: config.parsed_or(section, "honor_robots", defaults.honor_robots)?,
        concurrency: config.parsed_or(section, "concurrency", defaults.concurrency)?,
    })
}

fn load_model(config: &Config) -> Result<TrainedClassifier> {
    let Some(path) = config.get("classify", "model") else {
        return Err(Error::Config("classify.model is required".to_string()));
    };
    let models: Vec<TrainedClassifier> = read_records(Path::new(path))
        .map_err(|e| Error::Model(format!("cannot load classifier model {path:?}: {e}")))?;
    models
        .into_iter()
        .next()
        .ok_or_else(|| Error::Model(format!("classifier model {path:?} holds no model record")))
}

/// Runs all eight stages against `workdir`, reusing completed work.
/// The classifier model is validated up front so a bad configuration
/// cannot burn a crawl first.
pub fn run_pipeline(config: &Config, workdir: &Path) -> Result<PipelineRun> {
    std::fs::create_dir_all(workdir)?;
    let url_mode = config.get("pipeline", "input_urls").is_some();
    let raw_mode = config.get("pipeline", "raw_pages").is_some();
    if url_mode == raw_mode {
        return Err(Error::Config(
            "exactly one of pipeline.input_urls or pipeline.raw_pages is required".to_string(),
        ));
    }
    let model = load_model(config)?;
    let threshold: f64 = config.parsed_or("classify", "threshold", 0.5)?;

    // Resolved snapshot beside the outputs; untouched when identical so
    // a repeated run leaves every byte alone.
    let snapshot = config.render();
    let snapshot_path = workdir.join("config.resolved.ini");
    if std::fs::read(&snapshot_path).ok().as_deref() != Some(snapshot.as_bytes()) {
        std::fs::write(&snapshot_path, &snapshot)?;
    }

    let mut outcomes = Vec::with_capacity(STAGES.len());
    let mut dirty = false;
    for stage in STAGES {
        let digest = config.stage_digest(stage);
        if !dirty {
            if let Some(manifest) = can_skip(stage, workdir, &digest)? {
                log::info!("{stage}: outputs current, skipping");
                outcomes.push(StageOutcome { stage, skipped: true, manifest });
                continue;
            }
        }
        dirty = true;
        log::info!("{stage}: running");
        let manifest = match stage {
            "url-filter" => url_filter_stage(config, workdir, &digest)?,
            "fetch" => fetch_stage(config, workdir, &digest)?,
            "exact-dedup" => exact_dedup_stage(workdir, &digest)?,
            "lang-id" => lang_id_stage(config, workdir, &digest)?,
            "classify" => classify_stage(&model, threshold, workdir, &digest)?,
            "cross-verify" => cross_verify_stage(config, workdir, &digest)?,
            "extract" => extract_stage(workdir, &digest)?,
            "near-dedup" => near_dedup_stage(config, workdir, &digest)?,
            other => unreachable!("unknown stage {other}"),
        };
        manifest.append_to(workdir)?;
        outcomes.push(StageOutcome { stage, skipped: false, manifest });
    }
    Ok(PipelineRun { outcomes, workdir: workdir.to_path_buf() })
}

/// Runs one named stage against `workdir` and appends its manifest
/// line. This is the standalone building block behind the per-stage CLI
/// subcommands; `workdir` must already hold the predecessor's output.
pub fn run_stage(stage: &str, config: &Config, workdir: &Path) -> Result<StageManifest> {
    std::fs::create_dir_all(workdir)?;
    let digest = config.stage_digest(stage);
    let manifest = match stage {
        "url-filter" => url_filter_stage(config, workdir, &digest)?,
        "fetch" => fetch_stage(config, workdir, &digest)?,
        "exact-dedup" => exact_dedup_stage(workdir, &digest)?,
        "lang-id" => lang_id_stage(config, workdir, &digest)?,
        "classify" => {
            let model = load_model(config)?;
            let threshold: f64 = config.parsed_or("classify", "threshold", 0.5)?;
            classify_stage(&model, threshold, workdir, &digest)?
        }
        "cross-verify" => cross_verify_stage(config, workdir, &digest)?,
        "extract" => extract_stage(workdir, &digest)?,
        "near-dedup" => near_dedup_stage(config, workdir, &digest)?,
        other => return Err(Error::Config(format!("unknown stage {other:?}"))),
    };
    manifest.append_to(workdir)?;
    Ok(manifest)
}

fn url_filter_stage(config: &Config, dir: &Path, digest: &str) -> Result<StageManifest> {
    let mut builder = StageManifest::start("url-filter", digest);
    let mut selected = Vec::new();
    let mut input_count = 0;
    match config.get("pipeline", "input_urls") {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::stage("url-filter", format!("reading {path:?}: {e}")))?;
            let mut seen = HashSet::new();
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
        }
        None => builder.annotate("input_mode", "raw_pages"),
    }
    let mut out = String::with_capacity(selected.iter().map(|s| s.len() + 1).sum());
    for url in &selected {
        out.push_str(url);
        out.push('\n');
    }
    std::fs::write(dir.join("selected.txt"), out)?;
    builder.finish(input_count, selected.len())
}

fn fetch_stage(config: &Config, dir: &Path, digest: &str) -> Result<StageManifest> {
    let mut builder = StageManifest::start("fetch", digest);
    let store = RawStore::open(dir.join("raw"))?;
    let mut documents: Vec<RawDocument> = Vec::new();
    let mut histogram: BTreeMap<String, usize> = BTreeMap::new();
    let input_count;

    if let Some(raw_dir) = config.get("pipeline", "raw_pages") {
        // Ingest pages fetched elsewhere instead of crawling.
        let raw_dir = Path::new(raw_dir);
        let source = RawStore::open(raw_dir.join("raw"))?;
        let records: Vec<RawDocument> = read_records(&raw_dir.join("fetched.jsonl"))?;
        input_count = records.len();
        for mut doc in records {
            doc.load_body(&source)?;
            doc.persist_body(&store)?;
            doc.body.clear();
            documents.push(doc);
        }
        builder.annotate("input_mode", "raw_pages");
    } else {
        let text = std::fs::read_to_string(dir.join("selected.txt"))?;
        let urls: Vec<String> = text.lines().filter(|l| !l.is_empty()).map(str::to_string).collect();
        input_count = urls.len();
        let policy = fetch_policy_from(config, "fetch")?;
        let batch = fetcher::fetch_batch(&urls, &policy);
        for outcome in batch.outcomes {
            match outcome.result {
                FetchResult::Success(mut doc) => {
                    doc.persist_body(&store)?;
                    doc.body.clear();
                    documents.push(doc);
                }
                FetchResult::Failure(category) => {
                    *histogram.entry(category.label()).or_insert(0) += 1;
                    builder.discard(outcome.url, DiscardReason::FetchFailed);
                }
            }
        }
        // Inputs arrive canonicalized and deduplicated, but account for
        // stray duplicates anyway so the funnel always balances.
        for url in batch.duplicate_inputs {
            builder.discard(url, DiscardReason::DuplicateUrl);
        }
    }

    documents.sort_by(|a, b| a.url.cmp(&b.url));
    write_records(&dir.join("fetched.jsonl"), &documents)?;

    let mut w = csv::Writer::from_path(dir.join("fetch_errors.csv"))?;
    w.write_record(["category", "count"])?;
    for (label, count) in &histogram {
        w.write_record([label.as_str(), &count.to_string()])?;
        builder.annotate(&format!("error:{label}"), count.to_string());
    }
    w.flush()?;
    builder.finish(input_count, documents.len())
}

fn exact_dedup_stage(dir: &Path, digest: &str) -> Result<StageManifest> {
    let mut builder = StageManifest::start("exact-dedup", digest);
    let docs: Vec<RawDocument> = read_records(&dir.join("fetched.jsonl"))?;
    let input_count = docs.len();
    let (mut kept, dropped) = dedup::exact_dedup(docs);
    for doc in &dropped {
        builder.discard(&doc.url, DiscardReason::DuplicateExact);
    }
    kept.sort_by(|a, b| a.url.cmp(&b.url));
    write_records(&dir.join("unique.jsonl"), &kept)?;
    builder.finish(input_count, kept.len())
}

/// Text a page presents to language detection and classification: the
/// extracted main content when there is any, the raw bytes otherwise.
fn page_text(body: &[u8]) -> String {
    extractor::extract_main_text(body).unwrap_or_else(|_| String::from_utf8_lossy(body).into_owned())
}

fn lang_id_stage(config: &Config, dir: &Path, digest: &str) -> Result<StageManifest> {
    let keep = config.get_or("lang-id", "keep", "en").to_string();
    let mut builder = StageManifest::start("lang-id", digest);
    builder.annotate("keep", &keep);
    let store = RawStore::open(dir.join("raw"))?;
    let docs: Vec<RawDocument> = read_records(&dir.join("unique.jsonl"))?;
    let input_count = docs.len();
    let profiles = langid::bundled_profiles();
    let mut kept = Vec::new();
    for mut doc in docs {
        doc.load_body(&store)?;
        let (language, confidence) = langid::detect(&page_text(&doc.body), profiles);
        let mut candidate = CandidateDocument::from_raw(&doc);
        candidate.language = Some(language.clone());
        candidate.language_confidence = Some(confidence);
        if language == keep {
            kept.push(candidate);
        } else {
            builder.discard(&doc.url, DiscardReason::NotEnglish);
        }
    }
    write_records(&dir.join("english.jsonl"), &kept)?;
    builder.finish(input_count, kept.len())
}

fn classify_stage(
    model: &TrainedClassifier,
    threshold: f64,
    dir: &Path,
    digest: &str,
) -> Result<StageManifest> {
    let mut builder = StageManifest::start("classify", digest);
    builder.annotate("threshold", format!("{threshold}"));
    let store = RawStore::open(dir.join("raw"))?;
    let docs: Vec<CandidateDocument> = read_records(&dir.join("english.jsonl"))?;
    let input_count = docs.len();
    let mut kept = Vec::new();
    for mut candidate in docs {
        let body = store.get(&candidate.content_hash)?;
        let (_, score) = model.predict(&candidate.url, &page_text(&body))?;
        candidate.policy_score = Some(score);
        if score >= threshold {
            kept.push(candidate);
        } else {
            builder.discard(&candidate.url, DiscardReason::NotPolicy);
        }
    }
    write_records(&dir.join("candidates.jsonl"), &kept)?;
    builder.finish(input_count, kept.len())
}

/// The site root a candidate must be linked from.
fn origin_url(candidate: &str) -> Option<String> {
    let mut parsed = url::Url::parse(candidate).ok()?;
    if !parsed.has_host() {
        return None;
    }
    parsed.set_path("/");
    parsed.set_query(None);
    parsed.set_fragment(None);
    let _ = parsed.set_username("");
    let _ = parsed.set_password(None);
    urlfilter::canonicalize(parsed.as_str()).ok()
}

fn cross_verify_stage(config: &Config, dir: &Path, digest: &str) -> Result<StageManifest> {
    let mut builder = StageManifest::start("cross-verify", digest);
    let docs: Vec<CandidateDocument> = read_records(&dir.join("candidates.jsonl"))?;
    let input_count = docs.len();

    let mut origins: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    let origin_of: Vec<Option<String>> = docs
        .iter()
        .map(|doc| {
            let origin = origin_url(&doc.url);
            if let Some(o) = &origin {
                if seen.insert(o.clone()) {
                    origins.push(o.clone());
                }
            }
            origin
        })
        .collect();

    let policy = fetch_policy_from(config, "cross-verify")?;
    let batch = fetcher::fetch_batch(&origins, &policy);
    // Homepage -> link set; None when the homepage could not be read.
    let mut link_sets: HashMap<String, Option<HashSet<String>>> = HashMap::new();
    for outcome in batch.outcomes {
        let links = match outcome.result {
            FetchResult::Success(homepage) => url::Url::parse(&homepage.url).ok().and_then(|base| {
                extractor::anchor_hrefs(&homepage.body).ok().map(|hrefs| {
                    hrefs
                        .iter()
                        .filter_map(|link| urlfilter::canonicalize_relative(&base, link))
                        .collect::<HashSet<String>>()
                })
            }),
            FetchResult::Failure(_) => None,
        };
        link_sets.insert(outcome.url, links);
    }

    let mut kept = Vec::new();
    let mut unverifiable = 0usize;
    for (candidate, origin) in docs.into_iter().zip(origin_of) {
        match origin.as_ref().and_then(|o| link_sets.get(o)) {
            Some(Some(links)) => {
                if urlfilter::cross_verify(&candidate.url, links) {
                    kept.push(candidate);
                } else {
                    builder.discard(&candidate.url, DiscardReason::NotCrossVerified);
                }
            }
            // No readable homepage: nothing proves the page is not a
            // policy, so it stays, counted for the record.
            _ => {
                unverifiable += 1;
                kept.push(candidate);
            }
        }
    }
    builder.annotate("unverifiable_kept", unverifiable.to_string());
    write_records(&dir.join("verified.jsonl"), &kept)?;
    builder.finish(input_count, kept.len())
}

fn extract_stage(dir: &Path, digest: &str) -> Result<StageManifest> {
    let mut builder = StageManifest::start("extract", digest);
    let store = RawStore::open(dir.join("raw"))?;
    let docs: Vec<CandidateDocument> = read_records(&dir.join("verified.jsonl"))?;
    let input_count = docs.len();
    let mut kept: Vec<PolicyDocument> = Vec::new();
    for candidate in docs {
        let body = store.get(&candidate.content_hash)?;
        match extractor::extract_main_text(&body) {
            Ok(text) => kept.push(PolicyDocument {
                url: candidate.url,
                domain: candidate.domain,
                tld: candidate.tld,
                word_count: PolicyDocument::count_words(&text),
                text,
                language: candidate.language.unwrap_or_else(|| langid::UNKNOWN_LANGUAGE.to_string()),
                language_confidence: candidate.language_confidence.unwrap_or(0.0),
                source_hash: candidate.content_hash,
            }),
            Err(Error::ExtractionEmpty) => builder.discard(&candidate.url, DiscardReason::ExtractionEmpty),
            Err(_) => builder.discard(&candidate.url, DiscardReason::ExtractionFailed),
        }
    }
    write_records(&dir.join("policies.jsonl"), &kept)?;
    builder.finish(input_count, kept.len())
}

fn near_dedup_stage(config: &Config, dir: &Path, digest: &str) -> Result<StageManifest> {
    let threshold: u32 = config.parsed_or("near-dedup", "threshold", 3u32)?;
    let mut builder = StageManifest::start("near-dedup", digest);
    builder.annotate("threshold_bits", threshold.to_string());
    let docs: Vec<PolicyDocument> = read_records(&dir.join("policies.jsonl"))?;
    let input_count = docs.len();
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
    write_records(&dir.join("corpus.jsonl"), kept.iter().copied())?;

    let mut w = csv::Writer::from_path(dir.join("near_pairs.csv"))?;
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
    builder.annotate("reported_pairs", outcome.pairs.len().to_string());
    builder.finish(input_count, kept.len())
}
