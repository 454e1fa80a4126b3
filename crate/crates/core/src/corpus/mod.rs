//! Document data model shared by every pipeline stage, plus its on-disk
//! persistence: line-delimited records, a content-addressed raw store, and
//! per-stage manifests.

mod psl;
mod records;
mod store;

pub use psl::{SuffixList, bundled_suffix_list};
pub use records::{Record, read_records, read_records_lenient, write_records};
pub use store::{RawStore, content_hash};

use std::collections::BTreeMap;
use std::fmt;
use std::fs::OpenOptions;
use std::io::{BufRead, BufReader, Write as _};
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// HTTP status code or a named error category, as recorded on a document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocStatus {
    Code(u16),
    Category(String),
}

impl fmt::Display for DocStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocStatus::Code(c) => write!(f, "{c}"),
            DocStatus::Category(s) => write!(f, "{s}"),
        }
    }
}

/// A fetched web page. The body lives in the content-addressed [`RawStore`];
/// the record form carries only its hash so record files stay small.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDocument {
    pub url: String,
    /// Registrable domain of `url`, from the bundled public suffix snapshot.
    pub domain: String,
    /// Final label of the host (e.g. "com"); empty for IP-literal hosts.
    pub tld: String,
    pub fetch_time: DateTime<Utc>,
    pub status: DocStatus,
    /// Raw page bytes. Not serialized; reattach via [`RawDocument::load_body`].
    #[serde(skip, default)]
    pub body: Vec<u8>,
    /// Lowercase hex SHA-256 of `body`.
    pub content_hash: String,
}

impl RawDocument {
    /// Builds a document from a fetched body, deriving domain, tld, and hash.
    pub fn new(url: &str, status: DocStatus, fetch_time: DateTime<Utc>, body: Vec<u8>) -> Result<Self> {
        let parsed = url::Url::parse(url).map_err(|e| Error::InvalidUrl {
            url: url.to_string(),
            message: e.to_string(),
        })?;
        let host = parsed.host_str().unwrap_or("");
        let suffixes = bundled_suffix_list();
        let content_hash = content_hash(&body);
        Ok(RawDocument {
            url: url.to_string(),
            domain: suffixes.registrable_domain(host).unwrap_or(host).to_string(),
            tld: suffixes.tld(host).to_string(),
            fetch_time,
            status,
            body,
            content_hash,
        })
    }

    /// Writes the body into the store. Idempotent.
    pub fn persist_body(&self, store: &RawStore) -> Result<()> {
        let hash = store.put(&self.body)?;
        debug_assert_eq!(hash, self.content_hash);
        Ok(())
    }

    /// Reads the body back from the store into `self.body`.
    pub fn load_body(&mut self, store: &RawStore) -> Result<()> {
        self.body = store.get(&self.content_hash)?;
        Ok(())
    }
}

impl Record for RawDocument {
    const KIND: &'static str = "raw-document";
    const SCHEMA_VERSION: u32 = 1;
}

/// A candidate document moving through the middle pipeline stages, carrying
/// the verdicts accumulated so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateDocument {
    pub url: String,
    pub domain: String,
    pub tld: String,
    pub fetch_time: DateTime<Utc>,
    pub status: DocStatus,
    pub content_hash: String,
    #[serde(default)]
    pub language: Option<String>,
    #[serde(default)]
    pub language_confidence: Option<f64>,
    /// Positive-class vote share from the policy classifier stage.
    #[serde(default)]
    pub policy_score: Option<f64>,
}

impl CandidateDocument {
    pub fn from_raw(raw: &RawDocument) -> Self {
        CandidateDocument {
            url: raw.url.clone(),
            domain: raw.domain.clone(),
            tld: raw.tld.clone(),
            fetch_time: raw.fetch_time,
            status: raw.status.clone(),
            content_hash: raw.content_hash.clone(),
            language: None,
            language_confidence: None,
            policy_score: None,
        }
    }
}

impl Record for CandidateDocument {
    const KIND: &'static str = "candidate-document";
    const SCHEMA_VERSION: u32 = 1;
}

/// A cleaned, boilerplate-free policy text with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    pub url: String,
    pub domain: String,
    pub tld: String,
    /// Extracted main-content plain text.
    pub text: String,
    /// Whitespace-token count over `text`.
    pub word_count: usize,
    /// ISO-639-1 code ("und" when undetermined).
    pub language: String,
    pub language_confidence: f64,
    /// content_hash of the originating RawDocument.
    pub source_hash: String,
}

impl PolicyDocument {
    pub fn count_words(text: &str) -> usize {
        text.split_whitespace().count()
    }
}

impl Record for PolicyDocument {
    const KIND: &'static str = "policy-document";
    const SCHEMA_VERSION: u32 = 1;
}

/// Closed enumeration of discard reasons, one vocabulary across all stages so
/// funnel statistics aggregate cleanly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiscardReason {
    #[serde(rename = "URL_REJECTED")]
    UrlRejected,
    #[serde(rename = "DUPLICATE_URL")]
    DuplicateUrl,
    #[serde(rename = "FETCH_FAILED")]
    FetchFailed,
    #[serde(rename = "DUPLICATE_EXACT")]
    DuplicateExact,
    #[serde(rename = "NOT_ENGLISH")]
    NotEnglish,
    #[serde(rename = "NOT_POLICY")]
    NotPolicy,
    #[serde(rename = "NOT_CROSS_VERIFIED")]
    NotCrossVerified,
    #[serde(rename = "EXTRACTION_EMPTY")]
    ExtractionEmpty,
    #[serde(rename = "EXTRACTION_FAILED")]
    ExtractionFailed,
    #[serde(rename = "DUPLICATE_NEAR")]
    DuplicateNear,
}

impl DiscardReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            DiscardReason::UrlRejected => "URL_REJECTED",
            DiscardReason::DuplicateUrl => "DUPLICATE_URL",
            DiscardReason::FetchFailed => "FETCH_FAILED",
            DiscardReason::DuplicateExact => "DUPLICATE_EXACT",
            DiscardReason::NotEnglish => "NOT_ENGLISH",
            DiscardReason::NotPolicy => "NOT_POLICY",
            DiscardReason::NotCrossVerified => "NOT_CROSS_VERIFIED",
            DiscardReason::ExtractionEmpty => "EXTRACTION_EMPTY",
            DiscardReason::ExtractionFailed => "EXTRACTION_FAILED",
            DiscardReason::DuplicateNear => "DUPLICATE_NEAR",
        }
    }
}

impl fmt::Display for DiscardReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscardEntry {
    /// Document id; the canonical URL unless a stage documents otherwise.
    pub id: String,
    pub reason: DiscardReason,
}

/// Append-only accounting record: what a stage consumed, produced, and
/// discarded, with reasons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageManifest {
    pub stage_name: String,
    pub input_count: usize,
    pub output_count: usize,
    pub discarded: Vec<DiscardEntry>,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    /// Digest of the stage configuration in effect for the run.
    pub config_digest: String,
    /// Free-form key/value notes (public suffix snapshot version, histograms).
    #[serde(default)]
    pub annotations: BTreeMap<String, String>,
}

impl StageManifest {
    pub fn start(stage_name: &str, config_digest: &str) -> ManifestBuilder {
        ManifestBuilder {
            stage_name: stage_name.to_string(),
            config_digest: config_digest.to_string(),
            started: Utc::now(),
            discarded: Vec::new(),
            annotations: BTreeMap::new(),
        }
    }

    /// The conservation invariant: input = output + discards.
    pub fn conserves(&self) -> bool {
        self.input_count == self.output_count + self.discarded.len()
    }

    /// Appends this manifest as one line of `<stage>.manifest` in `dir`.
    pub fn append_to(&self, dir: &Path) -> Result<()> {
        let path = dir.join(format!("{}.manifest", self.stage_name));
        let mut file = OpenOptions::new().create(true).append(true).open(&path)?;
        let line = serde_json::to_string(self)
            .map_err(|e| Error::stage(&self.stage_name, format!("manifest encode: {e}")))?;
        writeln!(file, "{line}")?;
        Ok(())
    }

    /// Reads every manifest line from a `<stage>.manifest` file.
    pub fn read_all(path: &Path) -> Result<Vec<StageManifest>> {
        let file = std::fs::File::open(path)?;
        let mut out = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let m: StageManifest = serde_json::from_str(&line).map_err(|e| Error::MalformedRecord {
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push(m);
        }
        Ok(out)
    }

    /// The most recent manifest for a stage, if the file exists.
    pub fn read_latest(path: &Path) -> Result<Option<StageManifest>> {
        if !path.exists() {
            return Ok(None);
        }
        Ok(Self::read_all(path)?.into_iter().last())
    }
}

/// Builder carrying a manifest through a stage run.
pub struct ManifestBuilder {
    stage_name: String,
    config_digest: String,
    started: DateTime<Utc>,
    discarded: Vec<DiscardEntry>,
    annotations: BTreeMap<String, String>,
}

impl ManifestBuilder {
    pub fn discard(&mut self, id: impl Into<String>, reason: DiscardReason) {
        self.discarded.push(DiscardEntry {
            id: id.into(),
            reason,
        });
    }

    pub fn annotate(&mut self, key: &str, value: impl Into<String>) {
        self.annotations.insert(key.to_string(), value.into());
    }

    pub fn discard_count(&self) -> usize {
        self.discarded.len()
    }

    /// Seals the manifest. `input_count` must equal `output_count` plus the
    /// discards recorded on the builder; violations are a stage bug.
    pub fn finish(mut self, input_count: usize, output_count: usize) -> Result<StageManifest> {
        self.annotations
            .entry("public_suffix_version".to_string())
            .or_insert_with(|| bundled_suffix_list().version().to_string());
        let manifest = StageManifest {
            stage_name: self.stage_name,
            input_count,
            output_count,
            discarded: self.discarded,
            started: self.started,
            finished: Utc::now(),
            config_digest: self.config_digest,
            annotations: self.annotations,
        };
        if !manifest.conserves() {
            return Err(Error::stage(
                &manifest.stage_name,
                format!(
                    "manifest does not conserve: {} != {} + {}",
                    manifest.input_count,
                    manifest.output_count,
                    manifest.discarded.len()
                ),
            ));
        }
        Ok(manifest)
    }
}
