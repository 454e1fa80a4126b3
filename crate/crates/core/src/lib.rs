//! Corpus construction and analysis toolkit for privacy-policy text.
//!
//! The crate is organized around a stage pipeline (URL selection, polite
//! fetching, language identification, policy classification, homepage
//! cross-verification, boilerplate extraction, exact and near duplicate
//! removal) plus the analytics that run over the finished corpus
//! (readability, keyphrases, topics, similarity studies).
//!
//! Every stage reads and writes line-delimited records and emits a
//! [`corpus::StageManifest`] accounting for each document it consumed.

pub mod classifier;
pub mod corpus;
pub mod datasets;
pub mod dedup;
pub mod error;
pub mod extractor;
pub mod fetcher;
pub mod keymine;
pub mod langid;
pub mod pipeline;
pub mod readability;
pub mod stopwords;
pub mod topics;
pub mod urlfilter;

pub use error::{Error, Result};
