//! Corpus composition reports: word-length histogram, readability
//! summaries, TLD frequencies, and length outliers. Everything is
//! exported twice, as CSV tables and as a plot-ready JSON series file.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::corpus::PolicyDocument;
use crate::error::Result;
use crate::readability::{self, MetricSummary};

/// Word counts are bucketed at this width for the histogram.
pub const HISTOGRAM_BUCKET: usize = 100;

/// Documents longer than mean + this many standard deviations are
/// flagged as length outliers.
pub const OUTLIER_SD: f64 = 6.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusReport {
    pub document_count: usize,
    pub domain_count: usize,
    /// (bucket start in words, documents in bucket), ascending.
    pub word_length_histogram: Vec<(usize, usize)>,
    /// Named metric summaries: word_count plus the readability scores.
    pub metrics: Vec<(String, MetricSummary)>,
    /// (tld, count), descending by count then ascending by name.
    pub tld_counts: Vec<(String, usize)>,
    /// URLs of documents more than [`OUTLIER_SD`] standard deviations
    /// above the mean word count. Flagged, not removed.
    pub length_outliers: Vec<String>,
}

pub fn corpus_report(documents: &[PolicyDocument]) -> CorpusReport {
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    let mut tlds: BTreeMap<&str, usize> = BTreeMap::new();
    let mut domains: std::collections::BTreeSet<&str> = std::collections::BTreeSet::new();
    let mut word_counts = Vec::with_capacity(documents.len());
    let mut fres = Vec::with_capacity(documents.len());
    let mut fkg = Vec::with_capacity(documents.len());
    let mut smog = Vec::with_capacity(documents.len());
    let mut cli = Vec::with_capacity(documents.len());

    for doc in documents {
        *histogram.entry(doc.word_count / HISTOGRAM_BUCKET * HISTOGRAM_BUCKET).or_insert(0) += 1;
        let tld = if doc.tld.is_empty() { "(none)" } else { doc.tld.as_str() };
        *tlds.entry(tld).or_insert(0) += 1;
        domains.insert(&doc.domain);
        word_counts.push(doc.word_count as f64);
        let scores = readability::score(&readability::text_stats(&doc.text));
        fres.push(scores.fres);
        fkg.push(scores.fkg);
        smog.push(scores.smog);
        cli.push(scores.cli);
    }

    let mut metrics = Vec::new();
    for (name, values) in [
        ("word_count", &word_counts),
        ("fres", &fres),
        ("fkg", &fkg),
        ("smog", &smog),
        ("cli", &cli),
    ] {
        if let Some(summary) = MetricSummary::from_values(values) {
            metrics.push((name.to_string(), summary));
        }
    }

    let length_outliers = match MetricSummary::from_values(&word_counts) {
        Some(lengths) => {
            let cutoff = lengths.mean + OUTLIER_SD * lengths.sd;
            documents
                .iter()
                .filter(|d| d.word_count as f64 > cutoff)
                .map(|d| d.url.clone())
                .collect()
        }
        None => Vec::new(),
    };

    let mut tld_counts: Vec<(String, usize)> =
        tlds.into_iter().map(|(t, c)| (t.to_string(), c)).collect();
    tld_counts.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

    CorpusReport {
        document_count: documents.len(),
        domain_count: domains.len(),
        word_length_histogram: histogram.into_iter().collect(),
        metrics,
        tld_counts,
        length_outliers,
    }
}

impl CorpusReport {
    /// Writes `<stem>_metrics.csv`, `<stem>_histogram.csv`,
    /// `<stem>_tlds.csv`, and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let mut w = csv::Writer::from_path(dir.join(format!("{stem}_metrics.csv")))?;
        w.write_record(["metric", "min", "max", "mean", "sd"])?;
        for (name, m) in &self.metrics {
            w.write_record([
                name.as_str(),
                &format!("{:.4}", m.min),
                &format!("{:.4}", m.max),
                &format!("{:.4}", m.mean),
                &format!("{:.4}", m.sd),
            ])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(format!("{stem}_histogram.csv")))?;
        w.write_record(["bucket_start", "documents"])?;
        for (start, count) in &self.word_length_histogram {
            w.write_record([start.to_string(), count.to_string()])?;
        }
        w.flush()?;

        let mut w = csv::Writer::from_path(dir.join(format!("{stem}_tlds.csv")))?;
        w.write_record(["tld", "documents"])?;
        for (tld, count) in &self.tld_counts {
            w.write_record([tld.as_str(), &count.to_string()])?;
        }
        w.flush()?;

        std::fs::write(dir.join(format!("{stem}.json")), self.to_plot_json()?)?;
        Ok(())
    }

    /// A small JSON document of x/y series, ready for any plotting tool.
    pub fn to_plot_json(&self) -> Result<String> {
        let value = json!({
            "document_count": self.document_count,
            "domain_count": self.domain_count,
            "series": [
                {
                    "name": "word_length_histogram",
                    "x": self.word_length_histogram.iter().map(|(s, _)| *s).collect::<Vec<_>>(),
                    "y": self.word_length_histogram.iter().map(|(_, c)| *c).collect::<Vec<_>>(),
                },
                {
                    "name": "tld_frequency",
                    "x": self.tld_counts.iter().map(|(t, _)| t.clone()).collect::<Vec<_>>(),
                    "y": self.tld_counts.iter().map(|(_, c)| *c).collect::<Vec<_>>(),
                },
            ],
            "metrics": self.metrics.iter().map(|(name, m)| {
                json!({"metric": name, "min": m.min, "max": m.max, "mean": m.mean, "sd": m.sd})
            }).collect::<Vec<_>>(),
            "length_outliers": self.length_outliers,
        });
        Ok(serde_json::to_string_pretty(&value)?)
    }
}
