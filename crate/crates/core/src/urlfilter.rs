//! URL selection, URL-derived features, canonical URL identity, and the
//! homepage cross-verification membership rule.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use url::Url;

use crate::error::{Error, Result};

/// Decides whether a URL is a privacy-policy candidate: the lowercased URL
/// must contain "privacy", or both "data" and "protection". The match runs
/// over the whole URL (host, path, and query), so unrelated words that happen
/// to contain the substrings select too; that is the selection rule's known
/// false-positive behavior and downstream classification deals with it.
pub fn select_url(url: &str) -> bool {
    let parsed = match Url::parse(url) {
        Ok(u) => u,
        Err(e) => {
            log::warn!("select_url: unparseable url {url:?}: {e}");
            return false;
        }
    };
    let lower = parsed.as_str().to_lowercase();
    lower.contains("privacy") || (lower.contains("data") && lower.contains("protection"))
}

/// Features derived from the URL alone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UrlFeatures {
    /// Lowercase tokens from the URL path, split on non-alphanumeric runs.
    pub path_terms: Vec<String>,
    /// Number of non-empty '/'-separated path parts.
    pub path_segment_count: usize,
    /// Characters in the full URL.
    pub url_length: usize,
}

pub fn extract_url_features(url: &str) -> Result<UrlFeatures> {
    let parsed = Url::parse(url).map_err(|e| Error::InvalidUrl {
        url: url.to_string(),
        message: e.to_string(),
    })?;
    let path = parsed.path();
    let path_segment_count = path.split('/').filter(|s| !s.is_empty()).count();
    let path_terms = path
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect();
    Ok(UrlFeatures {
        path_terms,
        path_segment_count,
        url_length: parsed.as_str().chars().count(),
    })
}

/// Canonical string identity for a URL: lowercase scheme and host (parser
/// guarantees both), default port dropped, fragment dropped, query kept, and
/// trailing slashes stripped from the path. Used wherever two URLs must be
/// compared for sameness.
pub fn canonicalize(url: &str) -> Result<String> {
    let parsed = Url::parse(url).map_err(|e| Error::InvalidUrl {
        url: url.to_string(),
        message: e.to_string(),
    })?;
    let mut out = String::new();
    out.push_str(parsed.scheme());
    out.push_str("://");
    out.push_str(parsed.host_str().unwrap_or(""));
    if let Some(port) = parsed.port() {
        // Url::port() is None when the port equals the scheme default.
        out.push(':');
        out.push_str(&port.to_string());
    }
    let path = parsed.path().trim_end_matches('/');
    out.push_str(path);
    if let Some(q) = parsed.query() {
        out.push('?');
        out.push_str(q);
    }
    Ok(out)
}

/// Resolves a possibly-relative link against a base page URL and returns its
/// canonical form.
pub fn canonicalize_relative(base: &Url, link: &str) -> Option<String> {
    let joined = base.join(link.trim()).ok()?;
    match joined.scheme() {
        "http" | "https" => canonicalize(joined.as_str()).ok(),
        _ => None,
    }
}

/// Builds the canonical membership set used by [`cross_verify`]. Unparseable
/// links are dropped.
pub fn canonical_link_set<I, S>(links: I) -> HashSet<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    links
        .into_iter()
        .filter_map(|l| canonicalize(l.as_ref()).ok())
        .collect()
}

/// True iff the policy URL, canonicalized, is a member of the canonicalized
/// homepage link set. The caller builds the set from the domain landing page
/// plus one hop of intermediary pages; see the pipeline stage for harvesting.
pub fn cross_verify(policy_url: &str, homepage_link_set: &HashSet<String>) -> bool {
    match canonicalize(policy_url) {
        Ok(canonical) => homepage_link_set.contains(&canonical),
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selects_privacy_substring() {
        assert!(select_url("https://a.com/privacy-policy"));
        assert!(select_url("https://a.com/de/datenschutz/data-protection.html"));
        assert!(!select_url("https://a.com/about/contact"));
    }

    #[test]
    fn substring_rule_fires_across_word_boundaries() {
        // The rule is a plain substring test, so this selects even though
        // neither "data" nor "protection" names a policy here.
        assert!(select_url("https://dataportal.com/protection-plans"));
        assert!(select_url("https://a.com/PRIVACY"));
    }

    #[test]
    fn select_is_case_insensitive() {
        let u = "https://a.com/Data-Protection/notice?x=1";
        assert_eq!(select_url(u), select_url(&u.to_uppercase()));
    }

    #[test]
    fn appending_privacy_selects() {
        for base in ["https://a.com/", "https://b.org/x/y?q=1"] {
            let mut u = Url::parse(base).unwrap();
            let path = format!("{}/privacy", u.path().trim_end_matches('/'));
            u.set_path(&path);
            assert!(select_url(u.as_str()));
        }
    }

    #[test]
    fn unparseable_url_is_rejected() {
        assert!(!select_url("not a url at all"));
        assert!(!select_url("privacy"));
    }

    #[test]
    fn url_features_basic() {
        let f = extract_url_features("https://a.com/privacy").unwrap();
        assert_eq!(f.path_terms, vec!["privacy"]);
        assert_eq!(f.path_segment_count, 1);

        let f = extract_url_features("https://a.com/").unwrap();
        assert!(f.path_terms.is_empty());
        assert_eq!(f.path_segment_count, 0);

        let f = extract_url_features("https://a.com/legal/privacy-notice.html").unwrap();
        assert_eq!(f.path_terms, vec!["legal", "privacy", "notice", "html"]);
        assert_eq!(f.path_segment_count, 2);
    }

    #[test]
    fn url_length_counts_characters() {
        let u = "https://a.com/p";
        assert_eq!(extract_url_features(u).unwrap().url_length, u.chars().count());
    }

    #[test]
    fn canonical_identity() {
        assert_eq!(canonicalize("HTTPS://A.com/Privacy/").unwrap(), "https://a.com/Privacy");
        assert_eq!(canonicalize("https://a.com:443/x").unwrap(), "https://a.com/x");
        assert_eq!(canonicalize("http://a.com:8080/x#frag").unwrap(), "http://a.com:8080/x");
        assert_eq!(canonicalize("https://a.com/?q=1").unwrap(), "https://a.com?q=1");
        assert_eq!(canonicalize("https://a.com/").unwrap(), "https://a.com");
    }

    #[test]
    fn cross_verify_is_membership() {
        let set = canonical_link_set(["https://a.com/privacy/", "https://a.com/legal"]);
        assert!(cross_verify("https://A.com/privacy", &set));
        assert!(!cross_verify("https://a.com/terms", &set));
        assert!(!cross_verify("::nonsense::", &set));
    }

    #[test]
    fn relative_links_resolve_against_base() {
        let base = Url::parse("https://a.com/some/page.html").unwrap();
        assert_eq!(
            canonicalize_relative(&base, "/privacy/").unwrap(),
            "https://a.com/privacy"
        );
        assert_eq!(
            canonicalize_relative(&base, "next.html").unwrap(),
            "https://a.com/some/next.html"
        );
        assert!(canonicalize_relative(&base, "mailto:x@a.com").is_none());
    }
}
