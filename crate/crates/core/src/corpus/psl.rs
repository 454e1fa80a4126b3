//! Registrable-domain extraction against a bundled public-suffix snapshot.
//! Domain grouping must be deterministic across machines and time, so the
//! snapshot ships in the repo and its version string is recorded in every
//! stage manifest.

use std::collections::HashSet;
use std::net::IpAddr;
use std::sync::OnceLock;

const SNAPSHOT: &str = include_str!("../../assets/public_suffix_snapshot.dat");

/// Parsed suffix rules. Rules follow the public-suffix convention: a plain
/// rule matches a label tail, `*` matches exactly one label, and `!` marks an
/// exception that overrides a wildcard.
#[derive(Debug)]
pub struct SuffixList {
    version: String,
    rules: HashSet<String>,
    wildcards: HashSet<String>,
    exceptions: HashSet<String>,
}

/// The snapshot bundled with the crate.
pub fn bundled_suffix_list() -> &'static SuffixList {
    static INSTANCE: OnceLock<SuffixList> = OnceLock::new();
    INSTANCE.get_or_init(|| SuffixList::parse(SNAPSHOT))
}

impl SuffixList {
    pub fn parse(text: &str) -> Self {
        let mut version = String::from("unversioned");
        let mut rules = HashSet::new();
        let mut wildcards = HashSet::new();
        let mut exceptions = HashSet::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with('#') || line.starts_with("//") {
                if let Some(rest) = line.trim_start_matches(['#', '/']).trim().strip_prefix("VERSION:") {
                    version = rest.trim().to_string();
                }
                continue;
            }
            let rule = line.to_lowercase();
            if let Some(rest) = rule.strip_prefix('!') {
                exceptions.insert(rest.to_string());
            } else if let Some(rest) = rule.strip_prefix("*.") {
                wildcards.insert(rest.to_string());
            } else {
                rules.insert(rule);
            }
        }
        SuffixList {
            version,
            rules,
            wildcards,
            exceptions,
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    /// Number of labels in the public suffix of `host`, or 0 for hosts with
    /// no matching rule structure (single labels, IP addresses).
    fn suffix_label_count(&self, labels: &[String]) -> usize {
        let n = labels.len();
        let mut best = 0usize;
        // Exceptions win outright: the suffix is the exception minus its
        // leftmost label.
        for take in 1..=n {
            let tail = labels[n - take..].join(".");
            if self.exceptions.contains(&tail) {
                return take - 1;
            }
        }
        for take in 1..=n {
            let tail = labels[n - take..].join(".");
            if self.rules.contains(&tail) && take > best {
                best = take;
            }
            // "*.foo" matches "<anything>.foo": one extra label beyond foo.
            if take >= 2 && self.wildcards.contains(&labels[n - take + 1..].join(".")) && take > best {
                best = take;
            }
        }
        if best == 0 {
            // Unknown TLD: fall back to treating the final label as the
            // suffix, the PSL's implicit "*" default.
            best = 1;
        }
        best
    }

    /// The registrable domain (public suffix plus one label), or None when
    /// the host itself is a bare suffix. IP-literal hosts are their own
    /// domain.
    pub fn registrable_domain<'a>(&self, host: &'a str) -> Option<&'a str> {
        let host = host.trim_end_matches('.');
        if host.is_empty() {
            return None;
        }
        if host.parse::<IpAddr>().is_ok() {
            return Some(host);
        }
        let labels: Vec<String> = host.split('.').map(|l| l.to_lowercase()).collect();
        let suffix_len = self.suffix_label_count(&labels);
        if labels.len() <= suffix_len {
            return None;
        }
        let keep = suffix_len + 1;
        let skip_labels = labels.len() - keep;
        let mut offset = 0usize;
        for label in host.split('.').take(skip_labels) {
            offset += label.len() + 1;
        }
        Some(&host[offset..])
    }

    /// The final label of the host ("com", "uk"); empty for IP literals.
    pub fn tld<'a>(&self, host: &'a str) -> &'a str {
        let host = host.trim_end_matches('.');
        if host.is_empty() || host.parse::<IpAddr>().is_ok() {
            return "";
        }
        host.rsplit('.').next().unwrap_or("")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list() -> &'static SuffixList {
        bundled_suffix_list()
    }

    #[test]
    fn snapshot_carries_a_version() {
        assert_ne!(list().version(), "unversioned");
    }

    #[test]
    fn simple_tld() {
        assert_eq!(list().registrable_domain("example.com"), Some("example.com"));
        assert_eq!(list().registrable_domain("www.example.com"), Some("example.com"));
        assert_eq!(list().registrable_domain("a.b.c.example.org"), Some("example.org"));
    }

    #[test]
    fn second_level_suffixes() {
        assert_eq!(list().registrable_domain("example.co.uk"), Some("example.co.uk"));
        assert_eq!(list().registrable_domain("shop.example.co.uk"), Some("example.co.uk"));
        assert_eq!(list().tld("shop.example.co.uk"), "uk");
    }

    #[test]
    fn bare_suffix_has_no_registrable_domain() {
        assert_eq!(list().registrable_domain("com"), None);
        assert_eq!(list().registrable_domain("co.uk"), None);
    }

    #[test]
    fn wildcard_and_exception_rules() {
        // *.ck makes foo.ck a suffix, so bar.foo.ck registers at three labels.
        assert_eq!(list().registrable_domain("bar.foo.ck"), Some("bar.foo.ck"));
        assert_eq!(list().registrable_domain("foo.ck"), None);
        // !www.ck carves www.ck back out: suffix is ck, domain is www.ck.
        assert_eq!(list().registrable_domain("www.ck"), Some("www.ck"));
        assert_eq!(list().registrable_domain("a.www.ck"), Some("www.ck"));
    }

    #[test]
    fn unknown_tld_falls_back_to_last_label() {
        assert_eq!(list().registrable_domain("example.zz"), Some("example.zz"));
        assert_eq!(list().registrable_domain("deep.example.zz"), Some("example.zz"));
    }

    #[test]
    fn ip_hosts_are_their_own_domain() {
        assert_eq!(list().registrable_domain("127.0.0.1"), Some("127.0.0.1"));
        assert_eq!(list().tld("127.0.0.1"), "");
        assert_eq!(list().registrable_domain("::1"), Some("::1"));
    }

    #[test]
    fn case_and_trailing_dot_insensitive() {
        assert_eq!(list().registrable_domain("WWW.Example.COM."), Some("WWW.Example.COM".trim_start_matches("WWW.")));
        assert_eq!(list().tld("example.COM."), "COM");
    }

    #[test]
    fn localhost_is_single_label() {
        assert_eq!(list().registrable_domain("localhost"), None);
        assert_eq!(list().tld("localhost"), "localhost");
    }
}
