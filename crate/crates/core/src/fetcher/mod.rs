//! Polite HTTP fetching with a fixed failure taxonomy. Every fetch
//! produces an outcome, never an exception: success carries the page,
//! failure carries exactly one error category. Batch fetching runs a
//! bounded worker pool with at most one in-flight request per domain and
//! a minimum spacing between requests to the same domain.

pub mod robots;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;
use std::io::Read;
use std::net::ToSocketAddrs;
use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::corpus::{bundled_suffix_list, DocStatus, RawDocument};
use crate::urlfilter::canonicalize;

pub use robots::RobotsPolicy;

pub const DEFAULT_USER_AGENT: &str = "policorpus/0.1";

/// Failure taxonomy. The named variants match the crawl-error report
/// this tool emits; the label "Forbidden (405)" is kept as-is for
/// comparability with prior reports, so HTTP 403 lands in OtherHttp.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorCategory {
    PageNotFound404,
    Forbidden405,
    DnsLookupError,
    InternalServerError500,
    ServiceUnavailable503,
    TcpTimeout,
    ResponseNeverReceived,
    OtherHttp(u16),
    OtherNetwork(String),
}

impl ErrorCategory {
    /// The category for a final HTTP status, or None when the status is a
    /// success.
    pub fn from_status(code: u16) -> Option<ErrorCategory> {
        match code {
            200..=299 => None,
            404 => Some(ErrorCategory::PageNotFound404),
            405 => Some(ErrorCategory::Forbidden405),
            500 => Some(ErrorCategory::InternalServerError500),
            503 => Some(ErrorCategory::ServiceUnavailable503),
            other => Some(ErrorCategory::OtherHttp(other)),
        }
    }

    pub fn label(&self) -> String {
        match self {
            ErrorCategory::PageNotFound404 => "Page Not Found (404)".to_string(),
            ErrorCategory::Forbidden405 => "Forbidden (405)".to_string(),
            ErrorCategory::DnsLookupError => "DNS Lookup Error".to_string(),
            ErrorCategory::InternalServerError500 => "Internal Server Error (500)".to_string(),
            ErrorCategory::ServiceUnavailable503 => "Service Unavailable (503)".to_string(),
            ErrorCategory::TcpTimeout => "TCP Timeout".to_string(),
            ErrorCategory::ResponseNeverReceived => "Response Never Received".to_string(),
            ErrorCategory::OtherHttp(code) => format!("Other HTTP ({code})"),
            ErrorCategory::OtherNetwork(label) => format!("Other Network ({label})"),
        }
    }

    /// True for transient transport problems worth a retry.
    fn is_network(&self) -> bool {
        matches!(
            self,
            ErrorCategory::TcpTimeout | ErrorCategory::ResponseNeverReceived | ErrorCategory::OtherNetwork(_)
        )
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FetchPolicy {
    /// Whole-request deadline, connect plus body.
    pub timeout: Duration,
    /// Extra attempts after a network failure.
    pub network_retries: u32,
    /// Extra attempts after an HTTP error status.
    pub http_retries: u32,
    /// Minimum spacing between request starts on one domain.
    pub delay: Duration,
    pub user_agent: String,
    pub max_redirects: usize,
    /// Bodies are truncated at this many bytes.
    pub body_cap: usize,
    pub honor_robots: bool,
    /// Worker pool size for batch fetching.
    pub concurrency: usize,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        FetchPolicy {
            timeout: Duration::from_secs(30),
            network_retries: 1,
            http_retries: 0,
            delay: Duration::from_secs(1),
            user_agent: DEFAULT_USER_AGENT.to_string(),
            max_redirects: 5,
            body_cap: 5 * 1024 * 1024,
            honor_robots: true,
            concurrency: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub enum FetchResult {
    Success(RawDocument),
    Failure(ErrorCategory),
}

#[derive(Debug, Clone)]
pub struct FetchOutcome {
    /// The canonical URL that was requested (redirects may move the
    /// document's own URL elsewhere).
    pub url: String,
    pub result: FetchResult,
    /// HTTP attempts made; zero when the fetch failed before any request.
    pub attempt_count: u32,
    pub elapsed_ms: u64,
}

impl FetchOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self.result, FetchResult::Success(_))
    }

    pub fn category(&self) -> Option<&ErrorCategory> {
        match &self.result {
            FetchResult::Success(_) => None,
            FetchResult::Failure(c) => Some(c),
        }
    }

    pub fn document(&self) -> Option<&RawDocument> {
        match &self.result {
            FetchResult::Success(d) => Some(d),
            FetchResult::Failure(_) => None,
        }
    }
}

type Client = reqwest::blocking::Client;

fn build_client(policy: &FetchPolicy) -> Result<Client, ErrorCategory> {
    reqwest::blocking::Client::builder()
        .timeout(policy.timeout)
        // Connect gets most of the whole-request deadline. It must fire
        // strictly before the outer timeout, otherwise a hung handshake
        // reports as a generic timeout and the connect phase cannot be
        // told apart from a stalled body.
        .connect_timeout(policy.timeout.mul_f64(0.9))
        .redirect(reqwest::redirect::Policy::limited(policy.max_redirects))
        .user_agent(policy.user_agent.clone())
        .build()
        .map_err(|e| ErrorCategory::OtherNetwork(format!("client_init: {e}")))
}

fn map_reqwest_error(e: &reqwest::Error) -> ErrorCategory {
    if e.is_timeout() && e.is_connect() {
        ErrorCategory::TcpTimeout
    } else if e.is_timeout() {
        ErrorCategory::ResponseNeverReceived
    } else if e.is_connect() {
        ErrorCategory::OtherNetwork("connection_failed".to_string())
    } else if e.is_redirect() {
        ErrorCategory::OtherNetwork("too_many_redirects".to_string())
    } else if e.is_body() || e.is_decode() {
        ErrorCategory::OtherNetwork("body_read".to_string())
    } else {
        ErrorCategory::OtherNetwork("request_failed".to_string())
    }
}

fn failure(url: &str, category: ErrorCategory, attempts: u32, start: Instant) -> FetchOutcome {
    FetchOutcome {
        url: url.to_string(),
        result: FetchResult::Failure(category),
        attempt_count: attempts,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Resolves the host through the system resolver so DNS failures are
/// separated from connect-level ones before any socket is opened.
fn preresolve(parsed: &url::Url) -> Result<(), ErrorCategory> {
    let Some(host) = parsed.host_str() else {
        return Err(ErrorCategory::OtherNetwork("no_host".to_string()));
    };
    let port = parsed.port_or_known_default().unwrap_or(80);
    match format!("{host}:{port}").to_socket_addrs() {
        Ok(mut addrs) => {
            if addrs.next().is_none() {
                return Err(ErrorCategory::DnsLookupError);
            }
            Ok(())
        }
        Err(_) => Err(ErrorCategory::DnsLookupError),
    }
}

/// Core single-URL fetch against a prepared client. `robots`, when
/// given, is consulted for the URL's path before any request is sent.
fn fetch_with_client(client: &Client, url: &str, policy: &FetchPolicy, robots: Option<&RobotsPolicy>) -> FetchOutcome {
    let start = Instant::now();
    let parsed = match url::Url::parse(url) {
        Ok(p) => p,
        Err(_) => return failure(url, ErrorCategory::OtherNetwork("invalid_url".to_string()), 0, start),
    };
    if parsed.scheme() != "http" && parsed.scheme() != "https" {
        return failure(url, ErrorCategory::OtherNetwork("unsupported_scheme".to_string()), 0, start);
    }
    if let Some(robots) = robots {
        if !robots.allows(parsed.path()) {
            return failure(url, ErrorCategory::OtherNetwork("robots_disallowed".to_string()), 0, start);
        }
    }
    if let Err(category) = preresolve(&parsed) {
        return failure(url, category, 0, start);
    }

    let mut attempts = 0u32;
    loop {
        attempts += 1;
        let error = match client.get(parsed.clone()).send() {
            Ok(resp) => {
                let status = resp.status().as_u16();
                match ErrorCategory::from_status(status) {
                    Some(category) => category,
                    None => {
                        let final_url = resp.url().as_str().to_string();
                        let mut body = Vec::new();
                        match resp.take(policy.body_cap as u64).read_to_end(&mut body) {
                            Ok(_) => {
                                match RawDocument::new(&final_url, DocStatus::Code(status), Utc::now(), body) {
                                    Ok(doc) => {
                                        return FetchOutcome {
                                            url: url.to_string(),
                                            result: FetchResult::Success(doc),
                                            attempt_count: attempts,
                                            elapsed_ms: start.elapsed().as_millis() as u64,
                                        };
                                    }
                                    Err(e) => ErrorCategory::OtherNetwork(format!("document_build: {e}")),
                                }
                            }
                            Err(e) if e.kind() == std::io::ErrorKind::TimedOut || e.kind() == std::io::ErrorKind::WouldBlock => {
                                ErrorCategory::ResponseNeverReceived
                            }
                            Err(_) => ErrorCategory::OtherNetwork("body_read".to_string()),
                        }
                    }
                }
            }
            Err(e) => map_reqwest_error(&e),
        };
        let budget = if error.is_network() {
            policy.network_retries
        } else {
            policy.http_retries
        };
        if attempts > budget {
            return failure(url, error, attempts, start);
        }
    }
}

/// Fetches the origin's robots.txt with the same client. Anything but a
/// readable 200 yields an allow-all policy.
fn fetch_robots(client: &Client, parsed: &url::Url, policy: &FetchPolicy) -> RobotsPolicy {
    let Ok(robots_url) = parsed.join("/robots.txt") else {
        return RobotsPolicy::allow_all();
    };
    match client.get(robots_url).send() {
        Ok(resp) if resp.status().as_u16() == 200 => {
            let mut text = String::new();
            let mut body = Vec::new();
            if resp.take(policy.body_cap as u64).read_to_end(&mut body).is_ok() {
                text = String::from_utf8_lossy(&body).into_owned();
            }
            RobotsPolicy::parse(&text, &policy.user_agent)
        }
        _ => RobotsPolicy::allow_all(),
    }
}

/// One-off fetch. Batch runs share clients and robots caches; this
/// builds both for a single URL.
pub fn fetch(url: &str, policy: &FetchPolicy) -> FetchOutcome {
    let start = Instant::now();
    let client = match build_client(policy) {
        Ok(c) => c,
        Err(category) => return failure(url, category, 0, start),
    };
    let robots = if policy.honor_robots {
        url::Url::parse(url).ok().map(|parsed| fetch_robots(&client, &parsed, policy))
    } else {
        None
    };
    fetch_with_client(&client, url, policy, robots.as_ref())
}

/// One request start, for politeness audits. Robots fetches are logged
/// like page fetches; they occupy a normal politeness slot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FetchLogEntry {
    pub url: String,
    pub domain: String,
    /// Milliseconds since the batch started.
    pub started_at_ms: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug)]
pub struct BatchResult {
    /// One outcome per unique canonical input, completion order.
    pub outcomes: Vec<FetchOutcome>,
    pub log: Vec<FetchLogEntry>,
    /// Inputs dropped because an earlier input had the same canonical form.
    pub duplicate_inputs: Vec<String>,
    pub started: DateTime<Utc>,
}

impl BatchResult {
    /// Failure counts by category label.
    pub fn error_histogram(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for outcome in &self.outcomes {
            if let Some(category) = outcome.category() {
                *out.entry(category.label()).or_insert(0) += 1;
            }
        }
        out
    }

    pub fn success_count(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_success()).count()
    }
}

/// Politeness key: the registrable domain when the suffix list knows the
/// host, otherwise the host itself (IP literals stay themselves).
fn politeness_domain(url: &str) -> String {
    let Ok(parsed) = url::Url::parse(url) else {
        return url.to_string();
    };
    let host = parsed.host_str().unwrap_or("");
    bundled_suffix_list().registrable_domain(host).unwrap_or(host).to_string()
}

struct DomainState {
    queue: VecDeque<String>,
    next_allowed: Instant,
    in_flight: bool,
}

struct BatchState {
    domains: HashMap<String, DomainState>,
    robots: HashMap<String, RobotsPolicy>,
    outcomes: Vec<FetchOutcome>,
    log: Vec<FetchLogEntry>,
    /// URLs not yet resolved to an outcome.
    remaining: usize,
}

enum Slot {
    /// Fetch this URL now; robots policy already cached (or disabled).
    Page { domain: String, url: String, taken: Instant },
    /// Fetch the origin's robots.txt, then requeue the URL.
    Robots { domain: String, url: String, origin: String, taken: Instant },
}

/// Fetches every URL with at most `concurrency` requests in flight, at
/// most one per domain, and per-domain request starts spaced by at least
/// `policy.delay`. Inputs are deduplicated by canonical form first;
/// outcomes arrive in completion order.
pub fn fetch_batch(urls: &[String], policy: &FetchPolicy) -> BatchResult {
    let started = Utc::now();
    let epoch = Instant::now();

    let mut seen = std::collections::HashSet::new();
    let mut duplicate_inputs = Vec::new();
    let mut unique = Vec::new();
    for raw in urls {
        let canonical = canonicalize(raw).unwrap_or_else(|_| raw.clone());
        if seen.insert(canonical.clone()) {
            unique.push(canonical);
        } else {
            duplicate_inputs.push(raw.clone());
        }
    }

    let mut domains: HashMap<String, DomainState> = HashMap::new();
    for url in &unique {
        domains
            .entry(politeness_domain(url))
            .or_insert_with(|| DomainState {
                queue: VecDeque::new(),
                next_allowed: epoch,
                in_flight: false,
            })
            .queue
            .push_back(url.clone());
    }

    let state = Mutex::new(BatchState {
        domains,
        robots: HashMap::new(),
        outcomes: Vec::new(),
        log: Vec::new(),
        remaining: unique.len(),
    });
    let ready = Condvar::new();
    let workers = policy.concurrency.max(1);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                let Ok(client) = build_client(policy) else {
                    return;
                };
                worker_loop(&client, policy, &state, &ready, epoch);
            });
        }
    });

    let state = state.into_inner().expect("batch state lock poisoned");
    BatchResult {
        outcomes: state.outcomes,
        log: state.log,
        duplicate_inputs,
        started,
    }
}

fn take_slot(state: &mut BatchState, policy: &FetchPolicy, now: Instant) -> (Option<Slot>, Option<Instant>) {
    let mut earliest: Option<Instant> = None;
    let mut pick: Option<(String, String)> = None;
    for (domain, ds) in &state.domains {
        if ds.in_flight || ds.queue.is_empty() {
            continue;
        }
        if ds.next_allowed <= now {
            pick = Some((domain.clone(), ds.queue.front().expect("nonempty queue").clone()));
            break;
        }
        earliest = Some(match earliest {
            Some(t) if t <= ds.next_allowed => t,
            _ => ds.next_allowed,
        });
    }
    let Some((domain, url)) = pick else {
        return (None, earliest);
    };

    let ds = state.domains.get_mut(&domain).expect("picked domain exists");
    ds.in_flight = true;
    // The reservation instant is the logged request start; spacing audits
    // compare these instants, so the next slot opens exactly delay later.
    let taken = Instant::now();
    ds.next_allowed = taken + policy.delay;

    let origin = url::Url::parse(&url)
        .map(|u| u.origin().ascii_serialization())
        .unwrap_or_default();
    if policy.honor_robots && !origin.is_empty() && !state.robots.contains_key(&origin) {
        // Keep the URL queued; this slot is spent on robots.txt.
        (Some(Slot::Robots { domain, url, origin, taken }), None)
    } else {
        ds.queue.pop_front();
        (Some(Slot::Page { domain, url, taken }), None)
    }
}

fn worker_loop(client: &Client, policy: &FetchPolicy, state: &Mutex<BatchState>, ready: &Condvar, epoch: Instant) {
    let mut guard = state.lock().expect("batch state lock poisoned");
    loop {
        if guard.remaining == 0 {
            ready.notify_all();
            return;
        }
        let (slot, earliest) = take_slot(&mut guard, policy, Instant::now());
        match slot {
            Some(Slot::Page { domain, url, taken }) => {
                let robots = guard.robots.get(&url_origin(&url)).cloned();
                drop(guard);
                let outcome = fetch_with_client(client, &url, policy, robots.as_ref());
                guard = state.lock().expect("batch state lock poisoned");
                guard.log.push(FetchLogEntry {
                    url: url.clone(),
                    domain: domain.clone(),
                    started_at_ms: taken.duration_since(epoch).as_millis() as u64,
                    elapsed_ms: taken.elapsed().as_millis() as u64,
                });
                guard.outcomes.push(outcome);
                guard.remaining -= 1;
                if let Some(ds) = guard.domains.get_mut(&domain) {
                    ds.in_flight = false;
                }
                ready.notify_all();
            }
            Some(Slot::Robots { domain, url, origin, taken }) => {
                drop(guard);
                let robots = match url::Url::parse(&url) {
                    Ok(parsed) => fetch_robots(client, &parsed, policy),
                    Err(_) => RobotsPolicy::allow_all(),
                };
                guard = state.lock().expect("batch state lock poisoned");
                guard.log.push(FetchLogEntry {
                    url: format!("{origin}/robots.txt"),
                    domain: domain.clone(),
                    started_at_ms: taken.duration_since(epoch).as_millis() as u64,
                    elapsed_ms: taken.elapsed().as_millis() as u64,
                });
                guard.robots.insert(origin, robots);
                if let Some(ds) = guard.domains.get_mut(&domain) {
                    ds.in_flight = false;
                }
                ready.notify_all();
            }
            None => {
                guard = match earliest {
                    Some(when) => {
                        let now = Instant::now();
                        let wait = when.saturating_duration_since(now);
                        ready
                            .wait_timeout(guard, wait.max(Duration::from_millis(1)))
                            .expect("batch state lock poisoned")
                            .0
                    }
                    None => ready.wait(guard).expect("batch state lock poisoned"),
                };
            }
        }
    }
}

fn url_origin(url: &str) -> String {
    url::Url::parse(url)
        .map(|u| u.origin().ascii_serialization())
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(ErrorCategory::from_status(200), None);
        assert_eq!(ErrorCategory::from_status(204), None);
        assert_eq!(ErrorCategory::from_status(404), Some(ErrorCategory::PageNotFound404));
        assert_eq!(ErrorCategory::from_status(405), Some(ErrorCategory::Forbidden405));
        assert_eq!(ErrorCategory::from_status(500), Some(ErrorCategory::InternalServerError500));
        assert_eq!(ErrorCategory::from_status(503), Some(ErrorCategory::ServiceUnavailable503));
        assert_eq!(ErrorCategory::from_status(403), Some(ErrorCategory::OtherHttp(403)));
        assert_eq!(ErrorCategory::from_status(418), Some(ErrorCategory::OtherHttp(418)));
        assert_eq!(ErrorCategory::from_status(301), Some(ErrorCategory::OtherHttp(301)));
    }

    #[test]
    fn labels_are_fixed() {
        assert_eq!(ErrorCategory::PageNotFound404.label(), "Page Not Found (404)");
        assert_eq!(ErrorCategory::Forbidden405.label(), "Forbidden (405)");
        assert_eq!(ErrorCategory::DnsLookupError.label(), "DNS Lookup Error");
        assert_eq!(ErrorCategory::InternalServerError500.label(), "Internal Server Error (500)");
        assert_eq!(ErrorCategory::ServiceUnavailable503.label(), "Service Unavailable (503)");
        assert_eq!(ErrorCategory::TcpTimeout.label(), "TCP Timeout");
        assert_eq!(ErrorCategory::ResponseNeverReceived.label(), "Response Never Received");
        assert_eq!(ErrorCategory::OtherHttp(403).label(), "Other HTTP (403)");
        assert_eq!(
            ErrorCategory::OtherNetwork("robots_disallowed".into()).label(),
            "Other Network (robots_disallowed)"
        );
    }

    #[test]
    fn default_policy_values() {
        let p = FetchPolicy::default();
        assert_eq!(p.timeout, Duration::from_secs(30));
        assert_eq!(p.network_retries, 1);
        assert_eq!(p.http_retries, 0);
        assert_eq!(p.delay, Duration::from_secs(1));
        assert_eq!(p.max_redirects, 5);
        assert_eq!(p.body_cap, 5 * 1024 * 1024);
        assert!(p.honor_robots);
    }

    #[test]
    fn batch_dedupes_by_canonical_form() {
        // Unfetchable scheme keeps this test offline; dedupe happens first.
        let urls = vec![
            "ftp://example.com/privacy".to_string(),
            "FTP://EXAMPLE.COM/privacy".to_string(),
            "ftp://example.com/privacy/".to_string(),
        ];
        let policy = FetchPolicy {
            honor_robots: false,
            delay: Duration::from_millis(0),
            ..FetchPolicy::default()
        };
        let batch = fetch_batch(&urls, &policy);
        assert_eq!(batch.outcomes.len(), 1);
        assert_eq!(batch.duplicate_inputs.len(), 2);
        assert_eq!(
            batch.outcomes[0].category(),
            Some(&ErrorCategory::OtherNetwork("unsupported_scheme".to_string()))
        );
    }

    #[test]
    fn histogram_counts_by_label() {
        let mk = |category: ErrorCategory| FetchOutcome {
            url: "https://x.example/".into(),
            result: FetchResult::Failure(category),
            attempt_count: 1,
            elapsed_ms: 1,
        };
        let batch = BatchResult {
            outcomes: vec![
                mk(ErrorCategory::PageNotFound404),
                mk(ErrorCategory::PageNotFound404),
                mk(ErrorCategory::DnsLookupError),
            ],
            log: Vec::new(),
            duplicate_inputs: Vec::new(),
            started: Utc::now(),
        };
        let h = batch.error_histogram();
        assert_eq!(h["Page Not Found (404)"], 2);
        assert_eq!(h["DNS Lookup Error"], 1);
        assert_eq!(h.len(), 2);
        assert_eq!(batch.success_count(), 0);
    }

    #[test]
    fn nonexistent_host_is_dns_error() {
        // Reserved TLD per RFC 2606; resolution must fail without network.
        let policy = FetchPolicy {
            honor_robots: false,
            timeout: Duration::from_secs(2),
            ..FetchPolicy::default()
        };
        let outcome = fetch("http://no-such-host.invalid/privacy", &policy);
        assert_eq!(outcome.category(), Some(&ErrorCategory::DnsLookupError));
        assert_eq!(outcome.attempt_count, 0);
    }

    #[test]
    fn politeness_domain_keys() {
        assert_eq!(politeness_domain("https://shop.example.co.uk/x"), "example.co.uk");
        assert_eq!(politeness_domain("http://127.0.0.1:8080/x"), "127.0.0.1");
    }
}
