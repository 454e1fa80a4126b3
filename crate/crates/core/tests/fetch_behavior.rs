//! Crawl behavior against a scripted server: per-domain politeness and
//! robots.txt compliance.

mod common;

use std::collections::BTreeMap;
use std::time::Duration;

use policorpus::fetcher::{self, FetchPolicy, FetchResult};

use common::{Reply, ScriptedServer};

fn html(text: &str) -> Reply {
    Reply::Html(format!("<html><body><p>{text}</p></body></html>"))
}

#[test]
fn same_domain_requests_keep_the_configured_gap() {
    let hosts = ["127.0.0.1", "127.0.0.2"];
    let mut routes = Vec::new();
    for host in hosts {
        for i in 0..4 {
            routes.push((host.to_string(), format!("/page-{i}"), html("fine")));
        }
    }
    let server = ScriptedServer::start(routes);

    let mut urls = Vec::new();
    for i in 0..4 {
        for host in hosts {
            urls.push(format!("http://{host}:{}/page-{i}", server.port));
        }
    }
    let delay = Duration::from_millis(150);
    let policy = FetchPolicy {
        delay,
        network_retries: 0,
        honor_robots: false,
        concurrency: 4,
        ..FetchPolicy::default()
    };
    let batch = fetcher::fetch_batch(&urls, &policy);
    assert_eq!(batch.success_count(), urls.len());

    let mut starts_by_domain: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
    for entry in &batch.log {
        starts_by_domain.entry(entry.domain.as_str()).or_default().push(entry.started_at_ms);
    }
    assert_eq!(starts_by_domain.len(), hosts.len());
    // Allow a little scheduler slack below the nominal spacing.
    let floor = delay.as_millis() as u64 - 20;
    for (domain, mut starts) in starts_by_domain {
        assert_eq!(starts.len(), 4);
        starts.sort_unstable();
        for pair in starts.windows(2) {
            let gap = pair[1] - pair[0];
            assert!(gap >= floor, "{domain}: consecutive starts only {gap}ms apart");
        }
    }
}

#[test]
fn disallowed_paths_are_never_requested() {
    let host = "127.0.0.1";
    let robots = "User-agent: *\nDisallow: /secret\n";
    let server = ScriptedServer::start(vec![
        (host.to_string(), "/robots.txt".to_string(), Reply::Text(robots.to_string())),
        (host.to_string(), "/secret/report".to_string(), html("hidden")),
        (host.to_string(), "/open".to_string(), html("fine")),
    ]);

    let urls = vec![
        format!("http://{host}:{}/secret/report", server.port),
        format!("http://{host}:{}/open", server.port),
    ];
    let policy = FetchPolicy {
        delay: Duration::ZERO,
        network_retries: 0,
        honor_robots: true,
        ..FetchPolicy::default()
    };
    let batch = fetcher::fetch_batch(&urls, &policy);

    let mut saw_block = false;
    for outcome in &batch.outcomes {
        if outcome.url.contains("/secret/") {
            match &outcome.result {
                FetchResult::Failure(category) => {
                    assert_eq!(category.label(), "Other Network (robots_disallowed)");
                    saw_block = true;
                }
                FetchResult::Success(_) => panic!("disallowed URL was fetched"),
            }
        } else {
            assert!(matches!(outcome.result, FetchResult::Success(_)), "{} failed", outcome.url);
        }
    }
    assert!(saw_block);

    let requested_paths: Vec<String> = server.requests().into_iter().map(|(_, path)| path).collect();
    assert!(
        !requested_paths.iter().any(|p| p.starts_with("/secret")),
        "server saw a disallowed request: {requested_paths:?}"
    );
    assert!(requested_paths.iter().any(|p| p == "/robots.txt"));
    assert!(requested_paths.iter().any(|p| p == "/open"));
}
