//! Minimal robots.txt handling: prefix rules per user-agent group,
//! longest match wins, Allow beats Disallow on ties. Wildcards are not
//! interpreted; lines containing them act as plain prefixes.

/// Compiled rules relevant to one user agent.
#[derive(Debug, Clone, Default)]
pub struct RobotsPolicy {
    /// (allow, path prefix), order irrelevant.
    rules: Vec<(bool, String)>,
}

impl RobotsPolicy {
    pub fn allow_all() -> RobotsPolicy {
        RobotsPolicy::default()
    }

    /// Parses a robots.txt body, keeping the groups addressed to `agent`.
    /// If any group names the agent specifically, the `*` groups are
    /// ignored, following common crawler behavior.
    pub fn parse(text: &str, agent: &str) -> RobotsPolicy {
        struct Group {
            agents: Vec<String>,
            rules: Vec<(bool, String)>,
        }
        let mut groups: Vec<Group> = Vec::new();
        let mut in_agent_run = false;
        for raw in text.lines() {
            let line = match raw.split_once('#') {
                Some((before, _)) => before,
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let Some((field, value)) = line.split_once(':') else {
                continue;
            };
            let field = field.trim().to_ascii_lowercase();
            let value = value.trim();
            match field.as_str() {
                "user-agent" => {
                    if !in_agent_run {
                        groups.push(Group {
                            agents: Vec::new(),
                            rules: Vec::new(),
                        });
                        in_agent_run = true;
                    }
                    if let Some(g) = groups.last_mut() {
                        g.agents.push(value.to_ascii_lowercase());
                    }
                }
                "allow" | "disallow" => {
                    in_agent_run = false;
                    if let Some(g) = groups.last_mut() {
                        // An empty Disallow permits everything; it adds
                        // no rule. An empty Allow is equally inert.
                        if !value.is_empty() {
                            g.rules.push((field == "allow", value.to_string()));
                        }
                    }
                }
                _ => {
                    in_agent_run = false;
                }
            }
        }

        let agent_lower = agent.to_ascii_lowercase();
        let matches_specific = |g: &Group| {
            g.agents
                .iter()
                .any(|a| a != "*" && (agent_lower.contains(a.as_str()) || a.contains(&agent_lower)))
        };
        let any_specific = groups.iter().any(|g| matches_specific(g) && !g.rules.is_empty());
        let mut rules = Vec::new();
        for g in &groups {
            let applies = if any_specific {
                matches_specific(g)
            } else {
                g.agents.iter().any(|a| a == "*")
            };
            if applies {
                rules.extend(g.rules.iter().cloned());
            }
        }
        RobotsPolicy { rules }
    }

    /// Longest-prefix decision for a request path. Unmatched paths are
    /// allowed.
    pub fn allows(&self, path: &str) -> bool {
        let mut best: Option<(usize, bool)> = None;
        for (allow, prefix) in &self.rules {
            if path.starts_with(prefix.as_str()) {
                let len = prefix.len();
                best = match best {
                    Some((blen, ballow)) if blen > len => Some((blen, ballow)),
                    Some((blen, ballow)) if blen == len => Some((blen, ballow || *allow)),
                    _ => Some((len, *allow)),
                };
            }
        }
        best.map(|(_, allow)| allow).unwrap_or(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const AGENT: &str = "policorpus/0.1";

    #[test]
    fn empty_file_allows_everything() {
        let p = RobotsPolicy::parse("", AGENT);
        assert!(p.allows("/anything"));
    }

    #[test]
    fn star_group_disallow() {
        let p = RobotsPolicy::parse("User-agent: *\nDisallow: /private/", AGENT);
        assert!(!p.allows("/private/page"));
        assert!(p.allows("/public/page"));
    }

    #[test]
    fn specific_group_overrides_star() {
        let text = "User-agent: *\nDisallow: /\n\nUser-agent: policorpus\nDisallow: /secret/";
        let p = RobotsPolicy::parse(text, AGENT);
        assert!(p.allows("/open"));
        assert!(!p.allows("/secret/x"));
    }

    #[test]
    fn longest_match_and_allow_beats_disallow() {
        let text = "User-agent: *\nDisallow: /docs/\nAllow: /docs/public/";
        let p = RobotsPolicy::parse(text, AGENT);
        assert!(!p.allows("/docs/hidden"));
        assert!(p.allows("/docs/public/readme"));

        let tie = "User-agent: *\nDisallow: /a/\nAllow: /a/";
        assert!(RobotsPolicy::parse(tie, AGENT).allows("/a/x"));
    }

    #[test]
    fn empty_disallow_means_allow_all() {
        let p = RobotsPolicy::parse("User-agent: *\nDisallow:", AGENT);
        assert!(p.allows("/x"));
    }

    #[test]
    fn comments_and_case_handled() {
        let text = "# preamble\nUSER-AGENT: *  # everyone\nDISALLOW: /tmp/ # scratch";
        let p = RobotsPolicy::parse(text, AGENT);
        assert!(!p.allows("/tmp/file"));
    }

    #[test]
    fn stacked_agents_share_rules() {
        let text = "User-agent: alphabot\nUser-agent: policorpus\nDisallow: /x/";
        let p = RobotsPolicy::parse(text, AGENT);
        assert!(!p.allows("/x/1"));
        let other = RobotsPolicy::parse(text, "betabot/2.0");
        assert!(other.allows("/x/1"));
    }
}
