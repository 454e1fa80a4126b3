//! Run configuration as plain text: `[section]` headers over
//! `key = value` lines. Comments start with `#` or `;`. Sections and
//! keys render in sorted order, so the same settings always serialize
//! to the same bytes and digests are stable.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn new() -> Self {
        Config::default()
    }

    pub fn parse(text: &str) -> Result<Config> {
        let mut config = Config::new();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let Some(name) = name.strip_suffix(']') else {
                    return Err(Error::Config(format!("line {}: unterminated section header", i + 1)));
                };
                let name = name.trim();
                if name.is_empty() {
                    return Err(Error::Config(format!("line {}: empty section name", i + 1)));
                }
                config.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!("line {}: expected key = value", i + 1)));
            };
            let Some(section) = &current else {
                return Err(Error::Config(format!("line {}: key outside any [section]", i + 1)));
            };
            config
                .sections
                .get_mut(section)
                .expect("section inserted on header")
                .insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        Config::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section)?.get(key).map(String::as_str)
    }

    pub fn get_or<'a>(&'a self, section: &str, key: &str, default: &'a str) -> &'a str {
        self.get(section, key).unwrap_or(default)
    }

    /// Typed lookup; a present but unparseable value is an error, a
    /// missing one is the default.
    pub fn parsed_or<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T> {
        match self.get(section, key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| {
                Error::Config(format!("{section}.{key}: cannot parse {raw:?}"))
            }),
        }
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.sections
            .entry(section.to_string())
            .or_default()
            .insert(key.to_string(), value.into());
    }

    pub fn sections(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    fn render_section(&self, name: &str) -> String {
        let mut out = String::new();
        if let Some(section) = self.sections.get(name) {
            for (key, value) in section {
                out.push_str(key);
                out.push_str(" = ");
                out.push_str(value);
                out.push('\n');
            }
        }
        out
    }

    /// Canonical serialization, stable across parse/render round trips.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for name in self.sections.keys() {
            if !out.is_empty() {
                out.push('\n');
            }
            out.push('[');
            out.push_str(name);
            out.push_str("]\n");
            out.push_str(&self.render_section(name));
        }
        out
    }

    /// Digest over the settings a stage can observe: the shared
    /// `[pipeline]` section plus the stage's own section. Unrelated
    /// sections never invalidate a stage's cached output.
    pub fn stage_digest(&self, stage: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(stage.as_bytes());
        hasher.update(b"\n--pipeline--\n");
        hasher.update(self.render_section("pipeline").as_bytes());
        hasher.update(b"\n--stage--\n");
        hasher.update(self.render_section(stage).as_bytes());
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for byte in digest {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }
}
