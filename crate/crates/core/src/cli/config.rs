//! Configuration files: `key = value` lines grouped by `[section]` headers.
//!
//! Keys before the first header are global. `#` and `;` start comments at
//! the beginning of a line, `#` also after whitespace. Values may be wrapped
//! in double quotes. Dashes in keys are read as underscores, so
//! `num-points` and `num_points` name the same setting.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

pub const GLOBAL: &str = "";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub fn normalize_key(k: &str) -> String {
    k.trim().replace('-', "_")
}

fn strip_comment(line: &str) -> &str {
    let trimmed = line.trim_start();
    if trimmed.starts_with('#') || trimmed.starts_with(';') {
        return "";
    }
    let bytes = line.as_bytes();
    let mut in_quotes = false;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'"' => in_quotes = !in_quotes,
            b'#' if !in_quotes && i > 0 && bytes[i - 1].is_ascii_whitespace() => return &line[..i],
            _ => {}
        }
    }
    line
}

pub fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut cfg = ConfigFile::default();
    let mut section = GLOBAL.to_string();
    cfg.sections.entry(section.clone()).or_default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = strip_comment(raw).trim();
        let at = lineno + 1;
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .map(str::trim)
                .filter(|n| valid_name(n))
                .ok_or_else(|| Error::invalid(format!("line {at}: bad section header {line:?}")))?;
            section = name.to_string();
            cfg.sections.entry(section.clone()).or_default();
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("line {at}: expected key = value")))?;
        let key = normalize_key(key);
        if !valid_name(&key) {
            return Err(Error::invalid(format!("line {at}: bad key {key:?}")));
        }
        let value = value.trim();
        let value = match value.strip_prefix('"') {
            Some(rest) => rest
                .strip_suffix('"')
                .filter(|inner| !inner.contains('"'))
                .ok_or_else(|| Error::invalid(format!("line {at}: unbalanced quotes")))?,
            None if value.contains('"') => {
                return Err(Error::invalid(format!("line {at}: stray quote")));
            }
            None => value,
        };
        let entries = cfg.sections.entry(section.clone()).or_default();
        if entries.insert(key.clone(), value.to_string()).is_some() {
            return Err(Error::invalid(format!("line {at}: duplicate key {key:?} in [{section}]")));
        }
    }
    Ok(cfg)
}

/// The settings one command sees: global keys, then each listed section in
/// turn, later ones overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, (String, String)>,
    strict: Vec<String>,
    used: std::cell::RefCell<std::collections::BTreeSet<String>>,
}

impl Settings {
    pub fn empty() -> Settings {
        Settings::default()
    }

    /// `sections` goes from least to most specific, e.g. `["check", "check.pohozaev"]`.
    /// Keys from these sections must be recognised by the command; global
    /// keys may be meant for another command.
    pub fn for_command(cfg: &ConfigFile, sections: &[&str]) -> Settings {
        let mut values = BTreeMap::new();
        for name in std::iter::once(GLOBAL).chain(sections.iter().copied()) {
            if let Some(entries) = cfg.sections.get(name) {
                for (k, v) in entries {
                    values.insert(k.clone(), (name.to_string(), v.clone()));
                }
            }
        }
        Settings { values, strict: sections.iter().map(|s| s.to_string()).collect(), ..Default::default() }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        let key = normalize_key(key);
        self.used.borrow_mut().insert(key.clone());
        self.values.get(&key).map(|(_, v)| v.as_str())
    }

    /// Flag, then file, then default.
    pub fn pick<T>(&self, flag: Option<T>, key: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Option<T>> {
        let from_file = self.get(key);
        match (flag, from_file) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(s)) => parse(s)
                .map(Some)
                .map_err(|e| Error::invalid(format!("config key {key}: {e}"))),
            (None, None) => Ok(None),
        }
    }

    /// Fails on keys in the command's own sections that nothing asked for.
    pub fn reject_unknown(&self) -> Result<()> {
        let used = self.used.borrow();
        for (k, (section, _)) in &self.values {
            if self.strict.contains(section) && !used.contains(k) {
                return Err(Error::invalid(format!("unknown key {k:?} in [{section}]")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_comments_quotes() {
        let cfg = parse_config(
            "seed = 7\n# comment\n[verify]\nnum-points = 10 # trailing\nout = \"a b.json\"\n[check.pohozaev]\nalpha=4\n",
        )
        .unwrap();
        assert_eq!(cfg.sections[""]["seed"], "7");
        assert_eq!(cfg.sections["verify"]["num_points"], "10");
        assert_eq!(cfg.sections["verify"]["out"], "a b.json");
        assert_eq!(cfg.sections["check.pohozaev"]["alpha"], "4");
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for bad in ["[verify", "novalue", "[ ]", "a = \"x", "a = 1\na = 2", "k y = 1", "a = x\"y"] {
            assert!(parse_config(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn later_sections_override_and_unknown_keys_fail() {
        let cfg = parse_config("alpha = 2\n[check]\nalpha = 3\n[check.pohozaev]\nalpha = 4\nbogus = 1\n").unwrap();
        let s = Settings::for_command(&cfg, &["check", "check.pohozaev"]);
        assert_eq!(s.get("alpha"), Some("4"));
        assert!(s.reject_unknown().is_err());
    }
}
