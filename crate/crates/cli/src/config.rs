//! Plain-text `key = value` configuration with `[section]` headers.
//!
//! Keys before the first header belong to `common`. Lookups consult the
//! subcommand's section first, then `common`.

use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = "common".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| format!("line {}: unterminated section header", i + 1))?;
                current = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = normalise_key(k.trim());
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            sections
                .entry(current.clone())
                .or_default()
                .insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { sections })
    }

    pub fn read(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        let key = normalise_key(key);
        [section, "common"]
            .iter()
            .find_map(|s| self.sections.get(*s).and_then(|m| m.get(&key)))
            .map(String::as_str)
    }

    /// Keys that no subcommand reads.
    pub fn unknown_keys(&self, known: &[&str]) -> Vec<String> {
        self.sections
            .iter()
            .flat_map(|(s, m)| m.keys().map(move |k| (s, k)))
            .filter(|(_, k)| !known.iter().any(|n| normalise_key(n) == **k))
            .map(|(s, k)| format!("[{s}] {k}"))
            .collect()
    }
}

/// `bigD-mult`, `bigd_mult` and `BIGD-MULT` name the same key.
fn normalise_key(k: &str) -> String {
    k.trim_start_matches("--").to_ascii_lowercase().replace('_', "-")
}
