//! Sectioned key = value configuration files with line-numbered diagnostics.
//!
//! ```text
//! [grid]
//! ndim = 1
//! points = 256
//! half_width = 64.0
//! ```
//!
//! `#` and `;` start comments. Every lookup error carries the file line of
//! the offending value (or names the missing key).

use anyhow::{anyhow, bail, Result};
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

#[derive(Debug, Default)]
pub struct Config {
    file: String,
    sections: HashMap<String, HashMap<String, Entry>>,
}

impl Config {
    pub fn parse(text: &str, file_name: &str) -> Result<Self> {
        let mut sections: HashMap<String, HashMap<String, Entry>> = HashMap::new();
        let mut current = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = match raw.find(['#', ';']) {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| anyhow!("{file_name}:{line_no}: unterminated section header"))?;
                current = name.trim().to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("{file_name}:{line_no}: expected `key = value`, got `{line}`");
            };
            if current.is_empty() {
                bail!("{file_name}:{line_no}: key `{}` outside any [section]", key.trim());
            }
            sections.get_mut(&current).unwrap().insert(
                key.trim().to_string(),
                Entry { value: value.trim().to_string(), line: line_no },
            );
        }
        Ok(Config { file: file_name.to_string(), sections })
    }

    pub fn load(path: &Path) -> Result<Self> {
        use anyhow::Context;
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn has(&self, section: &str, key: &str) -> bool {
        self.sections.get(section).map(|s| s.contains_key(key)).unwrap_or(false)
    }

    fn entry(&self, section: &str, key: &str) -> Result<&Entry> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .ok_or_else(|| anyhow!("{}: missing key `{key}` in section [{section}]", self.file))
    }

    pub fn str(&self, section: &str, key: &str) -> Result<&str> {
        Ok(self.entry(section, key)?.value.as_str())
    }

    pub fn f64(&self, section: &str, key: &str) -> Result<f64> {
        let e = self.entry(section, key)?;
        e.value.parse::<f64>().map_err(|_| {
            anyhow!("{}:{}: `{key} = {}` is not a number", self.file, e.line, e.value)
        })
    }

    pub fn f64_or(&self, section: &str, key: &str, default: f64) -> Result<f64> {
        if self.has(section, key) {
            self.f64(section, key)
        } else {
            Ok(default)
        }
    }

    pub fn usize(&self, section: &str, key: &str) -> Result<usize> {
        let e = self.entry(section, key)?;
        e.value.parse::<usize>().map_err(|_| {
            anyhow!("{}:{}: `{key} = {}` is not a nonnegative integer", self.file, e.line, e.value)
        })
    }

    pub fn usize_or(&self, section: &str, key: &str, default: usize) -> Result<usize> {
        if self.has(section, key) {
            self.usize(section, key)
        } else {
            Ok(default)
        }
    }

    pub fn u64_or(&self, section: &str, key: &str, default: u64) -> Result<u64> {
        if !self.has(section, key) {
            return Ok(default);
        }
        let e = self.entry(section, key)?;
        e.value.parse::<u64>().map_err(|_| {
            anyhow!("{}:{}: `{key} = {}` is not a nonnegative integer", self.file, e.line, e.value)
        })
    }

    pub fn bool_or(&self, section: &str, key: &str, default: bool) -> Result<bool> {
        if !self.has(section, key) {
            return Ok(default);
        }
        let e = self.entry(section, key)?;
        match e.value.as_str() {
            "true" | "yes" | "on" | "1" => Ok(true),
            "false" | "no" | "off" | "0" => Ok(false),
            other => bail!("{}:{}: `{key} = {other}` is not a boolean", self.file, e.line),
        }
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&self, section: &str, key: &str) -> Result<Vec<f64>> {
        let e = self.entry(section, key)?;
        e.value
            .split(',')
            .map(|s| {
                s.trim().parse::<f64>().map_err(|_| {
                    anyhow!("{}:{}: `{}` in `{key}` is not a number", self.file, e.line, s.trim())
                })
            })
            .collect()
    }

    /// Attach a line-located context to a semantic validation error.
    pub fn locate(&self, section: &str, key: &str, err: impl std::fmt::Display) -> anyhow::Error {
        match self.entry(section, key) {
            Ok(e) => anyhow!("{}:{}: {err}", self.file, e.line),
            Err(_) => anyhow!("{}: [{section}] {key}: {err}", self.file),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# comment
[grid]
ndim = 1
points = 256        ; trailing comment
half_width = 64.0

[sweep]
amplitudes = 0.2, 0.6, 2.0
";

    #[test]
    fn parses_sections_and_values() {
        let c = Config::parse(SAMPLE, "test.ini").unwrap();
        assert_eq!(c.usize("grid", "points").unwrap(), 256);
        assert_eq!(c.f64("grid", "half_width").unwrap(), 64.0);
        assert_eq!(c.f64_list("sweep", "amplitudes").unwrap(), vec![0.2, 0.6, 2.0]);
        assert!(c.f64_or("grid", "absent", 7.0).unwrap() == 7.0);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let c = Config::parse("[a]\nx = banana\n", "f.ini").unwrap();
        let err = c.f64("a", "x").unwrap_err().to_string();
        assert!(err.contains("f.ini:2"), "{err}");
        let err = Config::parse("x = 1\n", "f.ini").unwrap_err().to_string();
        assert!(err.contains("f.ini:1"), "{err}");
        let err = c.f64("a", "missing").unwrap_err().to_string();
        assert!(err.contains("missing key"), "{err}");
    }
}
