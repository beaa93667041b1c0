//! Flat `key = value` parameters from a file and the command line.

use crate::CliError;
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

/// Raw parameters plus the resolved values actually read by a command.
#[derive(Debug, Default)]
pub struct Params {
    raw: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

fn split_pair(line: &str) -> Option<(String, String)> {
    let (k, v) = line.split_once('=')?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.to_string()))
}

impl Params {
    /// Parse a config file; `#` starts a comment, blank lines are skipped.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut p = Params::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = split_pair(line)
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            p.raw.insert(k, v);
        }
        Ok(p)
    }

    /// Apply `key=value` overrides; later entries win.
    pub fn apply(&mut self, pairs: &[String]) -> Result<(), CliError> {
        for s in pairs {
            let (k, v) = split_pair(s)
                .ok_or_else(|| CliError::Config(format!("expected key=value, got {s:?}")))?;
            self.raw.insert(k, v);
        }
        Ok(())
    }

    /// Replace the resolved text of an already read key, e.g. a computed default.
    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.raw.insert(key.to_string(), value.to_string());
    }

    fn get<T: FromStr>(&mut self, key: &str, default: Option<&str>) -> Result<T, CliError> {
        let text = match (self.raw.get(key), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CliError::Config(format!("missing required key `{key}`"))),
        };
        let v = text
            .parse()
            .map_err(|_| CliError::Config(format!("`{key}`: cannot parse {text:?}")))?;
        self.resolved.insert(key.to_string(), text);
        Ok(v)
    }

    pub fn f64(&mut self, key: &str, default: &str) -> Result<f64, CliError> {
        let v: f64 = self.get(key, Some(default))?;
        if v.is_nan() {
            return Err(CliError::Config(format!("`{key}` is NaN")));
        }
        Ok(v)
    }

    pub fn usize(&mut self, key: &str, default: &str) -> Result<usize, CliError> {
        self.get(key, Some(default))
    }

    pub fn u64(&mut self, key: &str, default: &str) -> Result<u64, CliError> {
        self.get(key, Some(default))
    }

    pub fn string(&mut self, key: &str, default: &str) -> Result<String, CliError> {
        self.get(key, Some(default))
    }

    pub fn parsed<T: FromStr>(&mut self, key: &str, default: &str) -> Result<T, CliError> {
        self.get(key, Some(default))
    }

    /// Comma-separated list of numbers.
    pub fn f64_list(&mut self, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let text: String = self.get(key, Some(default))?;
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| !v.is_nan())
                    .ok_or_else(|| CliError::Config(format!("`{key}`: bad number {s:?}")))
            })
            .collect()
    }

    /// Keys that were supplied but never read by the command.
    pub fn unused(&self) -> Vec<&str> {
        self.raw
            .keys()
            .filter(|k| !self.resolved.contains_key(*k))
            .map(String::as_str)
            .collect()
    }

    /// Take every raw key matching `pred` out of the unused set, returning them.
    pub fn take_matching(&mut self, pred: impl Fn(&str) -> bool) -> Vec<(String, String)> {
        let hits: Vec<(String, String)> = self
            .raw
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        for (k, v) in &hits {
            self.resolved.insert(k.clone(), v.clone());
        }
        hits
    }

    /// Fail on keys the command does not know.
    pub fn finish(&self) -> Result<(), CliError> {
        let unused = self.unused();
        if unused.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(format!(
                "unknown key(s): {}",
                unused.join(", ")
            )))
        }
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let mut p = Params::parse("# run\nr = 1.5\n\nt=2 # horizon\n").unwrap();
        p.apply(&["t=3".into()]).unwrap();
        assert_eq!(p.f64("r", "0").unwrap(), 1.5);
        assert_eq!(p.f64("t", "0").unwrap(), 3.0);
        assert_eq!(p.usize("n", "10").unwrap(), 10);
        assert_eq!(p.resolved().get("n").unwrap(), "10");
        assert!(p.finish().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Params::parse("r 1").is_err());
        let mut p = Params::parse("r = x\nextra = 1").unwrap();
        assert!(p.f64("r", "1").is_err());
        assert!(p.unused().contains(&"extra"));
        assert!(p.finish().is_err());
        let mut p = Params::parse("r = NaN").unwrap();
        assert!(p.f64("r", "1").is_err());
    }

    #[test]
    fn lists() {
        let mut p = Params::parse("phi = 0.2, 0.5,0.8").unwrap();
        assert_eq!(p.f64_list("phi", "1").unwrap(), vec![0.2, 0.5, 0.8]);
        assert!(p.f64_list("other", "1,x").is_err());
    }
}
