use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// Ordered `key = value` run summary, written as `summary.txt`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    entries: Vec<(String, String)>,
}

impl Summary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: &str, value: impl fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn push_num(&mut self, key: &str, value: f64) {
        self.push(key, format!("{value:.9e}"));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.get(key)?.parse().ok()
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Self {
        let entries = text
            .lines()
            .filter_map(|l| l.split_once('='))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();
        Self { entries }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }

    /// Compares against an expected-summary text. Each non-comment line is
    /// `key = [lo, hi]` (inclusive numeric range) or `key = literal`.
    /// Returns one message per mismatch.
    pub fn check_expected(&self, expected: &str) -> Result<Vec<String>> {
        let mut failures = Vec::new();
        for line in expected.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, want) = line.split_once('=').ok_or_else(|| Error::Format {
                path: "expected summary".into(),
                message: format!("`{line}` is not of the form `key = value`"),
            })?;
            let (key, want) = (key.trim(), want.trim());
            let Some(got) = self.get(key) else {
                failures.push(format!("{key}: missing"));
                continue;
            };
            let ok = match want.strip_prefix('[').and_then(|w| w.strip_suffix(']')) {
                Some(range) => {
                    let bounds: Vec<f64> = range.split(',').filter_map(|b| b.trim().parse().ok()).collect();
                    let [lo, hi] = bounds[..] else {
                        return Err(Error::Format {
                            path: "expected summary".into(),
                            message: format!("bad range `{want}` for `{key}`"),
                        });
                    };
                    got.parse::<f64>().is_ok_and(|x| lo <= x && x <= hi)
                }
                None => got == want,
            };
            if !ok {
                failures.push(format!("{key}: got {got}, expected {want}"));
            }
        }
        Ok(failures)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_expectations() {
        let mut s = Summary::new();
        s.push("status", "converged");
        s.push_num("residual_h1", 0.006);
        let back = Summary::parse(&s.to_string());
        assert_eq!(back, s);
        assert!(back
            .check_expected("# comment\nstatus = converged\nresidual_h1 = [0.003, 0.012]")
            .unwrap()
            .is_empty());
        let fails = back
            .check_expected("status = iteration_limit\nresidual_h1 = [0.1, 1]\ncost = [0, 1]")
            .unwrap();
        assert_eq!(fails.len(), 3);
        assert!(back.check_expected("residual_h1 = [1]").is_err());
    }
}
