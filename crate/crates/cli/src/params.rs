//! Flat `key=value` parameters merged from a config file and command-line flags.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::Value;

use crate::CliError;

/// Parameter values as given, plus the resolved values echoed into the report.
#[derive(Debug, Default)]
pub struct Params {
    given: BTreeMap<String, String>,
    resolved: BTreeMap<String, Value>,
}

/// Parses `key=value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        let key = k.trim().replace('_', "-");
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(out)
}

impl Params {
    /// File values first, then flags; keys outside `allowed` are rejected.
    pub fn merge(file: BTreeMap<String, String>, flags: BTreeMap<String, String>, allowed: &[&str]) -> Result<Self, CliError> {
        let mut given = file;
        for k in given.keys() {
            if !allowed.contains(&k.as_str()) {
                return Err(CliError::usage(format!(
                    "unknown config key {k:?}; allowed: {}",
                    allowed.join(", ")
                )));
            }
        }
        given.extend(flags);
        Ok(Params {
            given,
            resolved: BTreeMap::new(),
        })
    }

    pub fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    fn parse<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, CliError> {
        raw.parse()
            .map_err(|_| CliError::usage(format!("--{key}: cannot parse {raw:?}")))
    }

    pub fn get<T: FromStr + Clone + Into<Value>>(&mut self, key: &str, default: T) -> Result<T, CliError> {
        let v = match self.given.get(key) {
            Some(raw) => self.parse(key, raw)?,
            None => default,
        };
        self.resolved.insert(key.into(), v.clone().into());
        Ok(v)
    }

    pub fn required<T: FromStr + Clone + Into<Value>>(&mut self, key: &str) -> Result<T, CliError> {
        let Some(raw) = self.given.get(key).cloned() else {
            return Err(CliError::usage(format!("--{key} is required")));
        };
        let v: T = self.parse(key, &raw)?;
        self.resolved.insert(key.into(), v.clone().into());
        Ok(v)
    }

    pub fn optional<T: FromStr + Clone + Into<Value>>(&mut self, key: &str) -> Result<Option<T>, CliError> {
        match self.given.get(key).cloned() {
            Some(raw) => {
                let v: T = self.parse(key, &raw)?;
                self.resolved.insert(key.into(), v.clone().into());
                Ok(Some(v))
            }
            None => Ok(None),
        }
    }

    /// Comma-separated list, or `a..b` / `a..=b` inclusive ranges.
    pub fn list<T: FromStr + Clone + Into<Value>>(&mut self, key: &str, default: Option<Vec<T>>) -> Result<Vec<T>, CliError> {
        let vals = match self.given.get(key).cloned() {
            Some(raw) => {
                let mut out = Vec::new();
                for part in raw.split(',') {
                    let part = part.trim();
                    if let Some((a, b)) = part.split_once("..") {
                        let a: i64 = self.parse(key, a)?;
                        let b: i64 = self.parse(key, b.trim_start_matches('='))?;
                        for x in a..=b {
                            out.push(self.parse(key, &x.to_string())?);
                        }
                    } else {
                        out.push(self.parse(key, part)?);
                    }
                }
                if out.is_empty() {
                    return Err(CliError::usage(format!("--{key}: empty list")));
                }
                out
            }
            None => default.ok_or_else(|| CliError::usage(format!("--{key} is required")))?,
        };
        self.resolved
            .insert(key.into(), Value::Array(vals.iter().cloned().map(Into::into).collect()));
        Ok(vals)
    }

    pub fn choice(&mut self, key: &str, default: &str, options: &[&str]) -> Result<String, CliError> {
        let v: String = self.get(key, default.to_string())?;
        if !options.contains(&v.as_str()) {
            return Err(CliError::usage(format!("--{key} must be one of {}, got {v:?}", options.join("|"))));
        }
        Ok(v)
    }

    /// Keys given but never read by the handler.
    pub fn unused(&self) -> Vec<String> {
        self.given.keys().filter(|k| !self.resolved.contains_key(*k)).cloned().collect()
    }

    pub fn echo(&self) -> Value {
        Value::Object(self.resolved.clone().into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = parse_config("# sweep\nn = 3\nmc_samples=10 # trailing\n\n").unwrap();
        assert_eq!(c.get("n").unwrap(), "3");
        assert_eq!(c.get("mc-samples").unwrap(), "10");
        assert!(parse_config("n").is_err());
        assert!(parse_config("n=1\nn=2").is_err());
    }

    #[test]
    fn flags_override_file_and_unknown_keys_fail() {
        let file = parse_config("n=3\nk=2").unwrap();
        let flags = BTreeMap::from([("n".to_string(), "5".to_string())]);
        let mut p = Params::merge(file, flags, &["n", "k"]).unwrap();
        assert_eq!(p.get::<u64>("n", 0).unwrap(), 5);
        assert_eq!(p.get::<u64>("k", 0).unwrap(), 2);
        assert!(Params::merge(parse_config("q=1").unwrap(), BTreeMap::new(), &["n"]).is_err());
    }

    #[test]
    fn lists_and_ranges() {
        let flags = BTreeMap::from([("n".to_string(), "2,5..=7".to_string())]);
        let mut p = Params::merge(BTreeMap::new(), flags, &["n"]).unwrap();
        assert_eq!(p.list::<u64>("n", None).unwrap(), vec![2, 5, 6, 7]);
    }
}
