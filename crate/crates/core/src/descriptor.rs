//! Plain-text key-value records.
//!
//! One `key = value` pair per line; blank lines and lines starting with `#`
//! are skipped. Keys may be dotted (`source.kind`) to nest a record inside
//! another. Entry order is preserved so formatted records are reproducible.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Record {
    entries: Vec<(String, String)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder-style insert; replaces an existing key in place.
    pub fn with(mut self, key: impl Into<String>, value: impl fmt::Display) -> Self {
        self.set(key, value);
        self
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl fmt::Display) {
        let key = key.into();
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| *k == key) {
            Some(slot) => slot.1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key)
            .ok_or_else(|| Error::descriptor(format!("missing key '{key}'")))
    }

    pub fn parse_value<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let raw = self.require(key)?;
        raw.parse()
            .map_err(|e| Error::descriptor(format!("key '{key}': cannot parse {raw:?}: {e}")))
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        match self.get(key) {
            Some(_) => self.parse_value(key),
            None => Ok(default),
        }
    }

    pub fn rational(&self, key: &str) -> Result<BigRational> {
        parse_rational(self.require(key)?)
            .map_err(|e| Error::descriptor(format!("key '{key}': {e}")))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Entries under `prefix.`, with the prefix stripped.
    pub fn section(&self, prefix: &str) -> Record {
        let lead = format!("{prefix}.");
        Record {
            entries: self
                .entries
                .iter()
                .filter_map(|(k, v)| k.strip_prefix(&lead).map(|k| (k.to_string(), v.clone())))
                .collect(),
        }
    }

    /// Appends `other` under `prefix.`.
    pub fn nest(mut self, prefix: &str, other: &Record) -> Self {
        for (k, v) in other.iter() {
            self.set(format!("{prefix}.{k}"), v);
        }
        self
    }

    pub fn parse(text: &str) -> Result<Record> {
        let mut rec = Record::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::descriptor(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::descriptor(format!("line {}: empty key", lineno + 1)));
            }
            rec.set(k, v.trim());
        }
        Ok(rec)
    }

    pub fn load(path: &Path) -> Result<Record> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Record::parse(&text)
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

/// Parses `"num/den"` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::descriptor(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d == BigInt::from(0) {
        return Err(Error::descriptor(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
