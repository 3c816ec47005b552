//! Flat `key = value` configuration with dotted namespaces.
//!
//! ```text
//! # comment
//! lattice.n_sites = 401
//! lattice.lambda = -0.5
//! sweep.k = 0.01, pi/8, pi/4, pi/2
//! circuit.omega = 2pi*3e9
//! ```
//!
//! The same keys may be given as JSON, either flat (`{"lattice.lambda": -0.5}`)
//! or nested (`{"lattice": {"lambda": -0.5}}`). Numbers accept `pi` factors,
//! so `2pi*3e9`, `2*pi*3e9` and `pi/4` all parse.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid JSON config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("key `{key}` is given twice")]
    Duplicate { key: String },
    #[error("key `{key}`: cannot parse `{value}` as {expected}")]
    Invalid {
        key: String,
        value: String,
        expected: &'static str,
    },
    #[error("key `{key}`: {message}")]
    OutOfRange { key: String, message: String },
    #[error("unknown config keys: {0}")]
    Unknown(String),
}

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        if is_json {
            Self::from_json(&text)
        } else {
            Self::parse(&text)
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() || key.contains(char::is_whitespace) {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    message: format!("bad key `{key}`"),
                });
            }
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.to_string(), value).is_some() {
                return Err(ConfigError::Duplicate { key: key.to_string() });
            }
        }
        Ok(Self {
            values,
            used: RefCell::default(),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let root: serde_json::Value = serde_json::from_str(text)?;
        let mut values = BTreeMap::new();
        flatten_json("", &root, &mut values)?;
        Ok(Self {
            values,
            used: RefCell::default(),
        })
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn raw(&self, key: &str) -> Option<&str> {
        let v = self.values.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(v.as_str())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.raw(key)
            .map(|v| {
                parse_number(v).ok_or_else(|| ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a number",
                })
            })
            .transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let inner = v.trim().trim_start_matches('[').trim_end_matches(']');
        inner
            .split(',')
            .map(|item| {
                let item = item.trim().trim_matches('"');
                parse_number(item).ok_or_else(|| ConfigError::Invalid {
                    key: key.to_string(),
                    value: item.to_string(),
                    expected: "a list of numbers",
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.raw(key)
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| ConfigError::Invalid {
                    key: key.to_string(),
                    value: v.to_string(),
                    expected: "a non-negative integer",
                })
            })
            .transpose()
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        Ok(self.usize(key)?.unwrap_or(default))
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    /// Fails on keys nobody asked for, which are almost always typos.
    pub fn ensure_all_used(&self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Unknown(unknown.join(", ")))
        }
    }
}

fn flatten_json(
    prefix: &str,
    value: &serde_json::Value,
    out: &mut BTreeMap<String, String>,
) -> Result<(), ConfigError> {
    use serde_json::Value;
    let text = match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, out)?;
            }
            return Ok(());
        }
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(","),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if out.insert(prefix.to_string(), text).is_some() {
        return Err(ConfigError::Duplicate {
            key: prefix.to_string(),
        });
    }
    Ok(())
}

fn parse_factor(token: &str) -> Option<f64> {
    let token = token.trim();
    if token.is_empty() {
        return None;
    }
    if let Some(coef) = token.strip_suffix("pi") {
        let coef = coef.trim();
        return if coef.is_empty() {
            Some(PI)
        } else {
            coef.parse::<f64>().ok().map(|c| c * PI)
        };
    }
    token.parse::<f64>().ok()
}

/// Parses a plain number or a product/quotient of factors that may use `pi`.
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, text.strip_prefix('+').unwrap_or(text)),
    };
    if let Ok(v) = body.parse::<f64>() {
        return Some(sign * v);
    }
    let mut value = 1.0;
    let mut op = '*';
    let mut start = 0;
    let bytes = body.as_bytes();
    for i in 0..=bytes.len() {
        let at_end = i == bytes.len();
        let c = if at_end { '*' } else { bytes[i] as char };
        if c == '*' || c == '/' {
            let factor = parse_factor(&body[start..i])?;
            if op == '*' {
                value *= factor;
            } else {
                value /= factor;
            }
            op = c;
            start = i + 1;
        }
    }
    let v = sign * value;
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_sugar() {
        assert_eq!(parse_number("-0.5"), Some(-0.5));
        assert_eq!(parse_number("2pi*3e9"), Some(2.0 * PI * 3e9));
        assert_eq!(parse_number("2*pi*3e9"), Some(2.0 * PI * 3e9));
        assert_eq!(parse_number("pi/4"), Some(PI / 4.0));
        assert_eq!(parse_number("-pi/8"), Some(-PI / 8.0));
        assert_eq!(parse_number("6e-15"), Some(6e-15));
        assert_eq!(parse_number("2pi*0.35e9"), Some(2.0 * PI * 0.35e9));
        assert_eq!(parse_number("abc"), None);
        assert_eq!(parse_number("2**3"), None);
        assert_eq!(parse_number("1/0"), None);
    }

    #[test]
    fn key_value_text() {
        let cfg = Config::parse(
            "# header\nlattice.lambda = -0.5  # trailing\n\nsweep.k = 0.01, pi/8, pi/4\nlattice.n_sites = 401\n",
        )
        .unwrap();
        assert_eq!(cfg.f64("lattice.lambda").unwrap(), Some(-0.5));
        assert_eq!(
            cfg.f64_list("sweep.k").unwrap(),
            Some(vec![0.01, PI / 8.0, PI / 4.0])
        );
        assert_eq!(cfg.usize("lattice.n_sites").unwrap(), Some(401));
        assert_eq!(cfg.f64("missing").unwrap(), None);
        cfg.ensure_all_used().unwrap();
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            Config::parse("a = 1\nnonsense\n"),
            Err(ConfigError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            Config::parse("a = 1\na = 2\n"),
            Err(ConfigError::Duplicate { .. })
        ));
        let cfg = Config::parse("a = x").unwrap();
        assert!(matches!(cfg.f64("a"), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn unknown_keys_reported() {
        let cfg = Config::parse("lattice.lamda = 1\nlattice.lambda = 2").unwrap();
        cfg.f64("lattice.lambda").unwrap();
        let err = cfg.ensure_all_used().unwrap_err();
        assert!(err.to_string().contains("lattice.lamda"));
    }

    #[test]
    fn json_nested_and_flat() {
        let nested = Config::from_json(r#"{"lattice": {"lambda": -0.5, "n_sites": 401}, "sweep.k": [0.1, "pi/2"]}"#)
            .unwrap();
        assert_eq!(nested.f64("lattice.lambda").unwrap(), Some(-0.5));
        assert_eq!(nested.usize("lattice.n_sites").unwrap(), Some(401));
        assert_eq!(nested.f64_list("sweep.k").unwrap(), Some(vec![0.1, PI / 2.0]));
        let text = Config::parse("lattice.lambda = -0.5\nlattice.n_sites = 401").unwrap();
        assert_eq!(text.f64("lattice.lambda").unwrap(), nested.f64("lattice.lambda").unwrap());
    }
}
