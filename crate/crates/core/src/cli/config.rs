//! Settings from a TOML file merged under command-line flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use super::CliError;

/// Resolves each setting from the flags, then the config file, then the
/// default, and remembers what was used so it can be echoed into outputs.
#[derive(Debug, Default)]
pub struct Resolver {
    flags: BTreeMap<String, String>,
    file: BTreeMap<String, String>,
    used: Vec<(String, String)>,
}

fn normalize(key: &str) -> String {
    key.replace('_', "-")
}

fn toml_text(key: &str, v: &toml::Value) -> Result<String, CliError> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => format!("{f:e}"),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => items
            .iter()
            .map(|i| toml_text(key, i))
            .collect::<Result<Vec<_>, _>>()?
            .join(","),
        _ => return Err(CliError::Config(format!("config key '{key}' has an unsupported type"))),
    })
}

impl Resolver {
    /// `flags` lists every key the command understands with its flag value,
    /// if given. Config keys outside that list are rejected.
    pub fn new(flags: Vec<(&str, Option<String>)>, config: Option<&Path>) -> Result<Self, CliError> {
        let known: Vec<String> = flags.iter().map(|(k, _)| normalize(k)).collect();
        let flags: BTreeMap<String, String> =
            flags.into_iter().filter_map(|(k, v)| v.map(|v| (normalize(k), v))).collect();
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
            let table: toml::Table = text
                .parse()
                .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
            for (k, v) in &table {
                let key = normalize(k);
                if !known.contains(&key) {
                    return Err(CliError::Config(format!("unknown config key '{k}'")));
                }
                file.insert(key, toml_text(k, v)?);
            }
        }
        Ok(Resolver { flags, file, used: Vec::new() })
    }

    fn lookup(&self, key: &str) -> Option<String> {
        self.flags.get(key).or_else(|| self.file.get(key)).cloned()
    }

    fn record(&mut self, key: &str, text: &str) {
        match self.used.iter_mut().find(|(k, _)| k == key) {
            Some(entry) => entry.1 = text.to_string(),
            None => self.used.push((key.to_string(), text.to_string())),
        }
    }

    /// Whether the user set `key` by flag or file.
    pub fn is_set(&self, key: &str) -> bool {
        self.lookup(key).is_some()
    }

    pub fn get<T>(&mut self, key: &str, default: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        let text = self.lookup(key).unwrap_or_else(|| default.to_string());
        let value = parse(&text).map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
        self.record(key, &text);
        Ok(value)
    }

    pub fn opt<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, CliError> {
        match self.lookup(key) {
            Some(text) => {
                let value = parse(&text).map_err(|e| CliError::Config(format!("--{key}: {e}")))?;
                self.record(key, &text);
                Ok(Some(value))
            }
            None => Ok(None),
        }
    }

    pub fn require<T>(&mut self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        self.opt(key, parse)?
            .ok_or_else(|| CliError::Config(format!("--{key} is required")))
    }

    /// Records a derived setting that has no flag of its own.
    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.record(key, &value.to_string());
    }

    /// `key = value` lines for output headers.
    pub fn header(&self, command: &str) -> Vec<String> {
        let mut lines = vec![format!("chaolab {} {command}", env!("CARGO_PKG_VERSION"))];
        lines.extend(self.used.iter().map(|(k, v)| format!("{k} = {v}")));
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::numeric;
    use std::io::Write;

    #[test]
    fn flags_override_file_and_defaults() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "p = 7\neps1 = 1e-7\nmap = \"logistic-sym\"\nrng_seed = 4").unwrap();
        let mut r = Resolver::new(
            vec![("p", Some("3".into())), ("eps1", None), ("map", None), ("bins", None), ("rng-seed", None)],
            Some(f.path()),
        )
        .unwrap();
        assert_eq!(r.get("p", "1", numeric::size).unwrap(), 3);
        assert_eq!(r.get("eps1", "0", numeric::real).unwrap(), 1e-7);
        assert_eq!(r.get("bins", "10", numeric::size).unwrap(), 10);
        assert_eq!(r.get("rng-seed", "0", numeric::count).unwrap(), 4);
        let h = r.header("hist");
        assert!(h.contains(&"p = 3".to_string()));
        assert!(h.contains(&"eps1 = 1e-7".to_string()));
        assert!(h.contains(&"bins = 10".to_string()));
    }

    #[test]
    fn unknown_keys_and_bad_values() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "colour = 3").unwrap();
        assert!(matches!(Resolver::new(vec![("p", None)], Some(f.path())), Err(CliError::Config(_))));
        let mut r = Resolver::new(vec![("p", Some("x".into()))], None).unwrap();
        assert!(matches!(r.get("p", "1", numeric::size), Err(CliError::Config(_))));
    }
}
