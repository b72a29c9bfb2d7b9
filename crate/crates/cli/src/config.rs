//! `key = value` config files and flag/file/default resolution.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Keys from an INI-style file. Keys before any `[section]` apply to every
/// command; keys under `[name]` apply only to subcommand `name`.
#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, (String, usize)>,
}

fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl ConfigFile {
    pub fn parse(text: &str, command: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        let mut active = true;
        for (index, raw) in text.lines().enumerate() {
            let line_no = index + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(section) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                active = section.trim() == command;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {line_no}: expected key = value")))?;
            let key = normalize_key(key);
            if key.is_empty() {
                return Err(CliError::Usage(format!("config line {line_no}: empty key")));
            }
            if active {
                values.insert(key, (value.trim().to_string(), line_no));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path, command: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, command)
    }
}

/// Resolves each setting as flag, then config file, then default, and
/// remembers the resolved values for report headers.
pub struct Resolver {
    file: ConfigFile,
    resolved: Vec<(String, String)>,
}

impl Resolver {
    pub fn new(file: ConfigFile) -> Self {
        Self { file, resolved: Vec::new() }
    }

    fn lookup<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            self.file.values.remove(key);
            return Ok(flag);
        }
        match self.file.values.remove(key) {
            Some((text, line)) => text
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config line {line}: invalid {key} '{text}': {e}"))),
            None => Ok(None),
        }
    }

    fn record<T: Display>(&mut self, key: &str, value: &T) {
        self.resolved.push((key.to_string(), value.to_string()));
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self.lookup(key, flag)?.unwrap_or(default);
        self.record(key, &value);
        Ok(value)
    }

    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = self
            .lookup(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required setting --{key}")))?;
        self.record(key, &value);
        Ok(value)
    }

    /// Fails on config keys that no setting consumed.
    pub fn finish(self) -> Result<Vec<(String, String)>, CliError> {
        if let Some((key, (_, line))) = self.file.values.iter().next() {
            return Err(CliError::Usage(format!("config line {line}: unknown key '{key}'")));
        }
        Ok(self.resolved)
    }
}

/// Comma-separated non-negative integers; `a..b` expands to `a, a+1, ..., b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for item in s.split(',').map(str::trim) {
            if item.is_empty() {
                return Err("empty list entry".into());
            }
            let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}"));
            match item.split_once("..") {
                Some((a, b)) => {
                    let (a, b) = (parse(a)?, parse(b)?);
                    if a > b {
                        return Err(format!("empty range {item}"));
                    }
                    out.extend(a..=b);
                }
                None => out.push(parse(item)?),
            }
        }
        Ok(Self(out))
    }
}

impl Display for IndexList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let items: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&items.join(","))
    }
}
