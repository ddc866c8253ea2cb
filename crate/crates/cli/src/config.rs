//! `key=value` configuration files and flag precedence.
//!
//! A value given on the command line wins, then the configuration file, then
//! the built-in default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::parser::ValueSource;
use clap::ArgMatches;

use crate::CliError;

pub const KEYS: &[&str] = &[
    "lexicon_dir",
    "mapping",
    "weights",
    "sentinel",
    "context",
    "hidden",
    "eta",
    "seed",
    "t0",
    "t1",
    "max_epochs",
    "patience",
    "min_epochs",
    "init_range",
    "shuffle",
    "marker",
    "np_share_unknown",
    "np_share_known",
    "flag_mode",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg =
            Self::parse(&text).map_err(|(line, msg)| CliError::Usage(format!("{}:{line}: {msg}", path.display())))?;
        cfg.path = Some(path.to_path_buf());
        Ok(cfg)
    }

    /// Blank lines and `#` comments are skipped; keys accept `-` or `_`.
    pub fn parse(text: &str) -> Result<Self, (usize, String)> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err((i + 1, format!("expected key=value, got {line:?}")));
            };
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err((i + 1, format!("unknown key {key:?}")));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { path: None, values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn origin(&self) -> String {
        match &self.path {
            Some(p) => p.display().to_string(),
            None => "config".into(),
        }
    }
}

/// Resolves each setting from a subcommand's matches and the config file.
pub struct Settings<'a> {
    matches: &'a ArgMatches,
    file: ConfigFile,
}

impl<'a> Settings<'a> {
    pub fn new(matches: &'a ArgMatches, file: ConfigFile) -> Self {
        Settings { matches, file }
    }

    fn on_command_line(&self, id: &str) -> bool {
        matches!(
            self.matches.value_source(id),
            Some(ValueSource::CommandLine | ValueSource::EnvVariable)
        )
    }

    fn in_file<T>(&self, id: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.file.get(id) {
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("{}: bad value {v:?} for {id}: {e}", self.file.origin()))),
            None => Ok(None),
        }
    }

    /// A setting that always has a value.
    pub fn value<T>(&self, id: &str, flag: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if self.on_command_line(id) {
            return Ok(flag);
        }
        Ok(self.in_file(id)?.unwrap_or(flag))
    }

    /// A setting with no built-in default.
    pub fn optional<T>(&self, id: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.in_file(id)
    }

    /// Boolean switches are on if either source turns them on.
    pub fn switch(&self, id: &str, flag: bool) -> Result<bool, CliError> {
        Ok(flag || self.in_file::<bool>(id)?.unwrap_or(false))
    }
}
