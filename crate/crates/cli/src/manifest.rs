use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::Path;

use crate::failure::CliError;

/// Flags that take no value; recorded as `true` / `false`.
const SWITCHES: &[&str] = &["standardize", "no-negative-updates", "check"];

/// Keys with this prefix describe the run but are not flags.
const INFO_PREFIX: &str = "info.";

/// Sorted `key=value` record of a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        let mut m = Manifest::default();
        m.set("command", command);
        m.info("version", env!("CARGO_PKG_VERSION"));
        m
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// Records a derived fact such as an input size.
    pub fn info(&mut self, key: &str, value: impl Display) {
        self.entries.insert(format!("{INFO_PREFIX}{key}"), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut m = Manifest::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config(format!("manifest line {}: expected key=value", i + 1)));
            };
            m.entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The subcommand name and the flags that reproduce this run.
    pub fn to_args(&self) -> Result<(String, Vec<String>), CliError> {
        let command = self
            .get("command")
            .ok_or_else(|| CliError::Config("manifest has no `command` entry".into()))?
            .to_string();
        let mut args = Vec::new();
        for (k, v) in &self.entries {
            if k == "command" || k.starts_with(INFO_PREFIX) {
                continue;
            }
            if SWITCHES.contains(&k.as_str()) {
                match v.as_str() {
                    "true" => args.push(format!("--{k}")),
                    "false" => {}
                    other => {
                        return Err(CliError::Config(format!("manifest switch `{k}` has value `{other}`")));
                    }
                }
            } else {
                args.push(format!("--{k}"));
                args.push(v.clone());
            }
        }
        Ok((command, args))
    }
}

/// Rewrites `hyperwalk CMD --manifest FILE [overrides]` into the full
/// command line recorded in FILE, with the overrides applied last.
pub fn expand_manifest(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        match arg.to_str() {
            Some("--manifest") => {
                let value = iter
                    .next()
                    .ok_or_else(|| CliError::Config("--manifest needs a file".into()))?;
                path = Some(value);
            }
            Some(s) if s.starts_with("--manifest=") => path = Some(OsString::from(&s["--manifest=".len()..])),
            _ => rest.push(arg),
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let manifest = Manifest::read(Path::new(&path))?;
    let (command, recorded) = manifest.to_args()?;
    let given = rest.get(1).and_then(|a| a.to_str()).map(str::to_string);
    if given.as_deref() != Some(command.as_str()) {
        return Err(CliError::Config(format!(
            "manifest records `{command}` but the command line runs `{}`",
            given.unwrap_or_default()
        )));
    }
    let mut out: Vec<OsString> = rest[..2].to_vec();
    out.extend(recorded.into_iter().map(OsString::from));
    out.extend(rest.into_iter().skip(2));
    Ok(out)
}
