//! Run configuration: command-line flags layered over an optional TOML file, and
//! the provenance header written into every output.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Loads a config file. Top-level keys apply to every command that knows them;
/// a `[command-name]` table applies to that command only and must not hold unknown keys.
pub fn load_file(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {e}", path.display())))?;
    text.parse::<toml::Table>()
        .map_err(|e| CliError::Input(format!("config {}: {e}", path.display())))
}

fn to_json(v: &toml::Value) -> Value {
    match v {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => Value::from(*i),
        toml::Value::Float(f) => Value::from(*f),
        toml::Value::Boolean(b) => Value::Bool(*b),
        toml::Value::Array(a) => Value::Array(a.iter().map(to_json).collect()),
        toml::Value::Table(t) => Value::Object(t.iter().map(|(k, v)| (k.clone(), to_json(v))).collect()),
        toml::Value::Datetime(d) => Value::String(d.to_string()),
    }
}

/// Flag values win over file values; unset flags (`None` or `false`) fall back to the file.
pub fn merge<T>(cli: &T, file: Option<&toml::Table>, command: &str) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let Some(file) = file else {
        return Ok(serde_json::from_value(serde_json::to_value(cli).expect("serializable"))
            .expect("round trip"));
    };
    let Value::Object(flags) = serde_json::to_value(cli).expect("serializable") else {
        unreachable!("arguments serialize to an object");
    };
    let mut merged = Map::new();
    for (k, v) in file {
        if !v.is_table() && flags.contains_key(k) {
            merged.insert(k.clone(), to_json(v));
        }
    }
    if let Some(section) = file.get(command) {
        let table = section
            .as_table()
            .ok_or_else(|| CliError::Input(format!("config entry `{command}` must be a table")))?;
        for (k, v) in table {
            if !flags.contains_key(k) {
                return Err(CliError::Input(format!("unknown config key `{k}` for {command}")));
            }
            merged.insert(k.clone(), to_json(v));
        }
    }
    for (k, v) in flags {
        if !(v.is_null() || v == Value::Bool(false)) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| CliError::Input(format!("config: {e}")))
}

/// Provenance of an output: command, effective configuration and code version.
pub struct Provenance {
    pub command: &'static str,
    pub config: String,
    pub timestamp: Option<u64>,
}

impl Provenance {
    pub fn new<T: Serialize>(command: &'static str, config: &T, timestamp: bool) -> Self {
        let timestamp = timestamp.then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Provenance {
            command,
            config: serde_json::to_string(config).expect("serializable"),
            timestamp,
        }
    }

    /// Header lines without the comment marker.
    pub fn lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("fermicorr {VERSION}"),
            format!("command: {}", self.command),
            format!("config: {}", self.config),
        ];
        if let Some(t) = self.timestamp {
            out.push(format!("generated_unix: {t}"));
        }
        out
    }

    pub fn csv_header(&self) -> String {
        self.lines().iter().map(|l| format!("# {l}\n")).collect()
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("version".into(), Value::String(VERSION.into()));
        m.insert("command".into(), Value::String(self.command.into()));
        m.insert(
            "config".into(),
            serde_json::from_str(&self.config).expect("config is JSON"),
        );
        if let Some(t) = self.timestamp {
            m.insert("generated_unix".into(), Value::from(t));
        }
        Value::Object(m)
    }
}
