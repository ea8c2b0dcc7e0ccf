//! Shared plumbing: config files, snapshots, path conventions.

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use tdsbm::Error;

/// Reads a command's settings from a TOML or JSON file. JSON is detected
/// by extension or a leading brace; anything else parses as TOML.
pub fn load_file_args<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let json = path.extension().and_then(|e| e.to_str()) == Some("json")
        || text.trim_start().starts_with('{');
    let args = if json {
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?
    } else {
        toml::from_str(&text)
            .map_err(|e| Error::Config(format!("config {}: {e}", path.display())))?
    };
    Ok(args)
}

/// Writes the fully resolved settings beside the outputs, replayable via
/// `--config`.
pub fn write_snapshot<T: Serialize>(out_dir: &Path, command: &str, args: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Snapshot<'a, T: Serialize> {
        command: &'a str,
        #[serde(flatten)]
        args: &'a T,
    }
    let path = out_dir.join("resolved-config.json");
    let text = serde_json::to_string_pretty(&Snapshot { command, args })?;
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Unwraps a setting that must be present after flags and config merge.
pub fn require<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required setting --{name}")).into())
}

/// A network is addressed by a stem; its files are `<stem>.edges.csv`
/// and `<stem>.nodes.csv`. Passing the edge file itself also works.
pub fn network_paths(stem: &Path) -> (PathBuf, PathBuf) {
    let text = stem.to_string_lossy();
    let base = text.strip_suffix(".edges.csv").unwrap_or(&text);
    (
        PathBuf::from(format!("{base}.edges.csv")),
        PathBuf::from(format!("{base}.nodes.csv")),
    )
}

pub fn parse_tz(name: &str) -> Result<chrono_tz::Tz> {
    name.parse()
        .map_err(|_| Error::Config(format!("unknown timezone {name:?}")).into())
}

pub fn ensure_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
