//! Line-oriented event-log files.
//!
//! ```text
//! # nonideal event log v1
//! # kind: bell
//! # config-sha256: 3f2a...
//! # config: {"kind":"sample",...}
//! # generator: chacha20-u53
//! # seed: 42
//! # n: 3
//! # labels: ++,++ ++,+- ... --,--
//! +-,-+
//! --,+-
//! +-,--
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nonideal::sampler::EventLog;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub const MAGIC: &str = "# nonideal event log v1";

/// Hex SHA-256 of a config serialization.
pub fn config_hash(config_json: &str) -> String {
    Sha256::digest(config_json.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogHeader {
    pub kind: String,
    pub config_sha256: String,
    pub config: String,
}

pub fn write_event_log<W: Write>(mut out: W, log: &EventLog, header: &LogHeader) -> std::io::Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "# kind: {}", header.kind)?;
    writeln!(out, "# config-sha256: {}", header.config_sha256)?;
    writeln!(out, "# config: {}", header.config)?;
    writeln!(out, "# generator: {}", log.generator())?;
    writeln!(out, "# seed: {}", log.seed())?;
    writeln!(out, "# n: {}", log.count())?;
    writeln!(out, "# labels: {}", log.labels().join(" "))?;
    for label in log.event_labels() {
        writeln!(out, "{label}")?;
    }
    out.flush()
}

pub fn write_event_log_file(path: &Path, log: &EventLog, header: &LogHeader) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_event_log(BufWriter::new(file), log, header).map_err(|e| CliError::io(path, e))
}

fn malformed(path: &Path, msg: impl Into<String>) -> CliError {
    CliError::io(path, std::io::Error::new(std::io::ErrorKind::InvalidData, msg.into()))
}

/// Reads a log written by [`write_event_log`].
pub fn read_event_log(path: &Path) -> Result<(LogHeader, EventLog)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next = |what: &str| -> Result<String> {
        match lines.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(CliError::io(path, e)),
            None => Err(malformed(path, format!("truncated log: missing {what}"))),
        }
    };
    if next("magic line")? != MAGIC {
        return Err(malformed(path, "not an event log"));
    }
    let mut field = |key: &str| -> Result<String> {
        let line = next(key)?;
        line.strip_prefix(&format!("# {key}: "))
            .or_else(|| line.strip_prefix(&format!("# {key}:")))
            .map(str::to_string)
            .ok_or_else(|| malformed(path, format!("expected header {key:?}, got {line:?}")))
    };
    let kind = field("kind")?;
    let config_sha256 = field("config-sha256")?;
    let config = field("config")?;
    let generator = field("generator")?;
    let seed: u64 = field("seed")?.parse().map_err(|_| malformed(path, "bad seed"))?;
    let n: usize = field("n")?.parse().map_err(|_| malformed(path, "bad event count"))?;
    let labels: Vec<String> = field("labels")?.split_whitespace().map(str::to_string).collect();
    let mut events = Vec::with_capacity(n);
    for line in lines {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let idx = labels
            .iter()
            .position(|l| *l == line)
            .ok_or_else(|| malformed(path, format!("unknown outcome label {line:?}")))?;
        events.push(idx as u16);
    }
    if events.len() != n {
        return Err(malformed(
            path,
            format!("header promises {n} events, found {}", events.len()),
        ));
    }
    let log = EventLog::from_parts(config_sha256.clone(), generator, seed, labels, events)?;
    Ok((
        LogHeader {
            kind,
            config_sha256,
            config,
        },
        log,
    ))
}
