use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDateTime};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::dialogue::{ActionKind, DialogueLog, PrivateAction, Turn};
use super::AnalyticsError;
use crate::game::{Event, PlayerId};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LogFormat {
    /// One event per line, as written by the server and the simulator.
    #[default]
    Native,
    /// Chat-tool style records (one JSON object per line, or one JSON array
    /// per file) with user, timestamp and message fields.
    Published,
}

impl std::str::FromStr for LogFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "native" => Ok(Self::Native),
            "published" => Ok(Self::Published),
            other => Err(format!("unknown log format {other:?} (native, published)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkipReport {
    pub path: PathBuf,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCorpus {
    pub logs: Vec<DialogueLog>,
    pub skipped: Vec<SkipReport>,
}

fn extensions(format: LogFormat) -> &'static [&'static str] {
    match format {
        LogFormat::Native => &["jsonl"],
        LogFormat::Published => &["jsonl", "json", "log"],
    }
}

/// One dialogue per file. Files that fail to parse are reported and skipped;
/// the result is in file name order.
pub fn load_logs(dir: &Path, format: LogFormat) -> Result<LoadedCorpus, AnalyticsError> {
    let io = |source| AnalyticsError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        let wanted = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| extensions(format).contains(&e));
        if wanted && path.is_file() {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(AnalyticsError::NoFilesFound(dir.to_path_buf()));
    }
    files.sort();
    let parsed: Vec<(PathBuf, Result<DialogueLog, String>)> = files
        .into_par_iter()
        .map(|path| {
            let result = fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|text| match format {
                    LogFormat::Native => parse_native(&text),
                    LogFormat::Published => {
                        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("dialogue");
                        parse_published(id, &text)
                    }
                });
            (path, result)
        })
        .collect();
    let mut corpus = LoadedCorpus {
        logs: Vec::new(),
        skipped: Vec::new(),
    };
    for (path, result) in parsed {
        match result {
            Ok(log) => corpus.logs.push(log),
            Err(reason) => corpus.skipped.push(SkipReport { path, reason }),
        }
    }
    Ok(corpus)
}

pub fn parse_native(text: &str) -> Result<DialogueLog, String> {
    let events = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| Event::from_json_line(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    DialogueLog::from_events(&events).map_err(|e| e.to_string())
}

fn field<'a>(record: &'a Value, paths: &[&str]) -> Option<&'a Value> {
    paths.iter().find_map(|p| {
        p.split('.')
            .try_fold(record, |v, key| v.get(key))
            .filter(|v| !v.is_null())
    })
}

/// Seconds since the epoch from a number (seconds or milliseconds) or a
/// date-time string.
fn timestamp(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64().map(|x| if x > 1e11 { x / 1000.0 } else { x }),
        Value::String(s) => {
            if let Ok(x) = s.parse::<f64>() {
                return timestamp(&Value::from(x));
            }
            let dt = DateTime::parse_from_rfc3339(s)
                .map(|d| d.naive_utc())
                .or_else(|_| NaiveDateTime::parse_from_str(s, "%Y-%m-%d %H:%M:%S%.f"))
                .ok()?;
            Some(dt.and_utc().timestamp_micros() as f64 / 1e6)
        }
        _ => None,
    }
}

fn is_game_master(name: &str) -> bool {
    let n = name.to_lowercase();
    n == "gm" || n.contains("game master") || n.contains("gamemaster") || n.contains("bot")
}

fn command_kind(text: &str) -> Option<ActionKind> {
    let cmd = text.trim().strip_prefix('/')?.split_whitespace().next()?.to_lowercase();
    match cmd.as_str() {
        "done" | "solve" | "solved" => Some(ActionKind::Done),
        "n" | "s" | "e" | "w" | "north" | "south" | "east" | "west" => Some(ActionKind::Move),
        _ => None,
    }
}

fn records(text: &str) -> Result<Vec<Value>, String> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return match serde_json::from_str::<Value>(trimmed) {
            Ok(Value::Array(items)) => Ok(items),
            Ok(_) => Err("expected an array of records".into()),
            Err(e) => Err(e.to_string()),
        };
    }
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

/// Best-effort mapping of a chat-tool transcript to a dialogue. Speakers are
/// assigned A and B in order of appearance; GM and bot lines are dropped.
pub fn parse_published(game_id: &str, text: &str) -> Result<DialogueLog, String> {
    let records = records(text)?;
    let mut speakers: Vec<String> = Vec::new();
    let mut log = DialogueLog {
        game_id: game_id.to_string(),
        turns: Vec::new(),
        actions: Vec::new(),
        entries: [Vec::new(), Vec::new()],
        outcome: None,
        worker_ids: [None, None],
        first_ts: f64::NAN,
        last_ts: f64::NAN,
    };
    for (seq, r) in records.iter().enumerate() {
        let Some(ts) = field(r, &["timestamp", "date_created", "time", "ts"]).and_then(timestamp) else {
            continue;
        };
        if log.first_ts.is_nan() {
            log.first_ts = ts;
        }
        log.last_ts = log.last_ts.max(ts);
        let name = match field(r, &["user.name", "user", "actor"]) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Object(_)) | None => continue,
            Some(other) => other.to_string(),
        };
        if is_game_master(&name) {
            continue;
        }
        let kind = field(r, &["type", "event"]).and_then(Value::as_str).unwrap_or("text");
        let Some(msg) = field(r, &["msg", "message", "data.message", "text", "command"]).and_then(Value::as_str) else {
            continue;
        };
        let actor = match speakers.iter().position(|s| *s == name) {
            Some(0) => PlayerId::A,
            Some(_) => PlayerId::B,
            None if speakers.len() < 2 => {
                speakers.push(name.clone());
                let p = if speakers.len() == 1 { PlayerId::A } else { PlayerId::B };
                let worker = field(r, &["user.id", "worker_id"]).map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                });
                log.worker_ids[p.index()] = worker;
                p
            }
            None => return Err(format!("more than two players (third is {name:?})")),
        };
        if let Some(action) = command_kind(msg) {
            log.actions.push(PrivateAction {
                actor,
                ts,
                kind: action,
                seq,
            });
        } else if kind.contains("text") || kind == "say" || kind == "message" {
            log.turns.push(Turn {
                actor,
                ts,
                text: msg.to_string(),
                seq,
            });
        }
    }
    if log.first_ts.is_nan() {
        return Err("no timestamped records".into());
    }
    if speakers.is_empty() {
        return Err("no player records".into());
    }
    log.turns.sort_by(|a, b| a.ts.total_cmp(&b.ts).then(a.seq.cmp(&b.seq)));
    Ok(log)
}
