use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use meetup_core::catalog::fs_alias;
use meetup_core::Event;

/// Append-only destination for one episode's events.
pub trait EventSink: Send {
    fn append(&mut self, event: &Event) -> io::Result<()>;
    fn finish(&mut self) -> io::Result<()>;
}

/// `{dir}/{game_id}.jsonl`. Each event goes out in a single write, so a crash
/// leaves only complete lines behind.
pub struct FileSink {
    path: PathBuf,
    file: File,
}

impl FileSink {
    pub fn create(dir: &Path, game_id: &str) -> io::Result<Self> {
        fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.jsonl", fs_alias(game_id)));
        let file = OpenOptions::new().create_new(true).append(true).open(&path)?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl EventSink for FileSink {
    fn append(&mut self, event: &Event) -> io::Result<()> {
        let mut line = event.to_json_line();
        line.push('\n');
        self.file.write_all(line.as_bytes())
    }

    fn finish(&mut self) -> io::Result<()> {
        self.file.sync_all()
    }
}

/// Collects lines in memory; cloning shares the buffer.
#[derive(Clone, Default)]
pub struct MemorySink {
    lines: Arc<Mutex<Vec<String>>>,
    /// Fail every append after this many lines.
    fail_after: Option<usize>,
}

impl MemorySink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn failing_after(n: usize) -> Self {
        Self {
            fail_after: Some(n),
            ..Self::default()
        }
    }

    pub fn lines(&self) -> Vec<String> {
        self.lines.lock().expect("sink lock").clone()
    }
}

impl EventSink for MemorySink {
    fn append(&mut self, event: &Event) -> io::Result<()> {
        let mut lines = self.lines.lock().expect("sink lock");
        if self.fail_after.is_some_and(|n| lines.len() >= n) {
            return Err(io::Error::other("sink refused the write"));
        }
        lines.push(event.to_json_line());
        Ok(())
    }

    fn finish(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use meetup_core::game::{Actor, EventBody};

    fn event(i: usize) -> Event {
        Event {
            ts: i as f64,
            game_id: "g/1".into(),
            actor: Actor::A,
            body: EventBody::Say {
                text: format!("line {i}"),
            },
        }
    }

    #[test]
    fn file_sink_writes_complete_lines() {
        let dir = tempfile::tempdir().unwrap();
        let mut sink = FileSink::create(dir.path(), "g/1").unwrap();
        assert!(sink.path().ends_with("g__1.jsonl"));
        for i in 0..5 {
            sink.append(&event(i)).unwrap();
        }
        // no finish: what is on disk already is whole lines
        let text = fs::read_to_string(sink.path()).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(text.ends_with('\n'));
        assert_eq!(Event::from_json_line(lines[4]).unwrap(), event(4));
        assert!(FileSink::create(dir.path(), "g/1").is_err());
    }

    #[test]
    fn memory_sink_can_fail() {
        let mut sink = MemorySink::failing_after(2);
        sink.append(&event(0)).unwrap();
        sink.append(&event(1)).unwrap();
        assert!(sink.append(&event(2)).is_err());
        assert_eq!(sink.lines().len(), 2);
    }
}
