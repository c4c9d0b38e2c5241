//! Corpus statistics over episode logs.
//!
//! Time statistics work on whole milliseconds; per-dialogue lists are in game
//! id order, so every statistic is independent of input order. GM lines never
//! count as turns.

mod dialogue;
mod load;
mod prefix;
mod stats;
mod tokenize;

use std::path::PathBuf;

use thiserror::Error;

pub use dialogue::{games_by_worker, to_ms, ActionKind, DialogueLog, PrivateAction, RoomEntry, Turn};
pub use load::{load_logs, parse_native, parse_published, LoadedCorpus, LogFormat, SkipReport};
pub use prefix::{prefix, prefix_histogram, TurnSelection, DEFAULT_PREFIX_K};
pub use stats::{
    corpus_stats, crosstalk_count, quantile, speaker_change_gaps, CorpusStats, IouSummary,
    StatsConfig, DEFAULT_CROSSTALK_THRESHOLD,
};
pub use tokenize::{is_question, tokenize};

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("no dialogues to analyse")]
    EmptyCorpus,
    #[error("no log files found in {0}")]
    NoFilesFound(PathBuf),
    #[error("invalid log: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
