use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::dialogue::{DialogueLog, Turn};
use super::tokenize::{is_question, tokenize};

pub const DEFAULT_PREFIX_K: usize = 3;

/// Which turns a prefix histogram is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TurnSelection {
    FirstTurns,
    /// The last turn logged before the first done of the dialogue.
    FinalBeforeDone,
    Questions,
    AllTurns,
}

impl TurnSelection {
    pub const ALL: [TurnSelection; 4] = [
        Self::FirstTurns,
        Self::FinalBeforeDone,
        Self::Questions,
        Self::AllTurns,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::FirstTurns => "first_turns",
            Self::FinalBeforeDone => "final_before_done",
            Self::Questions => "questions",
            Self::AllTurns => "all_turns",
        }
    }

    pub fn select(self, log: &DialogueLog) -> Vec<&Turn> {
        match self {
            Self::FirstTurns => log.turns.first().into_iter().collect(),
            Self::FinalBeforeDone => log
                .first_done_seq()
                .and_then(|done| log.turns.iter().rev().find(|t| t.seq < done))
                .into_iter()
                .collect(),
            Self::Questions => log.turns.iter().filter(|t| is_question(&t.text)).collect(),
            Self::AllTurns => log.turns.iter().collect(),
        }
    }
}

impl fmt::Display for TurnSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TurnSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|w| w.as_str() == s)
            .ok_or_else(|| format!("unknown turn selection {s:?}"))
    }
}

/// The first `k` tokens, space-joined (fewer if the turn is shorter).
pub fn prefix(text: &str, k: usize) -> String {
    let mut tokens = tokenize(text);
    tokens.truncate(k);
    tokens.join(" ")
}

/// Prefix counts over the selected turns, most frequent first, ties in
/// lexicographic order. Turns without tokens count under the empty prefix.
pub fn prefix_histogram(logs: &[DialogueLog], which: TurnSelection, k: usize) -> Vec<(String, usize)> {
    assert!(k >= 1, "prefix length must be at least one token");
    let mut counts = BTreeMap::<String, usize>::new();
    for log in logs {
        for t in which.select(log) {
            *counts.entry(prefix(&t.text, k)).or_default() += 1;
        }
    }
    let mut out: Vec<(String, usize)> = counts.into_iter().collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    out
}
