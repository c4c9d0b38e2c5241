//! Rules engine for one episode.
//!
//! Every change to a [`GameState`] is an [`Event`]; the live engine ([`Game`])
//! emits events and folds them into its state with the same transition
//! function that [`GameState::replay`] uses to rebuild a state from a log.
//! The engine is clock-free: callers pass timestamps in.

mod event;
pub mod gm;
mod state;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use event::{
    Actor, Event, EventBody, EventKind, EventParseError, PrivateNotice, PublicNotice, Visibility,
};
pub use gm::{GmTemplates, TemplateError, TemplateName};
pub use state::{
    classify_positions, Game, GameConfig, GameError, GameState, Phase, ReplayError,
    DEFAULT_TIME_LIMIT,
};

use crate::gameboard::{Coord, Direction};

/// Seconds, as a decimal fraction.
pub type Timestamp = f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PlayerId {
    A,
    B,
}

impl PlayerId {
    pub const BOTH: [PlayerId; 2] = [PlayerId::A, PlayerId::B];

    pub fn index(self) -> usize {
        match self {
            Self::A => 0,
            Self::B => 1,
        }
    }

    pub fn other(self) -> PlayerId {
        match self {
            Self::A => Self::B,
            Self::B => Self::A,
        }
    }
}

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::A => "A",
            Self::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Say(String),
    Move(Direction),
    Done,
}

/// What a player perceives on entering a room.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Observation {
    pub room: Coord,
    pub image: String,
    pub exits: BTreeSet<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbortReason {
    Timeout,
    PlayerLeft,
}

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "&'static str", try_from = "String")]
pub enum Outcome {
    /// Same room, and it has the target type.
    Success,
    /// Different rooms, both of the target type.
    SameTypeDifferentRoom,
    /// At least one player is not in a target-type room.
    NotInTargetType,
    Aborted(AbortReason),
}

impl Outcome {
    pub const ALL: [Outcome; 5] = [
        Self::Success,
        Self::SameTypeDifferentRoom,
        Self::NotInTargetType,
        Self::Aborted(AbortReason::Timeout),
        Self::Aborted(AbortReason::PlayerLeft),
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Success => "success",
            Self::SameTypeDifferentRoom => "same_type_different_room",
            Self::NotInTargetType => "not_in_target_type",
            Self::Aborted(AbortReason::Timeout) => "aborted_timeout",
            Self::Aborted(AbortReason::PlayerLeft) => "aborted_player_left",
        }
    }

    pub fn is_aborted(self) -> bool {
        matches!(self, Self::Aborted(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Outcome> for &'static str {
    fn from(o: Outcome) -> Self {
        o.as_str()
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| format!("unknown outcome {s:?}"))
    }
}

impl TryFrom<String> for Outcome {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}
