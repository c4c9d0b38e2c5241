//! Scripted players and a deterministic episode runner.
//!
//! Honest policies implement [`Policy`] and only ever receive an
//! [`AgentView`] and their [`AgentMemory`]; neither carries coordinates or
//! board topology. The [`OraclePolicy`] is a test oracle that is handed the
//! whole board through [`Cheat`] and lives behind a separate interface.

pub mod phrases;
mod policies;
mod runner;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use phrases::Phrase;
pub use policies::{Cheat, DescriberPolicy, OraclePolicy, WandererParams, WandererPolicy};
pub use runner::{
    run_batch, run_episode, ActionCounts, BatchConfig, BatchStats, EpisodeConfig, EpisodeLog,
};

use crate::game::Timestamp;
use crate::gameboard::{Coord, Direction, Gameboard};

pub type AgentRng = ChaCha8Rng;

/// What identifies a room to a player who cannot see coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoomFingerprint {
    pub image: String,
    pub exits: BTreeSet<Direction>,
}

/// Everything a player may legitimately perceive at decision time.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentView {
    pub room: RoomFingerprint,
    /// Scene category of the current room, as the player would name it.
    pub room_type: Option<String>,
    pub target_type: String,
    /// Partner messages received since the previous decision.
    pub inbox: Vec<String>,
    pub clock: Timestamp,
}

impl AgentView {
    pub fn in_target_room(&self) -> bool {
        self.room_type.as_deref() == Some(self.target_type.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Speaker {
    Me,
    Partner,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranscriptEntry {
    pub speaker: Speaker,
    pub ts: Timestamp,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathStep {
    pub room: RoomFingerprint,
    /// Exit taken to get here; `None` for the start room.
    pub via: Option<Direction>,
}

/// What a player infers about the other player's whereabouts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartnerBelief {
    pub last_room: Option<String>,
    pub last_type: Option<String>,
}

/// The currently agreed way of meeting up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Strategy {
    #[default]
    None,
    /// I go looking for my partner.
    ISeek,
    /// My partner comes to me.
    YouSeek,
    BothWander,
}

/// Tracking state of one player: own path, public transcript, belief about
/// the partner and the agreed strategy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AgentMemory {
    own_path: Vec<PathStep>,
    transcript: Vec<TranscriptEntry>,
    pub partner_belief: PartnerBelief,
    pub strategy: Strategy,
}

impl AgentMemory {
    pub fn starting_in(room: RoomFingerprint) -> Self {
        Self {
            own_path: vec![PathStep { room, via: None }],
            ..Self::default()
        }
    }

    pub fn own_path(&self) -> &[PathStep] {
        &self.own_path
    }

    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn current_room(&self) -> Option<&RoomFingerprint> {
        self.own_path.last().map(|s| &s.room)
    }

    /// Called once per successful move.
    pub fn entered(&mut self, room: RoomFingerprint, via: Direction) {
        self.own_path.push(PathStep { room, via: Some(via) });
    }

    /// Exits already taken out of the room showing `image`.
    pub fn tried_exits(&self, image: &str) -> BTreeSet<Direction> {
        self.own_path
            .windows(2)
            .filter(|w| w[0].room.image == image)
            .filter_map(|w| w[1].via)
            .collect()
    }

    pub fn visits(&self, image: &str) -> usize {
        self.own_path.iter().filter(|s| s.room.image == image).count()
    }

    pub fn said(&mut self, text: &str, ts: Timestamp) {
        self.transcript.push(TranscriptEntry {
            speaker: Speaker::Me,
            ts,
            text: text.to_string(),
        });
        match Phrase::parse(text) {
            Some(Phrase::Wait) => self.strategy = Strategy::YouSeek,
            Some(Phrase::Seek) => self.strategy = Strategy::ISeek,
            _ => {}
        }
    }

    pub fn heard(&mut self, text: &str, ts: Timestamp) {
        self.transcript.push(TranscriptEntry {
            speaker: Speaker::Partner,
            ts,
            text: text.to_string(),
        });
        match Phrase::parse(text) {
            Some(Phrase::Locate { room_type, image }) => {
                self.partner_belief.last_room = Some(image);
                self.partner_belief.last_type = Some(room_type);
            }
            Some(Phrase::Wait) => {
                self.strategy = match self.strategy {
                    // both asked to be found: the smaller fingerprint keeps waiting
                    Strategy::YouSeek => {
                        let mine = self.current_room().map(|r| r.image.as_str());
                        let theirs = self.partner_belief.last_room.as_deref();
                        match (mine, theirs) {
                            (Some(m), Some(t)) if t < m => Strategy::ISeek,
                            _ => Strategy::YouSeek,
                        }
                    }
                    _ => Strategy::ISeek,
                }
            }
            Some(Phrase::Seek) if self.strategy != Strategy::ISeek => {
                self.strategy = Strategy::YouSeek;
            }
            _ => {}
        }
    }
}

/// A policy that plays by the observability rules.
pub trait Policy: Send {
    /// `None` means: wait and do nothing this tick.
    fn decide(
        &mut self,
        view: &AgentView,
        memory: &AgentMemory,
        rng: &mut AgentRng,
    ) -> Option<crate::game::Action>;
}

/// Builds a policy that needs no privileged access; `None` for the oracle.
pub fn honest_policy(kind: PolicyKind, wanderer: WandererParams) -> Option<Box<dyn Policy>> {
    match kind {
        PolicyKind::Oracle => None,
        PolicyKind::Wanderer => Some(Box::new(WandererPolicy::new(wanderer))),
        PolicyKind::Describer => Some(Box::new(DescriberPolicy::new())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Oracle,
    Wanderer,
    Describer,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Oracle => "oracle",
            Self::Wanderer => "wanderer",
            Self::Describer => "describer",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "wanderer" => Ok(Self::Wanderer),
            "describer" => Ok(Self::Describer),
            other => Err(format!("unknown policy {other:?} (oracle, wanderer, describer)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AgentError {
    #[error("{to} is not reachable from {from}")]
    Unreachable { from: Coord, to: Coord },
}

/// Shortest walk from `from` to `to`. Among equally short walks, the one whose
/// direction sequence is smallest in (north, south, east, west) order wins.
pub fn bfs_shortest_path(
    board: &Gameboard,
    from: Coord,
    to: Coord,
) -> Result<Vec<Direction>, AgentError> {
    let unreachable = AgentError::Unreachable { from, to };
    if !board.contains(from) || !board.contains(to) {
        return Err(unreachable);
    }
    // distances to the goal, so the walk can be built greedily from the start
    let graph = board.graph();
    let mut dist = BTreeMap::from([(to, 0usize)]);
    let mut queue = VecDeque::from([to]);
    while let Some(c) = queue.pop_front() {
        let d = dist[&c];
        for (_, n) in graph.neighbors(c) {
            if graph.contains(n) && !dist.contains_key(&n) {
                dist.insert(n, d + 1);
                queue.push_back(n);
            }
        }
    }
    let Some(&total) = dist.get(&from) else {
        return Err(unreachable);
    };
    let mut path = Vec::with_capacity(total);
    let mut at = from;
    while at != to {
        let here = dist[&at];
        let (d, next) = graph
            .neighbors(at)
            .find(|(_, n)| dist.get(n) == Some(&(here - 1)))
            .expect("a neighbour one step closer exists");
        path.push(d);
        at = next;
    }
    Ok(path)
}
