//! Core of the meetup two-player coordination game: room-type catalog,
//! gameboard generation, the event-sourced rules engine, scripted agents with
//! an episode runner, and corpus statistics over event logs.

pub mod catalog;
pub mod error;
pub mod gameboard;
pub mod rng;

pub use catalog::{ImageCatalog, RoomCategory, RoomType, TypeCatalog};
pub use error::{BoardError, CatalogError};
pub use gameboard::{Coord, Direction, Gameboard};
pub mod game;
pub use game::{Action, Event, Game, GameState, Outcome, PlayerId};
pub mod agents;
pub use agents::{run_batch, run_episode, EpisodeLog, PolicyKind};
pub mod analytics;
pub use analytics::{corpus_stats, CorpusStats, DialogueLog};
