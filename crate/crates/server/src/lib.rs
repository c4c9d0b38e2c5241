//! Network front-end for the meetup game: lobby pairing, per-game routing with the
//! game-core visibility rules, GM messaging and append-only event logs.
//!
//! Browsers connect over WebSocket text frames; bots may use newline-framed
//! TCP. Both carry the JSON messages in [`protocol`].

pub mod bot;
pub mod lobby;
pub mod net;
pub mod protocol;
pub mod route;
pub mod sink;

pub use bot::{run_bot, BotConfig, BotReport};
pub use lobby::{LobbyState, Pairing, SessionToken};
pub use net::{Server, ServerConfig};
pub use protocol::{decode_client, decode_server, encode, encode_client, ClientMessage, ErrorCode, ServerMessage};
pub use route::{deliveries_for, Delivery, GameSession};
pub use sink::{EventSink, FileSink, MemorySink};
