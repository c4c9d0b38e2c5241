//! Wire messages. Every message is one JSON object carrying `type` and
//! `schema_version`; the same bodies travel as WebSocket text frames and as
//! lines on the bot port.

use meetup_core::Direction;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientMessage {
    Hello {
        token: String,
        /// Crowd-worker style identifier recorded in the log; the token never is.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        worker_id: Option<String>,
    },
    Say {
        text: String,
    },
    Move {
        direction: Direction,
    },
    Done {},
    Bye {},
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServerMessage {
    Paired {
        game_id: String,
        target_type: String,
    },
    Gm {
        text: String,
    },
    Observation {
        image: String,
        exits: Vec<Direction>,
    },
    PartnerSay {
        text: String,
    },
    SayEcho {
        text: String,
    },
    Error {
        code: ErrorCode,
        text: String,
    },
    Outcome {
        kind: String,
    },
    Dismissed {},
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    Malformed,
    UnknownToken,
    UnsupportedVersion,
    TokenInUse,
    /// A game message before pairing, or hello after it.
    Unexpected,
    EmptySay,
    GameFinished,
    SinkFailure,
}

impl ServerMessage {
    pub fn error(code: ErrorCode, text: impl Into<String>) -> Self {
        Self::Error {
            code,
            text: text.into(),
        }
    }
}

#[derive(Serialize)]
struct OutEnvelope<'a> {
    schema_version: u32,
    #[serde(flatten)]
    msg: &'a ServerMessage,
}

pub fn encode(msg: &ServerMessage) -> String {
    serde_json::to_string(&OutEnvelope {
        schema_version: SCHEMA_VERSION,
        msg,
    })
    .expect("server messages serialize")
}

/// Encodes a client message; used by bot clients and tests.
pub fn encode_client(msg: &ClientMessage) -> String {
    let mut v = serde_json::to_value(msg).expect("client messages serialize");
    v["schema_version"] = SCHEMA_VERSION.into();
    v.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeError {
    pub code: ErrorCode,
    pub text: String,
}

impl DecodeError {
    pub fn reply(&self) -> ServerMessage {
        ServerMessage::error(self.code, self.text.clone())
    }
}

fn split_version(text: &str) -> Result<serde_json::Map<String, serde_json::Value>, DecodeError> {
    let malformed = |text: String| DecodeError {
        code: ErrorCode::Malformed,
        text,
    };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let serde_json::Value::Object(mut map) = value else {
        return Err(malformed("expected a JSON object".into()));
    };
    match map.remove("schema_version").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => Ok(map),
        Some(v) => Err(DecodeError {
            code: ErrorCode::UnsupportedVersion,
            text: format!("schema_version {v} is not supported (expected {SCHEMA_VERSION})"),
        }),
        None => Err(malformed("missing schema_version".into())),
    }
}

pub fn decode_client(text: &str) -> Result<ClientMessage, DecodeError> {
    let map = split_version(text)?;
    serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| DecodeError {
        code: ErrorCode::Malformed,
        text: e.to_string(),
    })
}

pub fn decode_server(text: &str) -> Result<ServerMessage, DecodeError> {
    let map = split_version(text)?;
    serde_json::from_value(serde_json::Value::Object(map)).map_err(|e| DecodeError {
        code: ErrorCode::Malformed,
        text: e.to_string(),
    })
}
