use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Outcome, PlayerId, Timestamp};
use crate::gameboard::{Coord, Direction};

/// Who produced an event: one of the players, or the Game Master.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Actor {
    A,
    B,
    #[serde(rename = "GM")]
    Gm,
}

impl Actor {
    pub fn player(self) -> Option<PlayerId> {
        match self {
            Self::A => Some(PlayerId::A),
            Self::B => Some(PlayerId::B),
            Self::Gm => None,
        }
    }
}

impl From<PlayerId> for Actor {
    fn from(p: PlayerId) -> Self {
        match p {
            PlayerId::A => Self::A,
            PlayerId::B => Self::B,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Join,
    Say,
    Move,
    Done,
    GmPublic,
    GmPrivate,
    Outcome,
    Leave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Visibility {
    Public,
    /// Visible only to the acting player, or for GM events to the addressee.
    Private,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum PublicNotice {
    TargetAnnouncement {
        text: String,
        target_type: String,
        time_limit: f64,
    },
    Notice {
        text: String,
    },
}

impl PublicNotice {
    pub fn text(&self) -> &str {
        match self {
            Self::TargetAnnouncement { text, .. } | Self::Notice { text } => text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "snake_case")]
pub enum PrivateNotice {
    /// Sent on entering a room.
    #[serde(rename = "exits_notice")]
    Observation {
        text: String,
        room: Coord,
        image: String,
        exits: Vec<Direction>,
    },
    InvalidMove {
        text: String,
        direction: Direction,
    },
    DoneAck {
        text: String,
    },
}

impl PrivateNotice {
    pub fn text(&self) -> &str {
        match self {
            Self::Observation { text, .. } | Self::InvalidMove { text, .. } | Self::DoneAck { text } => text,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EventBody {
    Join { worker_id: Option<String> },
    Say { text: String },
    Move { direction: Direction, from: Coord, to: Coord },
    Done,
    GmPublic(PublicNotice),
    GmPrivate { to: PlayerId, notice: PrivateNotice },
    Outcome { outcome: Outcome, positions: [Coord; 2], text: String },
    Leave,
}

impl EventBody {
    pub fn kind(&self) -> EventKind {
        match self {
            Self::Join { .. } => EventKind::Join,
            Self::Say { .. } => EventKind::Say,
            Self::Move { .. } => EventKind::Move,
            Self::Done => EventKind::Done,
            Self::GmPublic(_) => EventKind::GmPublic,
            Self::GmPrivate { .. } => EventKind::GmPrivate,
            Self::Outcome { .. } => EventKind::Outcome,
            Self::Leave => EventKind::Leave,
        }
    }

    pub fn visibility(&self) -> Visibility {
        match self.kind() {
            EventKind::Move | EventKind::Done | EventKind::GmPrivate => Visibility::Private,
            EventKind::Join
            | EventKind::Say
            | EventKind::GmPublic
            | EventKind::Outcome
            | EventKind::Leave => Visibility::Public,
        }
    }

    fn gm_authored(&self) -> bool {
        matches!(self.kind(), EventKind::GmPublic | EventKind::GmPrivate | EventKind::Outcome)
    }
}

/// One entry of an episode's event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawEvent", try_from = "RawEvent")]
pub struct Event {
    pub ts: Timestamp,
    pub game_id: String,
    pub actor: Actor,
    pub body: EventBody,
}

impl Event {
    pub fn kind(&self) -> EventKind {
        self.body.kind()
    }

    pub fn visibility(&self) -> Visibility {
        self.body.visibility()
    }

    /// Whether `player` may see this event.
    pub fn visible_to(&self, player: PlayerId) -> bool {
        match self.visibility() {
            Visibility::Public => true,
            Visibility::Private => match &self.body {
                EventBody::GmPrivate { to, .. } => *to == player,
                _ => self.actor.player() == Some(player),
            },
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event serializes")
    }

    pub fn from_json_line(line: &str) -> Result<Self, EventParseError> {
        serde_json::from_str(line).map_err(|e| EventParseError(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed event: {0}")]
pub struct EventParseError(pub String);

/// Wire shape of an event line.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEvent {
    ts: Timestamp,
    game_id: String,
    actor: Actor,
    kind: EventKind,
    visibility: Visibility,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Empty {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JoinPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    worker_id: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SayPayload {
    text: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MovePayload {
    direction: Direction,
    from: Coord,
    to: Coord,
}

#[derive(Serialize, Deserialize)]
struct GmPrivatePayload {
    to: PlayerId,
    #[serde(flatten)]
    notice: PrivateNotice,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OutcomePayload {
    outcome: Outcome,
    positions: [Coord; 2],
    text: String,
}

impl From<Event> for RawEvent {
    fn from(e: Event) -> Self {
        let kind = e.kind();
        let visibility = e.visibility();
        let payload = match e.body {
            EventBody::Join { worker_id } => serde_json::to_value(JoinPayload { worker_id }),
            EventBody::Say { text } => serde_json::to_value(SayPayload { text }),
            EventBody::Move { direction, from, to } => {
                serde_json::to_value(MovePayload { direction, from, to })
            }
            EventBody::Done | EventBody::Leave => serde_json::to_value(Empty {}),
            EventBody::GmPublic(notice) => serde_json::to_value(notice),
            EventBody::GmPrivate { to, notice } => serde_json::to_value(GmPrivatePayload { to, notice }),
            EventBody::Outcome { outcome, positions, text } => {
                serde_json::to_value(OutcomePayload { outcome, positions, text })
            }
        }
        .expect("payload serializes");
        RawEvent {
            ts: e.ts,
            game_id: e.game_id,
            actor: e.actor,
            kind,
            visibility,
            payload,
        }
    }
}

impl TryFrom<RawEvent> for Event {
    type Error = String;

    fn try_from(raw: RawEvent) -> Result<Self, Self::Error> {
        fn parse<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> Result<T, String> {
            serde_json::from_value(v).map_err(|e| format!("payload: {e}"))
        }
        if !raw.ts.is_finite() || raw.ts < 0.0 {
            return Err(format!("bad timestamp {}", raw.ts));
        }
        let body = match raw.kind {
            EventKind::Join => EventBody::Join {
                worker_id: parse::<JoinPayload>(raw.payload)?.worker_id,
            },
            EventKind::Say => EventBody::Say {
                text: parse::<SayPayload>(raw.payload)?.text,
            },
            EventKind::Move => {
                let p: MovePayload = parse(raw.payload)?;
                EventBody::Move {
                    direction: p.direction,
                    from: p.from,
                    to: p.to,
                }
            }
            EventKind::Done => {
                parse::<Empty>(raw.payload)?;
                EventBody::Done
            }
            EventKind::Leave => {
                parse::<Empty>(raw.payload)?;
                EventBody::Leave
            }
            EventKind::GmPublic => EventBody::GmPublic(parse(raw.payload)?),
            EventKind::GmPrivate => {
                let p: GmPrivatePayload = parse(raw.payload)?;
                EventBody::GmPrivate {
                    to: p.to,
                    notice: p.notice,
                }
            }
            EventKind::Outcome => {
                let p: OutcomePayload = parse(raw.payload)?;
                EventBody::Outcome {
                    outcome: p.outcome,
                    positions: p.positions,
                    text: p.text,
                }
            }
        };
        if body.visibility() != raw.visibility {
            return Err(format!("{:?} events must have visibility {:?}", raw.kind, body.visibility()));
        }
        if body.gm_authored() != (raw.actor == Actor::Gm) {
            return Err(format!("{:?} event with actor {:?}", raw.kind, raw.actor));
        }
        Ok(Event {
            ts: raw.ts,
            game_id: raw.game_id,
            actor: raw.actor,
            body,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(actor: Actor, body: EventBody) -> Event {
        Event {
            ts: 1.25,
            game_id: "g1".into(),
            actor,
            body,
        }
    }

    #[test]
    fn field_layout() {
        let e = ev(Actor::A, EventBody::Say { text: "hi".into() });
        assert_eq!(
            e.to_json_line(),
            r#"{"ts":1.25,"game_id":"g1","actor":"A","kind":"say","visibility":"public","payload":{"text":"hi"}}"#
        );
        let e = ev(
            Actor::Gm,
            EventBody::GmPrivate {
                to: PlayerId::B,
                notice: PrivateNotice::DoneAck { text: "ok".into() },
            },
        );
        assert_eq!(
            e.to_json_line(),
            r#"{"ts":1.25,"game_id":"g1","actor":"GM","kind":"gm_private","visibility":"private","payload":{"template":"done_ack","text":"ok","to":"B"}}"#
        );
    }

    #[test]
    fn round_trips() {
        let events = vec![
            ev(Actor::A, EventBody::Join { worker_id: Some("w1".into()) }),
            ev(Actor::B, EventBody::Join { worker_id: None }),
            ev(
                Actor::A,
                EventBody::Move {
                    direction: Direction::North,
                    from: Coord::new(0, 1),
                    to: Coord::new(0, 0),
                },
            ),
            ev(Actor::B, EventBody::Done),
            ev(Actor::A, EventBody::Leave),
            ev(
                Actor::Gm,
                EventBody::GmPublic(PublicNotice::TargetAnnouncement {
                    text: "meet in a kitchen".into(),
                    target_type: "kitchen".into(),
                    time_limit: 300.0,
                }),
            ),
            ev(
                Actor::Gm,
                EventBody::GmPrivate {
                    to: PlayerId::A,
                    notice: PrivateNotice::Observation {
                        text: "You can go: north.".into(),
                        room: Coord::new(1, 1),
                        image: "kitchen_00".into(),
                        exits: vec![Direction::North],
                    },
                },
            ),
            ev(
                Actor::Gm,
                EventBody::Outcome {
                    outcome: Outcome::Success,
                    positions: [Coord::new(0, 0), Coord::new(0, 0)],
                    text: "yay".into(),
                },
            ),
        ];
        for e in events {
            let back = Event::from_json_line(&e.to_json_line()).unwrap();
            assert_eq!(back, e);
        }
    }

    #[test]
    fn visibility_mismatch_rejected() {
        let line = r#"{"ts":1.0,"game_id":"g","actor":"A","kind":"move","visibility":"public","payload":{"direction":"north","from":{"col":0,"row":1},"to":{"col":0,"row":0}}}"#;
        assert!(Event::from_json_line(line).is_err());
        let line = r#"{"ts":1.0,"game_id":"g","actor":"GM","kind":"say","visibility":"public","payload":{"text":"x"}}"#;
        assert!(Event::from_json_line(line).is_err());
        let line = r#"{"ts":1.0,"game_id":"g","actor":"A","kind":"say","visibility":"public","payload":{"text":"x"},"extra":1}"#;
        assert!(Event::from_json_line(line).is_err());
    }

    #[test]
    fn private_visibility() {
        let mv = ev(
            Actor::A,
            EventBody::Move {
                direction: Direction::East,
                from: Coord::new(0, 0),
                to: Coord::new(1, 0),
            },
        );
        assert!(mv.visible_to(PlayerId::A));
        assert!(!mv.visible_to(PlayerId::B));
        let note = ev(
            Actor::Gm,
            EventBody::GmPrivate {
                to: PlayerId::B,
                notice: PrivateNotice::DoneAck { text: "ok".into() },
            },
        );
        assert!(note.visible_to(PlayerId::B));
        assert!(!note.visible_to(PlayerId::A));
    }
}
