//! Per-game routing: client messages become engine actions, engine events
//! become wire messages for exactly the players allowed to see them.

use meetup_core::game::{
    AbortReason, Action, EventBody, Game, GameConfig, GameError, PrivateNotice,
};
use meetup_core::gameboard::SharedBoard;
use meetup_core::{Event, PlayerId};

use crate::protocol::{ClientMessage, ErrorCode, ServerMessage};
use crate::sink::EventSink;

#[derive(Debug, Clone, PartialEq)]
pub struct Delivery {
    pub to: PlayerId,
    pub msg: ServerMessage,
}

fn to(to: PlayerId, msg: ServerMessage) -> Delivery {
    Delivery { to, msg }
}

/// Wire messages for a batch of engine events.
pub fn deliveries_for(events: &[Event]) -> Vec<Delivery> {
    let mut out = Vec::new();
    for e in events {
        match &e.body {
            EventBody::Say { text } => {
                let Some(sender) = e.actor.player() else { continue };
                out.push(to(sender, ServerMessage::SayEcho { text: text.clone() }));
                out.push(to(sender.other(), ServerMessage::PartnerSay { text: text.clone() }));
            }
            EventBody::GmPublic(notice) => {
                for p in PlayerId::BOTH {
                    out.push(to(p, ServerMessage::Gm { text: notice.text().to_string() }));
                }
            }
            EventBody::GmPrivate { to: player, notice } => {
                if let PrivateNotice::Observation { image, exits, .. } = notice {
                    out.push(to(
                        *player,
                        ServerMessage::Observation {
                            image: image.clone(),
                            exits: exits.clone(),
                        },
                    ));
                }
                out.push(to(*player, ServerMessage::Gm { text: notice.text().to_string() }));
            }
            EventBody::Outcome { outcome, text, .. } => {
                for p in PlayerId::BOTH {
                    out.push(to(p, ServerMessage::Gm { text: text.clone() }));
                    out.push(to(p, ServerMessage::Outcome { kind: outcome.as_str().to_string() }));
                }
            }
            // moves, dones, joins and leaves are reflected by the GM replies
            EventBody::Move { .. } | EventBody::Done | EventBody::Join { .. } | EventBody::Leave => {}
        }
    }
    out
}

/// One running episode: the engine plus its persistence sink.
pub struct GameSession {
    game: Game,
    sink: Box<dyn EventSink>,
    sink_failed: bool,
}

impl GameSession {
    /// Creates the game, records both joins and returns the opening messages.
    pub fn start(
        game_id: &str,
        board: SharedBoard,
        config: &GameConfig,
        worker_ids: [Option<String>; 2],
        sink: Box<dyn EventSink>,
        now: f64,
    ) -> Result<(Self, Vec<Delivery>), GameError> {
        let target_type = board.target_type().name.clone();
        let (mut game, mut events) = Game::new(game_id, board, config, now)?;
        for (p, w) in PlayerId::BOTH.into_iter().zip(worker_ids) {
            events.push(game.join(p, w, now)?);
        }
        let mut session = Self {
            game,
            sink,
            sink_failed: false,
        };
        let mut out: Vec<Delivery> = PlayerId::BOTH
            .into_iter()
            .map(|p| {
                to(
                    p,
                    ServerMessage::Paired {
                        game_id: game_id.to_string(),
                        target_type: target_type.clone(),
                    },
                )
            })
            .collect();
        out.extend(session.commit(events, now));
        Ok((session, out))
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn is_finished(&self) -> bool {
        self.game.state().is_finished()
    }

    /// Persists `events` in order. If the sink fails, the rest of the episode
    /// is dropped from the log and the game is aborted.
    fn commit(&mut self, events: Vec<Event>, now: f64) -> Vec<Delivery> {
        let mut out = deliveries_for(&events);
        if self.sink_failed {
            return out;
        }
        for e in &events {
            if let Err(err) = self.sink.append(e) {
                tracing::error!(game = self.game.state().game_id(), %err, "event sink failed; aborting");
                self.sink_failed = true;
                break;
            }
        }
        if self.sink_failed {
            for p in PlayerId::BOTH {
                out.push(to(p, ServerMessage::error(ErrorCode::SinkFailure, "the game log could not be written")));
            }
            if !self.is_finished() {
                if let Ok(events) = self.game.abort(AbortReason::PlayerLeft, now) {
                    out.extend(deliveries_for(&events));
                }
            }
        }
        if self.is_finished() && !self.sink_failed {
            if let Err(err) = self.sink.finish() {
                tracing::error!(%err, "could not flush the game log");
            }
        }
        out
    }

    /// Handles one message from an authenticated player.
    pub fn route(&mut self, sender: PlayerId, msg: ClientMessage, now: f64) -> Vec<Delivery> {
        let action = match msg {
            ClientMessage::Say { text } => Action::Say(text),
            ClientMessage::Move { direction } => Action::Move(direction),
            ClientMessage::Done {} => Action::Done,
            ClientMessage::Bye {} => return self.leave(sender, now),
            ClientMessage::Hello { .. } => {
                return vec![to(sender, ServerMessage::error(ErrorCode::Unexpected, "already in a game"))];
            }
        };
        match self.game.apply_action(sender, action, now) {
            Ok(events) => self.commit(events, now),
            Err(GameError::EmptySay) => {
                vec![to(sender, ServerMessage::error(ErrorCode::EmptySay, "say text is empty"))]
            }
            Err(GameError::GameAlreadyFinished) => {
                vec![to(sender, ServerMessage::error(ErrorCode::GameFinished, "the game is over"))]
            }
            Err(e) => vec![to(sender, ServerMessage::error(ErrorCode::Malformed, e.to_string()))],
        }
    }

    /// The player disconnected or said bye.
    pub fn leave(&mut self, player: PlayerId, now: f64) -> Vec<Delivery> {
        if self.is_finished() {
            return Vec::new();
        }
        match self.game.leave(player, now) {
            Ok(events) => self.commit(events, now),
            Err(_) => Vec::new(),
        }
    }

    /// Ends the game if its time limit has passed.
    pub fn tick(&mut self, now: f64) -> Vec<Delivery> {
        match self.game.tick(now) {
            Ok(events) if !events.is_empty() => self.commit(events, now),
            _ => Vec::new(),
        }
    }
}
