use std::sync::Arc;

use thiserror::Error;

use super::event::{Actor, Event, EventBody, PrivateNotice, PublicNotice};
use super::gm::{GmTemplates, TemplateName};
use super::{AbortReason, Action, Observation, Outcome, PlayerId, Timestamp};
use crate::gameboard::{validate_board, Coord, Direction, Gameboard, SharedBoard, Violation};

/// Default episode length in seconds.
pub const DEFAULT_TIME_LIMIT: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Active,
    Finished(Outcome),
}

#[derive(Debug, Error)]
pub enum GameError {
    #[error("board is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidBoard(Vec<Violation>),
    #[error("the game has already finished")]
    GameAlreadyFinished,
    #[error("say text is empty")]
    EmptySay,
    #[error("clock went backwards: {now} is before {last}")]
    ClockWentBackwards { last: Timestamp, now: Timestamp },
    #[error(transparent)]
    Template(#[from] super::gm::TemplateError),
}

/// A log that this engine could not have produced.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("corrupt log at event {index}: {reason}")]
pub struct ReplayError {
    pub index: usize,
    pub reason: String,
}

/// Three-way classification of where the players ended up.
pub fn classify_positions(board: &Gameboard, a: Coord, b: Coord) -> Outcome {
    match (board.is_target(a), board.is_target(b)) {
        (true, true) if a == b => Outcome::Success,
        (true, true) => Outcome::SameTypeDifferentRoom,
        _ => Outcome::NotInTargetType,
    }
}

/// Complete state of one episode, including its event log.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    game_id: String,
    board: SharedBoard,
    positions: [Coord; 2],
    done: [bool; 2],
    phase: Phase,
    announced: bool,
    started_at: Timestamp,
    time_limit: f64,
    events: Vec<Event>,
}

impl GameState {
    fn initial(game_id: String, board: SharedBoard) -> Self {
        Self {
            game_id,
            positions: board.starts,
            board,
            done: [false; 2],
            phase: Phase::Active,
            announced: false,
            started_at: 0.0,
            time_limit: DEFAULT_TIME_LIMIT,
            events: Vec::new(),
        }
    }

    pub fn game_id(&self) -> &str {
        &self.game_id
    }

    pub fn board(&self) -> &SharedBoard {
        &self.board
    }

    pub fn position(&self, player: PlayerId) -> Coord {
        self.positions[player.index()]
    }

    pub fn positions(&self) -> [Coord; 2] {
        self.positions
    }

    pub fn is_done(&self, player: PlayerId) -> bool {
        self.done[player.index()]
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn outcome(&self) -> Option<Outcome> {
        match self.phase {
            Phase::Active => None,
            Phase::Finished(o) => Some(o),
        }
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.phase, Phase::Finished(_))
    }

    pub fn started_at(&self) -> Timestamp {
        self.started_at
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// The part of the log `player` is allowed to see.
    pub fn view(&self, player: PlayerId) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.visible_to(player))
    }

    pub fn observation(&self, player: PlayerId) -> Observation {
        observe(&self.board, self.position(player))
    }

    /// Classification of the current positions.
    pub fn classify_outcome(&self) -> Outcome {
        classify_positions(&self.board, self.positions[0], self.positions[1])
    }

    fn last_ts(&self) -> Option<Timestamp> {
        self.events.last().map(|e| e.ts)
    }

    fn timed_out(&self, now: Timestamp) -> bool {
        now - self.started_at > self.time_limit
    }

    /// Rebuilds a state from a log, checking every transition.
    pub fn replay(board: SharedBoard, events: &[Event]) -> Result<GameState, ReplayError> {
        let game_id = events.first().map(|e| e.game_id.clone()).unwrap_or_default();
        let mut state = GameState::initial(game_id, board);
        for (index, e) in events.iter().enumerate() {
            state
                .fold(e)
                .map_err(|reason| ReplayError { index, reason })?;
            state.events.push(e.clone());
        }
        Ok(state)
    }

    /// The transition function shared by live play and replay.
    fn fold(&mut self, e: &Event) -> Result<(), String> {
        if e.game_id != self.game_id {
            return Err(format!("event for game {:?} in log of {:?}", e.game_id, self.game_id));
        }
        if let Some(last) = self.last_ts() {
            if e.ts < last {
                return Err(format!("timestamp {} before {}", e.ts, last));
            }
        }
        if self.is_finished() {
            return Err("event after the outcome".into());
        }
        let is_announcement = matches!(e.body, EventBody::GmPublic(PublicNotice::TargetAnnouncement { .. }));
        if !self.announced && !is_announcement {
            return Err("log does not start with the target announcement".into());
        }
        let actor = e.actor.player();
        let player = || actor.ok_or_else(|| "player event with GM actor".to_string());
        match &e.body {
            EventBody::GmPublic(PublicNotice::TargetAnnouncement { target_type, time_limit, .. }) => {
                if self.announced {
                    return Err("second target announcement".into());
                }
                if *target_type != self.board.target_type().name {
                    return Err(format!("announced target {target_type:?} does not match the board"));
                }
                self.announced = true;
                self.started_at = e.ts;
                self.time_limit = *time_limit;
            }
            EventBody::GmPublic(PublicNotice::Notice { .. }) => {}
            EventBody::Join { .. } | EventBody::Leave => {
                player()?;
            }
            EventBody::Say { text } => {
                player()?;
                if text.trim().is_empty() {
                    return Err("empty say".into());
                }
            }
            EventBody::Move { direction, from, to } => {
                let p = player()?;
                if *from != self.position(p) {
                    return Err(format!("player {p} moves from {from} but is at {}", self.position(p)));
                }
                if self.board.neighbor(*from, *direction) != Some(*to) {
                    return Err(format!("no exit {direction} from {from} to {to}"));
                }
                self.positions[p.index()] = *to;
                self.done[p.index()] = false;
            }
            EventBody::Done => {
                let p = player()?;
                self.done[p.index()] = true;
            }
            EventBody::GmPrivate { to, notice } => match notice {
                PrivateNotice::Observation { room, image, exits, .. } => {
                    let expected = observe(&self.board, self.position(*to));
                    let exits_match = exits.iter().copied().eq(expected.exits.iter().copied());
                    if *room != expected.room || *image != expected.image || !exits_match {
                        return Err(format!("observation for {to} does not match room {}", expected.room));
                    }
                }
                PrivateNotice::InvalidMove { direction, .. } => {
                    if self.board.neighbor(self.position(*to), *direction).is_some() {
                        return Err(format!("exit {direction} reported invalid but exists"));
                    }
                }
                PrivateNotice::DoneAck { .. } => {
                    if !self.is_done(*to) {
                        return Err(format!("done acknowledged for {to} who is not done"));
                    }
                }
            },
            EventBody::Outcome { outcome, positions, .. } => {
                if *positions != self.positions {
                    return Err("outcome positions differ from the state".into());
                }
                if !outcome.is_aborted() {
                    if self.done != [true, true] {
                        return Err("outcome before both players are done".into());
                    }
                    if *outcome != self.classify_outcome() {
                        return Err(format!("outcome {outcome} does not match the positions"));
                    }
                }
                self.phase = Phase::Finished(*outcome);
            }
        }
        Ok(())
    }
}

fn observe(board: &Gameboard, room: Coord) -> Observation {
    Observation {
        room,
        image: board.image(room).unwrap_or_default().to_string(),
        exits: board.exits(room).unwrap_or_default(),
    }
}

#[derive(Debug, Clone)]
pub struct GameConfig {
    pub time_limit: f64,
    pub templates: Arc<GmTemplates>,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            time_limit: DEFAULT_TIME_LIMIT,
            templates: Arc::new(GmTemplates::default()),
        }
    }
}

/// Live engine for one episode: validates actions, emits events and folds
/// them into the owned [`GameState`].
#[derive(Debug, Clone)]
pub struct Game {
    state: GameState,
    templates: Arc<GmTemplates>,
}

impl Game {
    /// Places both players and emits the target announcement plus one
    /// observation per player.
    pub fn new(
        game_id: impl Into<String>,
        board: SharedBoard,
        config: &GameConfig,
        now: Timestamp,
    ) -> Result<(Game, Vec<Event>), GameError> {
        let violations = validate_board(&board);
        if !violations.is_empty() {
            return Err(GameError::InvalidBoard(violations));
        }
        let mut game = Game {
            state: GameState::initial(game_id.into(), board),
            templates: config.templates.clone(),
        };
        let target_type = game.state.board.target_type().name.clone();
        let text = game
            .templates
            .render(TemplateName::TargetAnnouncement, &[("target_type", &target_type)])?;
        let mut events = vec![game.emit(
            Actor::Gm,
            EventBody::GmPublic(PublicNotice::TargetAnnouncement {
                text,
                target_type,
                time_limit: config.time_limit,
            }),
            now,
        )];
        for p in PlayerId::BOTH {
            events.push(game.observation_event(p, now)?);
        }
        Ok((game, events))
    }

    pub fn state(&self) -> &GameState {
        &self.state
    }

    pub fn into_state(self) -> GameState {
        self.state
    }

    fn emit(&mut self, actor: Actor, body: EventBody, now: Timestamp) -> Event {
        let event = Event {
            ts: now,
            game_id: self.state.game_id.clone(),
            actor,
            body,
        };
        if let Err(reason) = self.state.fold(&event) {
            panic!("engine produced an inconsistent event: {reason}");
        }
        self.state.events.push(event.clone());
        event
    }

    fn observation_event(&mut self, player: PlayerId, now: Timestamp) -> Result<Event, GameError> {
        let obs = self.state.observation(player);
        let exits: Vec<Direction> = obs.exits.iter().copied().collect();
        let listed: Vec<&str> = exits.iter().map(|d| d.as_str()).collect();
        let text = self
            .templates
            .render(TemplateName::ExitsNotice, &[("exits", &listed.join(", "))])?;
        Ok(self.emit(
            Actor::Gm,
            EventBody::GmPrivate {
                to: player,
                notice: PrivateNotice::Observation {
                    text,
                    room: obs.room,
                    image: obs.image,
                    exits,
                },
            },
            now,
        ))
    }

    fn outcome_event(&mut self, outcome: Outcome, now: Timestamp) -> Result<Event, GameError> {
        let target = self.state.board.target_type().name.clone();
        let text = match outcome {
            Outcome::Success => self
                .templates
                .render(TemplateName::OutcomeSuccess, &[("target_type", &target)])?,
            other => {
                let reason = match other {
                    Outcome::SameTypeDifferentRoom => {
                        format!("you are in different rooms of type {target}")
                    }
                    Outcome::NotInTargetType => {
                        format!("at least one of you is not in a room of type {target}")
                    }
                    Outcome::Aborted(AbortReason::Timeout) => "the time is up".to_string(),
                    Outcome::Aborted(AbortReason::PlayerLeft) => "a player left the game".to_string(),
                    Outcome::Success => unreachable!(),
                };
                self.templates.render(
                    TemplateName::OutcomeFailure,
                    &[("reason", &reason), ("target_type", &target)],
                )?
            }
        };
        let positions = self.state.positions;
        Ok(self.emit(Actor::Gm, EventBody::Outcome { outcome, positions, text }, now))
    }

    fn check_clock(&self, now: Timestamp) -> Result<(), GameError> {
        if self.state.is_finished() {
            return Err(GameError::GameAlreadyFinished);
        }
        match self.state.last_ts() {
            Some(last) if now < last => Err(GameError::ClockWentBackwards { last, now }),
            _ => Ok(()),
        }
    }

    /// Records that a player (with an optional worker id) joined.
    pub fn join(
        &mut self,
        player: PlayerId,
        worker_id: Option<String>,
        now: Timestamp,
    ) -> Result<Event, GameError> {
        self.check_clock(now)?;
        Ok(self.emit(player.into(), EventBody::Join { worker_id }, now))
    }

    pub fn apply_action(
        &mut self,
        player: PlayerId,
        action: Action,
        now: Timestamp,
    ) -> Result<Vec<Event>, GameError> {
        self.check_clock(now)?;
        if self.state.timed_out(now) {
            return Ok(vec![self.outcome_event(Outcome::Aborted(AbortReason::Timeout), now)?]);
        }
        let mut out = Vec::new();
        match action {
            Action::Say(text) => {
                if text.trim().is_empty() {
                    return Err(GameError::EmptySay);
                }
                out.push(self.emit(player.into(), EventBody::Say { text }, now));
            }
            Action::Move(direction) => {
                let from = self.state.position(player);
                match self.state.board.neighbor(from, direction) {
                    Some(to) => {
                        out.push(self.emit(player.into(), EventBody::Move { direction, from, to }, now));
                        out.push(self.observation_event(player, now)?);
                    }
                    None => {
                        let text = self
                            .templates
                            .render(TemplateName::InvalidMove, &[("direction", direction.as_str())])?;
                        out.push(self.emit(
                            Actor::Gm,
                            EventBody::GmPrivate {
                                to: player,
                                notice: PrivateNotice::InvalidMove { text, direction },
                            },
                            now,
                        ));
                    }
                }
            }
            Action::Done => {
                out.push(self.emit(player.into(), EventBody::Done, now));
                let text = self.templates.render(TemplateName::DoneAck, &[])?;
                out.push(self.emit(
                    Actor::Gm,
                    EventBody::GmPrivate {
                        to: player,
                        notice: PrivateNotice::DoneAck { text },
                    },
                    now,
                ));
                if self.state.done == [true, true] {
                    let outcome = self.state.classify_outcome();
                    out.push(self.outcome_event(outcome, now)?);
                }
            }
        }
        Ok(out)
    }

    /// Ends the episode with a timeout if the time limit has passed.
    pub fn tick(&mut self, now: Timestamp) -> Result<Vec<Event>, GameError> {
        if self.state.is_finished() || !self.state.timed_out(now) {
            return Ok(Vec::new());
        }
        self.check_clock(now)?;
        Ok(vec![self.outcome_event(Outcome::Aborted(AbortReason::Timeout), now)?])
    }

    /// A player left; the episode ends as aborted.
    pub fn leave(&mut self, player: PlayerId, now: Timestamp) -> Result<Vec<Event>, GameError> {
        self.check_clock(now)?;
        let left = self.emit(player.into(), EventBody::Leave, now);
        let outcome = self.outcome_event(Outcome::Aborted(AbortReason::PlayerLeft), now)?;
        Ok(vec![left, outcome])
    }

    /// Ends the episode for a reason outside the players' actions.
    pub fn abort(&mut self, reason: AbortReason, now: Timestamp) -> Result<Vec<Event>, GameError> {
        self.check_clock(now)?;
        Ok(vec![self.outcome_event(Outcome::Aborted(reason), now)?])
    }
}
