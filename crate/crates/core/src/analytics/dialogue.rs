use std::collections::BTreeMap;

use serde::Serialize;

use super::AnalyticsError;
use crate::game::{Event, EventBody, Outcome, PlayerId, PrivateNotice};

/// Seconds to whole milliseconds. All time statistics are computed on these
/// so that they are exact and independent of summation order.
pub fn to_ms(ts: f64) -> i64 {
    (ts * 1000.0).round() as i64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Turn {
    pub actor: PlayerId,
    pub ts: f64,
    pub text: String,
    /// Position of the underlying record in the source log.
    pub seq: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    Move,
    RejectedMove,
    Done,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrivateAction {
    pub actor: PlayerId,
    pub ts: f64,
    pub kind: ActionKind,
    pub seq: usize,
}

/// A point at which a player arrived in a room.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoomEntry {
    pub ts: f64,
    pub seq: usize,
}

/// Everything the corpus statistics need from one episode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DialogueLog {
    pub game_id: String,
    /// Player turns in log order; GM lines are not turns.
    pub turns: Vec<Turn>,
    pub actions: Vec<PrivateAction>,
    /// Room entries per player, including the start room.
    pub entries: [Vec<RoomEntry>; 2],
    pub outcome: Option<Outcome>,
    pub worker_ids: [Option<String>; 2],
    pub first_ts: f64,
    pub last_ts: f64,
}

impl DialogueLog {
    pub fn from_events(events: &[Event]) -> Result<Self, AnalyticsError> {
        let first = events
            .first()
            .ok_or_else(|| AnalyticsError::Schema("log has no events".into()))?;
        let game_id = first.game_id.clone();
        let mut log = DialogueLog {
            game_id,
            turns: Vec::new(),
            actions: Vec::new(),
            entries: [Vec::new(), Vec::new()],
            outcome: None,
            worker_ids: [None, None],
            first_ts: first.ts,
            last_ts: first.ts,
        };
        for (seq, e) in events.iter().enumerate() {
            if e.game_id != log.game_id {
                return Err(AnalyticsError::Schema(format!(
                    "event {seq} belongs to game {:?}, not {:?}",
                    e.game_id, log.game_id
                )));
            }
            if e.ts < log.last_ts {
                return Err(AnalyticsError::Schema(format!("event {seq} goes back in time")));
            }
            log.last_ts = e.ts;
            let player = e.actor.player();
            match (&e.body, player) {
                (EventBody::Say { text }, Some(actor)) => log.turns.push(Turn {
                    actor,
                    ts: e.ts,
                    text: text.clone(),
                    seq,
                }),
                (EventBody::Move { .. }, Some(actor)) => {
                    log.push_action(actor, e.ts, ActionKind::Move, seq)
                }
                (EventBody::Done, Some(actor)) => log.push_action(actor, e.ts, ActionKind::Done, seq),
                (EventBody::Join { worker_id }, Some(actor)) => {
                    log.worker_ids[actor.index()] = worker_id.clone()
                }
                (EventBody::GmPrivate { to, notice }, None) => match notice {
                    PrivateNotice::Observation { .. } => {
                        log.entries[to.index()].push(RoomEntry { ts: e.ts, seq })
                    }
                    PrivateNotice::InvalidMove { .. } => {
                        log.push_action(*to, e.ts, ActionKind::RejectedMove, seq)
                    }
                    PrivateNotice::DoneAck { .. } => {}
                },
                (EventBody::Outcome { outcome, .. }, None) => log.outcome = Some(*outcome),
                _ => {}
            }
        }
        Ok(log)
    }

    fn push_action(&mut self, actor: PlayerId, ts: f64, kind: ActionKind, seq: usize) {
        self.actions.push(PrivateAction { actor, ts, kind, seq });
    }

    pub fn duration_ms(&self) -> i64 {
        to_ms(self.last_ts) - to_ms(self.first_ts)
    }

    pub fn count_actions(&self, kind: ActionKind) -> usize {
        self.actions.iter().filter(|a| a.kind == kind).count()
    }

    /// Sequence index of the first done by either player.
    pub fn first_done_seq(&self) -> Option<usize> {
        self.actions
            .iter()
            .find(|a| a.kind == ActionKind::Done)
            .map(|a| a.seq)
    }

    pub fn turns_by(&self, player: PlayerId) -> impl Iterator<Item = &Turn> {
        self.turns.iter().filter(move |t| t.actor == player)
    }

    /// Number of own turns a player produced during each room visit.
    pub fn turns_per_visit(&self, player: PlayerId) -> Vec<usize> {
        let entries = &self.entries[player.index()];
        let mut counts = vec![0usize; entries.len()];
        for t in self.turns_by(player) {
            // the visit is the latest entry logged before the turn
            if let Some(i) = entries.iter().rposition(|e| e.seq < t.seq) {
                counts[i] += 1;
            }
        }
        counts
    }

    /// Time spent in each room that the player left again, in milliseconds.
    pub fn dwell_ms(&self, player: PlayerId) -> Vec<i64> {
        self.entries[player.index()]
            .windows(2)
            .map(|w| to_ms(w[1].ts) - to_ms(w[0].ts))
            .collect()
    }
}

/// Distinct games per worker id.
pub fn games_by_worker<'a>(logs: impl IntoIterator<Item = &'a DialogueLog>) -> BTreeMap<String, usize> {
    let mut out = BTreeMap::<String, usize>::new();
    for log in logs {
        let [a, b] = &log.worker_ids;
        let mut ids: Vec<&String> = [a.as_ref(), b.as_ref()].into_iter().flatten().collect();
        ids.dedup();
        for id in ids {
            *out.entry(id.clone()).or_default() += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::agents::{run_episode, EpisodeConfig, PolicyKind};
    use crate::catalog::{ImageCatalog, TypeCatalog};
    use crate::gameboard::{generate_board, BoardConfig};

    fn episode(seed: u64) -> Vec<Event> {
        let types = TypeCatalog::builtin();
        let board = generate_board(seed, &BoardConfig::default(), &types, &ImageCatalog::synthetic(&types, 6))
            .unwrap();
        run_episode(
            "d",
            Arc::new(board),
            PolicyKind::Describer,
            PolicyKind::Wanderer,
            seed,
            &EpisodeConfig::default(),
        )
        .unwrap()
        .events
    }

    #[test]
    fn from_simulated_events() {
        let events = episode(4);
        let log = DialogueLog::from_events(&events).unwrap();
        let says = events.iter().filter(|e| matches!(e.body, EventBody::Say { .. })).count();
        let moves = events.iter().filter(|e| matches!(e.body, EventBody::Move { .. })).count();
        assert_eq!(log.turns.len(), says);
        assert_eq!(log.count_actions(ActionKind::Move), moves);
        assert_eq!(log.entries[0].len() + log.entries[1].len(), moves + 2);
        assert!(log.outcome.is_some());
        assert!(log.worker_ids.iter().all(|w| w.is_some()));
        let visits: usize = PlayerId::BOTH.iter().map(|&p| log.turns_per_visit(p).iter().sum::<usize>()).sum();
        assert_eq!(visits, says);
    }

    #[test]
    fn empty_or_mixed_logs_are_rejected() {
        assert!(DialogueLog::from_events(&[]).is_err());
        let mut events = episode(2);
        events[3].game_id = "other".into();
        assert!(DialogueLog::from_events(&events).is_err());
    }

    #[test]
    fn millisecond_rounding() {
        assert_eq!(to_ms(1.9), 1900);
        assert_eq!(to_ms(0.0005), 1);
        assert_eq!(to_ms(12.3456), 12346);
    }
}
