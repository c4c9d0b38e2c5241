use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    honest_policy, AgentMemory, AgentRng, AgentView, Cheat, OraclePolicy, Policy, PolicyKind,
    RoomFingerprint, WandererParams,
};
use crate::catalog::{ImageCatalog, TypeCatalog};
use crate::error::BoardError;
use crate::game::{
    AbortReason, Action, Actor, Event, EventBody, Game, GameConfig, GameState, Outcome, PlayerId,
    PrivateNotice,
};
use crate::gameboard::{generate_board, BoardConfig, Direction, SharedBoard};
use crate::rng::{derive_seed, stream_rng, streams};

#[derive(Debug, Clone)]
pub struct EpisodeConfig {
    /// Total number of decisions (both players) before the episode is cut off.
    pub step_cap: usize,
    /// Inclusive range for the delay after an action, in milliseconds.
    pub latency_ms: (u64, u64),
    /// Delay after a decision to do nothing.
    pub idle_ms: u64,
    pub wanderer: WandererParams,
    pub game: GameConfig,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            step_cap: 200,
            latency_ms: (500, 8000),
            idle_ms: 1000,
            wanderer: WandererParams::default(),
            game: GameConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ActionCounts {
    pub says: usize,
    pub moves: usize,
    pub rejected_moves: usize,
    pub dones: usize,
    pub idles: usize,
}

#[derive(Debug, Clone)]
pub struct EpisodeLog {
    pub game_id: String,
    pub seed: u64,
    pub policies: [PolicyKind; 2],
    pub board: SharedBoard,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    pub counts: [ActionCounts; 2],
    pub final_state: GameState,
}

impl EpisodeLog {
    /// The log in the persisted newline-delimited form.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_json_line());
            out.push('\n');
        }
        out
    }
}

enum Agent {
    Oracle(OraclePolicy),
    Honest(Box<dyn Policy>),
}

impl Agent {
    fn new(kind: PolicyKind, config: &EpisodeConfig) -> Self {
        match honest_policy(kind, config.wanderer) {
            Some(p) => Self::Honest(p),
            None => Self::Oracle(OraclePolicy::new()),
        }
    }
}

/// Per-player perception, fed only from events that player may see.
struct Seat {
    room: RoomFingerprint,
    room_type: Option<String>,
    inbox: Vec<String>,
    memory: AgentMemory,
    pending_move: Option<Direction>,
    next_ms: u64,
}

fn ts(ms: u64) -> f64 {
    ms as f64 / 1000.0
}

fn deliver(seats: &mut [Seat; 2], game: &Game, events: &[Event]) {
    let board = game.state().board();
    for e in events {
        for p in PlayerId::BOTH {
            if !e.visible_to(p) {
                continue;
            }
            let seat = &mut seats[p.index()];
            match &e.body {
                EventBody::Say { text } => {
                    if e.actor == Actor::from(p) {
                        seat.memory.said(text, e.ts);
                    } else {
                        seat.memory.heard(text, e.ts);
                        seat.inbox.push(text.clone());
                    }
                }
                EventBody::Move { direction, .. } => seat.pending_move = Some(*direction),
                EventBody::GmPrivate {
                    notice: PrivateNotice::Observation { room, image, exits, .. },
                    ..
                } => {
                    seat.room = RoomFingerprint {
                        image: image.clone(),
                        exits: exits.iter().copied().collect(),
                    };
                    seat.room_type = board.room_type(*room).map(|t| t.name.clone());
                    if let Some(via) = seat.pending_move.take() {
                        seat.memory.entered(seat.room.clone(), via);
                    }
                }
                _ => {}
            }
        }
    }
}

/// Plays one episode between two policies on a simulated clock.
///
/// The player whose next decision is due earliest acts (ties go to A); after
/// an action the player's clock advances by a latency draw, after an idle
/// decision by `idle_ms`.
pub fn run_episode(
    game_id: &str,
    board: SharedBoard,
    policy_a: PolicyKind,
    policy_b: PolicyKind,
    seed: u64,
    config: &EpisodeConfig,
) -> Result<EpisodeLog, crate::game::GameError> {
    let mut clock_rng = stream_rng(seed, streams::EPISODE);
    let mut agent_rngs: [AgentRng; 2] = [
        stream_rng(seed, streams::AGENT_A),
        stream_rng(seed, streams::AGENT_B),
    ];
    let mut agents = [Agent::new(policy_a, config), Agent::new(policy_b, config)];

    let (mut game, initial) = Game::new(game_id, board.clone(), &config.game, 0.0)?;
    let worker_a = clock_rng.random_range(0..100u32);
    let worker_b = (worker_a + clock_rng.random_range(1..100u32)) % 100;
    let mut emitted = initial;
    emitted.push(game.join(PlayerId::A, Some(format!("sim-w{worker_a:02}")), 0.0)?);
    emitted.push(game.join(PlayerId::B, Some(format!("sim-w{worker_b:02}")), 0.0)?);

    let (lo, hi) = config.latency_ms;
    let blank = || Seat {
        room: RoomFingerprint {
            image: String::new(),
            exits: Default::default(),
        },
        room_type: None,
        inbox: Vec::new(),
        memory: AgentMemory::default(),
        pending_move: None,
        next_ms: 0,
    };
    let mut seats = [blank(), blank()];
    deliver(&mut seats, &game, &emitted);
    for seat in &mut seats {
        seat.memory = AgentMemory::starting_in(seat.room.clone());
        seat.next_ms = clock_rng.random_range(lo..=hi);
    }

    let mut counts = [ActionCounts::default(); 2];
    let mut steps = 0usize;
    let mut now_ms = 0u64;
    while !game.state().is_finished() {
        if steps >= config.step_cap {
            game.abort(AbortReason::Timeout, ts(now_ms))?;
            break;
        }
        let p = if seats[1].next_ms < seats[0].next_ms {
            PlayerId::B
        } else {
            PlayerId::A
        };
        now_ms = seats[p.index()].next_ms;
        let now = ts(now_ms);
        if !game.tick(now)?.is_empty() {
            break;
        }
        steps += 1;
        let seat = &mut seats[p.index()];
        let view = AgentView {
            room: seat.room.clone(),
            room_type: seat.room_type.clone(),
            target_type: board.target_type().name.clone(),
            inbox: std::mem::take(&mut seat.inbox),
            clock: now,
        };
        let action = match &mut agents[p.index()] {
            Agent::Oracle(o) => o.decide(&Cheat {
                board: &board,
                me: p,
                positions: game.state().positions(),
            }),
            Agent::Honest(policy) => policy.decide(&view, &seat.memory, &mut agent_rngs[p.index()]),
        };
        let c = &mut counts[p.index()];
        match action {
            None => {
                c.idles += 1;
                seat.next_ms = now_ms + config.idle_ms;
            }
            Some(action) => {
                match &action {
                    Action::Say(_) => c.says += 1,
                    Action::Move(_) => {}
                    Action::Done => c.dones += 1,
                }
                let events = game.apply_action(p, action, now)?;
                for e in &events {
                    match e.body {
                        EventBody::Move { .. } => counts[p.index()].moves += 1,
                        EventBody::GmPrivate {
                            notice: PrivateNotice::InvalidMove { .. },
                            ..
                        } => counts[p.index()].rejected_moves += 1,
                        _ => {}
                    }
                }
                deliver(&mut seats, &game, &events);
                seats[p.index()].next_ms = now_ms + clock_rng.random_range(lo..=hi);
            }
        }
    }

    let final_state = game.into_state();
    Ok(EpisodeLog {
        game_id: game_id.to_string(),
        seed,
        policies: [policy_a, policy_b],
        board,
        events: final_state.events().to_vec(),
        outcome: final_state.outcome().expect("the loop only exits once finished"),
        counts,
        final_state,
    })
}

#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub episodes: usize,
    pub policy_a: PolicyKind,
    pub policy_b: PolicyKind,
    pub seed: u64,
    pub board: BoardConfig,
    pub episode: EpisodeConfig,
}

impl BatchConfig {
    pub fn new(episodes: usize, policy_a: PolicyKind, policy_b: PolicyKind, seed: u64) -> Self {
        Self {
            episodes,
            policy_a,
            policy_b,
            seed,
            board: BoardConfig::default(),
            episode: EpisodeConfig::default(),
        }
    }

    pub fn episode_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }

    pub fn game_id(&self, index: usize) -> String {
        format!("sim-{}-{index:04}", self.seed)
    }
}

/// Runs `episodes` episodes in parallel, each on its own board. The result is
/// in episode order and independent of thread scheduling.
pub fn run_batch(
    config: &BatchConfig,
    types: &TypeCatalog,
    images: &ImageCatalog,
) -> Result<Vec<EpisodeLog>, BoardError> {
    (0..config.episodes)
        .into_par_iter()
        .map(|i| {
            let seed = config.episode_seed(i);
            let board = Arc::new(generate_board(seed, &config.board, types, images)?);
            let log = run_episode(
                &config.game_id(i),
                board,
                config.policy_a,
                config.policy_b,
                seed,
                &config.episode,
            )
            .expect("generated boards are valid");
            Ok(log)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchStats {
    pub episodes: usize,
    pub policies: [PolicyKind; 2],
    pub seed: u64,
    pub outcome_counts: BTreeMap<String, usize>,
    pub outcome_fractions: BTreeMap<String, f64>,
    pub mean_moves: f64,
    pub mean_says: f64,
    pub mean_rejected_moves: f64,
}

impl BatchStats {
    pub fn from_logs(config: &BatchConfig, logs: &[EpisodeLog]) -> Self {
        let mut outcome_counts: BTreeMap<String, usize> =
            Outcome::ALL.iter().map(|o| (o.as_str().to_string(), 0)).collect();
        let (mut moves, mut says, mut rejected) = (0usize, 0usize, 0usize);
        for log in logs {
            *outcome_counts.entry(log.outcome.as_str().to_string()).or_default() += 1;
            for c in &log.counts {
                moves += c.moves;
                says += c.says;
                rejected += c.rejected_moves;
            }
        }
        let n = logs.len().max(1) as f64;
        Self {
            episodes: logs.len(),
            policies: [config.policy_a, config.policy_b],
            seed: config.seed,
            outcome_fractions: outcome_counts
                .iter()
                .map(|(k, &v)| (k.clone(), v as f64 / n))
                .collect(),
            outcome_counts,
            mean_moves: moves as f64 / n,
            mean_says: says as f64 / n,
            mean_rejected_moves: rejected as f64 / n,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::EventKind;

    fn board(seed: u64) -> SharedBoard {
        let types = TypeCatalog::builtin();
        Arc::new(
            generate_board(seed, &BoardConfig::default(), &types, &ImageCatalog::synthetic(&types, 6))
                .unwrap(),
        )
    }

    fn run(a: PolicyKind, b: PolicyKind, seed: u64) -> EpisodeLog {
        run_episode("t", board(seed), a, b, seed, &EpisodeConfig::default()).unwrap()
    }

    #[test]
    fn oracles_succeed() {
        for seed in 0..20 {
            assert_eq!(run(PolicyKind::Oracle, PolicyKind::Oracle, seed).outcome, Outcome::Success);
        }
    }

    #[test]
    fn zero_step_cap_aborts_without_actions() {
        let config = EpisodeConfig {
            step_cap: 0,
            ..EpisodeConfig::default()
        };
        let log = run_episode("t", board(1), PolicyKind::Wanderer, PolicyKind::Wanderer, 1, &config)
            .unwrap();
        assert_eq!(log.outcome, Outcome::Aborted(AbortReason::Timeout));
        assert!(!log
            .events
            .iter()
            .any(|e| matches!(e.kind(), EventKind::Say | EventKind::Move)));
    }

    #[test]
    fn same_seed_same_log() {
        for kind in [PolicyKind::Wanderer, PolicyKind::Describer] {
            let x = run(kind, kind, 5);
            let y = run(kind, kind, 5);
            assert_eq!(x.to_jsonl(), y.to_jsonl());
            assert_eq!(x.counts, y.counts);
        }
    }

    #[test]
    fn counts_match_the_log() {
        let log = run(PolicyKind::Wanderer, PolicyKind::Describer, 3);
        for p in PlayerId::BOTH {
            let by = |k: EventKind| {
                log.events
                    .iter()
                    .filter(|e| e.actor == Actor::from(p) && e.kind() == k)
                    .count()
            };
            assert_eq!(log.counts[p.index()].says, by(EventKind::Say));
            assert_eq!(log.counts[p.index()].moves, by(EventKind::Move));
            assert_eq!(log.counts[p.index()].dones, by(EventKind::Done));
        }
    }

    #[test]
    fn honest_paths_follow_observations() {
        let log = run(PolicyKind::Describer, PolicyKind::Describer, 11);
        let replayed = GameState::replay(log.board.clone(), &log.events).unwrap();
        assert_eq!(replayed, log.final_state);
    }

    #[test]
    fn describers_terminate() {
        for seed in 0..30 {
            let log = run(PolicyKind::Describer, PolicyKind::Describer, seed);
            assert!(log.final_state.is_finished());
        }
    }

    #[test]
    fn batch_is_ordered_and_summarised() {
        let types = TypeCatalog::builtin();
        let images = ImageCatalog::synthetic(&types, 6);
        let config = BatchConfig::new(8, PolicyKind::Oracle, PolicyKind::Oracle, 9);
        let logs = run_batch(&config, &types, &images).unwrap();
        assert_eq!(logs.len(), 8);
        assert_eq!(logs[3].game_id, "sim-9-0003");
        let stats = BatchStats::from_logs(&config, &logs);
        assert_eq!(stats.outcome_counts["success"], 8);
        assert_eq!(stats.outcome_fractions["success"], 1.0);
    }
}
