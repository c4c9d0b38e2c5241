use rand::seq::IndexedRandom;
use rand::Rng;

use super::{bfs_shortest_path, AgentMemory, AgentRng, AgentView, Phrase, Policy, Strategy};
use crate::game::{Action, PlayerId};
use crate::gameboard::{Direction, Gameboard};

/// Privileged information only the oracle receives.
#[derive(Debug, Clone, Copy)]
pub struct Cheat<'a> {
    pub board: &'a Gameboard,
    pub me: PlayerId,
    pub positions: [crate::gameboard::Coord; 2],
}

/// Walks the shortest path to the smallest target room and declares done
/// once there. Breaks the observability rules on purpose; it exists to check
/// the engine, not to play fairly.
#[derive(Debug, Clone, Default)]
pub struct OraclePolicy {
    done_sent: bool,
}

impl OraclePolicy {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn decide(&mut self, cheat: &Cheat<'_>) -> Option<Action> {
        if self.done_sent {
            return None;
        }
        let here = cheat.positions[cheat.me.index()];
        let rendezvous = cheat
            .board
            .layout
            .target_rooms()
            .min()
            .expect("a valid board has target rooms");
        if here == rendezvous {
            self.done_sent = true;
            return Some(Action::Done);
        }
        let path = bfs_shortest_path(cheat.board, here, rendezvous).ok()?;
        path.first().map(|&d| Action::Move(d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WandererParams {
    pub move_prob: f64,
    /// Move probability after the current room has been described.
    pub linger_move_prob: f64,
    pub max_steps: usize,
}

impl Default for WandererParams {
    fn default() -> Self {
        Self {
            move_prob: 0.8,
            linger_move_prob: 0.2,
            max_steps: 30,
        }
    }
}

/// Random walker that only talks in target-type rooms.
#[derive(Debug, Clone, Default)]
pub struct WandererPolicy {
    params: WandererParams,
    steps: usize,
    here: Option<String>,
    described_here: bool,
    affirm_pending: bool,
    done_pending: bool,
    done_sent: bool,
}

impl WandererPolicy {
    pub fn new(params: WandererParams) -> Self {
        Self {
            params,
            ..Self::default()
        }
    }
}

fn random_exit(view: &AgentView, rng: &mut AgentRng) -> Option<Direction> {
    let exits: Vec<Direction> = view.room.exits.iter().copied().collect();
    exits.choose(rng).copied()
}

fn locate(view: &AgentView) -> Action {
    Action::Say(
        Phrase::Locate {
            room_type: view.room_type.clone().unwrap_or_else(|| "room".into()),
            image: view.room.image.clone(),
        }
        .render(),
    )
}

impl Policy for WandererPolicy {
    fn decide(
        &mut self,
        view: &AgentView,
        _memory: &AgentMemory,
        rng: &mut AgentRng,
    ) -> Option<Action> {
        if self.done_sent {
            return None;
        }
        self.steps += 1;
        if self.here.as_deref() != Some(view.room.image.as_str()) {
            self.here = Some(view.room.image.clone());
            self.described_here = false;
            self.done_pending = false;
        }
        for text in &view.inbox {
            match Phrase::parse(text) {
                Some(Phrase::Locate { .. }) if view.in_target_room() => self.affirm_pending = true,
                Some(Phrase::Affirm) if self.described_here => self.done_pending = true,
                _ => {}
            }
        }
        if self.affirm_pending {
            self.affirm_pending = false;
            self.done_pending = true;
            return Some(Action::Say(Phrase::Affirm.render()));
        }
        if self.done_pending || self.steps >= self.params.max_steps {
            self.done_sent = true;
            return Some(Action::Done);
        }
        if view.in_target_room() && !self.described_here {
            self.described_here = true;
            return Some(locate(view));
        }
        let p = if self.described_here {
            self.params.linger_move_prob
        } else {
            self.params.move_prob
        };
        if rng.random_bool(p) {
            random_exit(view, rng).map(Action::Move)
        } else {
            None
        }
    }
}

/// Honest heuristic: describes rooms by fingerprint, agrees on who waits,
/// explores unexplored exits, and declares done only on a fingerprint match.
#[derive(Debug, Clone, Default)]
pub struct DescriberPolicy {
    opened: bool,
    here: Option<String>,
    announced_here: bool,
    seek_acknowledged: bool,
    done_sent: bool,
}

impl DescriberPolicy {
    pub fn new() -> Self {
        Self::default()
    }

    fn explore(view: &AgentView, memory: &AgentMemory, rng: &mut AgentRng) -> Option<Action> {
        let tried = memory.tried_exits(&view.room.image);
        let fresh: Vec<Direction> = view.room.exits.difference(&tried).copied().collect();
        let pick = if fresh.is_empty() {
            random_exit(view, rng)
        } else {
            fresh.choose(rng).copied()
        };
        pick.map(Action::Move)
    }
}

impl Policy for DescriberPolicy {
    fn decide(
        &mut self,
        view: &AgentView,
        memory: &AgentMemory,
        rng: &mut AgentRng,
    ) -> Option<Action> {
        if self.here.as_deref() != Some(view.room.image.as_str()) {
            self.here = Some(view.room.image.clone());
            self.announced_here = false;
        }
        if !self.opened {
            self.opened = true;
            self.announced_here = true;
            return Some(locate(view));
        }
        if self.done_sent {
            return None;
        }
        let partner_here = memory.partner_belief.last_room.as_deref() == Some(view.room.image.as_str());
        if self.announced_here && partner_here && view.in_target_room() {
            self.done_sent = true;
            return Some(Action::Done);
        }
        match memory.strategy {
            Strategy::YouSeek => {
                if !self.announced_here {
                    self.announced_here = true;
                    return Some(locate(view));
                }
                None
            }
            Strategy::ISeek => {
                if !self.seek_acknowledged {
                    self.seek_acknowledged = true;
                    return Some(Action::Say(Phrase::Seek.render()));
                }
                if partner_here && view.in_target_room() && !self.announced_here {
                    self.announced_here = true;
                    return Some(locate(view));
                }
                Self::explore(view, memory, rng)
            }
            Strategy::None | Strategy::BothWander => {
                if view.in_target_room() {
                    if !self.announced_here {
                        self.announced_here = true;
                        return Some(locate(view));
                    }
                    return Some(Action::Say(Phrase::Wait.render()));
                }
                Self::explore(view, memory, rng)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use rand::SeedableRng;

    use super::*;
    use crate::agents::RoomFingerprint;

    fn view(image: &str, exits: &[Direction], room_type: &str) -> AgentView {
        AgentView {
            room: RoomFingerprint {
                image: image.into(),
                exits: exits.iter().copied().collect::<BTreeSet<_>>(),
            },
            room_type: Some(room_type.into()),
            target_type: "kitchen".into(),
            inbox: Vec::new(),
            clock: 0.0,
        }
    }

    fn rng() -> AgentRng {
        AgentRng::seed_from_u64(7)
    }

    #[test]
    fn wanderer_takes_the_only_exit() {
        let mut w = WandererPolicy::new(WandererParams {
            move_prob: 1.0,
            ..WandererParams::default()
        });
        let v = view("garage_01", &[Direction::East], "garage");
        let m = AgentMemory::starting_in(v.room.clone());
        let mut r = rng();
        for _ in 0..10 {
            assert_eq!(w.decide(&v, &m, &mut r), Some(Action::Move(Direction::East)));
        }
    }

    #[test]
    fn wanderer_gives_up_at_max_steps() {
        let mut w = WandererPolicy::new(WandererParams {
            move_prob: 0.0,
            linger_move_prob: 0.0,
            max_steps: 3,
        });
        let v = view("garage_01", &[Direction::East], "garage");
        let m = AgentMemory::starting_in(v.room.clone());
        let mut r = rng();
        assert_eq!(w.decide(&v, &m, &mut r), None);
        assert_eq!(w.decide(&v, &m, &mut r), None);
        assert_eq!(w.decide(&v, &m, &mut r), Some(Action::Done));
        assert_eq!(w.decide(&v, &m, &mut r), None);
    }

    #[test]
    fn wanderer_describes_then_ends_on_affirmation() {
        let mut w = WandererPolicy::default();
        let mut v = view("kitchen_01", &[Direction::North], "kitchen");
        let m = AgentMemory::starting_in(v.room.clone());
        let mut r = rng();
        let Some(Action::Say(text)) = w.decide(&v, &m, &mut r) else {
            panic!("expected a description");
        };
        assert!(matches!(Phrase::parse(&text), Some(Phrase::Locate { .. })));
        v.inbox = vec![Phrase::Affirm.render()];
        assert_eq!(w.decide(&v, &m, &mut r), Some(Action::Done));
    }

    #[test]
    fn describer_opens_with_a_locating_say() {
        let mut d = DescriberPolicy::new();
        let v = view("garage_01", &[Direction::East], "garage");
        let m = AgentMemory::starting_in(v.room.clone());
        let Some(Action::Say(text)) = d.decide(&v, &m, &mut rng()) else {
            panic!("first decision must be a say");
        };
        assert!(text.starts_with("i'm in a "));
    }

    #[test]
    fn describer_ends_on_matching_fingerprints() {
        let mut d = DescriberPolicy::new();
        let v = view("kitchen_02", &[Direction::North], "kitchen");
        let mut m = AgentMemory::starting_in(v.room.clone());
        let mut r = rng();
        d.decide(&v, &m, &mut r);
        m.heard(
            &Phrase::Locate {
                room_type: "kitchen".into(),
                image: "kitchen_02".into(),
            }
            .render(),
            1.0,
        );
        assert_eq!(d.decide(&v, &m, &mut r), Some(Action::Done));
    }

    #[test]
    fn describer_prefers_untried_exits() {
        let mut d = DescriberPolicy::new();
        let v = view("hallway_01", &[Direction::North, Direction::East], "corridor");
        let mut m = AgentMemory::starting_in(v.room.clone());
        m.entered(
            RoomFingerprint {
                image: "x".into(),
                exits: BTreeSet::new(),
            },
            Direction::North,
        );
        m.entered(v.room.clone(), Direction::South);
        let mut r = rng();
        d.decide(&v, &m, &mut r);
        for _ in 0..10 {
            assert_eq!(d.decide(&v, &m, &mut r), Some(Action::Move(Direction::East)));
        }
    }
}
