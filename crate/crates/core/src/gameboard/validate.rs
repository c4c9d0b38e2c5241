use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{Coord, Gameboard, TARGET_ROOM_COUNT};

/// The board invariant a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    EdgeEndpointMissing,
    EdgeNotGridAdjacent,
    Connectivity,
    NodeCount,
    UntypedRoom,
    TypedNonRoom,
    TargetCount,
    TargetNotTargetCapable,
    LeafNotOutdoor,
    InteriorOutdoor,
    MissingImage,
    ImageOnNonRoom,
    DuplicateImage,
    StartNotOnBoard,
    StartOnTarget,
    StartsNotDistinct,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub invariant: Invariant,
    pub nodes: Vec<Coord>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.invariant, self.detail)?;
        if !self.nodes.is_empty() {
            let nodes: Vec<String> = self.nodes.iter().map(Coord::to_string).collect();
            write!(f, " at {}", nodes.join(" "))?;
        }
        Ok(())
    }
}

/// Every structural invariant of the board. Empty iff the board is valid.
pub fn validate_board(board: &Gameboard) -> Vec<Violation> {
    validate_board_expecting(board, None)
}

/// As [`validate_board`], additionally requiring exactly `node_count` rooms.
pub fn validate_board_expecting(board: &Gameboard, node_count: Option<usize>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |invariant, nodes: Vec<Coord>, detail: String| {
        out.push(Violation { invariant, nodes, detail })
    };
    let graph = board.graph();
    let layout = &board.layout;

    for edge in graph.edges() {
        let (a, b) = edge.endpoints();
        let missing: Vec<Coord> = [a, b].into_iter().filter(|&c| !graph.contains(c)).collect();
        if !missing.is_empty() {
            push(Invariant::EdgeEndpointMissing, missing, "edge endpoint is not a room".into());
        }
        if !a.is_adjacent(b) {
            push(Invariant::EdgeNotGridAdjacent, vec![a, b], "edge joins non-adjacent cells".into());
        }
    }

    if let Some(&first) = graph.nodes().first() {
        let reached = graph.reachable_from(first);
        let unreached: Vec<Coord> = graph.nodes().difference(&reached).copied().collect();
        if !unreached.is_empty() {
            push(Invariant::Connectivity, unreached, "rooms unreachable from the rest".into());
        }
    }

    if let Some(want) = node_count {
        if graph.node_count() != want {
            push(
                Invariant::NodeCount,
                vec![],
                format!("board has {} rooms, expected {want}", graph.node_count()),
            );
        }
    }

    let untyped: Vec<Coord> = graph
        .nodes()
        .iter()
        .copied()
        .filter(|c| !layout.typing.contains_key(c))
        .collect();
    if !untyped.is_empty() {
        push(Invariant::UntypedRoom, untyped, "room has no type".into());
    }
    let stray: Vec<Coord> = layout.typing.keys().copied().filter(|&c| !graph.contains(c)).collect();
    if !stray.is_empty() {
        push(Invariant::TypedNonRoom, stray, "type assigned to a cell that is not a room".into());
    }

    if !layout.target_type.is_target_capable() {
        push(
            Invariant::TargetNotTargetCapable,
            vec![],
            format!("{} is not a target-capable type", layout.target_type),
        );
    }
    let targets: Vec<Coord> = layout.target_rooms().filter(|&c| graph.contains(c)).collect();
    if targets.len() != TARGET_ROOM_COUNT {
        push(
            Invariant::TargetCount,
            targets.clone(),
            format!(
                "{} rooms of target type {}, expected {TARGET_ROOM_COUNT}",
                targets.len(),
                layout.target_type
            ),
        );
    }

    for c in graph.nodes().iter().copied() {
        let Some(t) = layout.typing.get(&c) else { continue };
        let leaf = graph.degree(c) <= 1;
        if leaf && !t.is_outdoor() {
            push(Invariant::LeafNotOutdoor, vec![c], format!("single-entry room typed {t}"));
        }
        if !leaf && t.is_outdoor() {
            push(Invariant::InteriorOutdoor, vec![c], format!("interior room typed {t}"));
        }
    }

    let missing: Vec<Coord> = graph
        .nodes()
        .iter()
        .copied()
        .filter(|c| !board.images.contains_key(c))
        .collect();
    if !missing.is_empty() {
        push(Invariant::MissingImage, missing, "room has no image".into());
    }
    let stray: Vec<Coord> = board.images.keys().copied().filter(|&c| !graph.contains(c)).collect();
    if !stray.is_empty() {
        push(Invariant::ImageOnNonRoom, stray, "image assigned to a cell that is not a room".into());
    }
    let mut by_image: BTreeMap<&str, Vec<Coord>> = BTreeMap::new();
    for (c, id) in &board.images {
        by_image.entry(id.as_str()).or_default().push(*c);
    }
    for (id, rooms) in by_image {
        if rooms.len() > 1 {
            push(Invariant::DuplicateImage, rooms, format!("image {id:?} used more than once"));
        }
    }

    let [a, b] = board.starts;
    for (player, s) in [("A", a), ("B", b)] {
        if !graph.contains(s) {
            push(Invariant::StartNotOnBoard, vec![s], format!("start of player {player} is not a room"));
        } else if layout.is_target(s) {
            push(Invariant::StartOnTarget, vec![s], format!("player {player} starts in a target room"));
        }
    }
    if a == b {
        push(Invariant::StartsNotDistinct, vec![a], "both players start in the same room".into());
    }
    out
}
