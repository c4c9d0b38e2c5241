//! Gameboards: connected grid subgraphs whose nodes are typed, image-bearing
//! rooms, plus the announced target type and the two start rooms.
//!
//! Generation runs in four seeded steps, each a pure function of its inputs:
//! [`generate_walk`] → [`assign_layout`] → [`assign_images`] → [`pick_starts`].
//! [`generate_board`] chains them and retries with the next seed when a walk
//! cannot host a valid layout.

mod file;
mod generate;
mod grid;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

pub use file::{BoardFile, NodeRecord, BOARD_SCHEMA_VERSION};
pub use generate::{
    assign_images, assign_layout, generate_board, generate_walk, generate_walk_with, pick_starts,
    BoardConfig, EdgeMode, WalkConfig, DEFAULT_NODE_COUNT, DEFAULT_STEP_BUDGET, TARGET_ROOM_COUNT,
};
pub use grid::{Coord, Direction, Edge, GridGraph, ParseDirectionError};
pub use validate::{validate_board, validate_board_expecting, Invariant, Violation};

use crate::catalog::RoomType;
use crate::error::BoardError;

/// A grid graph with a room type on every node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub graph: GridGraph,
    pub typing: BTreeMap<Coord, RoomType>,
    pub target_type: RoomType,
}

impl Layout {
    pub fn is_target(&self, c: Coord) -> bool {
        self.typing.get(&c).is_some_and(|t| *t == self.target_type)
    }

    pub fn target_rooms(&self) -> impl Iterator<Item = Coord> + '_ {
        self.typing
            .iter()
            .filter(|(_, t)| **t == self.target_type)
            .map(|(c, _)| *c)
    }
}

/// A layout whose rooms have images but whose players have not been placed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImagedLayout {
    pub layout: Layout,
    pub images: BTreeMap<Coord, String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gameboard {
    /// The seed this board was requested with.
    pub seed: u64,
    pub layout: Layout,
    pub images: BTreeMap<Coord, String>,
    /// Start rooms of player A and player B.
    pub starts: [Coord; 2],
}

pub type SharedBoard = Arc<Gameboard>;

impl Gameboard {
    pub fn from_parts(seed: u64, imaged: ImagedLayout, starts: [Coord; 2]) -> Self {
        Self {
            seed,
            layout: imaged.layout,
            images: imaged.images,
            starts,
        }
    }

    pub fn graph(&self) -> &GridGraph {
        &self.layout.graph
    }

    pub fn target_type(&self) -> &RoomType {
        &self.layout.target_type
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.graph().contains(c)
    }

    pub fn room_type(&self, c: Coord) -> Option<&RoomType> {
        self.layout.typing.get(&c)
    }

    pub fn image(&self, c: Coord) -> Option<&str> {
        self.images.get(&c).map(String::as_str)
    }

    pub fn is_target(&self, c: Coord) -> bool {
        self.layout.is_target(c)
    }

    /// The exit directions available from `node`.
    pub fn exits(&self, node: Coord) -> Result<BTreeSet<Direction>, BoardError> {
        if !self.contains(node) {
            return Err(BoardError::UnknownNode(node));
        }
        Ok(self.graph().neighbors(node).map(|(d, _)| d).collect())
    }

    /// The room reached by leaving `node` towards `direction`, if that exit exists.
    pub fn neighbor(&self, node: Coord, direction: Direction) -> Option<Coord> {
        let next = node.step(direction);
        self.graph().has_edge(node, next).then_some(next)
    }
}

/// `(nodes, edges)` as plain `(col, row)` tuples.
pub type PlainTopology = (Vec<(i32, i32)>, Vec<((i32, i32), (i32, i32))>);

/// Dense adjacency for tests and benches.
impl Gameboard {
    pub fn plain_topology(&self) -> PlainTopology {
        let nodes = self.graph().nodes().iter().map(|c| (c.col, c.row)).collect();
        let edges = self
            .graph()
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                ((a.col, a.row), (b.col, b.row))
            })
            .collect();
        (nodes, edges)
    }
}
