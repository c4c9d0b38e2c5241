use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A cell of the infinite two-dimensional grid.
///
/// Ordering is lexicographic on `(col, row)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coord {
    pub col: i32,
    pub row: i32,
}

impl Coord {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }

    pub fn step(self, direction: Direction) -> Coord {
        let (dc, dr) = direction.delta();
        Coord::new(self.col + dc, self.row + dr)
    }

    pub fn is_adjacent(self, other: Coord) -> bool {
        self.direction_to(other).is_some()
    }

    /// The direction leading from `self` to a grid-adjacent `other`.
    pub fn direction_to(self, other: Coord) -> Option<Direction> {
        Direction::ALL.into_iter().find(|&d| self.step(d) == other)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.col, self.row)
    }
}

/// Cardinal exit direction. Rows grow southwards, as on a screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    /// Canonical order, also used for tie-breaking.
    pub const ALL: [Direction; 4] = [Self::North, Self::South, Self::East, Self::West];

    /// `(dcol, drow)`.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Self::North => (0, -1),
            Self::South => (0, 1),
            Self::East => (1, 0),
            Self::West => (-1, 0),
        }
    }

    pub fn opposite(self) -> Direction {
        match self {
            Self::North => Self::South,
            Self::South => Self::North,
            Self::East => Self::West,
            Self::West => Self::East,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::North => "north",
            Self::South => "south",
            Self::East => "east",
            Self::West => "west",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDirectionError(pub String);

impl fmt::Display for ParseDirectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown direction {:?}", self.0)
    }
}

impl std::error::Error for ParseDirectionError {}

impl FromStr for Direction {
    type Err = ParseDirectionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "north" | "n" => Ok(Self::North),
            "south" | "s" => Ok(Self::South),
            "east" | "e" => Ok(Self::East),
            "west" | "w" => Ok(Self::West),
            _ => Err(ParseDirectionError(s.to_string())),
        }
    }
}

/// Unordered pair of cells, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "[Coord; 2]", into = "[Coord; 2]")]
pub struct Edge {
    a: Coord,
    b: Coord,
}

impl Edge {
    pub fn new(x: Coord, y: Coord) -> Self {
        if x <= y {
            Self { a: x, b: y }
        } else {
            Self { a: y, b: x }
        }
    }

    pub fn endpoints(self) -> (Coord, Coord) {
        (self.a, self.b)
    }

    pub fn touches(self, c: Coord) -> bool {
        self.a == c || self.b == c
    }
}

impl From<[Coord; 2]> for Edge {
    fn from([x, y]: [Coord; 2]) -> Self {
        Edge::new(x, y)
    }
}

impl From<Edge> for [Coord; 2] {
    fn from(e: Edge) -> Self {
        [e.a, e.b]
    }
}

/// A finite subgraph of the grid. Construction does not check invariants;
/// see [`validate_board`](super::validate_board).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct GridGraph {
    nodes: BTreeSet<Coord>,
    edges: BTreeSet<Edge>,
}

impl GridGraph {
    pub fn from_parts(
        nodes: impl IntoIterator<Item = Coord>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Self {
        Self {
            nodes: nodes.into_iter().collect(),
            edges: edges.into_iter().collect(),
        }
    }

    /// Grid-induced subgraph: every pair of adjacent cells is joined.
    pub fn induced(nodes: impl IntoIterator<Item = Coord>) -> Self {
        let nodes: BTreeSet<Coord> = nodes.into_iter().collect();
        let edges = nodes
            .iter()
            .flat_map(|&c| {
                [Direction::South, Direction::East]
                    .into_iter()
                    .map(move |d| c.step(d))
                    .filter(|n| nodes.contains(n))
                    .map(move |n| Edge::new(c, n))
            })
            .collect();
        Self { nodes, edges }
    }

    pub fn nodes(&self) -> &BTreeSet<Coord> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.nodes.contains(&c)
    }

    pub fn has_edge(&self, x: Coord, y: Coord) -> bool {
        self.edges.contains(&Edge::new(x, y))
    }

    /// Neighbours in canonical direction order.
    pub fn neighbors(&self, c: Coord) -> impl Iterator<Item = (Direction, Coord)> + '_ {
        Direction::ALL
            .into_iter()
            .map(move |d| (d, c.step(d)))
            .filter(move |&(_, n)| self.has_edge(c, n))
    }

    pub fn degree(&self, c: Coord) -> usize {
        self.neighbors(c).count()
    }

    /// Nodes with at most one incident edge.
    pub fn leaves(&self) -> impl Iterator<Item = Coord> + '_ {
        self.nodes.iter().copied().filter(|&c| self.degree(c) <= 1)
    }

    pub fn interior(&self) -> impl Iterator<Item = Coord> + '_ {
        self.nodes.iter().copied().filter(|&c| self.degree(c) >= 2)
    }

    /// Nodes reachable from `start` over edges.
    pub fn reachable_from(&self, start: Coord) -> BTreeSet<Coord> {
        let mut seen = BTreeSet::new();
        if !self.contains(start) {
            return seen;
        }
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(c) = queue.pop_front() {
            for (_, n) in self.neighbors(c) {
                if self.contains(n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.nodes.first() {
            None => true,
            Some(&first) => self.reachable_from(first).len() == self.nodes.len(),
        }
    }

    /// Shifts all coordinates so the bounding box starts at `(0, 0)`.
    pub(crate) fn normalized(self) -> Self {
        let min_col = self.nodes.iter().map(|c| c.col).min().unwrap_or(0);
        let min_row = self.nodes.iter().map(|c| c.row).min().unwrap_or(0);
        let shift = |c: Coord| Coord::new(c.col - min_col, c.row - min_row);
        Self {
            nodes: self.nodes.into_iter().map(shift).collect(),
            edges: self
                .edges
                .into_iter()
                .map(|e| {
                    let (a, b) = e.endpoints();
                    Edge::new(shift(a), shift(b))
                })
                .collect(),
        }
    }
}
