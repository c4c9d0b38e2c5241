use std::collections::{BTreeMap, BTreeSet};

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Coord, Direction, Edge, Gameboard, GridGraph, ImagedLayout, Layout};
use crate::catalog::{ImageCatalog, RoomCategory, RoomType, TypeCatalog};
use crate::error::BoardError;
use crate::rng::{stream_rng, streams};

pub const DEFAULT_NODE_COUNT: usize = 10;
pub const DEFAULT_STEP_BUDGET: usize = 10_000;
/// Number of rooms carrying the target type.
pub const TARGET_ROOM_COUNT: usize = 4;

/// Which edges a walk-generated graph receives.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum EdgeMode {
    /// Every pair of grid-adjacent visited cells is connected.
    #[default]
    Induced,
    /// Only the steps the walk actually took become edges.
    WalkOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkConfig {
    pub node_count: usize,
    pub edge_mode: EdgeMode,
    /// Steps after which a walk is abandoned and restarted from `seed + 1`.
    pub step_budget: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            node_count: DEFAULT_NODE_COUNT,
            edge_mode: EdgeMode::Induced,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoardConfig {
    pub walk: WalkConfig,
    /// Fixed target type; drawn from the target list when `None`.
    pub target_type: Option<String>,
    pub max_attempts: usize,
}

impl Default for BoardConfig {
    fn default() -> Self {
        Self {
            walk: WalkConfig::default(),
            target_type: None,
            max_attempts: 1_000,
        }
    }
}

/// Random walk over the grid collecting `node_count` distinct cells, with
/// grid-induced edges.
pub fn generate_walk(seed: u64, node_count: usize) -> Result<GridGraph, BoardError> {
    generate_walk_with(
        seed,
        &WalkConfig {
            node_count,
            ..WalkConfig::default()
        },
    )
}

pub fn generate_walk_with(seed: u64, config: &WalkConfig) -> Result<GridGraph, BoardError> {
    if config.node_count < 2 {
        return Err(BoardError::TooFewNodes(config.node_count));
    }
    let mut attempt_seed = seed;
    loop {
        if let Some(graph) = try_walk(attempt_seed, config) {
            return Ok(graph.normalized());
        }
        attempt_seed = attempt_seed.wrapping_add(1);
    }
}

fn try_walk(seed: u64, config: &WalkConfig) -> Option<GridGraph> {
    let mut rng = stream_rng(seed, streams::WALK);
    let mut at = Coord::new(0, 0);
    let mut visited = BTreeSet::from([at]);
    let mut walked = BTreeSet::new();
    let mut steps = 0;
    while visited.len() < config.node_count {
        if steps == config.step_budget {
            return None;
        }
        let direction = *Direction::ALL.choose(&mut rng).expect("four directions");
        let next = at.step(direction);
        walked.insert(Edge::new(at, next));
        visited.insert(next);
        at = next;
        steps += 1;
    }
    Some(match config.edge_mode {
        EdgeMode::Induced => GridGraph::induced(visited),
        EdgeMode::WalkOnly => GridGraph::from_parts(visited, walked),
    })
}

/// Draws from a shuffled pool without replacement, reshuffling only once the
/// pool has been used up.
struct Deck<'a> {
    pool: &'a [String],
    order: Vec<usize>,
}

impl<'a> Deck<'a> {
    fn new(pool: &'a [String]) -> Self {
        Self { pool, order: Vec::new() }
    }

    fn draw(&mut self, rng: &mut ChaCha8Rng) -> &'a str {
        if self.order.is_empty() {
            self.order = (0..self.pool.len()).collect();
            self.order.shuffle(rng);
        }
        let i = self.order.pop().expect("non-empty pool");
        &self.pool[i]
    }
}

/// Types the rooms of `graph`: four random interior rooms get `target_type`,
/// the other interior rooms get distractor types and every leaf an outdoor type.
pub fn assign_layout(
    graph: GridGraph,
    target_type: &RoomType,
    catalog: &TypeCatalog,
    seed: u64,
) -> Result<Layout, BoardError> {
    if !target_type.is_target_capable() {
        return Err(crate::error::CatalogError::NotTargetCapable(target_type.name.clone()).into());
    }
    let mut interior: Vec<Coord> = graph.interior().collect();
    let leaves: Vec<Coord> = graph.leaves().collect();
    let total = graph.node_count();
    if interior.len() < TARGET_ROOM_COUNT || total < TARGET_ROOM_COUNT + 2 {
        return Err(BoardError::InsufficientInteriorNodes {
            interior: interior.len(),
            total,
        });
    }

    let mut rng = stream_rng(seed, streams::LAYOUT);
    interior.shuffle(&mut rng);
    let mut typing = BTreeMap::new();
    let (targets, others) = interior.split_at(TARGET_ROOM_COUNT);
    for &c in targets {
        typing.insert(c, target_type.clone());
    }
    let mut distractors = Deck::new(catalog.names(RoomCategory::Distractor));
    for &c in others {
        typing.insert(c, RoomType::new(distractors.draw(&mut rng), RoomCategory::Distractor));
    }
    let mut outdoor = Deck::new(catalog.names(RoomCategory::Outdoor));
    for &c in &leaves {
        typing.insert(c, RoomType::new(outdoor.draw(&mut rng), RoomCategory::Outdoor));
    }
    Ok(Layout {
        graph,
        typing,
        target_type: target_type.clone(),
    })
}

/// Gives every room an image drawn from its type's pool, distinct within the board.
pub fn assign_images(
    layout: Layout,
    catalog: &ImageCatalog,
    seed: u64,
) -> Result<ImagedLayout, BoardError> {
    let mut by_type: BTreeMap<&str, Vec<Coord>> = BTreeMap::new();
    for (c, t) in &layout.typing {
        by_type.entry(t.name.as_str()).or_default().push(*c);
    }
    let mut rng = stream_rng(seed, streams::IMAGES);
    let mut images = BTreeMap::new();
    let mut used = BTreeSet::new();
    for (type_name, rooms) in by_type {
        let pool = catalog.pool(type_name);
        if pool.len() < rooms.len() {
            return Err(BoardError::CatalogExhausted {
                type_name: type_name.to_string(),
                needed: rooms.len(),
                available: pool.len(),
            });
        }
        let picks = index::sample(&mut rng, pool.len(), rooms.len());
        for (room, i) in rooms.into_iter().zip(picks) {
            let id = &pool[i];
            if !used.insert(id.as_str()) {
                return Err(BoardError::DuplicateImage(id.clone()));
            }
            images.insert(room, id.clone());
        }
    }
    Ok(ImagedLayout { layout, images })
}

/// Two distinct start rooms, neither of the target type.
pub fn pick_starts(board: &ImagedLayout, seed: u64) -> Result<[Coord; 2], BoardError> {
    let candidates: Vec<Coord> = board
        .layout
        .graph
        .nodes()
        .iter()
        .copied()
        .filter(|&c| !board.layout.is_target(c))
        .collect();
    if candidates.len() < 2 {
        return Err(BoardError::NoValidStarts);
    }
    let mut rng = stream_rng(seed, streams::STARTS);
    let n = candidates.len();
    let first = rng.random_range(0..n);
    let mut second = rng.random_range(0..n - 1);
    if second >= first {
        second += 1;
    }
    Ok([candidates[first], candidates[second]])
}

/// Full pipeline from seed to board.
pub fn generate_board(
    seed: u64,
    config: &BoardConfig,
    types: &TypeCatalog,
    images: &ImageCatalog,
) -> Result<Gameboard, BoardError> {
    let target_type = match &config.target_type {
        Some(name) => types.target(name)?,
        None => {
            let mut rng = stream_rng(seed, streams::TARGET);
            types
                .types(RoomCategory::Target)
                .collect::<Vec<_>>()
                .choose(&mut rng)
                .cloned()
                .expect("target list is non-empty")
        }
    };
    for k in 0..config.max_attempts as u64 {
        let attempt = seed.wrapping_add(k);
        let graph = generate_walk_with(attempt, &config.walk)?;
        let layout = match assign_layout(graph, &target_type, types, attempt) {
            Ok(layout) => layout,
            Err(BoardError::InsufficientInteriorNodes { .. }) => continue,
            Err(e) => return Err(e),
        };
        let imaged = assign_images(layout, images, attempt)?;
        let starts = pick_starts(&imaged, attempt)?;
        return Ok(Gameboard::from_parts(seed, imaged, starts));
    }
    Err(BoardError::GenerationFailed(config.max_attempts))
}
