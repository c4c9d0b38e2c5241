use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Coord, Edge, Gameboard, GridGraph, Layout};
use crate::catalog::TypeCatalog;
use crate::error::{BoardError, CatalogError};

pub const BOARD_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub col: i32,
    pub row: i32,
    #[serde(rename = "type")]
    pub room_type: String,
    pub image: String,
}

/// On-disk board document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoardFile {
    pub schema_version: u32,
    pub seed: u64,
    pub target_type: String,
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<[Coord; 2]>,
    pub starts: [Coord; 2],
}

impl Gameboard {
    pub fn to_file(&self) -> BoardFile {
        let nodes = self
            .graph()
            .nodes()
            .iter()
            .map(|&c| NodeRecord {
                col: c.col,
                row: c.row,
                room_type: self.room_type(c).map(|t| t.name.clone()).unwrap_or_default(),
                image: self.image(c).unwrap_or_default().to_string(),
            })
            .collect();
        BoardFile {
            schema_version: BOARD_SCHEMA_VERSION,
            seed: self.seed,
            target_type: self.target_type().name.clone(),
            nodes,
            edges: self.graph().edges().iter().map(|&e| e.into()).collect(),
            starts: self.starts,
        }
    }

    /// Rebuilds a board, resolving type names against `types`. The result is
    /// not validated.
    pub fn from_file(file: BoardFile, types: &TypeCatalog) -> Result<Self, BoardError> {
        if file.schema_version != BOARD_SCHEMA_VERSION {
            return Err(BoardError::SchemaVersion(file.schema_version));
        }
        let resolve = |name: &str| {
            types
                .lookup(name)
                .ok_or_else(|| BoardError::Catalog(CatalogError::UnknownType(name.to_string())))
        };
        let target_type = resolve(&file.target_type)?;
        let mut typing = BTreeMap::new();
        let mut images = BTreeMap::new();
        for n in &file.nodes {
            let c = Coord::new(n.col, n.row);
            if typing.insert(c, resolve(&n.room_type)?).is_some() {
                return Err(BoardError::Format(format!("room {c} listed twice")));
            }
            images.insert(c, n.image.clone());
        }
        let graph = GridGraph::from_parts(
            typing.keys().copied(),
            file.edges.into_iter().map(Edge::from),
        );
        Ok(Self {
            seed: file.seed,
            layout: Layout { graph, typing, target_type },
            images,
            starts: file.starts,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("board serializes")
    }

    pub fn from_json(text: &str, types: &TypeCatalog) -> Result<Self, BoardError> {
        let file: BoardFile =
            serde_json::from_str(text).map_err(|e| BoardError::Format(e.to_string()))?;
        Self::from_file(file, types)
    }
}
