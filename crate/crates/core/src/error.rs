use thiserror::Error;

use crate::gameboard::Coord;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog invalid: {0}")]
    Invalid(String),
    #[error("unknown room type {0:?}")]
    UnknownType(String),
    #[error("room type {0:?} cannot be a target type")]
    NotTargetCapable(String),
    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Error)]
pub enum BoardError {
    #[error("a walk needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("graph has {interior} interior nodes and {total} nodes; need 4 interior target rooms plus 2 other rooms")]
    InsufficientInteriorNodes { interior: usize, total: usize },
    #[error("room type {type_name:?} needs {needed} images but the manifest has {available}")]
    CatalogExhausted {
        type_name: String,
        needed: usize,
        available: usize,
    },
    #[error("image {0:?} would be used for two rooms")]
    DuplicateImage(String),
    #[error("fewer than 2 rooms are not of the target type")]
    NoValidStarts,
    #[error("({}, {}) is not a room on this board", .0.col, .0.row)]
    UnknownNode(Coord),
    #[error("no board found after {0} attempts")]
    GenerationFailed(usize),
    #[error("unsupported board schema version {0}")]
    SchemaVersion(u32),
    #[error("board file: {0}")]
    Format(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}
