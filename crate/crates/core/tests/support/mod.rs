#![allow(dead_code)]

use std::sync::Arc;

use meetup_core::gameboard::{generate_board, BoardConfig, SharedBoard};
use meetup_core::{Coord, Gameboard, ImageCatalog, TypeCatalog};

pub fn catalogs() -> (TypeCatalog, ImageCatalog) {
    let types = TypeCatalog::builtin();
    let images = ImageCatalog::synthetic(&types, 6);
    (types, images)
}

pub fn board(seed: u64) -> Gameboard {
    let (types, images) = catalogs();
    generate_board(seed, &BoardConfig::default(), &types, &images).unwrap()
}

pub fn shared(seed: u64) -> SharedBoard {
    Arc::new(board(seed))
}

pub fn cell(c: Coord) -> (i32, i32) {
    (c.col, c.row)
}

pub fn target_cells(b: &Gameboard) -> Vec<(i32, i32)> {
    b.layout.target_rooms().map(cell).collect()
}
