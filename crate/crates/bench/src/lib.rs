//! Fixtures shared by the benchmarks.

use meetup_core::agents::{run_batch, BatchConfig, EpisodeLog, PolicyKind};
use meetup_core::{ImageCatalog, TypeCatalog};

pub fn catalogs() -> (TypeCatalog, ImageCatalog) {
    let types = TypeCatalog::builtin();
    let images = ImageCatalog::synthetic(&types, 6);
    (types, images)
}

pub fn episodes(n: usize, a: PolicyKind, b: PolicyKind, seed: u64) -> Vec<EpisodeLog> {
    let (types, images) = catalogs();
    run_batch(&BatchConfig::new(n, a, b, seed), &types, &images).expect("boards generate")
}
