//! Room-type taxonomy and image manifests.
//!
//! The built-in taxonomy is compiled in from `data/room_types.txt`. Room-type
//! names are kept verbatim, including slash-bearing ones like
//! `jacuzzi/indoor`; [`fs_alias`] gives a filename-safe spelling.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CatalogError;

const BUILTIN_TYPES: &str = include_str!("../data/room_types.txt");

pub const TARGET_TYPE_COUNT: usize = 20;
pub const DISTRACTOR_TYPE_COUNT: usize = 28;
pub const OUTDOOR_TYPE_COUNT: usize = 24;

/// Which of the three taxonomy lists a room type belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomCategory {
    /// May be announced as the meeting goal.
    Target,
    Distractor,
    /// Reserved for leaf (single-entry) rooms.
    Outdoor,
}

impl RoomCategory {
    pub const ALL: [RoomCategory; 3] = [Self::Target, Self::Distractor, Self::Outdoor];

    pub fn section_name(self) -> &'static str {
        match self {
            Self::Target => "target",
            Self::Distractor => "distractor",
            Self::Outdoor => "outdoor",
        }
    }

    fn from_section(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.section_name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RoomType {
    pub name: String,
    pub category: RoomCategory,
}

impl RoomType {
    pub fn new(name: impl Into<String>, category: RoomCategory) -> Self {
        Self { name: name.into(), category }
    }

    pub fn is_target_capable(&self) -> bool {
        self.category == RoomCategory::Target
    }

    pub fn is_outdoor(&self) -> bool {
        self.category == RoomCategory::Outdoor
    }
}

impl fmt::Display for RoomType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Filename-safe alias for a room-type name (`/` becomes `__`).
pub fn fs_alias(name: &str) -> String {
    name.replace('/', "__")
}

/// The three room-type lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCatalog {
    target: Vec<String>,
    distractor: Vec<String>,
    outdoor: Vec<String>,
}

impl TypeCatalog {
    /// The compiled-in taxonomy.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TYPES).expect("built-in room-type catalog is valid")
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses the plain-text catalog format: `[target]`, `[distractor]` and
    /// `[outdoor]` section headers followed by one name per line. Blank lines
    /// and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut lists: BTreeMap<RoomCategory, Vec<String>> = BTreeMap::new();
        let mut current = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(section) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let category = RoomCategory::from_section(section.trim()).ok_or_else(|| {
                    CatalogError::Invalid(format!(
                        "line {}: unknown section [{}]",
                        lineno + 1,
                        section.trim()
                    ))
                })?;
                if lists.contains_key(&category) {
                    return Err(CatalogError::Invalid(format!(
                        "line {}: section [{}] appears twice",
                        lineno + 1,
                        category.section_name()
                    )));
                }
                lists.insert(category, Vec::new());
                current = Some(category);
                continue;
            }
            let category = current.ok_or_else(|| {
                CatalogError::Invalid(format!("line {}: name outside of any section", lineno + 1))
            })?;
            lists.get_mut(&category).expect("section registered").push(line.to_string());
        }
        let mut take = |c: RoomCategory| lists.remove(&c).unwrap_or_default();
        Self::from_lists(
            take(RoomCategory::Target),
            take(RoomCategory::Distractor),
            take(RoomCategory::Outdoor),
        )
    }

    /// Builds a catalog from explicit lists, enforcing the 20/28/24 sizes and
    /// global name uniqueness.
    pub fn from_lists(
        target: Vec<String>,
        distractor: Vec<String>,
        outdoor: Vec<String>,
    ) -> Result<Self, CatalogError> {
        let expected = [
            (RoomCategory::Target, &target, TARGET_TYPE_COUNT),
            (RoomCategory::Distractor, &distractor, DISTRACTOR_TYPE_COUNT),
            (RoomCategory::Outdoor, &outdoor, OUTDOOR_TYPE_COUNT),
        ];
        for (category, list, want) in expected {
            if list.len() != want {
                return Err(CatalogError::Invalid(format!(
                    "[{}] lists {} names, expected {}",
                    category.section_name(),
                    list.len(),
                    want
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for name in target.iter().chain(&distractor).chain(&outdoor) {
            if name.trim().is_empty() || name.trim() != name {
                return Err(CatalogError::Invalid(format!("malformed room-type name {name:?}")));
            }
            if !seen.insert(name.as_str()) {
                return Err(CatalogError::Invalid(format!("room type {name:?} listed more than once")));
            }
        }
        Ok(Self { target, distractor, outdoor })
    }

    pub fn names(&self, category: RoomCategory) -> &[String] {
        match category {
            RoomCategory::Target => &self.target,
            RoomCategory::Distractor => &self.distractor,
            RoomCategory::Outdoor => &self.outdoor,
        }
    }

    pub fn types(&self, category: RoomCategory) -> impl Iterator<Item = RoomType> + '_ {
        self.names(category).iter().map(move |n| RoomType::new(n.clone(), category))
    }

    pub fn all_names(&self) -> impl Iterator<Item = &str> {
        self.target
            .iter()
            .chain(&self.distractor)
            .chain(&self.outdoor)
            .map(String::as_str)
    }

    pub fn category_of(&self, name: &str) -> Option<RoomCategory> {
        RoomCategory::ALL
            .into_iter()
            .find(|&c| self.names(c).iter().any(|n| n == name))
    }

    pub fn lookup(&self, name: &str) -> Option<RoomType> {
        self.category_of(name).map(|c| RoomType::new(name, c))
    }

    /// A target-capable room type by name.
    pub fn target(&self, name: &str) -> Result<RoomType, CatalogError> {
        match self.lookup(name) {
            Some(t) if t.is_target_capable() => Ok(t),
            Some(_) => Err(CatalogError::NotTargetCapable(name.to_string())),
            None => Err(CatalogError::UnknownType(name.to_string())),
        }
    }

    /// Serializes back into the plain-text format accepted by [`parse`](Self::parse).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, category) in RoomCategory::ALL.into_iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}]\n", category.section_name()));
            for name in self.names(category) {
                out.push_str(name);
                out.push('\n');
            }
        }
        out
    }
}

/// Image identifiers available per room type, read from a manifest.
///
/// Identifiers are opaque strings; nothing in the game looks inside them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ImageCatalog {
    pools: BTreeMap<String, Vec<String>>,
}

/// Minimum pool size per type, so that four same-typed rooms get distinct images.
pub const MIN_IMAGES_PER_TYPE: usize = 4;

impl ImageCatalog {
    pub fn new(pools: BTreeMap<String, Vec<String>>) -> Self {
        Self { pools }
    }

    /// Synthetic manifest: `per_type` identifiers of the form `<alias>_<nn>` for
    /// every type in the taxonomy.
    pub fn synthetic(types: &TypeCatalog, per_type: usize) -> Self {
        let pools = types
            .all_names()
            .map(|name| {
                let alias = fs_alias(name);
                let ids = (0..per_type).map(|i| format!("{alias}_{i:02}")).collect();
                (name.to_string(), ids)
            })
            .collect();
        Self { pools }
    }

    /// Parses a JSON manifest: an object mapping type name to a list of identifiers.
    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        serde_json::from_str(text).map_err(|e| CatalogError::Invalid(format!("manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path).map_err(|source| CatalogError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }

    /// Room type whose pool lists `image`.
    pub fn type_of(&self, image: &str) -> Option<&str> {
        self.pools
            .iter()
            .find(|(_, ids)| ids.iter().any(|i| i == image))
            .map(|(name, _)| name.as_str())
    }

    pub fn pool(&self, type_name: &str) -> &[String] {
        self.pools.get(type_name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Checks that every taxonomy type has at least [`MIN_IMAGES_PER_TYPE`]
    /// identifiers and that identifiers are globally unique.
    pub fn validate(&self, types: &TypeCatalog) -> Result<(), CatalogError> {
        for name in types.all_names() {
            let n = self.pool(name).len();
            if n < MIN_IMAGES_PER_TYPE {
                return Err(CatalogError::Invalid(format!(
                    "manifest has {n} images for {name:?}, need at least {MIN_IMAGES_PER_TYPE}"
                )));
            }
        }
        let mut seen = BTreeSet::new();
        for id in self.pools.values().flatten() {
            if !seen.insert(id) {
                return Err(CatalogError::Invalid(format!("image {id:?} listed more than once")));
            }
        }
        Ok(())
    }
}
