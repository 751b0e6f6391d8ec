//! Bundled example systems for tests and benches.

/// `d` over `0`/`s`, with interpretations.
pub const D_ONLY: &str = include_str!("../corpus/d_only.trs");
/// `d` and `add` over `0`/`s`, with interpretations.
pub const D_ADD: &str = include_str!("../corpus/d_add.trs");
/// The map/comp/app/d/add system with its original interpretations.
/// The `map` and `comp` rules are not compatible with these.
pub const MAP_VERBATIM: &str = include_str!("../corpus/map_verbatim.trs");
/// The same system with compatible `map` and `comp` costs and a `main` rule.
pub const MAP_CORRECTED: &str = include_str!("../corpus/map_corrected.trs");
/// A rule of functional type, `add 0 -> id`.
pub const PARTIAL: &str = include_str!("../corpus/partial.trs");

/// All bundled systems with a short name.
pub const ALL: [(&str, &str); 5] = [
    ("d_only", D_ONLY),
    ("d_add", D_ADD),
    ("map_verbatim", MAP_VERBATIM),
    ("map_corrected", MAP_CORRECTED),
    ("partial", PARTIAL),
];
