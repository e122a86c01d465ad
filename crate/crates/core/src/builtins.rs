//! Named maps shipped with the library.
//!
//! `F1`..`F16` are sixteen 4-component maps with strongly connected
//! iteration graphs and doubly stochastic transition matrices; `g` and `h`
//! are 2-component maps with strongly connected iteration graphs, of which
//! only `h` is doubly stochastic.

use crate::network::BooleanMap;

const CATALOG_TABLES: [[u32; 16]; 16] = [
    [14, 15, 12, 13, 10, 11, 8, 9, 6, 7, 4, 5, 2, 3, 1, 0],
    [14, 15, 12, 13, 10, 11, 8, 9, 6, 7, 5, 4, 3, 2, 0, 1],
    [14, 15, 12, 13, 10, 11, 8, 9, 6, 7, 5, 4, 3, 2, 1, 0],
    [14, 15, 12, 13, 10, 11, 9, 8, 6, 7, 5, 4, 3, 2, 0, 1],
    [14, 15, 12, 13, 10, 11, 9, 8, 6, 7, 5, 4, 3, 2, 1, 0],
    [14, 15, 12, 13, 10, 11, 9, 8, 7, 6, 4, 5, 2, 3, 0, 1],
    [14, 15, 12, 13, 10, 11, 9, 8, 7, 6, 4, 5, 2, 3, 1, 0],
    [14, 15, 12, 13, 10, 11, 9, 8, 7, 6, 4, 5, 3, 2, 1, 0],
    [14, 15, 12, 13, 10, 11, 9, 8, 7, 6, 5, 4, 3, 2, 0, 1],
    [14, 15, 12, 13, 10, 11, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0],
    [14, 15, 12, 13, 11, 10, 9, 8, 7, 6, 5, 4, 2, 3, 1, 0],
    [14, 15, 13, 12, 11, 10, 8, 9, 7, 6, 4, 5, 2, 3, 1, 0],
    [14, 15, 13, 12, 11, 10, 8, 9, 7, 6, 4, 5, 3, 2, 1, 0],
    [14, 15, 13, 12, 11, 10, 8, 9, 7, 6, 5, 4, 3, 2, 1, 0],
    [14, 15, 13, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 0, 1],
    [14, 15, 13, 12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1, 0],
];

/// `F{k}` for `k` in `1..=16`.
pub fn catalog_function(k: usize) -> Option<BooleanMap> {
    let table = CATALOG_TABLES.get(k.checked_sub(1)?)?;
    Some(BooleanMap::new(4, table.to_vec()).expect("builtin table is valid"))
}

/// `("F1", F1), ..., ("F16", F16)`.
pub fn catalog_functions() -> Vec<(String, BooleanMap)> {
    (1..=16)
        .map(|k| (format!("F{k}"), catalog_function(k).unwrap()))
        .collect()
}

/// Two-component map with a non-uniform stationary distribution.
pub fn g() -> BooleanMap {
    BooleanMap::new(2, vec![2, 2, 1, 0]).unwrap()
}

/// Two-component map with a uniform stationary distribution.
pub fn h() -> BooleanMap {
    BooleanMap::new(2, vec![2, 3, 1, 0]).unwrap()
}

/// Resolves a builtin name: `F1`..`F16`, `g`, `h`, `neg<n>`, `id<n>`.
pub fn resolve(name: &str) -> Option<BooleanMap> {
    let name = name.trim();
    match name {
        "g" => return Some(g()),
        "h" => return Some(h()),
        _ => {}
    }
    if let Some(k) = name.strip_prefix('F').or_else(|| name.strip_prefix('f')) {
        return catalog_function(k.parse().ok()?);
    }
    if let Some(n) = name.strip_prefix("neg") {
        return BooleanMap::negation(n.parse().ok()?).ok();
    }
    if let Some(n) = name.strip_prefix("id") {
        return BooleanMap::identity(n.parse().ok()?).ok();
    }
    None
}

/// Names accepted by [`resolve`], for help texts.
pub const BUILTIN_NAMES: &str = "F1..F16, g, h, neg<n>, id<n>";
