#![allow(dead_code)]

use bnchaos::interaction::{Sign, SignedDigraph};
use bnchaos::search::enumerate_compatible;
use bnchaos::BooleanMap;
use rand::Rng;

pub fn random_map(rng: &mut impl Rng, n: usize) -> BooleanMap {
    let table = (0..1u32 << n)
        .map(|_| rng.random_range(0..1u32 << n))
        .collect();
    BooleanMap::new(n, table).unwrap()
}

/// Floyd-Warshall transitive closure of the unlabeled iteration graph.
pub fn floyd_warshall_strongly_connected(f: &BooleanMap) -> bool {
    let size = f.size();
    let n = f.n();
    let mut reach = vec![vec![false; size]; size];
    for (x, row) in reach.iter_mut().enumerate() {
        row[x] = true;
        for i in 1..=n {
            row[f.update_raw(i, x as u32) as usize] = true;
        }
    }
    for k in 0..size {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (cell, &r) in row.iter_mut().zip(&via) {
                *cell |= r;
            }
        }
    }
    reach.iter().all(|row| row.iter().all(|&r| r))
}

/// A random signed digraph meeting the three sufficient conditions, or
/// `None` when the random draw missed them.
pub fn random_condition_graph(rng: &mut impl Rng, n: usize) -> Option<SignedDigraph> {
    let mut order: Vec<usize> = (1..=n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    let mut g = SignedDigraph::empty(n).unwrap();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.4) {
                let sign = if rng.random_bool(0.5) {
                    Sign::Positive
                } else {
                    Sign::Negative
                };
                g.add_arc(order[a], sign, order[b]).unwrap();
            }
        }
    }
    for v in 1..=n {
        if rng.random_bool(0.6) {
            g.add_arc(v, Sign::Negative, v).unwrap();
            if rng.random_bool(0.3) {
                g.add_arc(v, Sign::Positive, v).unwrap();
            }
        }
    }
    g.satisfies_sufficient_conditions().then_some(g)
}

/// A random map whose interaction graph equals `target`, if one exists.
pub fn random_map_with_graph(rng: &mut impl Rng, target: &SignedDigraph) -> Option<BooleanMap> {
    let maps = enumerate_compatible(target, true).ok()?;
    let total = maps.total();
    if total == 0 {
        return None;
    }
    let index = rng.random_range(0..total.min(u64::MAX as u128) as u64);
    maps.nth_map(index as u128)
}

pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=n).collect();
    for k in (1..n).rev() {
        perm.swap(k, rng.random_range(0..=k));
    }
    perm
}
