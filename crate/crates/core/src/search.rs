//! Finding Boolean maps with strongly connected iteration graphs.
//!
//! [`generate_and_test`] starts from `Gamma(neg)` and turns random arcs into
//! self-loops while strong connectivity survives. [`enumerate_compatible`]
//! lists every map whose interaction graph fits inside a target signed
//! digraph.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::interaction::SignedDigraph;
use crate::iteration::IterationGraph;
use crate::markov::is_doubly_stochastic;
use crate::network::{component_mask, BooleanMap, MAX_COMPONENTS};

/// Largest in-degree for which candidate component functions are listed
/// exhaustively (`2^(2^4)` truth tables per component).
pub const MAX_ENUMERATION_IN_DEGREE: usize = 4;

/// Largest `n` for which automorphisms of a target graph are enumerated.
pub const MAX_AUTOMORPHISM_COMPONENTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchParams {
    pub n: usize,
    /// Fraction of the `n * 2^n` arcs of `Gamma(neg)` to remove, in `[0, 1)`.
    pub rate: f64,
    pub seed: u64,
    /// Consecutive failed removals tolerated before giving up.
    pub max_attempts: usize,
}

impl SearchParams {
    pub fn new(n: usize, rate: f64, seed: u64) -> Self {
        Self {
            n,
            rate,
            seed,
            max_attempts: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_COMPONENTS).contains(&self.n) {
            return Err(invalid(format!("component count {} out of range", self.n)));
        }
        if !(0.0..1.0).contains(&self.rate) {
            return Err(invalid(format!("removal rate {} not in [0, 1)", self.rate)));
        }
        if self.max_attempts == 0 {
            return Err(invalid("max_attempts must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub map: BooleanMap,
    /// Arcs turned into self-loops.
    pub removed: usize,
    /// Non-self arcs of the starting graph, `n * 2^n`.
    pub initial: usize,
    /// Whether `removed / initial` reached the requested rate.
    pub reached_target: bool,
}

impl SearchOutcome {
    pub fn remaining(&self) -> usize {
        self.initial - self.removed
    }

    pub fn removal_rate(&self) -> f64 {
        self.removed as f64 / self.initial as f64
    }
}

/// Random arc removal preserving strong connectivity.
///
/// An arc whose removal disconnects the graph stays essential for the rest
/// of the run: removing further arcs can only shrink reachability.
pub fn generate_and_test(params: &SearchParams) -> Result<SearchOutcome> {
    params.validate()?;
    let n = params.n;
    let mut graph = IterationGraph::build(&BooleanMap::negation(n)?);
    let initial = n << n;
    let mut pool: Vec<(u32, usize)> = graph
        .arcs()
        .filter(|&(x, _, y)| x != y)
        .map(|(x, i, _)| (x, i))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut removed = 0usize;
    let mut failures = 0usize;
    let reached = |removed: usize| removed as f64 >= params.rate * initial as f64;

    while !reached(removed) && !pool.is_empty() && failures < params.max_attempts {
        let (x, i) = pool.swap_remove(rng.random_range(0..pool.len()));
        let old = graph.target(x, i);
        graph.set_target(x, i, x);
        if graph.is_strongly_connected() {
            removed += 1;
            failures = 0;
        } else {
            graph.set_target(x, i, old);
            failures += 1;
        }
    }

    Ok(SearchOutcome {
        map: graph_to_map(&graph),
        removed,
        initial,
        reached_target: reached(removed),
    })
}

/// Runs independent searches, one per parameter set.
pub fn generate_many(params: &[SearchParams], execution: Execution) -> Vec<Result<SearchOutcome>> {
    execution.map(params, generate_and_test)
}

/// The map whose iteration graph is `graph`: `f_i(x)` is component `i` of
/// the head of arc `(x, i)`.
pub fn graph_to_map(graph: &IterationGraph) -> BooleanMap {
    let n = graph.n();
    let table = (0..graph.vertex_count() as u32)
        .map(|x| {
            (1..=n).fold(0u32, |acc, i| {
                acc | (graph.target(x, i) & component_mask(n, i))
            })
        })
        .collect();
    BooleanMap::new(n, table).expect("iteration graph encodes a valid map")
}

/// [`graph_to_map`] on raw arc heads, rejecting malformed arcs.
pub fn targets_to_map(n: usize, targets: Vec<u32>) -> Result<BooleanMap> {
    Ok(graph_to_map(&IterationGraph::from_targets(n, targets)?))
}

/// Admissible local functions of one component.
///
/// Local truth tables are indexed by the in-neighbors of the component,
/// the `p`-th in-neighbor (by increasing index) at bit `p`.
fn local_candidates(target: &SignedDigraph, i: usize, require_equality: bool) -> Vec<u32> {
    let (pos, neg) = target.in_arc_masks(i);
    let neighbors: Vec<usize> = (0..target.n())
        .filter(|j| (pos | neg) >> j & 1 == 1)
        .collect();
    let k = neighbors.len();
    let entries = 1usize << k;
    // low_half[p]: entries whose local bit p is 0
    let low_half: Vec<u64> = (0..k)
        .map(|p| {
            (0..entries)
                .filter(|y| y >> p & 1 == 0)
                .fold(0, |m, y| m | 1 << y)
        })
        .collect();
    let mut out = Vec::new();
    for t in 0..1u64 << entries {
        let (mut seen_pos, mut seen_neg) = (0u32, 0u32);
        for (p, &j) in neighbors.iter().enumerate() {
            let up = t >> (1 << p);
            if up & !t & low_half[p] != 0 {
                seen_pos |= 1 << j;
            }
            if t & !up & low_half[p] != 0 {
                seen_neg |= 1 << j;
            }
        }
        let within = seen_pos & !pos == 0 && seen_neg & !neg == 0;
        let exact = seen_pos == pos && seen_neg == neg;
        if within && (!require_equality || exact) {
            out.push(t as u32);
        }
    }
    out
}

/// Lazy cartesian product of per-component candidates.
#[derive(Clone, Debug)]
pub struct CompatibleMaps {
    n: usize,
    neighbors: Vec<Vec<usize>>,
    candidates: Vec<Vec<u32>>,
    odometer: Option<Vec<usize>>,
}

impl CompatibleMaps {
    /// Total number of maps the stream will yield.
    pub fn total(&self) -> u128 {
        self.candidates.iter().map(|c| c.len() as u128).product()
    }

    /// The map at position `index` of the stream, without advancing it.
    pub fn nth_map(&self, mut index: u128) -> Option<BooleanMap> {
        if index >= self.total() {
            return None;
        }
        let choice: Vec<usize> = self
            .candidates
            .iter()
            .map(|c| {
                let len = c.len() as u128;
                let digit = (index % len) as usize;
                index /= len;
                digit
            })
            .collect();
        Some(self.assemble(&choice))
    }

    fn assemble(&self, choice: &[usize]) -> BooleanMap {
        let n = self.n;
        let table = (0..1u32 << n)
            .map(|x| {
                let mut image = 0;
                for i in 1..=n {
                    let local = self.neighbors[i - 1]
                        .iter()
                        .enumerate()
                        .filter(|&(_, &j)| x & component_mask(n, j + 1) != 0)
                        .fold(0usize, |acc, (p, _)| acc | 1 << p);
                    if self.candidates[i - 1][choice[i - 1]] >> local & 1 == 1 {
                        image |= component_mask(n, i);
                    }
                }
                image
            })
            .collect();
        BooleanMap::new(n, table).expect("assembled table is in range")
    }
}

impl Iterator for CompatibleMaps {
    type Item = BooleanMap;

    fn next(&mut self) -> Option<BooleanMap> {
        let choice = self.odometer.as_mut()?;
        let current = choice.clone();
        let mut pos = 0;
        loop {
            if pos == choice.len() {
                self.odometer = None;
                break;
            }
            choice[pos] += 1;
            if choice[pos] < self.candidates[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        Some(self.assemble(&current))
    }
}

/// Every `f` with `G(f)` contained in `target`, or equal to it when
/// `require_equality` is set.
pub fn enumerate_compatible(
    target: &SignedDigraph,
    require_equality: bool,
) -> Result<CompatibleMaps> {
    let n = target.n();
    let mut neighbors = Vec::with_capacity(n);
    for i in 1..=n {
        let mask = target.in_neighbors(i);
        if mask.count_ones() as usize > MAX_ENUMERATION_IN_DEGREE {
            return Err(Error::UnsupportedSize(format!(
                "component {i} has {} in-neighbors, exhaustive enumeration supports at most {MAX_ENUMERATION_IN_DEGREE}",
                mask.count_ones()
            )));
        }
        neighbors.push((0..n).filter(|j| mask >> j & 1 == 1).collect());
    }
    let candidates: Vec<Vec<u32>> = (1..=n)
        .map(|i| local_candidates(target, i, require_equality))
        .collect();
    let odometer = if candidates.iter().any(Vec::is_empty) {
        None
    } else {
        Some(vec![0; n])
    };
    Ok(CompatibleMaps {
        n,
        neighbors,
        candidates,
        odometer,
    })
}

/// Keeps the maps whose Markov matrix is doubly stochastic.
pub fn filter_double_stochastic<I>(maps: I) -> impl Iterator<Item = BooleanMap>
where
    I: IntoIterator<Item = BooleanMap>,
{
    maps.into_iter()
        .filter(|f| is_doubly_stochastic(&IterationGraph::build(f)))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v + 1);
                extend(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Component relabelings `perm` (component `i` goes to `perm[i-1]`) that
/// map `target` onto itself, signs included.
pub fn automorphisms(target: &SignedDigraph) -> Result<Vec<Vec<usize>>> {
    let n = target.n();
    if n > MAX_AUTOMORPHISM_COMPONENTS {
        return Err(Error::UnsupportedSize(format!(
            "automorphism search for n = {n} exceeds n = {MAX_AUTOMORPHISM_COMPONENTS}"
        )));
    }
    let arcs = target.arcs();
    Ok(permutations(n)
        .into_iter()
        .filter(|perm| {
            arcs.iter()
                .all(|&(j, s, i)| target.has_arc(perm[j - 1], s, perm[i - 1]))
        })
        .collect())
}

/// Quotients `maps` by the automorphisms of `target`, keeping the
/// lexicographically smallest truth table of every orbit.
///
/// This equivalence (simultaneous relabeling of components that preserves
/// the target graph) is one plausible reading of "non isomorphic"; raw
/// enumeration counts remain the primary output.
pub fn reduce_isomorphic<I>(target: &SignedDigraph, maps: I) -> Result<Vec<BooleanMap>>
where
    I: IntoIterator<Item = BooleanMap>,
{
    let autos = automorphisms(target)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for f in maps {
        if f.n() != target.n() {
            return Err(invalid("map and target differ in component count"));
        }
        let canonical = autos
            .iter()
            .map(|p| f.permute_components(p).map(BooleanMap::into_table))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .min()
            .expect("identity is an automorphism");
        if seen.insert(canonical.clone()) {
            out.push(BooleanMap::new(f.n(), canonical)?);
        }
    }
    Ok(out)
}
