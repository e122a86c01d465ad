//! Discrete Jacobian and the signed interaction graph `G(f)`.
//!
//! `G(f)` has a vertex per component and an arc `(j, s, i)` whenever
//! flipping `x_j` moves `f_i` in direction `s` at some configuration. All
//! arithmetic here is exact integer arithmetic.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::network::{component_mask, BooleanMap, Configuration, MAX_COMPONENTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Positive => '+',
            Sign::Negative => '-',
        }
    }

    fn from_value(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Positive),
            -1 => Some(Sign::Negative),
            _ => None,
        }
    }
}

/// `f'(x)`: the `n x n` matrix of entries in `{-1, 0, 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobianMatrix {
    n: usize,
    entries: Vec<i8>,
}

impl JacobianMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, both 1-based.
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[(i - 1) * self.n + (j - 1)]
    }

    pub fn rows(&self) -> Vec<Vec<i8>> {
        self.entries.chunks(self.n).map(<[i8]>::to_vec).collect()
    }
}

/// `f_ij(x) = (f_i(x with x_j flipped) - f_i(x)) / (flipped x_j - x_j)`.
///
/// The denominator is `+1` when `x_j = 0` and `-1` otherwise.
#[inline]
pub fn jacobian_entry(f: &BooleanMap, i: usize, j: usize, x: u32) -> i8 {
    let mask = component_mask(f.n(), j);
    let before = i8::from(f.component_at(i, x));
    let after = i8::from(f.component_at(i, x ^ mask));
    let denominator = if x & mask == 0 { 1 } else { -1 };
    (after - before) * denominator
}

pub fn discrete_jacobian(f: &BooleanMap, x: Configuration) -> Result<JacobianMatrix> {
    if x.n() != f.n() {
        return Err(invalid("configuration and map disagree on component count"));
    }
    let n = f.n();
    let mut entries = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            entries.push(jacobian_entry(f, i, j, x.bits()));
        }
    }
    Ok(JacobianMatrix { n, entries })
}

/// Signed digraph on vertices `1..=n`. At most one arc per `(j, sign, i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedDigraph {
    n: usize,
    // bit j-1 of positive[i-1] <=> arc (j, +, i)
    positive: Vec<u32>,
    negative: Vec<u32>,
}

/// Outcome of the three structural conditions, individually.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConditionReport {
    /// No circuit through two or more distinct vertices.
    pub acyclic: bool,
    /// Every positive loop comes with a negative loop.
    pub positive_loops_covered: bool,
    /// Every vertex is reachable from a negative-loop vertex.
    pub reachable_from_negative_loop: bool,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.acyclic && self.positive_loops_covered && self.reachable_from_negative_loop
    }
}

impl SignedDigraph {
    pub fn empty(n: usize) -> Result<Self> {
        if !(1..=MAX_COMPONENTS).contains(&n) {
            return Err(invalid(format!("vertex count {n} out of range")));
        }
        Ok(Self {
            n,
            positive: vec![0; n],
            negative: vec![0; n],
        })
    }

    /// `G(f)`: arc `(j, s, i)` iff `f_ij(x) = s` for some `x`.
    pub fn build(f: &BooleanMap) -> Self {
        let n = f.n();
        let mut g = Self::empty(n).expect("map sizes are in range");
        for i in 1..=n {
            for j in 1..=n {
                for x in 0..f.size() as u32 {
                    if let Some(sign) = Sign::from_value(jacobian_entry(f, i, j, x)) {
                        g.insert(j, sign, i);
                    }
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_arc(&mut self, from: usize, sign: Sign, to: usize) -> Result<()> {
        self.check_vertex(from)?;
        self.check_vertex(to)?;
        self.insert(from, sign, to);
        Ok(())
    }

    fn insert(&mut self, from: usize, sign: Sign, to: usize) {
        let bit = 1 << (from - 1);
        match sign {
            Sign::Positive => self.positive[to - 1] |= bit,
            Sign::Negative => self.negative[to - 1] |= bit,
        }
    }

    pub fn has_arc(&self, from: usize, sign: Sign, to: usize) -> bool {
        let bit = 1 << (from - 1);
        let masks = match sign {
            Sign::Positive => &self.positive,
            Sign::Negative => &self.negative,
        };
        masks[to - 1] & bit != 0
    }

    /// Arcs `(j, sign, i)` sorted by head, then tail, then sign.
    pub fn arcs(&self) -> Vec<(usize, Sign, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                for sign in [Sign::Positive, Sign::Negative] {
                    if self.has_arc(j, sign, i) {
                        out.push((j, sign, i));
                    }
                }
            }
        }
        out
    }

    pub fn arc_count(&self) -> usize {
        self.positive
            .iter()
            .chain(&self.negative)
            .map(|m| m.count_ones() as usize)
            .sum()
    }

    /// Tails of arcs into `i` (either sign), as a bit mask over `j - 1`.
    pub fn in_neighbors(&self, i: usize) -> u32 {
        self.positive[i - 1] | self.negative[i - 1]
    }

    /// Signed in-arcs of `i` as `(positive, negative)` tail masks.
    pub fn in_arc_masks(&self, i: usize) -> (u32, u32) {
        (self.positive[i - 1], self.negative[i - 1])
    }

    /// Heads of arcs out of `j` (either sign), as a bit mask over `i - 1`.
    fn out_mask(&self, j: usize) -> u32 {
        let bit = 1 << (j - 1);
        (1..=self.n)
            .filter(|&i| self.in_neighbors(i) & bit != 0)
            .fold(0, |m, i| m | 1 << (i - 1))
    }

    pub fn is_subgraph_of(&self, other: &SignedDigraph) -> bool {
        self.n == other.n
            && (0..self.n).all(|k| {
                self.positive[k] & !other.positive[k] == 0
                    && self.negative[k] & !other.negative[k] == 0
            })
    }

    /// Whether the sign-forgetting graph, loops excluded, has a circuit.
    pub fn has_cycle_length_ge2(&self) -> bool {
        // strict successors, closed transitively to a fixed point
        let mut reach: Vec<u32> = (1..=self.n)
            .map(|j| self.out_mask(j) & !(1 << (j - 1)))
            .collect();
        loop {
            let mut changed = false;
            for j in 0..self.n {
                let mut r = reach[j];
                let mut rest = r;
                while rest != 0 {
                    let k = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    r |= reach[k];
                }
                if r != reach[j] {
                    reach[j] = r;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        (0..self.n).any(|j| reach[j] & (1 << j) != 0)
    }

    /// `(has positive loop, has negative loop)` at vertex `i`.
    pub fn loop_signs(&self, i: usize) -> Result<(bool, bool)> {
        self.check_vertex(i)?;
        Ok((
            self.has_arc(i, Sign::Positive, i),
            self.has_arc(i, Sign::Negative, i),
        ))
    }

    /// Vertices reachable (reflexively) from a vertex carrying a negative
    /// loop, as a bit mask.
    fn reachable_from_negative_loops(&self) -> u32 {
        let mut seen: u32 = (1..=self.n)
            .filter(|&i| self.has_arc(i, Sign::Negative, i))
            .fold(0, |m, i| m | 1 << (i - 1));
        let mut frontier = seen;
        while frontier != 0 {
            let j = frontier.trailing_zeros() as usize + 1;
            frontier &= frontier - 1;
            let fresh = self.out_mask(j) & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        seen
    }

    pub fn check_conditions(&self) -> ConditionReport {
        let all = (1u32 << self.n) - 1;
        ConditionReport {
            acyclic: !self.has_cycle_length_ge2(),
            positive_loops_covered: (1..=self.n)
                .all(|i| !self.has_arc(i, Sign::Positive, i) || self.has_arc(i, Sign::Negative, i)),
            reachable_from_negative_loop: self.reachable_from_negative_loops() == all,
        }
    }

    /// The three structural conditions that together guarantee a strongly
    /// connected iteration graph.
    pub fn satisfies_sufficient_conditions(&self) -> bool {
        self.check_conditions().all()
    }

    /// Drops vertex `v` and every arc touching it; later vertices shift
    /// down by one.
    pub fn remove_vertex(&self, v: usize) -> Result<SignedDigraph> {
        self.check_vertex(v)?;
        if self.n < 2 {
            return Err(invalid("cannot remove the only vertex"));
        }
        let squeeze = |m: u32| {
            let low = m & ((1 << (v - 1)) - 1);
            let high = (m >> v) << (v - 1);
            low | high
        };
        let keep = |masks: &[u32]| {
            masks
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != v - 1)
                .map(|(_, &m)| squeeze(m))
                .collect::<Vec<_>>()
        };
        Ok(SignedDigraph {
            n: self.n - 1,
            positive: keep(&self.positive),
            negative: keep(&self.negative),
        })
    }

    /// Graphviz rendering; positive arcs green, negative arcs red.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph interaction_graph {\n");
        for v in 1..=self.n {
            let _ = writeln!(out, "  {v};");
        }
        for (j, sign, i) in self.arcs() {
            let color = match sign {
                Sign::Positive => "darkgreen",
                Sign::Negative => "red",
            };
            let _ = writeln!(
                out,
                "  {j} -> {i} [label=\"{}\", color={color}];",
                sign.symbol()
            );
        }
        out.push_str("}\n");
        out
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if (1..=self.n).contains(&v) {
            Ok(())
        } else {
            Err(invalid(format!("vertex {v} outside [1, {}]", self.n)))
        }
    }
}

impl fmt::Display for SignedDigraph {
    /// `n <count>` header, then one `j s i` line per arc.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n {}", self.n)?;
        for (j, sign, i) in self.arcs() {
            writeln!(f, "{j} {} {i}", sign.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for SignedDigraph {
    type Err = Error;

    /// Lines `j s i` with `s` in `{+, -}`. An optional `n <count>` line
    /// fixes the vertex count (otherwise the largest index seen); blank
    /// lines and `#` comments are skipped.
    fn from_str(s: &str) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut arcs = Vec::new();
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: cannot parse {raw:?}", lineno + 1));
            match fields.as_slice() {
                ["n", count] => declared = Some(count.parse().map_err(|_| bad())?),
                [j, s, i] => {
                    let sign = match *s {
                        "+" | "+1" | "1" => Sign::Positive,
                        "-" | "-1" => Sign::Negative,
                        _ => return Err(bad()),
                    };
                    let j: usize = j.parse().map_err(|_| bad())?;
                    let i: usize = i.parse().map_err(|_| bad())?;
                    arcs.push((j, sign, i));
                }
                _ => return Err(bad()),
            }
        }
        let n = declared
            .or_else(|| arcs.iter().map(|&(j, _, i)| j.max(i)).max())
            .ok_or_else(|| Error::Parse("empty interaction graph without `n` line".into()))?;
        let mut g = SignedDigraph::empty(n)?;
        for (j, sign, i) in arcs {
            g.add_arc(j, sign, i)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, arcs: &[(usize, i8, usize)]) -> SignedDigraph {
        let mut g = SignedDigraph::empty(n).unwrap();
        for &(j, s, i) in arcs {
            g.add_arc(j, Sign::from_value(s).unwrap(), i).unwrap();
        }
        g
    }

    #[test]
    fn jacobian_examples() {
        let neg1 = BooleanMap::negation(1).unwrap();
        let x = Configuration::new(1, 0).unwrap();
        assert_eq!(discrete_jacobian(&neg1, x).unwrap().rows(), vec![vec![-1]]);

        let id = BooleanMap::identity(3).unwrap();
        let neg = BooleanMap::negation(3).unwrap();
        for bits in 0..8 {
            let x = Configuration::new(3, bits).unwrap();
            let jid = discrete_jacobian(&id, x).unwrap();
            let jneg = discrete_jacobian(&neg, x).unwrap();
            for i in 1..=3 {
                for j in 1..=3 {
                    let d = i8::from(i == j);
                    assert_eq!(jid.get(i, j), d);
                    assert_eq!(jneg.get(i, j), -d);
                }
            }
        }
    }

    #[test]
    fn ignored_inputs_give_zero_columns() {
        // f_1 = x_2, f_2 = x_2, f_3 = !x_1; nobody reads x_3
        let f = BooleanMap::from_fn(3, |x| {
            let x1 = (x >> 2) & 1;
            let x2 = (x >> 1) & 1;
            (x2 << 2) | (x2 << 1) | (1 - x1)
        })
        .unwrap();
        for bits in 0..8 {
            let jac = discrete_jacobian(&f, Configuration::new(3, bits).unwrap()).unwrap();
            for i in 1..=3 {
                assert_eq!(jac.get(i, 3), 0);
            }
            assert_eq!(jac.get(3, 1), -1);
            assert_eq!(jac.get(1, 2), 1);
        }
    }

    #[test]
    fn interaction_graph_of_negation_and_identity() {
        for n in 1..=5 {
            let g = SignedDigraph::build(&BooleanMap::negation(n).unwrap());
            let expected: Vec<_> = (1..=n).map(|i| (i, Sign::Negative, i)).collect();
            assert_eq!(g.arcs(), expected);
            let g = SignedDigraph::build(&BooleanMap::identity(n).unwrap());
            let expected: Vec<_> = (1..=n).map(|i| (i, Sign::Positive, i)).collect();
            assert_eq!(g.arcs(), expected);
        }
    }

    #[test]
    fn cycle_detection() {
        let neg = SignedDigraph::build(&BooleanMap::negation(3).unwrap());
        assert!(!neg.has_cycle_length_ge2());
        assert!(graph(2, &[(1, 1, 2), (2, -1, 1)]).has_cycle_length_ge2());
        assert!(!graph(3, &[(1, 1, 2), (2, 1, 3)]).has_cycle_length_ge2());
        assert!(graph(3, &[(1, 1, 2), (2, 1, 3), (3, -1, 1)]).has_cycle_length_ge2());
        // parallel +/- arcs are still a single arc for cycle purposes
        assert!(!graph(2, &[(1, 1, 2), (1, -1, 2), (2, 1, 2)]).has_cycle_length_ge2());
    }

    #[test]
    fn loop_sign_queries() {
        let neg = SignedDigraph::build(&BooleanMap::negation(2).unwrap());
        assert_eq!(neg.loop_signs(1).unwrap(), (false, true));
        let id = SignedDigraph::build(&BooleanMap::identity(2).unwrap());
        assert_eq!(id.loop_signs(2).unwrap(), (true, false));
        let g = graph(2, &[(1, 1, 2)]);
        assert_eq!(g.loop_signs(2).unwrap(), (false, false));
        assert!(g.loop_signs(3).is_err());
    }

    #[test]
    fn sufficient_conditions() {
        let neg = SignedDigraph::build(&BooleanMap::negation(4).unwrap());
        assert!(neg.satisfies_sufficient_conditions());

        let id = SignedDigraph::build(&BooleanMap::identity(2).unwrap());
        let report = id.check_conditions();
        assert!(!report.positive_loops_covered);
        assert!(!report.all());

        let cyc = graph(2, &[(1, 1, 2), (2, 1, 1), (1, -1, 1), (2, -1, 2)]);
        let report = cyc.check_conditions();
        assert!(!report.acyclic);
        assert!(report.positive_loops_covered && report.reachable_from_negative_loop);

        // 1 has a negative loop and feeds 2, which has no loop
        let chain = graph(2, &[(1, -1, 1), (1, 1, 2)]);
        assert!(chain.satisfies_sufficient_conditions());
        // 2 isolated: unreachable
        let cut = graph(2, &[(1, -1, 1)]);
        assert!(!cut.check_conditions().reachable_from_negative_loop);
    }

    #[test]
    fn vertex_removal() {
        let g = graph(3, &[(1, -1, 1), (3, 1, 3), (1, 1, 3)]);
        let r = g.remove_vertex(2).unwrap();
        assert_eq!(
            r.arcs(),
            vec![
                (1, Sign::Negative, 1),
                (1, Sign::Positive, 2),
                (2, Sign::Positive, 2)
            ]
        );
        let neg2 = SignedDigraph::build(&BooleanMap::negation(2).unwrap());
        let neg1 = SignedDigraph::build(&BooleanMap::negation(1).unwrap());
        assert_eq!(neg2.remove_vertex(2).unwrap(), neg1);
        assert!(neg1.remove_vertex(1).is_err());
        assert!(neg2.remove_vertex(3).is_err());
    }

    #[test]
    fn text_roundtrip() {
        let g = graph(3, &[(1, -1, 1), (1, 1, 2), (1, -1, 2), (2, 1, 3)]);
        let text = g.to_string();
        assert_eq!(text, "n 3\n1 - 1\n1 + 2\n1 - 2\n2 + 3\n");
        assert_eq!(text.parse::<SignedDigraph>().unwrap(), g);

        let parsed: SignedDigraph = "# negation\n1 - 1\n\n2 - 2\n".parse().unwrap();
        assert_eq!(
            parsed,
            SignedDigraph::build(&BooleanMap::negation(2).unwrap())
        );
        assert!("1 * 2".parse::<SignedDigraph>().is_err());
        assert!("n 2\n1 + 3".parse::<SignedDigraph>().is_err());
        assert!("".parse::<SignedDigraph>().is_err());
    }

    #[test]
    fn dot_colors_by_sign() {
        let g = graph(2, &[(1, -1, 1), (1, 1, 2)]);
        let dot = g.to_dot();
        assert!(dot.contains("1 -> 1 [label=\"-\", color=red]"));
        assert!(dot.contains("1 -> 2 [label=\"+\", color=darkgreen]"));
    }
}
