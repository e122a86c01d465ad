//! The asynchronous iteration graph `Gamma(f)`.
//!
//! Vertices are the `2^n` configurations; every vertex `x` carries exactly
//! `n` labeled arcs, arc `(x, i)` pointing at `F_f(i, x)`. `G_f` is chaotic
//! exactly when this graph is strongly connected.

use std::fmt::{self, Write as _};

use crate::error::{invalid, Error, Result};
use crate::network::{component_mask, BooleanMap};
use crate::scc::{self, Digraph};

/// Largest component count for which dense `2^n x 2^n` matrices are built.
pub const MAX_DENSE_COMPONENTS: usize = 12;

/// Labeled iteration graph. `targets[x * n + (i - 1)]` is the head of the
/// arc labeled `i` leaving `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IterationGraph {
    n: usize,
    targets: Vec<u32>,
}

impl IterationGraph {
    pub fn build(f: &BooleanMap) -> Self {
        let n = f.n();
        let mut targets = Vec::with_capacity(n * f.size());
        for x in 0..f.size() as u32 {
            targets.extend((1..=n).map(|i| f.update_raw(i, x)));
        }
        Self { n, targets }
    }

    /// Builds a graph from raw arc heads, checking that arc `(x, i)` points
    /// at `x` or at `x` with component `i` flipped.
    pub fn from_targets(n: usize, targets: Vec<u32>) -> Result<Self> {
        if !(1..=crate::network::MAX_COMPONENTS).contains(&n) {
            return Err(invalid(format!("component count {n} out of range")));
        }
        if targets.len() != n << n {
            return Err(Error::InvalidGraph(format!(
                "{} arcs, expected n * 2^n = {}",
                targets.len(),
                n << n
            )));
        }
        for (k, &y) in targets.iter().enumerate() {
            let x = (k / n) as u32;
            let i = k % n + 1;
            if y != x && y != x ^ component_mask(n, i) {
                return Err(Error::InvalidGraph(format!(
                    "arc {i} from {x:0n$b} targets {y:0n$b}"
                )));
            }
        }
        Ok(Self { n, targets })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    /// Head of the arc labeled `i` (1-based) leaving `x`.
    #[inline]
    pub fn target(&self, x: u32, i: usize) -> u32 {
        self.targets[x as usize * self.n + i - 1]
    }

    pub(crate) fn set_target(&mut self, x: u32, i: usize, y: u32) {
        self.targets[x as usize * self.n + i - 1] = y;
    }

    pub fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// Labeled arcs `(x, i, y)` in vertex-major order.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, usize, u32)> + '_ {
        self.targets
            .iter()
            .enumerate()
            .map(move |(k, &y)| ((k / self.n) as u32, k % self.n + 1, y))
    }

    /// Number of labeled arcs that are not self-loops.
    pub fn non_self_arc_count(&self) -> usize {
        self.arcs().filter(|&(x, _, y)| x != y).count()
    }

    /// Number of labels that self-loop at `x`.
    pub fn self_loop_count(&self, x: u32) -> usize {
        (1..=self.n).filter(|&i| self.target(x, i) == x).count()
    }

    pub fn is_strongly_connected(&self) -> bool {
        scc::is_strongly_connected(self)
    }

    /// `Gamma(f)^alpha`: the subgraph induced by configurations whose last
    /// component equals `alpha`, relabeled to `n - 1` components.
    ///
    /// Arcs labeled `i < n` never change the last component, so all of them
    /// survive. Arcs labeled `n` either leave the vertex set or are loops
    /// of that label; both are dropped, since the relabeled graph has no
    /// component `n`.
    pub fn induced_subgraph(&self, alpha: bool) -> Result<IterationGraph> {
        if self.n < 2 {
            return Err(invalid("induced subgraph needs at least two components"));
        }
        let m = self.n - 1;
        let mut targets = Vec::with_capacity(m << m);
        for x in 0..1u32 << m {
            let lifted = (x << 1) | u32::from(alpha);
            for i in 1..=m {
                let y = self.target(lifted, i);
                debug_assert_eq!(y & 1, u32::from(alpha));
                targets.push(y >> 1);
            }
        }
        Ok(IterationGraph { n: m, targets })
    }

    /// The 0/1 adjacency matrix with labels forgotten.
    pub fn unlabeled_adjacency(&self) -> Result<AdjacencyMatrix> {
        if self.n > MAX_DENSE_COMPONENTS {
            return Err(Error::UnsupportedSize(format!(
                "dense adjacency for n = {} exceeds n = {MAX_DENSE_COMPONENTS}",
                self.n
            )));
        }
        let size = self.vertex_count();
        let mut cells = vec![0u8; size * size];
        for (x, _, y) in self.arcs() {
            cells[x as usize * size + y as usize] = 1;
        }
        Ok(AdjacencyMatrix { size, cells })
    }

    /// Graphviz rendering: vertices named by their bit strings, arcs
    /// labeled by component index.
    pub fn to_dot(&self) -> String {
        let n = self.n;
        let mut out = String::from("digraph iteration_graph {\n");
        for x in 0..self.vertex_count() {
            let _ = writeln!(out, "  \"{x:0n$b}\";");
        }
        for (x, i, y) in self.arcs() {
            let _ = writeln!(out, "  \"{x:0n$b}\" -> \"{y:0n$b}\" [label=\"{i}\"];");
        }
        out.push_str("}\n");
        out
    }
}

impl Digraph for IterationGraph {
    fn vertex_count(&self) -> usize {
        1 << self.n
    }

    fn out_degree(&self, _v: usize) -> usize {
        self.n
    }

    fn successor(&self, v: usize, k: usize) -> usize {
        self.targets[v * self.n + k] as usize
    }
}

/// `Gamma(f)` seen through the truth table, without materializing arcs.
#[derive(Clone, Copy, Debug)]
pub struct ImplicitIterationGraph<'a>(pub &'a BooleanMap);

impl Digraph for ImplicitIterationGraph<'_> {
    fn vertex_count(&self) -> usize {
        self.0.size()
    }

    fn out_degree(&self, _v: usize) -> usize {
        self.0.n()
    }

    fn successor(&self, v: usize, k: usize) -> usize {
        self.0.update_raw(k + 1, v as u32) as usize
    }
}

/// `G_f` is chaotic iff `Gamma(f)` is strongly connected.
pub fn is_chaotic(f: &BooleanMap) -> bool {
    scc::is_strongly_connected(&ImplicitIterationGraph(f))
}

/// Dense 0/1 matrix indexed by configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    size: usize,
    cells: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.cells[x * self.size + y]
    }

    pub fn row(&self, x: usize) -> &[u8] {
        &self.cells[x * self.size..(x + 1) * self.size]
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.size).map(|x| self.row(x).to_vec()).collect()
    }
}

impl fmt::Display for AdjacencyMatrix {
    /// One line per vertex, one `0`/`1` character per column.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.size {
            for &c in self.row(x) {
                f.write_char(if c == 1 { '1' } else { '0' })?;
            }
            f.write_char('\n')?;
        }
        Ok(())
    }
}
