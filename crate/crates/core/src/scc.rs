//! Strongly connected components on implicit digraphs.
//!
//! Graphs are described by a successor oracle rather than an arc list, so
//! the `2^n`-vertex iteration graph never has to be materialized. Tarjan's
//! algorithm runs with an explicit call stack; recursion depth would
//! otherwise reach `2^n`.

use std::collections::VecDeque;

/// A digraph whose vertices are `0..vertex_count()` and whose out-arcs of
/// `v` are `successor(v, 0..out_degree(v))`. Parallel arcs are allowed.
pub trait Digraph {
    fn vertex_count(&self) -> usize;
    fn out_degree(&self, v: usize) -> usize;
    fn successor(&self, v: usize, k: usize) -> usize;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    /// Component index of every vertex, in reverse topological order of
    /// the condensation (Tarjan's emission order).
    pub component_of: Vec<usize>,
}

const UNVISITED: usize = usize::MAX;

pub fn tarjan<G: Digraph + ?Sized>(graph: &G) -> Components {
    let n = graph.vertex_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut component_of = vec![UNVISITED; n];
    let mut stack: Vec<usize> = Vec::new();
    // (vertex, next successor slot)
    let mut calls: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0;
    let mut count = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        calls.push((root, 0));

        while let Some(&mut (v, ref mut slot)) = calls.last_mut() {
            if *slot < graph.out_degree(v) {
                let w = graph.successor(v, *slot);
                *slot += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    lowlink[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    calls.push((w, 0));
                } else if on_stack[w] {
                    lowlink[v] = lowlink[v].min(index[w]);
                }
                continue;
            }

            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[v]);
            }
            if lowlink[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = count;
                    if w == v {
                        break;
                    }
                }
                count += 1;
            }
        }
    }

    Components {
        count,
        component_of,
    }
}

/// True iff the graph is nonempty and forms a single strongly connected
/// component.
pub fn is_strongly_connected<G: Digraph + ?Sized>(graph: &G) -> bool {
    graph.vertex_count() > 0 && tarjan(graph).count == 1
}

/// Period of a strongly connected digraph: the gcd of all cycle lengths.
///
/// Computed from BFS levels `l` as `gcd(l(u) + 1 - l(v))` over all arcs
/// `u -> v`. The caller guarantees strong connectivity.
pub fn period<G: Digraph + ?Sized>(graph: &G) -> usize {
    let n = graph.vertex_count();
    if n == 0 {
        return 0;
    }
    let mut level = vec![UNVISITED; n];
    let mut queue = VecDeque::new();
    level[0] = 0;
    queue.push_back(0);
    let mut g = 0usize;
    while let Some(u) = queue.pop_front() {
        for k in 0..graph.out_degree(u) {
            let v = graph.successor(u, k);
            if level[v] == UNVISITED {
                level[v] = level[u] + 1;
                queue.push_back(v);
            } else {
                g = gcd(g, (level[u] + 1).abs_diff(level[v]));
            }
        }
    }
    g
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Plain adjacency-list digraph, mostly for tests and small graphs.
#[derive(Clone, Debug, Default)]
pub struct AdjacencyList {
    pub successors: Vec<Vec<usize>>,
}

impl AdjacencyList {
    pub fn new(n: usize) -> Self {
        Self {
            successors: vec![Vec::new(); n],
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize) {
        self.successors[from].push(to);
    }
}

impl Digraph for AdjacencyList {
    fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    fn out_degree(&self, v: usize) -> usize {
        self.successors[v].len()
    }

    fn successor(&self, v: usize, k: usize) -> usize {
        self.successors[v][k]
    }
}
