//! The Markov chain obtained by drawing the updated component uniformly
//! at random at every step of the asynchronous iteration.
//!
//! States are the `2^n` configurations. Off the diagonal `M[x][y]` is `1/n`
//! when `Gamma(f)` has an arc `x -> y` and `0` otherwise; the diagonal
//! holds (number of self-looping labels at `x`) / `n`. Entries are kept as
//! integer numerators over the common denominator `n`, so stochasticity
//! questions are answered exactly.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::iteration::{IterationGraph, MAX_DENSE_COMPONENTS};
use crate::scc;

/// Largest chain solved by a dense linear system; bigger chains fall back
/// to power iteration.
pub const MAX_DIRECT_SOLVE: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    graph: IterationGraph,
}

impl TransitionMatrix {
    pub fn new(graph: &IterationGraph) -> Self {
        Self {
            graph: graph.clone(),
        }
    }

    pub fn graph(&self) -> &IterationGraph {
        &self.graph
    }

    /// Number of states, `2^n`.
    pub fn size(&self) -> usize {
        self.graph.vertex_count()
    }

    /// Common denominator of all entries (the component count).
    pub fn denominator(&self) -> u32 {
        self.graph.n() as u32
    }

    /// Numerator of `M[x][y]` over [`Self::denominator`].
    pub fn numerator(&self, x: usize, y: usize) -> u32 {
        let n = self.graph.n();
        (1..=n)
            .filter(|&i| self.graph.target(x as u32, i) as usize == y)
            .count() as u32
    }

    /// `M[x][y]` as a reduced fraction `(p, q)`.
    pub fn entry(&self, x: usize, y: usize) -> (u32, u32) {
        let (p, q) = (self.numerator(x, y), self.denominator());
        let g = gcd(p, q);
        (p / g, q / g)
    }

    pub fn row_numerator_sum(&self, x: usize) -> u32 {
        (0..self.size()).map(|y| self.numerator(x, y)).sum()
    }

    /// Column sums of numerators, in one pass over the arcs.
    pub fn column_numerator_sums(&self) -> Vec<u32> {
        let mut sums = vec![0u32; self.size()];
        for (_, _, y) in self.graph.arcs() {
            sums[y as usize] += 1;
        }
        sums
    }

    /// `out = v M`, streamed over the labeled arcs.
    pub fn apply_row_vector(&self, v: &[f64], out: &mut [f64]) {
        let n = self.graph.n();
        let w = 1.0 / n as f64;
        out.iter_mut().for_each(|o| *o = 0.0);
        for (x, &vx) in v.iter().enumerate() {
            if vx == 0.0 {
                continue;
            }
            let share = vx * w;
            for i in 1..=n {
                out[self.graph.target(x as u32, i) as usize] += share;
            }
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.graph.n() > MAX_DENSE_COMPONENTS {
            return Err(Error::UnsupportedSize(format!(
                "dense transition matrix for n = {} exceeds n = {MAX_DENSE_COMPONENTS}",
                self.graph.n()
            )));
        }
        let size = self.size();
        let w = 1.0 / self.graph.n() as f64;
        let mut dense = vec![0.0; size * size];
        for (x, _, y) in self.graph.arcs() {
            dense[x as usize * size + y as usize] += w;
        }
        Ok(dense)
    }
}

impl fmt::Display for TransitionMatrix {
    /// One row per line, entries as reduced `p/q` separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.size() {
            for y in 0..self.size() {
                if y > 0 {
                    f.write_str(" ")?;
                }
                let (p, q) = self.entry(x, y);
                write!(f, "{p}/{q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn transition_matrix(graph: &IterationGraph) -> TransitionMatrix {
    TransitionMatrix::new(graph)
}

/// Irreducible and aperiodic; equivalently some power of `M` is positive.
pub fn is_regular(graph: &IterationGraph) -> bool {
    graph.is_strongly_connected() && scc::period(graph) == 1
}

/// Column sums of `M` all equal 1.
///
/// Decided on degrees: column `x` sums to
/// `(loops(x) + in_nonself(x)) / n` and `loops(x) = n - out_nonself(x)`, so
/// the matrix is doubly stochastic iff every vertex has as many non-loop
/// arcs entering as leaving.
pub fn is_doubly_stochastic(graph: &IterationGraph) -> bool {
    let mut balance = vec![0i64; graph.vertex_count()];
    for (x, _, y) in graph.arcs() {
        if x != y {
            balance[x as usize] += 1;
            balance[y as usize] -= 1;
        }
    }
    balance.iter().all(|&b| b == 0)
}

/// A distribution over configurations.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        let total: f64 = p.iter().sum();
        if p.iter().any(|&v| v.is_nan() || v < 0.0) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "not a probability vector (sum {total})"
            )));
        }
        Ok(Self(p))
    }

    pub fn uniform(size: usize) -> Self {
        Self(vec![1.0 / size as f64; size])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

fn require_irreducible(m: &TransitionMatrix) -> Result<()> {
    if m.graph.is_strongly_connected() {
        Ok(())
    } else {
        Err(Error::NotRegular)
    }
}

fn require_regular(m: &TransitionMatrix) -> Result<()> {
    require_irreducible(m)?;
    match scc::period(&m.graph) {
        1 => Ok(()),
        p => Err(Error::NotMixing(format!(
            "chain is periodic with period {p}"
        ))),
    }
}

/// L1 norm of `pi M - pi`.
pub fn stationary_residual(m: &TransitionMatrix, pi: &[f64]) -> f64 {
    let mut next = vec![0.0; pi.len()];
    m.apply_row_vector(pi, &mut next);
    next.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum()
}

/// The unique `pi` with `pi M = pi`.
///
/// Small chains are solved directly; larger ones by power iteration until
/// the L1 residual drops below `1e-13`.
pub fn stationary_distribution(m: &TransitionMatrix) -> Result<ProbabilityVector> {
    require_regular(m)?;
    let size = m.size();
    let pi = if size <= MAX_DIRECT_SOLVE {
        solve_direct(m)?
    } else {
        power_iteration(m)?
    };
    Ok(ProbabilityVector(pi))
}

fn solve_direct(m: &TransitionMatrix) -> Result<Vec<f64>> {
    let size = m.size();
    let dense = m.to_dense()?;
    // pi (M - I) = 0  <=>  (M^T - I) pi^T = 0; last equation swapped for sum(pi) = 1
    let mut a = DMatrix::<f64>::zeros(size, size);
    for x in 0..size {
        for y in 0..size {
            a[(y, x)] = dense[x * size + y];
        }
        a[(x, x)] -= 1.0;
    }
    for x in 0..size {
        a[(size - 1, x)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(size);
    rhs[size - 1] = 1.0;
    let sol = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::NotMixing("singular stationary system".into()))?;
    let mut pi: Vec<f64> = sol.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|v| *v /= total);
    Ok(pi)
}

const POWER_ITERATION_CAP: usize = 10_000_000;

fn power_iteration(m: &TransitionMatrix) -> Result<Vec<f64>> {
    let size = m.size();
    let mut v = vec![1.0 / size as f64; size];
    let mut next = vec![0.0; size];
    for _ in 0..POWER_ITERATION_CAP {
        m.apply_row_vector(&v, &mut next);
        let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut v, &mut next);
        if delta < 1e-13 {
            return Ok(v);
        }
    }
    Err(Error::NotMixing(format!(
        "power iteration did not converge in {POWER_ITERATION_CAP} steps"
    )))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    L1,
    L2,
    Linf,
}

impl Norm {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Norm::L1 => diffs.sum(),
            Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            Norm::Linf => diffs.fold(0.0, f64::max),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Norm::L1 => "l1",
            Norm::L2 => "l2",
            Norm::Linf => "linf",
        }
    }
}

/// How the chain is started for the mixing-time computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StartVector {
    /// Start at `e_j`, compare against `pi`.
    Basis,
    /// Start at `e_j / n`, compare against `pi / n` (its limit).
    Scaled,
}

impl StartVector {
    pub fn name(self) -> &'static str {
        match self {
            StartVector::Basis => "basis",
            StartVector::Scaled => "scaled",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct MixingOptions {
    pub tol: f64,
    pub norm: Norm,
    pub start: StartVector,
    pub max_iterations: usize,
    pub execution: Execution,
}

impl Default for MixingOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            norm: Norm::L2,
            start: StartVector::Basis,
            max_iterations: 1_000_000,
            execution: Execution::default(),
        }
    }
}

/// For every start state `j`, the least `k` with
/// `||start_j M^k - target|| < tol`.
pub fn mixing_times_per_start(m: &TransitionMatrix, opts: &MixingOptions) -> Result<Vec<usize>> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    require_regular(m)?;
    let size = m.size();
    let pi = if is_doubly_stochastic(&m.graph) {
        vec![1.0 / size as f64; size]
    } else {
        stationary_distribution(m)?.into_vec()
    };
    let scale = match opts.start {
        StartVector::Basis => 1.0,
        StartVector::Scaled => 1.0 / m.graph.n() as f64,
    };
    let target: Vec<f64> = pi.iter().map(|p| p * scale).collect();

    let per_start = opts.execution.map_range(0..size, |j| {
        let mut v = vec![0.0; size];
        v[j] = scale;
        let mut next = vec![0.0; size];
        let mut k = 0;
        while opts.norm.distance(&v, &target) >= opts.tol {
            if k == opts.max_iterations {
                return None;
            }
            m.apply_row_vector(&v, &mut next);
            std::mem::swap(&mut v, &mut next);
            k += 1;
        }
        Some(k)
    });
    per_start
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| {
            Error::NotMixing(format!(
                "deviation still >= {} after {} iterations",
                opts.tol, opts.max_iterations
            ))
        })
}

/// `b = max_j min { k : ||start_j M^k - target|| < tol }`.
pub fn mixing_time(m: &TransitionMatrix, opts: &MixingOptions) -> Result<usize> {
    Ok(mixing_times_per_start(m, opts)?
        .into_iter()
        .max()
        .unwrap_or(0))
}

/// `||start_j M^k - target||` for `k = 0..=steps`, for diagnostics.
pub fn deviation_curve(
    m: &TransitionMatrix,
    j: usize,
    steps: usize,
    norm: Norm,
) -> Result<Vec<f64>> {
    require_regular(m)?;
    let pi = stationary_distribution(m)?.into_vec();
    let mut v = vec![0.0; m.size()];
    v[j] = 1.0;
    let mut next = vec![0.0; m.size()];
    let mut curve = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        curve.push(norm.distance(&v, &pi));
        m.apply_row_vector(&v, &mut next);
        std::mem::swap(&mut v, &mut next);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins;
    use crate::network::BooleanMap;

    fn matrix(f: &BooleanMap) -> TransitionMatrix {
        transition_matrix(&IterationGraph::build(f))
    }

    #[test]
    fn g_matrix_is_half_adjacency() {
        let graph = IterationGraph::build(&builtins::g());
        let m = transition_matrix(&graph);
        let adj = graph.unlabeled_adjacency().unwrap();
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(m.numerator(x, y), u32::from(adj.get(x, y)));
            }
        }
        assert_eq!(m.denominator(), 2);
        assert_eq!(m.to_string().lines().next().unwrap(), "1/2 0/1 1/2 0/1");
    }

    #[test]
    fn identity_matrix() {
        let m = matrix(&BooleanMap::identity(3).unwrap());
        for x in 0..8 {
            for y in 0..8 {
                assert_eq!(m.entry(x, y), if x == y { (1, 1) } else { (0, 1) });
            }
        }
    }

    #[test]
    fn rows_sum_to_one_exactly() {
        for (_, f) in builtins::catalog_functions() {
            let m = matrix(&f);
            for x in 0..m.size() {
                assert_eq!(m.row_numerator_sum(x), m.denominator());
            }
        }
    }

    #[test]
    fn regularity() {
        assert!(is_regular(&IterationGraph::build(&builtins::h())));
        assert!(is_regular(&IterationGraph::build(&builtins::g())));
        assert!(!is_regular(&IterationGraph::build(
            &BooleanMap::identity(2).unwrap()
        )));
        let neg1 = IterationGraph::build(&BooleanMap::negation(1).unwrap());
        assert!(neg1.is_strongly_connected());
        assert!(!is_regular(&neg1));
        // neg on n bits: bipartite hypercube walk
        for n in 1..=6 {
            assert!(!is_regular(&IterationGraph::build(
                &BooleanMap::negation(n).unwrap()
            )));
        }
    }

    #[test]
    fn double_stochasticity() {
        assert!(is_doubly_stochastic(&IterationGraph::build(&builtins::h())));
        assert!(!is_doubly_stochastic(
            &IterationGraph::build(&builtins::g())
        ));
        assert!(is_doubly_stochastic(&IterationGraph::build(
            &BooleanMap::identity(3).unwrap()
        )));
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&matrix(&builtins::g())).unwrap();
        for (a, b) in pi.as_slice().iter().zip([0.4, 0.1, 0.3, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
        let pi = stationary_distribution(&matrix(&builtins::h())).unwrap();
        assert!(pi.as_slice().iter().all(|p| (p - 0.25).abs() < 1e-12));
    }

    #[test]
    fn stationary_errors() {
        assert!(matches!(
            stationary_distribution(&matrix(&BooleanMap::identity(2).unwrap())),
            Err(Error::NotRegular)
        ));
        assert!(matches!(
            stationary_distribution(&matrix(&BooleanMap::negation(1).unwrap())),
            Err(Error::NotMixing(_))
        ));
    }

    #[test]
    fn power_iteration_agrees_with_direct_solve() {
        let m = matrix(&builtins::g());
        let direct = solve_direct(&m).unwrap();
        let power = power_iteration(&m).unwrap();
        for (a, b) in direct.iter().zip(&power) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mixing_time_examples() {
        let opts = MixingOptions::default();
        let b = |k| mixing_time(&matrix(&builtins::catalog_function(k).unwrap()), &opts).unwrap();
        assert_eq!(b(12), 35);
        assert_eq!(b(5), 48);
        assert_eq!(b(1), 206);
        assert_eq!(b(16), 206);
    }

    #[test]
    fn mixing_time_errors() {
        let opts = MixingOptions::default();
        assert!(matches!(
            mixing_time(&matrix(&BooleanMap::negation(1).unwrap()), &opts),
            Err(Error::NotMixing(_))
        ));
        assert!(matches!(
            mixing_time(&matrix(&BooleanMap::identity(2).unwrap()), &opts),
            Err(Error::NotRegular)
        ));
        let tiny = MixingOptions {
            tol: 1e-30,
            max_iterations: 500,
            ..opts
        };
        assert!(matches!(
            mixing_time(&matrix(&builtins::catalog_function(5).unwrap()), &tiny),
            Err(Error::NotMixing(_))
        ));
        let zero = MixingOptions { tol: 0.0, ..opts };
        assert!(mixing_time(&matrix(&builtins::h()), &zero).is_err());
    }

    #[test]
    fn dense_view_matches_numerators() {
        let m = matrix(&builtins::catalog_function(3).unwrap());
        let dense = m.to_dense().unwrap();
        for x in 0..16 {
            for y in 0..16 {
                assert_eq!(dense[x * 16 + y], m.numerator(x, y) as f64 / 4.0);
            }
        }
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
    }
}
