//! Scattering quantum walk on the multi-path interferometer graph.
//!
//! The particle lives on directed edges. Two Fourier vertices `A` and `B`
//! are joined by `N` paths, each passing through a phase-shifter vertex
//! `j = 1..=N`. A left tail hangs off `A` (vertices `0, -1, ...`) and a
//! right tail off `B` (vertices `N+1, N+2, ...`). The semi-infinite tails are
//! truncated at a configurable depth; any amplitude that would leave the
//! truncation is reported as an error rather than dropped.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tail depth used by [`run_walk`]. Three steps are all the algorithm needs.
pub const DEFAULT_TAIL_DEPTH: usize = 4;

const PROMISE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Vertex {
    A,
    B,
    /// Integer-labelled vertex: tails and phase shifters.
    Site(i64),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::A => write!(f, "A"),
            Vertex::B => write!(f, "B"),
            Vertex::Site(v) => write!(f, "{v}"),
        }
    }
}

/// Particle on the edge between `from` and `to`, moving towards `to`.
///
/// `|u,v⟩` and `|v,u⟩` are distinct, orthogonal states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeState {
    pub from: Vertex,
    pub to: Vertex,
}

impl EdgeState {
    pub const fn new(from: Vertex, to: Vertex) -> Self {
        Self { from, to }
    }

    pub fn reversed(self) -> Self {
        Self::new(self.to, self.from)
    }
}

impl fmt::Display for EdgeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.from, self.to)
    }
}

/// Promise class of a phase pattern.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Promise {
    /// Every shifter has the given sign (`+1` or `-1`).
    Constant(i8),
    /// Exactly half of the shifters are `+1`.
    Balanced,
    /// Mean sign equals the given bias.
    EpsilonBiased(f64),
}

/// Phase shifter settings `s_j = e^{iφ_j} ∈ {+1, -1}` together with the
/// promise they satisfy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePattern {
    signs: Vec<i8>,
    promise: Promise,
}

impl PhasePattern {
    /// Validates `signs` against `promise`.
    pub fn new(signs: Vec<i8>, promise: Promise) -> Result<Self> {
        let n = signs.len();
        if n == 0 {
            return Err(Error::InvalidPattern("no phase shifters".into()));
        }
        if let Some(bad) = signs.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::InvalidPattern(format!("sign {bad} is not ±1")));
        }
        let plus = signs.iter().filter(|&&s| s == 1).count();
        match promise {
            Promise::Constant(v) => {
                if v != 1 && v != -1 {
                    return Err(Error::InvalidPattern(format!(
                        "constant value {v} is not ±1"
                    )));
                }
                if signs.iter().any(|&s| s != v) {
                    return Err(Error::InvalidPattern(format!("not all signs equal {v}")));
                }
            }
            Promise::Balanced => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidPattern(format!(
                        "balanced needs even N, got {n}"
                    )));
                }
                if 2 * plus != n {
                    return Err(Error::InvalidPattern(format!(
                        "balanced needs {} plus signs, got {plus}",
                        n / 2
                    )));
                }
            }
            Promise::EpsilonBiased(eps) => {
                let bias = signed_sum(&signs) as f64 / n as f64;
                if !eps.is_finite() || (bias - eps).abs() > PROMISE_TOL {
                    return Err(Error::InvalidPattern(format!(
                        "mean sign {bias} does not match epsilon {eps}"
                    )));
                }
            }
        }
        Ok(Self { signs, promise })
    }

    pub fn constant(n_paths: usize, sign: i8) -> Result<Self> {
        Self::new(vec![sign; n_paths], Promise::Constant(sign))
    }

    /// First half `+1`, second half `-1`.
    pub fn balanced(n_paths: usize) -> Result<Self> {
        let signs = (0..n_paths)
            .map(|j| if j < n_paths / 2 { 1 } else { -1 })
            .collect();
        Self::new(signs, Promise::Balanced)
    }

    /// Leading `(1+ε)N/2` entries `+1`, the rest `-1`.
    pub fn epsilon_biased(n_paths: usize, epsilon: f64) -> Result<Self> {
        let plus = epsilon_plus_count(n_paths, epsilon)?;
        let signs = (0..n_paths)
            .map(|j| if j < plus { 1 } else { -1 })
            .collect();
        Self::new(signs, Promise::EpsilonBiased(epsilon))
    }

    /// Classifies arbitrary signs: constant, balanced, or biased with the
    /// observed mean.
    pub fn from_signs(signs: Vec<i8>) -> Result<Self> {
        let n = signs.len();
        let plus = signs.iter().filter(|&&s| s == 1).count();
        let promise = if n > 0 && plus == n {
            Promise::Constant(1)
        } else if n > 0 && plus == 0 {
            Promise::Constant(-1)
        } else if 2 * plus == n {
            Promise::Balanced
        } else {
            Promise::EpsilonBiased(signed_sum(&signs) as f64 / n.max(1) as f64)
        };
        Self::new(signs, promise)
    }

    pub fn n_paths(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn promise(&self) -> Promise {
        self.promise
    }

    /// Sign of shifter `j`, 1-based.
    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j - 1]
    }

    /// `Σ_j s_j`.
    pub fn sum(&self) -> i64 {
        signed_sum(&self.signs)
    }

    /// `(1/N) Σ_j s_j`.
    pub fn bias(&self) -> f64 {
        self.sum() as f64 / self.n_paths() as f64
    }
}

fn signed_sum(signs: &[i8]) -> i64 {
    signs.iter().map(|&s| s as i64).sum()
}

/// Number of `+1` entries of an ε-biased pattern of length `n_paths`.
pub fn epsilon_plus_count(n_paths: usize, epsilon: f64) -> Result<usize> {
    if !(-1.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidPattern(format!(
            "epsilon {epsilon} outside [-1, 1]"
        )));
    }
    let plus = (1.0 + epsilon) * n_paths as f64 / 2.0;
    let rounded = plus.round();
    if (plus - rounded).abs() > 1e-9 {
        return Err(Error::InvalidPattern(format!(
            "(1+ε)N/2 = {plus} is not an integer for N={n_paths}, ε={epsilon}"
        )));
    }
    Ok(rounded as usize)
}

/// Truncated interferometer graph.
#[derive(Clone, Debug)]
pub struct Graph {
    n_paths: usize,
    tail_depth: usize,
    edges: Vec<EdgeState>,
}

/// Enumerates every directed edge state of the truncated graph.
///
/// Each tail keeps `tail_depth` undirected edges: the left tail has vertices
/// `0, -1, ..., -(tail_depth-1)`, the right tail `N+1, ..., N+tail_depth`.
pub fn build_graph(n_paths: usize, tail_depth: usize) -> Result<Graph> {
    if n_paths < 2 {
        return Err(Error::TooFewPaths(n_paths));
    }
    if tail_depth < 4 {
        return Err(Error::TailTooShort(tail_depth));
    }
    let mut graph = Graph {
        n_paths,
        tail_depth,
        edges: Vec::new(),
    };
    let mut undirected = Vec::new();
    undirected.push((Vertex::A, Vertex::Site(0)));
    for v in (graph.left_end()..0).rev() {
        undirected.push((Vertex::Site(v + 1), Vertex::Site(v)));
    }
    for j in 1..=n_paths as i64 {
        undirected.push((Vertex::A, Vertex::Site(j)));
        undirected.push((Vertex::Site(j), Vertex::B));
    }
    let exit = n_paths as i64 + 1;
    undirected.push((Vertex::B, Vertex::Site(exit)));
    for v in exit..graph.right_end() {
        undirected.push((Vertex::Site(v), Vertex::Site(v + 1)));
    }
    graph.edges = undirected
        .into_iter()
        .flat_map(|(u, v)| [EdgeState::new(u, v), EdgeState::new(v, u)])
        .collect();
    Ok(graph)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Fourier,
    Shifter(usize),
    Tail,
}

impl Graph {
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }

    pub fn tail_depth(&self) -> usize {
        self.tail_depth
    }

    pub fn edge_states(&self) -> &[EdgeState] {
        &self.edges
    }

    /// `|0,A⟩`, the initial state of the walk.
    pub fn start_edge(&self) -> EdgeState {
        EdgeState::new(Vertex::Site(0), Vertex::A)
    }

    /// `|B,N+1⟩`, the detection edge.
    pub fn exit_edge(&self) -> EdgeState {
        EdgeState::new(Vertex::B, Vertex::Site(self.n_paths as i64 + 1))
    }

    fn left_end(&self) -> i64 {
        -(self.tail_depth as i64 - 1)
    }

    fn right_end(&self) -> i64 {
        self.n_paths as i64 + self.tail_depth as i64
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        match v {
            Vertex::A | Vertex::B => true,
            Vertex::Site(s) => (self.left_end()..=self.right_end()).contains(&s),
        }
    }

    pub fn contains(&self, edge: &EdgeState) -> bool {
        self.neighbors(edge.to).contains(&edge.from)
    }

    fn role(&self, v: Vertex) -> Role {
        match v {
            Vertex::A | Vertex::B => Role::Fourier,
            Vertex::Site(s) if s >= 1 && s <= self.n_paths as i64 => Role::Shifter(s as usize),
            Vertex::Site(_) => Role::Tail,
        }
    }

    /// Index `j` of a phase-shifter vertex, if `v` is one.
    pub fn shifter_index(&self, v: Vertex) -> Option<usize> {
        match self.role(v) {
            Role::Shifter(j) => Some(j),
            _ => None,
        }
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        if !self.contains_vertex(v) {
            return Vec::new();
        }
        let n = self.n_paths as i64;
        let shifters = (1..=n).map(Vertex::Site);
        match v {
            Vertex::A => std::iter::once(Vertex::Site(0)).chain(shifters).collect(),
            Vertex::B => shifters
                .chain(std::iter::once(Vertex::Site(n + 1)))
                .collect(),
            Vertex::Site(s) if (1..=n).contains(&s) => vec![Vertex::A, Vertex::B],
            Vertex::Site(s) => {
                let (inner, outer) = if s <= 0 {
                    let inner = if s == 0 {
                        Vertex::A
                    } else {
                        Vertex::Site(s + 1)
                    };
                    (inner, s - 1)
                } else {
                    let inner = if s == n + 1 {
                        Vertex::B
                    } else {
                        Vertex::Site(s - 1)
                    };
                    (inner, s + 1)
                };
                let mut out = vec![inner];
                if self.contains_vertex(Vertex::Site(outer)) {
                    out.push(Vertex::Site(outer));
                }
                out
            }
        }
    }

    /// Image of a single incoming edge state under the vertex unitary at
    /// `incoming.to`.
    pub fn scatter(
        &self,
        incoming: EdgeState,
        pattern: &PhasePattern,
    ) -> Result<Vec<(EdgeState, Complex64)>> {
        if !self.contains(&incoming) {
            return Err(Error::UnknownEdge(incoming));
        }
        let n1 = self.n_paths as i64 + 1;
        let v = incoming.to;
        match self.role(v) {
            Role::Fourier => {
                // A indexes its ports 0..=N, B indexes them 1..=N+1.
                let port = |u: Vertex| match u {
                    Vertex::Site(s) => s,
                    _ => unreachable!("Fourier vertices only neighbor sites"),
                };
                let j = port(incoming.from);
                let scale = 1.0 / (n1 as f64).sqrt();
                Ok(self
                    .neighbors(v)
                    .into_iter()
                    .map(|w| {
                        let k = port(w);
                        let r = (j * k).rem_euclid(n1);
                        let phase = Complex64::from_polar(scale, 2.0 * PI * r as f64 / n1 as f64);
                        (EdgeState::new(v, w), phase)
                    })
                    .collect())
            }
            Role::Shifter(j) => {
                let out = if incoming.from == Vertex::A {
                    Vertex::B
                } else {
                    Vertex::A
                };
                let s = pattern.sign(j) as f64;
                Ok(vec![(EdgeState::new(v, out), Complex64::new(s, 0.0))])
            }
            Role::Tail => {
                let next = self
                    .neighbors(v)
                    .into_iter()
                    .find(|&w| w != incoming.from)
                    .ok_or(Error::BoundaryViolation(incoming))?;
                Ok(vec![(EdgeState::new(v, next), Complex64::new(1.0, 0.0))])
            }
        }
    }

    /// Number of walk steps needed to reach `edge` from `|0,A⟩`: 0 on the
    /// start edge, otherwise one more than the vertex distance of its nearer
    /// endpoint from `{0, A}`.
    pub fn edge_distance(&self, edge: &EdgeState) -> Option<usize> {
        if !self.contains(edge) {
            return None;
        }
        let start = self.start_edge();
        if *edge == start || *edge == start.reversed() {
            return Some(0);
        }
        let dist = self.vertex_distances();
        let du = dist.get(&edge.from)?;
        let dv = dist.get(&edge.to)?;
        Some(1 + du.min(dv))
    }

    fn vertex_distances(&self) -> HashMap<Vertex, usize> {
        let mut dist = HashMap::new();
        let mut queue = VecDeque::new();
        for v in [Vertex::Site(0), Vertex::A] {
            dist.insert(v, 0);
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for w in self.neighbors(v) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(w) {
                    e.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Sparse amplitude map over edge states. Only nonzero entries are stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct WalkState {
    amplitudes: BTreeMap<EdgeState, Complex64>,
}

impl WalkState {
    pub fn basis(edge: EdgeState) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(edge, Complex64::new(1.0, 0.0));
        Self { amplitudes }
    }

    pub fn from_amplitudes<I: IntoIterator<Item = (EdgeState, Complex64)>>(iter: I) -> Self {
        let mut state = Self::default();
        for (e, a) in iter {
            state.add(e, a);
        }
        state.prune();
        state
    }

    fn add(&mut self, edge: EdgeState, amp: Complex64) {
        *self.amplitudes.entry(edge).or_default() += amp;
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.re != 0.0 || a.im != 0.0);
    }

    pub fn amplitude(&self, edge: &EdgeState) -> Complex64 {
        self.amplitudes.get(edge).copied().unwrap_or_default()
    }

    pub fn probability(&self, edge: &EdgeState) -> f64 {
        self.amplitude(edge).norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = &EdgeState> {
        self.amplitudes.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EdgeState, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }
}

/// A phase pattern mounted on a truncated graph.
#[derive(Clone, Debug)]
pub struct Walk {
    graph: Graph,
    pattern: PhasePattern,
}

impl Walk {
    pub fn new(pattern: PhasePattern) -> Result<Self> {
        Self::with_tail_depth(pattern, DEFAULT_TAIL_DEPTH)
    }

    pub fn with_tail_depth(pattern: PhasePattern, tail_depth: usize) -> Result<Self> {
        let graph = build_graph(pattern.n_paths(), tail_depth)?;
        Ok(Self { graph, pattern })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn pattern(&self) -> &PhasePattern {
        &self.pattern
    }

    pub fn initial_state(&self) -> WalkState {
        WalkState::basis(self.graph.start_edge())
    }

    /// One application of the full step operator.
    pub fn step(&self, state: &WalkState) -> Result<WalkState> {
        let mut next = WalkState::default();
        for (&edge, &amp) in state.iter() {
            for (out, coeff) in self.graph.scatter(edge, &self.pattern)? {
                next.add(out, amp * coeff);
            }
        }
        next.prune();
        Ok(next)
    }

    pub fn run(&self, steps: usize) -> Result<WalkState> {
        if steps + 1 > self.graph.tail_depth {
            return Err(Error::TooManySteps {
                steps,
                tail_depth: self.graph.tail_depth,
            });
        }
        let mut state = self.initial_state();
        for _ in 0..steps {
            state = self.step(&state)?;
        }
        Ok(state)
    }
}

/// Applies one walk step to `state` on the default-depth graph for `pattern`.
pub fn step(state: &WalkState, pattern: &PhasePattern) -> Result<WalkState> {
    Walk::new(pattern.clone())?.step(state)
}

/// Runs `steps` steps from `|0,A⟩` on the default-depth graph.
pub fn run_walk(pattern: &PhasePattern, steps: usize) -> Result<WalkState> {
    Walk::new(pattern.clone())?.run(steps)
}

/// `|(1/(N+1)) Σ_j s_j|²`, the coherent detection probability after three
/// steps.
pub fn exit_probability_ideal(pattern: &PhasePattern) -> f64 {
    let amp = pattern.sum() as f64 / (pattern.n_paths() as f64 + 1.0);
    amp * amp
}
