//! Vertex-labelled simple graphs on `0..n`, edge subsets of `K_n`, and
//! reproducible binomial random graph sampling.
//!
//! Graphs are immutable once built. Edges are stored sorted (lexicographic on
//! `(u, v)` with `u < v`) and every vertex carries a sorted neighbour list, so
//! membership tests are binary searches and triangle loops can walk merged
//! neighbourhoods.

use std::fmt;
use std::io::{BufRead, Write};

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

/// Largest vertex count accepted by the samplers unless a caller raises it.
pub const DEFAULT_MAX_VERTICES: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("vertex counts differ: {0} vs {1}")]
    MismatchedVertexCount(usize, usize),
    #[error("edge probability {0} is not in [0, 1]")]
    InvalidProbability(f64),
    #[error("{n} vertices exceeds the configured maximum of {max}")]
    TooManyVertices { n: usize, max: usize },
    #[error("cannot draw {m} edges from the {available} pairs of K_n")]
    TooManyEdges { m: usize, available: usize },
    #[error("edge list line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for GraphError {
    fn from(err: std::io::Error) -> Self {
        GraphError::Io(err.to_string())
    }
}

/// An unordered vertex pair, stored with the smaller endpoint first.
///
/// The derived ordering is lexicographic on the sorted endpoints, which is the
/// default edge order used throughout the crate.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "(Vertex, Vertex)", into = "(Vertex, Vertex)")]
pub struct Edge(Vertex, Vertex);

impl Edge {
    /// Builds the edge `{a, b}`.
    ///
    /// # Panics
    ///
    /// Panics if `a == b`.
    #[inline]
    pub fn new(a: Vertex, b: Vertex) -> Edge {
        assert_ne!(a, b, "an edge needs two distinct endpoints");
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }

    pub fn try_new(a: Vertex, b: Vertex) -> Result<Edge, GraphError> {
        if a == b {
            Err(GraphError::SelfLoop(a))
        } else {
            Ok(Edge::new(a, b))
        }
    }

    #[inline]
    pub fn u(&self) -> Vertex {
        self.0
    }

    #[inline]
    pub fn v(&self) -> Vertex {
        self.1
    }

    #[inline]
    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.0, self.1)
    }

    #[inline]
    pub fn contains(&self, x: Vertex) -> bool {
        self.0 == x || self.1 == x
    }

    /// The endpoint opposite `x`, if `x` is an endpoint.
    #[inline]
    pub fn other(&self, x: Vertex) -> Option<Vertex> {
        if self.0 == x {
            Some(self.1)
        } else if self.1 == x {
            Some(self.0)
        } else {
            None
        }
    }

    /// The shared endpoint of two distinct edges, if any.
    pub fn common_vertex(&self, other: &Edge) -> Option<Vertex> {
        if self == other {
            return None;
        }
        [self.0, self.1].into_iter().find(|&x| other.contains(x))
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Edge {
        Edge::new(f(self.0), f(self.1))
    }
}

impl TryFrom<(Vertex, Vertex)> for Edge {
    type Error = GraphError;

    fn try_from((a, b): (Vertex, Vertex)) -> Result<Self, Self::Error> {
        Edge::try_new(a, b)
    }
}

impl From<Edge> for (Vertex, Vertex) {
    fn from(e: Edge) -> Self {
        (e.0, e.1)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

/// Undirected simple graph on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EdgeSubset", into = "EdgeSubset")]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<Vertex>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Graph {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| Edge(u, v)))
            .collect();
        Graph::from_sorted_unique(n, edges)
    }

    /// Builds a graph from vertex pairs, rejecting loops, duplicates and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut edges = Vec::new();
        for (a, b) in pairs {
            check_vertex(a, n)?;
            check_vertex(b, n)?;
            edges.push(Edge::try_new(a, b)?);
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0]));
        }
        Ok(Graph::from_sorted_unique(n, edges))
    }

    /// Like [`Graph::from_edges`] but silently merges repeated edges.
    pub fn from_edge_iter_dedup<I>(n: usize, edges: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            check_vertex(e.v(), n)?;
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Graph::from_sorted_unique(n, edges))
    }

    pub(crate) fn from_sorted_unique(n: usize, edges: Vec<Edge>) -> Graph {
        debug_assert!(edges.windows(2).all(|w| w[0] < w[1]));
        let mut adj = vec![Vec::new(); n];
        for e in &edges {
            adj[e.0].push(e.1);
            adj[e.1].push(e.0);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges in lexicographic order.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    ///
    /// # Panics
    ///
    /// Panics if `v >= n`.
    #[inline]
    pub fn neighbours(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    /// # Panics
    ///
    /// Panics if `v >= n`; see [`Graph::checked_degree`].
    #[inline]
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn checked_degree(&self, v: Vertex) -> Result<usize, GraphError> {
        check_vertex(v, self.n)?;
        Ok(self.adj[v].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    #[inline]
    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        if a == b || a >= self.n || b >= self.n {
            return false;
        }
        let (x, y) = if self.adj[a].len() <= self.adj[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.adj[x].binary_search(&y).is_ok()
    }

    #[inline]
    pub fn contains_edge(&self, e: Edge) -> bool {
        self.has_edge(e.0, e.1)
    }

    /// Position of `e` in [`Graph::edges`].
    #[inline]
    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edges.binary_search(&e).ok()
    }

    /// Vertices with at least one incident edge, ascending.
    pub fn support(&self) -> Vec<Vertex> {
        (0..self.n).filter(|&v| !self.adj[v].is_empty()).collect()
    }

    /// Sorted common neighbours of `a` and `b`.
    pub fn common_neighbours(&self, a: Vertex, b: Vertex) -> Vec<Vertex> {
        intersect_sorted(&self.adj[a], &self.adj[b])
    }

    /// Edge union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Result<Graph, GraphError> {
        if self.n != other.n {
            return Err(GraphError::MismatchedVertexCount(self.n, other.n));
        }
        let mut edges = Vec::with_capacity(self.edges.len() + other.edges.len());
        let (mut i, mut j) = (0, 0);
        while i < self.edges.len() && j < other.edges.len() {
            match self.edges[i].cmp(&other.edges[j]) {
                std::cmp::Ordering::Less => {
                    edges.push(self.edges[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    edges.push(other.edges[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    edges.push(self.edges[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        edges.extend_from_slice(&self.edges[i..]);
        edges.extend_from_slice(&other.edges[j..]);
        Ok(Graph::from_sorted_unique(self.n, edges))
    }

    /// Edges of `self` that are not edges of `other`, in order.
    pub fn edges_not_in<'a>(&'a self, other: &'a Graph) -> impl Iterator<Item = Edge> + 'a {
        self.edges.iter().copied().filter(move |e| !other.contains_edge(*e))
    }

    /// `e(A, B)`: edges with one endpoint in `a` and the other in `b`, where
    /// edges inside `a ∩ b` are counted once.
    pub fn edges_between(&self, a: &[Vertex], b: &[Vertex]) -> Result<usize, GraphError> {
        let in_a = self.membership(a)?;
        let in_b = self.membership(b)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| (in_a[e.0] && in_b[e.1]) || (in_b[e.0] && in_a[e.1]))
            .count())
    }

    /// The subgraph induced on `vertices`, relabelled monotonically onto
    /// `0..k`. Monotone relabelling keeps the lexicographic edge order.
    pub fn induced_subgraph(&self, vertices: &[Vertex]) -> Result<InducedSubgraph, GraphError> {
        let mut labels = vertices.to_vec();
        labels.sort_unstable();
        labels.dedup();
        for &v in &labels {
            check_vertex(v, self.n)?;
        }
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in labels.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        for &v in &labels {
            for &w in &self.adj[v] {
                if v < w && local[w] != usize::MAX {
                    edges.push(Edge(local[v], local[w]));
                }
            }
        }
        edges.sort_unstable();
        Ok(InducedSubgraph {
            graph: Graph::from_sorted_unique(labels.len(), edges),
            labels,
        })
    }

    /// The spanning subgraph keeping only edges for which `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(Edge) -> bool) -> Graph {
        let edges = self.edges.iter().copied().filter(|&e| keep(e)).collect();
        Graph::from_sorted_unique(self.n, edges)
    }

    /// The graph on `0..k` obtained by relabelling every vertex through
    /// `labels` (vertex `i` becomes `labels[i]`) inside a universe of `n`.
    pub fn relabel_into(&self, labels: &[Vertex], n: usize) -> Result<Graph, GraphError> {
        Graph::from_edges(n, self.edges.iter().map(|e| (labels[e.0], labels[e.1])))
    }

    fn membership(&self, set: &[Vertex]) -> Result<Vec<bool>, GraphError> {
        let mut member = vec![false; self.n];
        for &v in set {
            check_vertex(v, self.n)?;
            member[v] = true;
        }
        Ok(member)
    }

    pub fn to_edge_subset(&self) -> EdgeSubset {
        EdgeSubset {
            n: self.n,
            edges: self.edges.clone(),
        }
    }

    /// Writes the edge-list text format: `n m` then one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<(), GraphError> {
        writeln!(out, "{} {}", self.n, self.edges.len())?;
        for e in &self.edges {
            writeln!(out, "{} {}", e.0, e.1)?;
        }
        Ok(())
    }

    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, GraphError> {
        let mut lines = input.lines().enumerate();
        let (n, m) = loop {
            let Some((i, line)) = lines.next() else {
                return Err(parse_error(1, "missing `n m` header"));
            };
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields = parse_fields(&line, i + 1)?;
            if fields.len() != 2 {
                return Err(parse_error(i + 1, "header must be `n m`"));
            }
            break (fields[0], fields[1]);
        };
        let mut pairs = Vec::with_capacity(m);
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fields = parse_fields(&line, i + 1)?;
            if fields.len() != 2 {
                return Err(parse_error(i + 1, "edge line must be `u v`"));
            }
            let (u, v) = (fields[0], fields[1]);
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if u > v {
                return Err(parse_error(i + 1, "endpoints must satisfy u < v"));
            }
            pairs.push((u, v));
        }
        if pairs.len() != m {
            return Err(parse_error(
                0,
                &format!("header announces {m} edges but {} were listed", pairs.len()),
            ));
        }
        Graph::from_edges(n, pairs)
    }

    pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
        Graph::read_edge_list(text.as_bytes())
    }
}

fn parse_fields(line: &str, line_no: usize) -> Result<Vec<usize>, GraphError> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| parse_error(line_no, &format!("`{tok}` is not a non-negative integer")))
        })
        .collect()
}

fn parse_error(line: usize, message: &str) -> GraphError {
    GraphError::Parse {
        line,
        message: message.to_string(),
    }
}

#[inline]
fn check_vertex(v: Vertex, n: usize) -> Result<(), GraphError> {
    if v < n {
        Ok(())
    } else {
        Err(GraphError::VertexOutOfRange { vertex: v, n })
    }
}

/// Merge-intersection of two ascending vertex lists.
pub(crate) fn intersect_sorted(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// An induced subgraph together with the host label of each local vertex.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `labels[i]` is the host vertex that became local vertex `i`.
    pub labels: Vec<Vertex>,
}

/// A set of unordered pairs over the vertex universe `0..n` of `K_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeSubset {
    n: usize,
    edges: Vec<Edge>,
}

impl EdgeSubset {
    pub fn new(n: usize) -> EdgeSubset {
        EdgeSubset { n, edges: Vec::new() }
    }

    /// Collects edges into a subset, merging repeats.
    pub fn from_edges<I: IntoIterator<Item = Edge>>(n: usize, edges: I) -> Result<EdgeSubset, GraphError> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        for e in &edges {
            check_vertex(e.v(), n)?;
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(EdgeSubset { n, edges })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    #[inline]
    pub fn contains(&self, e: Edge) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_sorted_unique(self.n, self.edges.clone())
    }
}

impl TryFrom<EdgeSubset> for Graph {
    type Error = GraphError;

    fn try_from(subset: EdgeSubset) -> Result<Self, Self::Error> {
        Graph::from_edges(subset.n, subset.edges.iter().map(|e| e.endpoints()))
    }
}

impl From<Graph> for EdgeSubset {
    fn from(g: Graph) -> Self {
        EdgeSubset { n: g.n, edges: g.edges }
    }
}

/// Addresses one reproducible random stream: a master seed plus a stream id.
///
/// Streams with the same master seed and distinct ids are independent
/// ChaCha8 streams, so concurrent trials never share randomness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> RngSpec {
        RngSpec { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Samples `G(n, p)`: every pair of `K_n` is an edge independently with
/// probability `p`. Deterministic given `rng`.
pub fn sample_gnp(n: usize, p: f64, rng: &RngSpec) -> Result<Graph, GraphError> {
    sample_gnp_with_limit(n, p, rng, DEFAULT_MAX_VERTICES)
}

pub fn sample_gnp_with_limit(n: usize, p: f64, rng: &RngSpec, max_n: usize) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidProbability(p));
    }
    if n > max_n {
        return Err(GraphError::TooManyVertices { n, max: max_n });
    }
    if p == 0.0 || n < 2 {
        return Ok(Graph::empty(n));
    }
    if p == 1.0 {
        return Ok(Graph::complete(n));
    }
    let mut rng = rng.rng();
    Ok(gnp_skipping(n, p, &mut rng))
}

/// Geometric skipping over the pairs `(w, v)`, `w < v`, in column order.
fn gnp_skipping<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let log_q = (1.0 - p).ln();
    let mut edges = Vec::new();
    let mut v: usize = 1;
    let mut w: i64 = -1;
    while v < n {
        let r: f64 = rng.random();
        let skip = ((1.0 - r).ln() / log_q).floor();
        // Skips beyond the remaining pair count end the scan.
        if !skip.is_finite() || skip > (n as f64) * (n as f64) {
            break;
        }
        w += 1 + skip as i64;
        while v < n && w >= v as i64 {
            w -= v as i64;
            v += 1;
        }
        if v < n {
            edges.push(Edge(w as usize, v));
        }
    }
    edges.sort_unstable();
    Graph::from_sorted_unique(n, edges)
}

/// Samples a uniformly random graph with exactly `m` edges.
pub fn sample_gnm(n: usize, m: usize, rng: &RngSpec) -> Result<Graph, GraphError> {
    if n > DEFAULT_MAX_VERTICES {
        return Err(GraphError::TooManyVertices {
            n,
            max: DEFAULT_MAX_VERTICES,
        });
    }
    let total = n * n.saturating_sub(1) / 2;
    if m > total {
        return Err(GraphError::TooManyEdges { m, available: total });
    }
    let mut rng = rng.rng();
    let mut picks = index::sample(&mut rng, total, m).into_vec();
    picks.sort_unstable();
    Ok(Graph::from_sorted_unique(n, decode_pair_indices(n, &picks)))
}

/// Decodes ascending lexicographic pair indices into edges.
pub(crate) fn decode_pair_indices(n: usize, sorted: &[usize]) -> Vec<Edge> {
    let mut out = Vec::with_capacity(sorted.len());
    let mut u = 0usize;
    let mut row_start = 0usize;
    for &k in sorted {
        while k >= row_start + (n - 1 - u) {
            row_start += n - 1 - u;
            u += 1;
        }
        out.push(Edge(u, u + 1 + (k - row_start)));
    }
    out
}

/// Maximum-degree property: `Δ(G) ≤ 2np`.
pub fn max_degree_bound_holds(g: &Graph, p: f64) -> bool {
    (g.max_degree() as f64) <= 2.0 * g.n() as f64 * p
}

/// Edge-distribution property for one pair of sets:
/// `e(A, B) ≤ |A||B|p + a·b·p / ln³ n`, where `a`, `b` are the size caps.
pub fn edge_distribution_bound_holds(
    g: &Graph,
    a: &[Vertex],
    b: &[Vertex],
    a_cap: usize,
    b_cap: usize,
    p: f64,
) -> Result<bool, GraphError> {
    let e = g.edges_between(a, b)? as f64;
    let ln_n = (g.n().max(2) as f64).ln();
    let bound = (a.len() * b.len()) as f64 * p + (a_cap * b_cap) as f64 * p / ln_n.powi(3);
    Ok(e <= bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn sampler_extremes() {
        let spec = RngSpec::new(7, 0);
        assert_eq!(sample_gnp(5, 0.0, &spec).unwrap().edge_count(), 0);
        assert_eq!(sample_gnp(5, 1.0, &spec).unwrap(), Graph::complete(5));
        assert_eq!(Graph::complete(5).edge_count(), 10);
    }

    #[test]
    fn sampler_rejects_bad_inputs() {
        let spec = RngSpec::new(1, 1);
        assert_eq!(sample_gnp(5, 1.5, &spec), Err(GraphError::InvalidProbability(1.5)));
        assert!(matches!(
            sample_gnp(100_001, 0.1, &spec),
            Err(GraphError::TooManyVertices { .. })
        ));
    }

    #[test]
    fn sampler_is_deterministic_per_stream() {
        let a = sample_gnp(200, 0.05, &RngSpec::new(11, 3)).unwrap();
        let b = sample_gnp(200, 0.05, &RngSpec::new(11, 3)).unwrap();
        let c = sample_gnp(200, 0.05, &RngSpec::new(11, 4)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gnp_mean_edge_count_within_three_sigma() {
        // Binomial(C(1000,2), 0.01): mean 4995, variance 4995 * 0.99.
        let trials = 400;
        let total: usize = (0..trials)
            .map(|s| sample_gnp(1000, 0.01, &RngSpec::new(2024, s)).unwrap().edge_count())
            .sum();
        let mean = total as f64 / trials as f64;
        let sd_of_mean = (4995.0f64 * 0.99).sqrt() / (trials as f64).sqrt();
        assert!((mean - 4995.0).abs() < 3.0 * sd_of_mean, "mean {mean}");
    }

    #[test]
    fn gnm_has_exact_edge_count() {
        let g = sample_gnm(30, 100, &RngSpec::new(5, 5)).unwrap();
        assert_eq!(g.edge_count(), 100);
        let all: Vec<usize> = (0..435).collect();
        assert_eq!(decode_pair_indices(30, &all), Graph::complete(30).edges());
    }

    #[test]
    fn union_cases() {
        let a = Graph::from_edges(3, [(0, 1)]).unwrap();
        let b = Graph::from_edges(3, [(1, 2)]).unwrap();
        assert_eq!(a.union(&b).unwrap(), path3());
        assert_eq!(path3().union(&path3()).unwrap(), path3());
        assert_eq!(
            a.union(&Graph::empty(4)),
            Err(GraphError::MismatchedVertexCount(3, 4))
        );
    }

    #[test]
    fn union_edge_count_identity() {
        let g1 = sample_gnp(100, 0.05, &RngSpec::new(9, 0)).unwrap();
        let g2 = sample_gnp(100, 0.05, &RngSpec::new(9, 1)).unwrap();
        let both = g1.edges().iter().filter(|e| g2.contains_edge(**e)).count();
        let u = g1.union(&g2).unwrap();
        assert_eq!(u.edge_count(), g1.edge_count() + g2.edge_count() - both);
    }

    #[test]
    fn edges_between_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.edges_between(&[0, 1, 2, 3], &[0, 1, 2, 3]).unwrap(), 6);
        assert_eq!(path3().edges_between(&[0], &[2]).unwrap(), 0);
        assert_eq!(path3().edges_between(&[0, 1], &[1]).unwrap(), 1);
        assert!(path3().edges_between(&[5], &[0]).is_err());
    }

    #[test]
    fn edges_between_matches_double_loop() {
        use rand::seq::SliceRandom;
        let g = sample_gnp(50, 0.2, &RngSpec::new(3, 3)).unwrap();
        let mut rng = RngSpec::new(3, 4).rng();
        for _ in 0..20 {
            let mut verts: Vec<usize> = (0..50).collect();
            verts.shuffle(&mut rng);
            let a = verts[..20].to_vec();
            verts.shuffle(&mut rng);
            let b = verts[..20].to_vec();
            let mut brute = 0;
            for x in 0..50 {
                for y in x + 1..50 {
                    if !g.has_edge(x, y) {
                        continue;
                    }
                    let ab = a.contains(&x) && b.contains(&y);
                    let ba = b.contains(&x) && a.contains(&y);
                    if ab || ba {
                        brute += 1;
                    }
                }
            }
            assert_eq!(g.edges_between(&a, &b).unwrap(), brute);
        }
    }

    #[test]
    fn degrees_and_induced() {
        assert_eq!(Graph::complete(4).max_degree(), 3);
        assert_eq!(Graph::empty(6).max_degree(), 0);
        let g = sample_gnp(200, 0.1, &RngSpec::new(1, 2)).unwrap();
        let sum: usize = (0..200).map(|v| g.degree(v)).sum();
        assert_eq!(sum, 2 * g.edge_count());
        assert!(g.checked_degree(200).is_err());

        let ind = Graph::complete(5).induced_subgraph(&[4, 1, 3]).unwrap();
        assert_eq!(ind.labels, vec![1, 3, 4]);
        assert_eq!(ind.graph, Graph::complete(3));
    }

    #[test]
    fn edge_list_round_trip_and_rejections() {
        let g = sample_gnp(30, 0.2, &RngSpec::new(0, 0)).unwrap();
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(matches!(
            Graph::parse_edge_list("3 2\n0 1\n0 1\n"),
            Err(GraphError::DuplicateEdge(_))
        ));
        assert_eq!(Graph::parse_edge_list("3 1\n1 1\n"), Err(GraphError::SelfLoop(1)));
        assert!(Graph::parse_edge_list("3 1\n0 3\n").is_err());
        assert!(Graph::parse_edge_list("3 2\n0 1\n").is_err());
    }

    #[test]
    fn serde_round_trip() {
        let g = path3();
        let json = serde_json::to_string(&g).unwrap();
        assert_eq!(json, r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        assert!(serde_json::from_str::<Graph>(r#"{"n":3,"edges":[[1,1]]}"#).is_err());
    }

    #[test]
    fn property_predicates() {
        let g = Graph::complete(4);
        assert!(max_degree_bound_holds(&g, 0.5));
        assert!(!max_degree_bound_holds(&g, 0.3));
        assert!(edge_distribution_bound_holds(&g, &[0, 1], &[2, 3], 2, 2, 1.0).unwrap());
    }
}
