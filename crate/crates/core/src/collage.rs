//! Collages: connected clumps of triangles and `F0⁻`/`F1⁻` copies.
//!
//! The collage hypergraph has the edges of a host graph as its vertices and
//! one hyperedge per copy of `K3`, `F0⁻` or `F1⁻`. Its components are the
//! maximal collages, which partition the host edges (an edge in no copy is a
//! component by itself).

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{dense_pair_violations, enumerate_copies, triangles, CensusError, DenseSubset, Pattern};
use crate::flow::densest_subgraph;
use crate::graph::{Edge, EdgeSubset, Graph, GraphError, Vertex};

/// Exact sub-collage enumeration is refused above this many hyperedges.
pub const DEFAULT_EXACT_HYPEREDGE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CollageError {
    #[error("exact density check needs {hyperedges} hyperedges; the limit is {limit}")]
    TooManyHyperedges { hyperedges: usize, limit: usize },
    #[error("collage is empty")]
    Empty,
    #[error("core log replay diverged at step {step}: {reason}")]
    ReplayMismatch { step: usize, reason: String },
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HyperedgeKind {
    Triangle,
    F0Minus,
    F1Minus,
}

/// One copy of `K3`, `F0⁻` or `F1⁻`.
///
/// `map` follows the pattern labelling of [`crate::census::pattern_library`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub kind: HyperedgeKind,
    pub map: Vec<Vertex>,
    /// Sorted edge set of the copy.
    pub edges: Vec<Edge>,
}

impl Hyperedge {
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }

    fn relabel(&self, labels: &[Vertex]) -> Hyperedge {
        let map: Vec<Vertex> = self.map.iter().map(|&v| labels[v]).collect();
        let mut edges: Vec<Edge> = self.edges.iter().map(|e| e.map(|v| labels[v])).collect();
        edges.sort_unstable();
        Hyperedge {
            kind: self.kind,
            map,
            edges,
        }
    }
}

/// All hyperedges of `g`, triangles first, then `F0⁻`, then `F1⁻` copies.
pub fn hyperedges(g: &Graph) -> Vec<Hyperedge> {
    let mut out: Vec<Hyperedge> = triangles(g)
        .into_iter()
        .map(|[a, b, c]| Hyperedge {
            kind: HyperedgeKind::Triangle,
            map: vec![a, b, c],
            edges: vec![Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)],
        })
        .collect();
    for (name, kind) in [("F0_minus", HyperedgeKind::F0Minus), ("F1_minus", HyperedgeKind::F1Minus)] {
        let pattern = Pattern::named(name).expect("library pattern");
        let copies = enumerate_copies(g, &pattern).expect("library pattern fits");
        for k in 0..copies.len() {
            out.push(Hyperedge {
                kind,
                map: copies.maps[k].clone(),
                edges: copies.edge_image(k),
            });
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller root so component ids follow edge order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[derive(Clone, Debug)]
pub struct CollageHypergraph {
    pub host: Graph,
    pub hyperedges: Vec<Hyperedge>,
    /// `component[i]` is the component of host edge `host.edges()[i]`.
    pub component: Vec<usize>,
    /// Host edge indices of each component, components ordered by least edge.
    pub components: Vec<Vec<usize>>,
}

pub fn build_collage_hypergraph(g: &Graph) -> CollageHypergraph {
    let hyper = hyperedges(g);
    let m = g.edge_count();
    let mut uf = UnionFind::new(m);
    for h in &hyper {
        let first = g.edge_index(h.edges[0]).expect("copy edge in host");
        for e in &h.edges[1..] {
            uf.union(first, g.edge_index(*e).expect("copy edge in host"));
        }
    }
    let mut id_of_root = HashMap::new();
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut component = vec![0; m];
    for (i, slot) in component.iter_mut().enumerate() {
        let root = uf.find(i);
        let id = *id_of_root.entry(root).or_insert_with(|| {
            components.push(Vec::new());
            components.len() - 1
        });
        components[id].push(i);
        *slot = id;
    }
    CollageHypergraph {
        host: g.clone(),
        hyperedges: hyper,
        component,
        components,
    }
}

/// One component of the collage hypergraph.
///
/// Besides the host-labelled edge set, a collage keeps a local copy of its
/// graph on `0..k`, relabelled monotonically from its vertex support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CollageRecord", into = "CollageRecord")]
pub struct Collage {
    pub id: usize,
    edges: EdgeSubset,
    labels: Vec<Vertex>,
    local: Graph,
}

impl Collage {
    /// A collage on the given host edges. The edges are trusted to form a
    /// connected piece of the collage hypergraph.
    pub fn from_edges(id: usize, host_n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Collage, CollageError> {
        let edges = EdgeSubset::from_edges(host_n, edges)?;
        if edges.is_empty() {
            return Err(CollageError::Empty);
        }
        let mut labels: Vec<Vertex> = edges.iter().flat_map(|e| [e.u(), e.v()]).collect();
        labels.sort_unstable();
        labels.dedup();
        let local = local_graph(&edges, &labels);
        Ok(Collage {
            id,
            edges,
            labels,
            local,
        })
    }

    /// Treats a whole graph as one collage.
    pub fn from_graph(g: &Graph) -> Result<Collage, CollageError> {
        Collage::from_edges(0, g.n(), g.edges().iter().copied())
    }

    /// The collage graph on local labels `0..k`.
    pub fn local(&self) -> &Graph {
        &self.local
    }

    /// Host label of each local vertex, ascending.
    pub fn labels(&self) -> &[Vertex] {
        &self.labels
    }

    pub fn host_edges(&self) -> &EdgeSubset {
        &self.edges
    }

    pub fn host_n(&self) -> usize {
        self.edges.n()
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn density(&self) -> Ratio<i64> {
        Ratio::new(self.edge_count() as i64, self.vertex_count() as i64)
    }

    pub fn to_host(&self, e: Edge) -> Edge {
        e.map(|v| self.labels[v])
    }

    pub fn to_local(&self, v: Vertex) -> Option<Vertex> {
        self.labels.binary_search(&v).ok()
    }

    /// The collage as a spanning subgraph of the host vertex set.
    pub fn host_graph(&self) -> Graph {
        self.edges.to_graph()
    }

    /// Hyperedges inside the collage, in host labels.
    pub fn hyperedges(&self) -> Vec<Hyperedge> {
        hyperedges(self.local())
            .into_iter()
            .map(|h| h.relabel(&self.labels))
            .collect()
    }

    /// Blocks on local labels, in block order.
    pub fn blocks(&self) -> Vec<Block> {
        blocks(self.local())
    }
}

fn local_graph(edges: &EdgeSubset, labels: &[Vertex]) -> Graph {
    let pos: HashMap<Vertex, usize> = labels.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    Graph::from_edges(labels.len(), edges.iter().map(|e| (pos[&e.u()], pos[&e.v()])))
        .expect("collage edges are simple")
}

#[derive(Clone, Serialize, Deserialize)]
struct CollageRecord {
    id: usize,
    edges: EdgeSubset,
}

impl TryFrom<CollageRecord> for Collage {
    type Error = CollageError;

    fn try_from(rec: CollageRecord) -> Result<Self, Self::Error> {
        Collage::from_edges(rec.id, rec.edges.n(), rec.edges.iter())
    }
}

impl From<Collage> for CollageRecord {
    fn from(c: Collage) -> Self {
        CollageRecord { id: c.id, edges: c.edges }
    }
}

/// Maximal collages of `g`, ordered by their least edge.
pub fn maximal_collages(g: &Graph) -> Vec<Collage> {
    let h = build_collage_hypergraph(g);
    h.components
        .iter()
        .enumerate()
        .map(|(id, comp)| {
            Collage::from_edges(id, g.n(), comp.iter().map(|&i| g.edges()[i])).expect("components are nonempty")
        })
        .collect()
}

/// A block: a copy of `K4⁻` or a triangle lying in no `K4⁻`.
///
/// For `K4Minus`, `x1 < x2` are the two non-adjacent vertices and `y < z`
/// span the shared edge `g = yz`; `e_i = x_i y` and `f_i = x_i z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    Triangle([Vertex; 3]),
    K4Minus { x1: Vertex, x2: Vertex, y: Vertex, z: Vertex },
}

impl Block {
    pub fn vertices(&self) -> Vec<Vertex> {
        match *self {
            Block::Triangle(t) => t.to_vec(),
            Block::K4Minus { x1, x2, y, z } => {
                let mut v = vec![x1, x2, y, z];
                v.sort_unstable();
                v
            }
        }
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out = match *self {
            Block::Triangle([a, b, c]) => vec![Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)],
            Block::K4Minus { x1, x2, y, z } => vec![
                Edge::new(x1, y),
                Edge::new(x1, z),
                Edge::new(x2, y),
                Edge::new(x2, z),
                Edge::new(y, z),
            ],
        };
        out.sort_unstable();
        out
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices().contains(&v)
    }

    pub fn is_triangle(&self) -> bool {
        matches!(self, Block::Triangle(_))
    }

    pub fn map(&self, f: impl Fn(Vertex) -> Vertex) -> Block {
        match *self {
            Block::Triangle(t) => {
                let mut t = t.map(&f);
                t.sort_unstable();
                Block::Triangle(t)
            }
            Block::K4Minus { x1, x2, y, z } => {
                let (x1, x2) = order(f(x1), f(x2));
                let (y, z) = order(f(y), f(z));
                Block::K4Minus { x1, x2, y, z }
            }
        }
    }

    fn sort_key(&self) -> (u8, Vec<Vertex>, Vertex) {
        match self {
            Block::Triangle(t) => (0, t.to_vec(), 0),
            Block::K4Minus { x1, .. } => (1, self.vertices(), *x1),
        }
    }
}

fn order(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Block order: all triangles before all `K4⁻` copies, each class
/// lexicographic on sorted vertices.
impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// `K4⁻` copies, as `(x1, x2, y, z)` blocks. Triangles through an edge with
/// two common neighbours lie in a `K4⁻`.
pub fn k4_minus_copies(g: &Graph) -> Vec<Block> {
    let mut out = Vec::new();
    for &e in g.edges() {
        let (y, z) = e.endpoints();
        let common = g.common_neighbours(y, z);
        for (i, &x1) in common.iter().enumerate() {
            for &x2 in &common[i + 1..] {
                out.push(Block::K4Minus { x1, x2, y, z });
            }
        }
    }
    out.sort_unstable();
    out
}

/// All blocks of `g` in block order.
pub fn blocks(g: &Graph) -> Vec<Block> {
    let mut out: Vec<Block> = triangles(g)
        .into_iter()
        .filter(|&[a, b, c]| {
            [(a, b), (a, c), (b, c)]
                .iter()
                .all(|&(x, y)| g.common_neighbours(x, y).len() == 1)
        })
        .map(Block::Triangle)
        .collect();
    out.extend(k4_minus_copies(g));
    out.sort_unstable();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityMode {
    /// Enumerate every sub-collage.
    Exact,
    /// Densest-subgraph certificate only.
    Sufficient,
    /// Exact when the hyperedge count is within the limit, else sufficient.
    Auto,
}

/// Outcome of the `e(C')/v(C') < 5/3` check over sub-collages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DensityCheck {
    Passed { max_density: Ratio<i64>, exact: bool },
    Violated { density: Ratio<i64>, witness: Vec<Edge> },
    /// The densest subgraph reaches 5/3 but sub-collages were not scanned.
    Indeterminate { densest: Ratio<i64> },
}

impl DensityCheck {
    pub fn passed(&self) -> bool {
        matches!(self, DensityCheck::Passed { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellBehavedReport {
    pub vertices: usize,
    pub vertex_limit: f64,
    /// `v(C) ≤ log n`.
    pub small: bool,
    pub density: DensityCheck,
    /// Present when condition (iii) was evaluated.
    pub dense_subsets: Option<Vec<DenseSubset>>,
}

impl WellBehavedReport {
    pub fn well_behaved(&self) -> bool {
        self.small && self.density.passed()
    }

    pub fn very_well_behaved(&self) -> bool {
        self.well_behaved() && self.dense_free()
    }

    /// Density and dense-subset conditions, ignoring the size bound.
    pub fn colourable_by_discharging(&self) -> bool {
        self.density.passed() && self.dense_free()
    }

    fn dense_free(&self) -> bool {
        self.dense_subsets.as_ref().is_some_and(Vec::is_empty)
    }
}

/// Settings for the well-behavedness checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellBehavedOptions {
    pub mode: DensityMode,
    pub exact_limit: usize,
    /// Logarithm base for the size bound; `None` is natural log.
    pub log_base: Option<f64>,
}

impl Default for WellBehavedOptions {
    fn default() -> Self {
        WellBehavedOptions {
            mode: DensityMode::Auto,
            exact_limit: DEFAULT_EXACT_HYPEREDGE_LIMIT,
            log_base: None,
        }
    }
}

pub fn log_n(n: usize, base: Option<f64>) -> f64 {
    let ln = (n as f64).ln();
    match base {
        Some(b) => ln / b.ln(),
        None => ln,
    }
}

/// Conditions (i) and (ii): at most `log n` vertices and every sub-collage
/// of density below 5/3.
pub fn is_well_behaved(c: &Collage, n: usize, opts: &WellBehavedOptions) -> Result<WellBehavedReport, CollageError> {
    let limit = log_n(n, opts.log_base);
    Ok(WellBehavedReport {
        vertices: c.vertex_count(),
        vertex_limit: limit,
        small: c.vertex_count() as f64 <= limit,
        density: density_check(c, opts)?,
        dense_subsets: None,
    })
}

/// Conditions (i), (ii) and (iii).
pub fn is_very_well_behaved(c: &Collage, n: usize, opts: &WellBehavedOptions) -> Result<WellBehavedReport, CollageError> {
    let mut report = is_well_behaved(c, n, opts)?;
    report.dense_subsets = Some(dense_pair_violations(c.local())?);
    Ok(report)
}

fn five_thirds() -> Ratio<i64> {
    Ratio::new(5, 3)
}

pub fn density_check(c: &Collage, opts: &WellBehavedOptions) -> Result<DensityCheck, CollageError> {
    let hyper = hyperedges(c.local());
    let exact = match opts.mode {
        DensityMode::Exact => {
            if hyper.len() > opts.exact_limit {
                return Err(CollageError::TooManyHyperedges {
                    hyperedges: hyper.len(),
                    limit: opts.exact_limit,
                });
            }
            true
        }
        DensityMode::Sufficient => false,
        DensityMode::Auto => hyper.len() <= opts.exact_limit,
    };
    if exact {
        let (density, witness) = densest_sub_collage(c.local(), &hyper);
        return Ok(if density < five_thirds() {
            DensityCheck::Passed {
                max_density: density,
                exact: true,
            }
        } else {
            DensityCheck::Violated {
                density,
                witness: witness.into_iter().map(|e| c.to_host(e)).collect(),
            }
        });
    }
    let (densest, _) = densest_subgraph(c.local());
    Ok(if densest < five_thirds() {
        DensityCheck::Passed {
            max_density: densest,
            exact: false,
        }
    } else {
        DensityCheck::Indeterminate { densest }
    })
}

/// Largest `e/v` over unions of connected hyperedge sets (and single edges).
fn densest_sub_collage(g: &Graph, hyper: &[Hyperedge]) -> (Ratio<i64>, Vec<Edge>) {
    let m = g.edge_count();
    let words = m.div_ceil(64).max(1);
    let bits: Vec<Vec<u64>> = hyper
        .iter()
        .map(|h| {
            let mut b = vec![0u64; words];
            for e in &h.edges {
                let i = g.edge_index(*e).expect("hyperedge edge in graph");
                b[i / 64] |= 1 << (i % 64);
            }
            b
        })
        .collect();
    let overlaps = |a: &[u64], b: &[u64]| a.iter().zip(b).any(|(x, y)| x & y != 0);
    let contained = |a: &[u64], b: &[u64]| a.iter().zip(b).all(|(x, y)| x & !y == 0);

    let density_of = |set: &[u64]| {
        let mut verts = HashSet::new();
        let mut e = 0;
        for (i, edge) in g.edges().iter().enumerate() {
            if set[i / 64] >> (i % 64) & 1 == 1 {
                e += 1;
                verts.insert(edge.u());
                verts.insert(edge.v());
            }
        }
        Ratio::new(e as i64, verts.len() as i64)
    };
    let mut best = if m > 0 {
        (Ratio::new(1, 2), vec![g.edges()[0]])
    } else {
        (Ratio::from_integer(0), Vec::new())
    };
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue: VecDeque<Vec<u64>> = VecDeque::new();
    for b in &bits {
        if seen.insert(b.clone()) {
            queue.push_back(b.clone());
        }
    }
    while let Some(set) = queue.pop_front() {
        let d = density_of(&set);
        if d > best.0 {
            let edges = (0..m).filter(|&i| set[i / 64] >> (i % 64) & 1 == 1).map(|i| g.edges()[i]).collect();
            best = (d, edges);
        }
        for b in &bits {
            if overlaps(&set, b) && !contained(b, &set) {
                let next: Vec<u64> = set.iter().zip(b).map(|(x, y)| x | y).collect();
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    best
}

/// Total order on the pairs of `K_n` used by core extraction.
///
/// The default is lexicographic. An explicit order ranks the listed pairs
/// first, in list order; unlisted pairs follow lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "Option<Vec<Edge>>", into = "Option<Vec<Edge>>")]
pub struct EdgeOrder {
    ranks: Option<HashMap<Edge, u64>>,
}

impl From<Option<Vec<Edge>>> for EdgeOrder {
    fn from(seq: Option<Vec<Edge>>) -> Self {
        match seq {
            Some(seq) => EdgeOrder::from_sequence(&seq),
            None => EdgeOrder::lexicographic(),
        }
    }
}

impl From<EdgeOrder> for Option<Vec<Edge>> {
    fn from(order: EdgeOrder) -> Self {
        order.ranks.map(|ranks| {
            let mut seq: Vec<(u64, Edge)> = ranks.into_iter().map(|(e, r)| (r, e)).collect();
            seq.sort_unstable();
            seq.into_iter().map(|(_, e)| e).collect()
        })
    }
}

impl EdgeOrder {
    pub fn lexicographic() -> EdgeOrder {
        EdgeOrder { ranks: None }
    }

    pub fn from_sequence(seq: &[Edge]) -> EdgeOrder {
        let mut ranks = HashMap::with_capacity(seq.len());
        for (i, &e) in seq.iter().enumerate() {
            ranks.entry(e).or_insert(i as u64);
        }
        EdgeOrder { ranks: Some(ranks) }
    }

    pub fn key(&self, e: Edge) -> (u64, Edge) {
        match &self.ranks {
            None => (0, e),
            Some(ranks) => (ranks.get(&e).copied().unwrap_or(u64::MAX), e),
        }
    }

    pub fn cmp(&self, a: Edge, b: Edge) -> Ordering {
        self.key(a).cmp(&self.key(b))
    }

    pub fn sort(&self, edges: &mut [Edge]) {
        edges.sort_by_key(|&e| self.key(e));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    Seed,
    Regular,
    Degenerate,
}

/// Sizes after one step of the extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSnapshot {
    pub step: usize,
    pub kind: StepKind,
    pub edges: usize,
    pub vertices: usize,
    /// Degenerate steps so far, `d(i)`.
    pub degenerate: usize,
}

impl StepSnapshot {
    /// `3e − 5v + 7`.
    pub fn excess(&self) -> i64 {
        3 * self.edges as i64 - 5 * self.vertices as i64 + 7
    }

    /// `d ≤ 3e − 5v + 7 ≤ 21·max(d, 1)`.
    pub fn satisfies_density_invariant(&self) -> bool {
        let d = self.degenerate as i64;
        let x = self.excess();
        d <= x && x <= 21 * d.max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenerateStep {
    pub step: usize,
    /// New edges, in edge order.
    pub edges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    DegenerateLimit,
    VertexLimit,
    Exhausted,
}

/// Logs of one core extraction.
///
/// Each regular step appends its three new vertices to `vertices` in role
/// order (the vertex adjacent to the root's centre only, then the two
/// outer vertices), and records in `centre_is_lower` whether the centre of
/// the rooted triangle is the smaller-labelled endpoint of the root edge.
/// Together with the root positions this pins down the five new edges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreExtractionLog {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    /// 1-based positions in `edges` of the root of each regular step.
    pub root_positions: Vec<usize>,
    pub centre_is_lower: Vec<bool>,
    pub degenerate: Vec<DegenerateStep>,
    pub snapshots: Vec<StepSnapshot>,
    pub halt: HaltReason,
}

impl CoreExtractionLog {
    pub fn root_positions_nondecreasing(&self) -> bool {
        self.root_positions.windows(2).all(|w| w[0] <= w[1])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreOptions {
    /// Halt once more than this many vertices are logged.
    pub vertex_limit: f64,
    pub max_degenerate: usize,
}

impl CoreOptions {
    /// Halting rule for a host on `n` vertices: `|L_V| > ln n` or seven
    /// degenerate steps.
    pub fn for_host(n: usize) -> CoreOptions {
        CoreOptions {
            vertex_limit: log_n(n, None),
            max_degenerate: 7,
        }
    }

    /// Only the degenerate-step and exhaustion rules apply.
    pub fn unbounded() -> CoreOptions {
        CoreOptions {
            vertex_limit: f64::INFINITY,
            max_degenerate: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreExtraction {
    pub core: EdgeSubset,
    pub log: CoreExtractionLog,
}

/// New edges of a regular step with roles `(u1, u2, u3, w1, w2)`, where
/// `u1u2` is the root and the rooted triangle is `u1 u2 w3`.
fn regular_new_edges(u1: Vertex, u2: Vertex, u3: Vertex, w1: Vertex, w2: Vertex) -> [Edge; 5] {
    [
        Edge::new(u1, u3),
        Edge::new(u3, w2),
        Edge::new(u1, w2),
        Edge::new(u2, w1),
        Edge::new(u3, w1),
    ]
}

struct RegularCandidate {
    root_position: usize,
    new_edges: Vec<Edge>,
    u1: Vertex,
    u2: Vertex,
    added: [Vertex; 3],
}

/// Grows a core from the least edge of `c` by regular `F0⁻` steps and
/// degenerate steps, halting per `opts`.
pub fn extract_core(c: &Collage, order: &EdgeOrder, opts: &CoreOptions) -> Result<CoreExtraction, CollageError> {
    let hyper = c.hyperedges();
    let mut all: Vec<Edge> = c.host_edges().edges().to_vec();
    order.sort(&mut all);
    let seed = *all.first().ok_or(CollageError::Empty)?;

    let mut in_core: HashSet<Edge> = HashSet::from([seed]);
    let mut in_vertices: HashSet<Vertex> = HashSet::from([seed.u(), seed.v()]);
    let mut log = CoreExtractionLog {
        vertices: vec![seed.u(), seed.v()],
        edges: vec![seed],
        root_positions: Vec::new(),
        centre_is_lower: Vec::new(),
        degenerate: Vec::new(),
        snapshots: vec![StepSnapshot {
            step: 1,
            kind: StepKind::Seed,
            edges: 1,
            vertices: 2,
            degenerate: 0,
        }],
        halt: HaltReason::Exhausted,
    };
    let mut position: HashMap<Edge, usize> = HashMap::from([(seed, 1)]);

    for step in 2.. {
        if log.degenerate.len() >= opts.max_degenerate {
            log.halt = HaltReason::DegenerateLimit;
            break;
        }
        if log.vertices.len() as f64 > opts.vertex_limit {
            log.halt = HaltReason::VertexLimit;
            break;
        }
        if in_core.len() == c.edge_count() {
            log.halt = HaltReason::Exhausted;
            break;
        }

        let mut best_regular: Option<RegularCandidate> = None;
        let mut best_degenerate: Option<Vec<Edge>> = None;
        for h in &hyper {
            let meets = h.edges.iter().filter(|e| in_core.contains(e)).count();
            if meets == 0 || meets == h.edges.len() {
                continue;
            }
            let mut new_edges: Vec<Edge> = h.edges.iter().copied().filter(|e| !in_core.contains(e)).collect();
            order.sort(&mut new_edges);
            if let Some(cand) = regular_candidate(h, &in_core, &in_vertices, &position, new_edges.clone()) {
                let better = match &best_regular {
                    None => true,
                    Some(b) => (cand.root_position, lex_key(order, &cand.new_edges)) < (b.root_position, lex_key(order, &b.new_edges)),
                };
                if better {
                    best_regular = Some(cand);
                }
            }
            let better = match &best_degenerate {
                None => true,
                Some(b) => lex_key(order, &new_edges) < lex_key(order, b),
            };
            if better {
                best_degenerate = Some(new_edges);
            }
        }

        let (kind, new_edges) = if let Some(r) = best_regular {
            log.root_positions.push(r.root_position);
            log.centre_is_lower.push(r.u1 < r.u2);
            for v in r.added {
                log.vertices.push(v);
                in_vertices.insert(v);
            }
            (StepKind::Regular, r.new_edges)
        } else {
            let new_edges = best_degenerate.expect("connected collage always offers a copy");
            let mut fresh: Vec<Vertex> = new_edges
                .iter()
                .flat_map(|e| [e.u(), e.v()])
                .filter(|v| !in_vertices.contains(v))
                .collect();
            fresh.sort_unstable();
            fresh.dedup();
            for v in fresh {
                log.vertices.push(v);
                in_vertices.insert(v);
            }
            log.degenerate.push(DegenerateStep {
                step,
                edges: new_edges.clone(),
            });
            (StepKind::Degenerate, new_edges)
        };
        for e in new_edges {
            in_core.insert(e);
            log.edges.push(e);
            position.insert(e, log.edges.len());
        }
        log.snapshots.push(StepSnapshot {
            step,
            kind,
            edges: log.edges.len(),
            vertices: log.vertices.len(),
            degenerate: log.degenerate.len(),
        });
    }

    let core = EdgeSubset::from_edges(c.host_n(), log.edges.iter().copied())?;
    Ok(CoreExtraction { core, log })
}

fn lex_key(order: &EdgeOrder, edges: &[Edge]) -> Vec<(u64, Edge)> {
    edges.iter().map(|&e| order.key(e)).collect()
}

/// A regular step: an `F0⁻` copy meeting the core in exactly one of its two
/// triangles, edges and vertices alike.
fn regular_candidate(
    h: &Hyperedge,
    in_core: &HashSet<Edge>,
    in_vertices: &HashSet<Vertex>,
    position: &HashMap<Edge, usize>,
    new_edges: Vec<Edge>,
) -> Option<RegularCandidate> {
    if h.kind != HyperedgeKind::F0Minus || new_edges.len() != 5 {
        return None;
    }
    let m = &h.map;
    // Pattern labels: u1 u2 u3 w1 w2 w3 = 0..6; triangles u1u2w3 and u1u3w2.
    // The second orientation is the reflection u2 <-> u3, w2 <-> w3.
    for (u2, u3, w2, w3) in [(m[1], m[2], m[4], m[5]), (m[2], m[1], m[5], m[4])] {
        let (u1, w1) = (m[0], m[3]);
        let tri = [Edge::new(u1, u2), Edge::new(u1, w3), Edge::new(u2, w3)];
        if !tri.iter().all(|e| in_core.contains(e)) {
            continue;
        }
        let outside = [u3, w1, w2];
        if outside.iter().any(|v| in_vertices.contains(v)) {
            continue;
        }
        let root = Edge::new(u1, u2);
        return Some(RegularCandidate {
            root_position: position[&root],
            new_edges,
            u1,
            u2,
            added: outside,
        });
    }
    None
}

/// Rebuilds the edge log from the vertex log, root positions, orientations,
/// degenerate log and edge order.
pub fn replay_core_log(log: &CoreExtractionLog, order: &EdgeOrder) -> Result<Vec<Edge>, CollageError> {
    let mismatch = |step: usize, reason: &str| CollageError::ReplayMismatch {
        step,
        reason: reason.to_string(),
    };
    if log.vertices.len() < 2 {
        return Err(mismatch(1, "vertex log shorter than the seed"));
    }
    let mut edges = vec![Edge::try_new(log.vertices[0], log.vertices[1])?];
    let mut vertices: HashSet<Vertex> = HashSet::from([log.vertices[0], log.vertices[1]]);
    let mut next_vertex = 2;
    let mut regular = 0;
    let mut degenerate = log.degenerate.iter().peekable();
    let steps = 1 + log.root_positions.len() + log.degenerate.len();
    for step in 2..=steps {
        let mut new_edges: Vec<Edge>;
        if degenerate.peek().is_some_and(|d| d.step == step) {
            let d = degenerate.next().expect("peeked");
            new_edges = d.edges.clone();
            let mut fresh: Vec<Vertex> = new_edges
                .iter()
                .flat_map(|e| [e.u(), e.v()])
                .filter(|v| !vertices.contains(v))
                .collect();
            fresh.sort_unstable();
            fresh.dedup();
            for v in fresh {
                if log.vertices.get(next_vertex) != Some(&v) {
                    return Err(mismatch(step, "degenerate vertices disagree with the vertex log"));
                }
                vertices.insert(v);
                next_vertex += 1;
            }
        } else {
            let pos = *log
                .root_positions
                .get(regular)
                .ok_or_else(|| mismatch(step, "ran out of root positions"))?;
            let root = *edges.get(pos.wrapping_sub(1)).ok_or_else(|| mismatch(step, "root position beyond the edge log"))?;
            let lower = *log
                .centre_is_lower
                .get(regular)
                .ok_or_else(|| mismatch(step, "missing orientation"))?;
            let (u1, u2) = if lower { (root.u(), root.v()) } else { (root.v(), root.u()) };
            let added = log
                .vertices
                .get(next_vertex..next_vertex + 3)
                .ok_or_else(|| mismatch(step, "vertex log too short for a regular step"))?;
            let (u3, w1, w2) = (added[0], added[1], added[2]);
            vertices.extend(added.iter().copied());
            next_vertex += 3;
            regular += 1;
            new_edges = regular_new_edges(u1, u2, u3, w1, w2).to_vec();
        }
        order.sort(&mut new_edges);
        edges.extend(new_edges);
    }
    if next_vertex != log.vertices.len() {
        return Err(mismatch(steps, "unused vertices left in the log"));
    }
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::Pattern;
    use crate::graph::{sample_gnp, RngSpec};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn components_examples() {
        let path = graph(4, &[(0, 1), (2, 3)]);
        assert_eq!(build_collage_hypergraph(&path).components.len(), 2);
        let tri_and_edge = graph(6, &[(0, 1), (1, 2), (0, 2), (4, 5)]);
        assert_eq!(build_collage_hypergraph(&tri_and_edge).components.len(), 2);
        let k4 = build_collage_hypergraph(&Graph::complete(4));
        assert_eq!(k4.components, vec![vec![0, 1, 2, 3, 4, 5]]);
        let two = graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let cs = maximal_collages(&two);
        assert_eq!(cs.iter().map(Collage::edge_count).collect::<Vec<_>>(), vec![3, 3]);
        let f0 = Pattern::named("F0").unwrap().graph;
        assert_eq!(maximal_collages(&f0).len(), 1);
    }

    #[test]
    fn collages_partition_edges() {
        let g = sample_gnp(60, 0.05, &RngSpec::new(60, 5)).unwrap();
        let cs = maximal_collages(&g);
        let mut all: Vec<Edge> = cs.iter().flat_map(|c| c.host_edges().edges().to_vec()).collect();
        all.sort();
        assert_eq!(all, g.edges());
    }

    #[test]
    fn blocks_of_small_graphs() {
        let k4m = Pattern::named("K4_minus").unwrap().graph;
        assert_eq!(blocks(&k4m), vec![Block::K4Minus { x1: 0, x2: 1, y: 2, z: 3 }]);
        assert_eq!(blocks(&Graph::complete(3)), vec![Block::Triangle([0, 1, 2])]);
        // F0⁻ has two triangles and no K4⁻.
        let f0m = Pattern::named("F0_minus").unwrap().graph;
        assert_eq!(blocks(&f0m).len(), 2);
    }

    #[test]
    fn well_behaved_examples() {
        let opts = WellBehavedOptions::default();
        let tri = Collage::from_graph(&Graph::complete(3)).unwrap();
        let r = is_very_well_behaved(&tri, 100, &opts).unwrap();
        assert!(r.well_behaved() && r.very_well_behaved());

        let k4 = Collage::from_graph(&Graph::complete(4)).unwrap();
        let r = is_very_well_behaved(&k4, 100, &opts).unwrap();
        assert!(r.density.passed() && r.well_behaved());
        assert!(!r.very_well_behaved());

        let f5 = Collage::from_graph(&Pattern::named("F5").unwrap().graph).unwrap();
        let r = is_very_well_behaved(&f5, 100, &opts).unwrap();
        assert!(r.density.passed());
        assert!(r.dense_subsets.unwrap().iter().any(|d| d.vertices.len() == 8));

        let k5 = Collage::from_graph(&Graph::complete(5)).unwrap();
        assert!(matches!(
            density_check(&k5, &WellBehavedOptions { mode: DensityMode::Exact, exact_limit: 1000, log_base: None }).unwrap(),
            DensityCheck::Violated { .. }
        ));
        assert!(matches!(
            density_check(&k5, &WellBehavedOptions { mode: DensityMode::Sufficient, ..opts }).unwrap(),
            DensityCheck::Indeterminate { .. }
        ));
        assert!(matches!(
            density_check(&k5, &WellBehavedOptions { mode: DensityMode::Exact, exact_limit: 3, log_base: None }),
            Err(CollageError::TooManyHyperedges { .. })
        ));
    }

    #[test]
    fn core_of_a_triangle() {
        let tri = Collage::from_graph(&Graph::complete(3)).unwrap();
        let out = extract_core(&tri, &EdgeOrder::lexicographic(), &CoreOptions::for_host(100)).unwrap();
        assert_eq!(out.core.len(), 3);
        assert_eq!(out.log.degenerate.len(), 1);
        assert_eq!(out.log.halt, HaltReason::Exhausted);
        assert_eq!(replay_core_log(&out.log, &EdgeOrder::lexicographic()).unwrap(), out.log.edges);
    }

    #[test]
    fn regular_step_adds_five_edges_and_three_vertices() {
        // Triangle w3 u1 u2 = 0 1 2 (added by a degenerate step), then an F0⁻
        // rooted at u1u2 with u3 = 3, w1 = 4, w2 = 5.
        let g = graph(6, &[(0, 1), (0, 2), (1, 2), (1, 3), (3, 5), (1, 5), (2, 4), (3, 4)]);
        let c = Collage::from_graph(&g).unwrap();
        let out = extract_core(&c, &EdgeOrder::lexicographic(), &CoreOptions::unbounded()).unwrap();
        let kinds: Vec<StepKind> = out.log.snapshots.iter().map(|s| s.kind).collect();
        assert_eq!(kinds, vec![StepKind::Seed, StepKind::Degenerate, StepKind::Regular]);
        let (a, b) = (out.log.snapshots[1], out.log.snapshots[2]);
        assert_eq!((b.edges - a.edges, b.vertices - a.vertices), (5, 3));
        assert_eq!(out.log.root_positions, vec![3]);
        assert_eq!(out.log.vertices, vec![0, 1, 2, 3, 4, 5]);
        assert!(out.log.snapshots.iter().all(StepSnapshot::satisfies_density_invariant));
        assert_eq!(replay_core_log(&out.log, &EdgeOrder::lexicographic()).unwrap(), out.log.edges);
    }

    #[test]
    fn replay_detects_tampering() {
        let g = graph(6, &[(0, 1), (0, 2), (1, 2), (1, 3), (3, 5), (1, 5), (2, 4), (3, 4)]);
        let c = Collage::from_graph(&g).unwrap();
        let mut out = extract_core(&c, &EdgeOrder::lexicographic(), &CoreOptions::unbounded()).unwrap();
        out.log.centre_is_lower[0] = !out.log.centre_is_lower[0];
        let replayed = replay_core_log(&out.log, &EdgeOrder::lexicographic()).unwrap();
        assert_ne!(replayed, out.log.edges);
    }
}
