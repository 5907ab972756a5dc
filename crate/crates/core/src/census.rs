//! Copies of small fixed patterns inside a host graph.
//!
//! A copy is a subgraph of the host isomorphic to the pattern, identified by
//! its edge set, so pattern automorphisms are quotiented out. Triangles,
//! 4-cycles, 5-cycles, cherries and `K_4` have dedicated loops; everything
//! else goes through a backtracking matcher.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{intersect_sorted, Edge, Graph, GraphError, Vertex};

/// Patterns may have at most this many vertices. `K_{2,10}` plus a pendant
/// edge needs 13.
pub const MAX_PATTERN_VERTICES: usize = 13;

/// Hosts larger than this are refused by [`dense_pair_violations`].
pub const MAX_DENSE_SCAN_VERTICES: usize = 2048;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CensusError {
    #[error("pattern has {vertices} vertices; at most {max} are supported")]
    PatternTooLarge { vertices: usize, max: usize },
    #[error("pattern `{0}` is disconnected; pass allow_disconnected to accept it")]
    Disconnected(String),
    #[error("host has {vertices} vertices; the dense-subset scan accepts at most {max}")]
    HostTooLarge { vertices: usize, max: usize },
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pattern {
    pub name: String,
    pub graph: Graph,
    #[serde(default)]
    pub allow_disconnected: bool,
}

impl Pattern {
    pub fn new(name: &str, graph: Graph, allow_disconnected: bool) -> Result<Pattern, CensusError> {
        if graph.n() > MAX_PATTERN_VERTICES {
            return Err(CensusError::PatternTooLarge {
                vertices: graph.n(),
                max: MAX_PATTERN_VERTICES,
            });
        }
        if !allow_disconnected && !is_connected(&graph) {
            return Err(CensusError::Disconnected(name.to_string()));
        }
        Ok(Pattern {
            name: name.to_string(),
            graph,
            allow_disconnected,
        })
    }

    fn fixed(name: &str, n: usize, edges: &[(Vertex, Vertex)]) -> Pattern {
        let graph = Graph::from_edges(n, edges.iter().copied()).expect("library pattern is simple");
        Pattern::new(name, graph, false).expect("library pattern is valid")
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.n()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Looks up a library pattern by name.
    pub fn named(name: &str) -> Result<Pattern, CensusError> {
        library()
            .get(name)
            .cloned()
            .ok_or_else(|| CensusError::UnknownPattern(name.to_string()))
    }
}

pub(crate) fn is_connected(g: &Graph) -> bool {
    if g.n() == 0 {
        return true;
    }
    let mut seen = vec![false; g.n()];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &w in g.neighbours(v) {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                stack.push(w);
            }
        }
    }
    count == g.n()
}

/// Every named pattern.
///
/// Vertex labels follow a fixed convention that other modules rely on:
/// in `F0`/`F0_minus` vertices `0, 1, 2` are the triangle `u1 u2 u3` and
/// `3, 4, 5` are `w1, w2, w3` (with `w_i` opposite `u_i`); `F0_minus` drops
/// `u2u3`. In `F1`/`F1_minus`, `0, 1, 2` are `u1 u2 u3`, `3` is the apex `w`
/// joined to all three and `4` is `w1`. `K4_minus` is `K_4` minus the pair
/// `{0, 1}`. In `K2_10` the two high-degree vertices are `0` and `1`;
/// `K2_10_plus` hangs vertex `12` off vertex `0`.
pub fn pattern_library() -> BTreeMap<String, Pattern> {
    library().clone()
}

fn library() -> &'static BTreeMap<String, Pattern> {
    static LIBRARY: OnceLock<BTreeMap<String, Pattern>> = OnceLock::new();
    LIBRARY.get_or_init(build_library)
}

fn build_library() -> BTreeMap<String, Pattern> {
    let mut lib = BTreeMap::new();
    let mut add = |p: Pattern| {
        lib.insert(p.name.clone(), p);
    };
    add(Pattern::fixed("K3", 3, &[(0, 1), (1, 2), (0, 2)]));
    add(Pattern::fixed("K4", 4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]));
    add(Pattern::fixed("K4_minus", 4, &[(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]));
    add(Pattern::fixed("C4", 4, &[(0, 1), (1, 2), (2, 3), (3, 0)]));
    add(Pattern::fixed("C5", 5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]));
    add(Pattern::fixed("K12", 3, &[(0, 1), (0, 2)]));

    const F0_MINUS: [(usize, usize); 8] = [(0, 1), (0, 2), (3, 1), (3, 2), (4, 0), (4, 2), (5, 0), (5, 1)];
    let mut f0 = F0_MINUS.to_vec();
    f0.push((1, 2));
    add(Pattern::fixed("F0", 6, &f0));
    add(Pattern::fixed("F0_minus", 6, &F0_MINUS));

    const F1_MINUS: [(usize, usize); 7] = [(0, 1), (0, 2), (3, 0), (3, 1), (3, 2), (4, 1), (4, 2)];
    let mut f1 = F1_MINUS.to_vec();
    f1.push((1, 2));
    add(Pattern::fixed("F1", 5, &f1));
    add(Pattern::fixed("F1_minus", 5, &F1_MINUS));

    // u1 u2 u3 = 0 1 2, w2 = 3, w3 = 4.
    add(Pattern::fixed("F2", 5, &[(0, 1), (1, 2), (0, 2), (0, 4), (0, 3), (1, 4), (2, 3)]));
    add(Pattern::fixed("F3", 5, &[(0, 1), (1, 2), (0, 2), (2, 4), (1, 3), (1, 4), (2, 3)]));
    add(Pattern::fixed("F4", 5, &[(0, 3), (1, 2), (0, 4), (2, 4), (1, 3), (1, 4), (2, 3)]));

    // v1..v8 = 0..7. The four graphs share these nine edges.
    const SHARED: [(usize, usize); 9] = [
        (2, 3),
        (1, 3),
        (1, 4),
        (4, 3),
        (5, 3),
        (5, 2),
        (6, 3),
        (6, 4),
        (6, 7),
    ];
    let with = |extra: &[(usize, usize)]| {
        let mut e = SHARED.to_vec();
        e.extend_from_slice(extra);
        e
    };
    add(Pattern::fixed("F5", 8, &with(&[(0, 3), (0, 2), (5, 7)])));
    add(Pattern::fixed("F5_prime", 8, &with(&[(0, 3), (0, 2), (2, 7)])));
    add(Pattern::fixed("F6", 8, &with(&[(0, 1), (0, 2), (5, 7)])));
    add(Pattern::fixed("F6_prime", 8, &with(&[(0, 1), (5, 7), (0, 5)])));

    let k210: Vec<(usize, usize)> = (2..12).flat_map(|leaf| [(0, leaf), (1, leaf)]).collect();
    add(Pattern::fixed("K2_10", 12, &k210));
    let mut plus = k210;
    plus.push((0, 12));
    add(Pattern::fixed("K2_10_plus", 13, &plus));
    lib
}

/// Unlabelled copies of a pattern. Each entry of `maps` sends pattern vertex
/// `i` to host vertex `maps[k][i]`; distinct entries have distinct edge images.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyList {
    pub pattern: String,
    pub pattern_edges: Vec<Edge>,
    pub maps: Vec<Vec<Vertex>>,
}

impl CopyList {
    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    /// Sorted host edge set of copy `k`.
    pub fn edge_image(&self, k: usize) -> Vec<Edge> {
        image_of(&self.pattern_edges, &self.maps[k])
    }

    pub fn edge_images(&self) -> impl Iterator<Item = Vec<Edge>> + '_ {
        (0..self.len()).map(|k| self.edge_image(k))
    }
}

fn image_of(pattern_edges: &[Edge], map: &[Vertex]) -> Vec<Edge> {
    let mut img: Vec<Edge> = pattern_edges.iter().map(|e| Edge::new(map[e.u()], map[e.v()])).collect();
    img.sort_unstable();
    img
}

fn library_shape(f: &Pattern) -> Option<&'static str> {
    const FAST: [&str; 7] = ["K3", "K4", "C4", "C5", "K12", "K2_10", "K2_10_plus"];
    FAST.into_iter()
        .find(|name| library().get(*name).is_some_and(|p| p.graph == f.graph))
}

/// All copies of `f` in `g` (not necessarily induced).
pub fn enumerate_copies(g: &Graph, f: &Pattern) -> Result<CopyList, CensusError> {
    check_size(f)?;
    let maps = match library_shape(f) {
        Some("K3") => triangles(g).into_iter().map(|t| t.to_vec()).collect(),
        Some("K4") => k4s(g).into_iter().map(|t| t.to_vec()).collect(),
        Some("C4") => four_cycles(g).into_iter().map(|c| c.to_vec()).collect(),
        Some("C5") => five_cycles(g).into_iter().map(|c| c.to_vec()).collect(),
        Some("K12") => cherries(g).into_iter().map(|c| c.to_vec()).collect(),
        Some("K2_10") => k2t_maps(g, 10, false),
        Some("K2_10_plus") => k2t_maps(g, 10, true),
        _ => generic_copies(g, &f.graph),
    };
    Ok(CopyList {
        pattern: f.name.clone(),
        pattern_edges: f.graph.edges().to_vec(),
        maps,
    })
}

/// `N_F(G)`, the number of copies of `f` in `g`.
pub fn count_copies(g: &Graph, f: &Pattern) -> Result<u128, CensusError> {
    check_size(f)?;
    Ok(match library_shape(f) {
        Some("K3") => count_triangles(g) as u128,
        Some("K12") => (0..g.n()).map(|v| choose2(g.degree(v)) as u128).sum(),
        Some("K2_10") => count_k2t(g, 10, false),
        Some("K2_10_plus") => count_k2t(g, 10, true),
        _ => enumerate_copies(g, f)?.len() as u128,
    })
}

fn check_size(f: &Pattern) -> Result<(), CensusError> {
    if f.graph.n() > MAX_PATTERN_VERTICES {
        return Err(CensusError::PatternTooLarge {
            vertices: f.graph.n(),
            max: MAX_PATTERN_VERTICES,
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn choose2(d: usize) -> usize {
    d * d.saturating_sub(1) / 2
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Triangles `[a, b, c]` with `a < b < c`, in lexicographic order.
pub fn triangles(g: &Graph) -> Vec<[Vertex; 3]> {
    let mut out = Vec::new();
    for a in 0..g.n() {
        let na = g.neighbours(a);
        for &b in na.iter().filter(|&&b| b > a) {
            for c in intersect_sorted(na, g.neighbours(b)) {
                if c > b {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn count_triangles(g: &Graph) -> usize {
    let mut count = 0;
    for a in 0..g.n() {
        let na = g.neighbours(a);
        for &b in na.iter().filter(|&&b| b > a) {
            count += intersect_sorted(na, g.neighbours(b)).iter().filter(|&&c| c > b).count();
        }
    }
    count
}

/// Triangles through the edge `e`: the common neighbours of its endpoints.
pub fn triangle_apexes(g: &Graph, e: Edge) -> Vec<Vertex> {
    g.common_neighbours(e.u(), e.v())
}

pub fn k4s(g: &Graph) -> Vec<[Vertex; 4]> {
    let mut out = Vec::new();
    for [a, b, c] in triangles(g) {
        let abc = intersect_sorted(&g.common_neighbours(a, b), g.neighbours(c));
        out.extend(abc.into_iter().filter(|&d| d > c).map(|d| [a, b, c, d]));
    }
    out
}

/// 4-cycles as `[a, b, c, d]` (cycle order) with `a` the least vertex and
/// `b < d`. Each cycle appears once.
pub fn four_cycles(g: &Graph) -> Vec<[Vertex; 4]> {
    let mut out = Vec::new();
    for a in 0..g.n() {
        let up: Vec<Vertex> = g.neighbours(a).iter().copied().filter(|&x| x > a).collect();
        for (i, &b) in up.iter().enumerate() {
            for &d in &up[i + 1..] {
                for c in intersect_sorted(g.neighbours(b), g.neighbours(d)) {
                    if c > a {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

/// 5-cycles as `[a, b, c, d, e]` with `a` least and `b < e`.
pub fn five_cycles(g: &Graph) -> Vec<[Vertex; 5]> {
    let mut out = Vec::new();
    for a in 0..g.n() {
        let up: Vec<Vertex> = g.neighbours(a).iter().copied().filter(|&x| x > a).collect();
        for (i, &b) in up.iter().enumerate() {
            for &e in &up[i + 1..] {
                for &c in g.neighbours(b) {
                    if c <= a || c == e {
                        continue;
                    }
                    for d in intersect_sorted(g.neighbours(c), g.neighbours(e)) {
                        if d > a && d != b {
                            out.push([a, b, c, d, e]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Copies of `K_{1,2}` as `[centre, leaf, leaf]` with ascending leaves.
pub fn cherries(g: &Graph) -> Vec<[Vertex; 3]> {
    let mut out = Vec::new();
    for w in 0..g.n() {
        let nb = g.neighbours(w);
        for (i, &x) in nb.iter().enumerate() {
            out.extend(nb[i + 1..].iter().map(|&y| [w, x, y]));
        }
    }
    out
}

/// `N_{K_{2,t}}` via codegrees, optionally with a pendant edge at one of the
/// two degree-`t` vertices.
fn count_k2t(g: &Graph, t: usize, pendant: bool) -> u128 {
    let mut total: u128 = 0;
    for a in 0..g.n() {
        for b in a + 1..g.n() {
            let c = intersect_sorted(g.neighbours(a), g.neighbours(b)).len();
            if c < t {
                continue;
            }
            let ways = binomial(c as u64, t as u64);
            if !pendant {
                total += ways;
                continue;
            }
            let adj = usize::from(g.has_edge(a, b));
            let free = |x: Vertex| (g.degree(x) - t - adj) as u128;
            total += ways * (free(a) + free(b));
        }
    }
    total
}

fn k2t_maps(g: &Graph, t: usize, pendant: bool) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    for a in 0..g.n() {
        for b in 0..g.n() {
            // Without a pendant the two hubs are interchangeable.
            if a == b || (!pendant && b < a) {
                continue;
            }
            let common = intersect_sorted(g.neighbours(a), g.neighbours(b));
            if common.len() < t {
                continue;
            }
            for leaves in combinations(&common, t) {
                let mut map = vec![a, b];
                map.extend_from_slice(&leaves);
                if pendant {
                    for &x in g.neighbours(a) {
                        if x != b && !leaves.contains(&x) {
                            let mut full = map.clone();
                            full.push(x);
                            out.push(full);
                        }
                    }
                } else {
                    out.push(map);
                }
            }
        }
    }
    out
}

fn combinations(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    fn go(items: &[Vertex], k: usize, start: usize, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            go(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(items, k, 0, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Backtracking subgraph matcher with edge-image deduplication.
fn generic_copies(g: &Graph, f: &Graph) -> Vec<Vec<Vertex>> {
    let k = f.n();
    if k == 0 || k > g.n() {
        return Vec::new();
    }
    let order = matching_order(f);
    let mut pos = vec![0usize; k];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // For each step, the pattern neighbours placed earlier.
    let back: Vec<Vec<Vertex>> = order
        .iter()
        .map(|&v| f.neighbours(v).iter().copied().filter(|&w| pos[w] < pos[v]).collect())
        .collect();

    let mut state = Matcher {
        g,
        f,
        order: &order,
        back: &back,
        map: vec![usize::MAX; k],
        used: vec![false; g.n()],
        seen: HashSet::new(),
        out: Vec::new(),
    };
    state.extend(0);
    state.out
}

struct Matcher<'a> {
    g: &'a Graph,
    f: &'a Graph,
    order: &'a [Vertex],
    back: &'a [Vec<Vertex>],
    map: Vec<Vertex>,
    used: Vec<bool>,
    seen: HashSet<Vec<Edge>>,
    out: Vec<Vec<Vertex>>,
}

impl Matcher<'_> {
    fn extend(&mut self, step: usize) {
        if step == self.order.len() {
            let img = image_of(self.f.edges(), &self.map);
            if self.seen.insert(img) {
                self.out.push(self.map.clone());
            }
            return;
        }
        let pv = self.order[step];
        let need = self.f.degree(pv);
        let candidates: Vec<Vertex> = match self.back[step].first() {
            Some(&anchor) => self.g.neighbours(self.map[anchor]).to_vec(),
            None => (0..self.g.n()).collect(),
        };
        for h in candidates {
            if self.used[h] || self.g.degree(h) < need {
                continue;
            }
            if !self.back[step].iter().all(|&w| self.g.has_edge(self.map[w], h)) {
                continue;
            }
            self.map[pv] = h;
            self.used[h] = true;
            self.extend(step + 1);
            self.used[h] = false;
        }
        self.map[pv] = usize::MAX;
    }
}

/// Greedy order: start at a maximum-degree vertex, then always take the
/// vertex with the most already-ordered neighbours.
fn matching_order(f: &Graph) -> Vec<Vertex> {
    let k = f.n();
    let mut placed = vec![false; k];
    let mut order = Vec::with_capacity(k);
    while order.len() < k {
        let next = (0..k)
            .filter(|&v| !placed[v])
            .max_by_key(|&v| {
                let links = f.neighbours(v).iter().filter(|&&w| placed[w]).count();
                (links, f.degree(v), std::cmp::Reverse(v))
            })
            .expect("an unplaced vertex remains");
        placed[next] = true;
        order.push(next);
    }
    order
}

/// `m(F) = max e_J / v_J` over subgraphs `J` with at least one vertex.
///
/// Induced subgraphs suffice, so this scans all nonempty vertex subsets.
pub fn max_subgraph_density(f: &Pattern) -> Ratio<i64> {
    max_density_by_scan(&f.graph).0
}

/// Exhaustive densest-subgraph scan; returns the density and a vertex set
/// attaining it. Only sensible for small graphs.
pub fn max_density_by_scan(g: &Graph) -> (Ratio<i64>, Vec<Vertex>) {
    let n = g.n();
    assert!(n <= 24, "exhaustive density scan limited to 24 vertices");
    if n == 0 {
        return (Ratio::from_integer(0), Vec::new());
    }
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbours(v).iter().fold(0u32, |m, &w| m | (1 << w)))
        .collect();
    let mut best = (Ratio::from_integer(0), vec![0]);
    for set in 1u32..(1u32 << n) {
        let mut twice = 0u32;
        let mut rest = set;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            twice += (masks[v] & set).count_ones();
            rest &= rest - 1;
        }
        let density = Ratio::new((twice / 2) as i64, set.count_ones() as i64);
        if density > best.0 {
            best = (density, (0..n).filter(|&v| set >> v & 1 == 1).collect());
        }
    }
    best
}

/// A maximal set of pairwise edge-disjoint triangles, chosen greedily in
/// lexicographic triangle order, inside `g` or inside `g[restrict]`.
pub fn greedy_edge_disjoint_triangles(
    g: &Graph,
    restrict: Option<&[Vertex]>,
) -> Result<Vec<[Vertex; 3]>, CensusError> {
    let host;
    let (graph, labels): (&Graph, Option<Vec<Vertex>>) = match restrict {
        Some(set) => {
            let ind = g.induced_subgraph(set)?;
            host = ind.graph;
            (&host, Some(ind.labels))
        }
        None => (g, None),
    };
    let mut used = vec![false; graph.edge_count()];
    let mut out = Vec::new();
    for [a, b, c] in triangles(graph) {
        let ids = [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)]
            .map(|e| graph.edge_index(e).expect("triangle edge exists"));
        if ids.iter().any(|&i| used[i]) {
            continue;
        }
        ids.iter().for_each(|&i| used[i] = true);
        out.push(match &labels {
            Some(l) => [l[a], l[b], l[c]],
            None => [a, b, c],
        });
    }
    Ok(out)
}

/// A vertex set whose induced subgraph is too dense for a well-behaved
/// collage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSubset {
    pub vertices: Vec<Vertex>,
    pub edges: usize,
}

/// Connected vertex sets `U` with `|U| = 4, e ≥ 6`, `|U| = 5, e ≥ 7`, or
/// `|U| = 8, e ≥ 12` in the induced subgraph.
///
/// Restricting to connected sets loses nothing in a connected host: a
/// disconnected witness always contains a connected 4- or 5-vertex witness,
/// and a witness with an isolated vertex can swap it for a neighbour of the
/// rest.
pub fn dense_pair_violations(g: &Graph) -> Result<Vec<DenseSubset>, CensusError> {
    if g.n() > MAX_DENSE_SCAN_VERTICES {
        return Err(CensusError::HostTooLarge {
            vertices: g.n(),
            max: MAX_DENSE_SCAN_VERTICES,
        });
    }
    let mut out = Vec::new();
    connected_subsets(g, 8, |set, edges| {
        let hit = matches!((set.len(), edges), (4, 6..) | (5, 7..) | (8, 12..));
        if hit {
            let mut vertices = set.to_vec();
            vertices.sort_unstable();
            out.push(DenseSubset { vertices, edges });
        }
    });
    out.sort_by(|a, b| (a.vertices.len(), &a.vertices).cmp(&(b.vertices.len(), &b.vertices)));
    Ok(out)
}

/// Visits every connected vertex set of size at most `k` exactly once
/// (ESU enumeration), passing the induced edge count.
pub(crate) fn connected_subsets(g: &Graph, k: usize, mut visit: impl FnMut(&[Vertex], usize)) {
    let n = g.n();
    let mut ctx = Esu {
        g,
        k,
        in_sub: vec![false; n],
        touching: vec![0u32; n],
        sub: Vec::with_capacity(k),
    };
    for v in 0..n {
        ctx.push(v);
        let ext: Vec<Vertex> = g.neighbours(v).iter().copied().filter(|&w| w > v).collect();
        ctx.extend(v, ext, 0, &mut visit);
        ctx.pop(v);
    }
}

struct Esu<'a> {
    g: &'a Graph,
    k: usize,
    in_sub: Vec<bool>,
    /// Number of current members adjacent to each vertex.
    touching: Vec<u32>,
    sub: Vec<Vertex>,
}

impl Esu<'_> {
    fn push(&mut self, v: Vertex) {
        self.in_sub[v] = true;
        self.sub.push(v);
        for &w in self.g.neighbours(v) {
            self.touching[w] += 1;
        }
    }

    fn pop(&mut self, v: Vertex) {
        self.in_sub[v] = false;
        self.sub.pop();
        for &w in self.g.neighbours(v) {
            self.touching[w] -= 1;
        }
    }

    fn extend(&mut self, root: Vertex, mut ext: Vec<Vertex>, edges: usize, visit: &mut impl FnMut(&[Vertex], usize)) {
        visit(&self.sub, edges);
        if self.sub.len() == self.k {
            return;
        }
        while let Some(w) = ext.pop() {
            let gained = self.touching[w] as usize;
            // Exclusive neighbours of w: outside the set and its neighbourhood.
            let mut next = ext.clone();
            for &u in self.g.neighbours(w) {
                if u > root && !self.in_sub[u] && self.touching[u] == 0 && !next.contains(&u) {
                    next.push(u);
                }
            }
            self.push(w);
            self.extend(root, next, edges + gained, visit);
            self.pop(w);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lib(name: &str) -> Pattern {
        Pattern::named(name).unwrap()
    }

    #[test]
    fn library_shapes() {
        let expect = [
            ("K3", 3, 3),
            ("K4", 4, 6),
            ("K4_minus", 4, 5),
            ("C4", 4, 4),
            ("C5", 5, 5),
            ("K12", 3, 2),
            ("F0", 6, 9),
            ("F0_minus", 6, 8),
            ("F1", 5, 8),
            ("F1_minus", 5, 7),
            ("F2", 5, 7),
            ("F3", 5, 7),
            ("F4", 5, 7),
            ("F5", 8, 12),
            ("F5_prime", 8, 12),
            ("F6", 8, 12),
            ("F6_prime", 8, 12),
            ("K2_10", 12, 20),
            ("K2_10_plus", 13, 21),
        ];
        let all = pattern_library();
        assert_eq!(all.len(), expect.len());
        for (name, v, e) in expect {
            let p = &all[name];
            assert_eq!((p.vertex_count(), p.edge_count()), (v, e), "{name}");
        }
    }

    #[test]
    fn f0_minus_has_one_four_cycle_and_two_triangles() {
        let g = lib("F0_minus").graph;
        assert_eq!(four_cycles(&g), vec![[0, 1, 3, 2]]);
        assert_eq!(triangles(&g), vec![[0, 1, 5], [0, 2, 4]]);
    }

    #[test]
    fn small_counts() {
        let k4 = Graph::complete(4);
        assert_eq!(enumerate_copies(&Graph::complete(3), &lib("K3")).unwrap().len(), 1);
        assert_eq!(enumerate_copies(&k4, &lib("K3")).unwrap().len(), 4);
        assert_eq!(enumerate_copies(&k4, &lib("C4")).unwrap().len(), 3);
        assert_eq!(enumerate_copies(&k4, &lib("K4_minus")).unwrap().len(), 6);
        assert_eq!(count_copies(&Graph::complete(5), &lib("C5")).unwrap(), 12);
        assert_eq!(count_copies(&k4, &lib("K12")).unwrap(), 12);
    }

    #[test]
    fn generic_matcher_agrees_with_fast_paths() {
        let g = crate::graph::sample_gnp(14, 0.5, &crate::graph::RngSpec::new(4, 4)).unwrap();
        for name in ["K3", "K4", "C4", "C5", "K12"] {
            let p = lib(name);
            let fast = enumerate_copies(&g, &p).unwrap();
            let slow = generic_copies(&g, &p.graph);
            assert_eq!(fast.len(), slow.len(), "{name}");
        }
    }

    #[test]
    fn k2t_counts_against_enumeration() {
        // K_{2,11} plus a pendant at one hub: 11 copies of K_{2,10}.
        let mut edges: Vec<(usize, usize)> = (2..13).flat_map(|l| [(0, l), (1, l)]).collect();
        edges.push((0, 13));
        let g = Graph::from_edges(14, edges).unwrap();
        let k = lib("K2_10");
        let kp = lib("K2_10_plus");
        assert_eq!(count_copies(&g, &k).unwrap(), 11);
        assert_eq!(enumerate_copies(&g, &k).unwrap().len(), 11);
        // Hub 0: one spare leaf or the pendant (2 choices) per copy; hub 1: one spare leaf.
        assert_eq!(count_copies(&g, &kp).unwrap(), 11 * 3);
        assert_eq!(enumerate_copies(&g, &kp).unwrap().len(), 33);
    }

    #[test]
    fn densities() {
        assert_eq!(max_subgraph_density(&lib("K4_minus")), Ratio::new(5, 4));
        assert_eq!(max_subgraph_density(&lib("F0_minus")), Ratio::new(4, 3));
        assert_eq!(max_subgraph_density(&lib("F1_minus")), Ratio::new(7, 5));
        assert_eq!(max_subgraph_density(&lib("K4")), Ratio::new(3, 2));
    }

    #[test]
    fn packing_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(greedy_edge_disjoint_triangles(&k4, None).unwrap().len(), 1);
        let c5 = lib("C5").graph;
        assert!(greedy_edge_disjoint_triangles(&c5, None).unwrap().is_empty());
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(greedy_edge_disjoint_triangles(&two, None).unwrap().len(), 2);
        let only_second = greedy_edge_disjoint_triangles(&two, Some(&[3, 4, 5])).unwrap();
        assert_eq!(only_second, vec![[3, 4, 5]]);
    }

    #[test]
    fn dense_violations() {
        let k4 = dense_pair_violations(&Graph::complete(4)).unwrap();
        assert_eq!(k4, vec![DenseSubset { vertices: vec![0, 1, 2, 3], edges: 6 }]);
        assert!(dense_pair_violations(&lib("C5").graph).unwrap().is_empty());
        let f5 = dense_pair_violations(&lib("F5").graph).unwrap();
        assert!(f5.iter().any(|d| d.vertices.len() == 8 && d.edges == 12));
        assert!(matches!(
            dense_pair_violations(&Graph::empty(MAX_DENSE_SCAN_VERTICES + 1)),
            Err(CensusError::HostTooLarge { .. })
        ));
    }

    #[test]
    fn esu_visits_each_connected_set_once() {
        let g = Graph::complete(6);
        let mut count = 0;
        connected_subsets(&g, 6, |_, _| count += 1);
        assert_eq!(count, 63);
        let path = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut sets = Vec::new();
        connected_subsets(&path, 4, |s, e| {
            let mut s = s.to_vec();
            s.sort();
            sets.push((s, e));
        });
        assert_eq!(sets.len(), 10);
        assert!(sets.iter().all(|(s, e)| *e == s.len() - 1));
    }

    #[test]
    fn oversized_pattern_rejected() {
        let big = Graph::empty(14);
        assert!(matches!(
            Pattern::new("big", big, true),
            Err(CensusError::PatternTooLarge { .. })
        ));
    }
}
