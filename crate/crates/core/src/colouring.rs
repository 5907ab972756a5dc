//! Red/blue edge colourings and the coloured obstructions that block a
//! triangle-free extension.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::triangles;
use crate::graph::{intersect_sorted, Edge, EdgeSubset, Graph, GraphError, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Colour {
    #[serde(rename = "r")]
    Red,
    #[serde(rename = "b")]
    Blue,
}

impl Colour {
    pub fn flip(self) -> Colour {
        match self {
            Colour::Red => Colour::Blue,
            Colour::Blue => Colour::Red,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Colour::Red => 'r',
            Colour::Blue => 'b',
        }
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ColouringError {
    #[error("colouring leaves {0} edges uncoloured")]
    Incomplete(usize),
    #[error("edge {0} is not an edge of the coloured graph")]
    NotAnEdge(Edge),
    #[error("edge {0} is coloured twice")]
    DuplicateEdge(Edge),
    #[error("colouring line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A partial or complete red/blue colouring of the edges of a graph.
#[derive(Clone, PartialEq, Eq)]
pub struct TwoColouring {
    graph: Graph,
    colours: Vec<Option<Colour>>,
    uncoloured: usize,
}

impl fmt::Debug for TwoColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (e, c) in self.graph.edges().iter().zip(&self.colours) {
            m.entry(e, c);
        }
        m.finish()
    }
}

impl TwoColouring {
    pub fn uncoloured(graph: Graph) -> TwoColouring {
        let m = graph.edge_count();
        TwoColouring {
            graph,
            colours: vec![None; m],
            uncoloured: m,
        }
    }

    pub fn monochromatic(graph: Graph, c: Colour) -> TwoColouring {
        TwoColouring::from_fn(graph, |_| c)
    }

    pub fn from_fn(graph: Graph, mut f: impl FnMut(Edge) -> Colour) -> TwoColouring {
        let colours = graph.edges().iter().map(|&e| Some(f(e))).collect();
        TwoColouring {
            graph,
            colours,
            uncoloured: 0,
        }
    }

    /// Colours indexed like `graph.edges()`.
    pub fn from_colours(graph: Graph, colours: Vec<Option<Colour>>) -> TwoColouring {
        assert_eq!(graph.edge_count(), colours.len(), "one colour slot per edge");
        let uncoloured = colours.iter().filter(|c| c.is_none()).count();
        TwoColouring {
            graph,
            colours,
            uncoloured,
        }
    }

    #[inline]
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    #[inline]
    pub fn is_complete(&self) -> bool {
        self.uncoloured == 0
    }

    pub fn require_complete(&self) -> Result<(), ColouringError> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(ColouringError::Incomplete(self.uncoloured))
        }
    }

    /// Colour of `{a, b}`, or `None` if it is uncoloured or not an edge.
    #[inline]
    pub fn colour(&self, a: Vertex, b: Vertex) -> Option<Colour> {
        if a == b {
            return None;
        }
        self.get(Edge::new(a, b))
    }

    #[inline]
    pub fn get(&self, e: Edge) -> Option<Colour> {
        self.graph.edge_index(e).and_then(|i| self.colours[i])
    }

    #[inline]
    pub fn colour_at(&self, index: usize) -> Option<Colour> {
        self.colours[index]
    }

    #[inline]
    pub fn is(&self, a: Vertex, b: Vertex, c: Colour) -> bool {
        self.colour(a, b) == Some(c)
    }

    pub fn set(&mut self, e: Edge, c: Colour) -> Result<(), ColouringError> {
        let i = self.graph.edge_index(e).ok_or(ColouringError::NotAnEdge(e))?;
        if self.colours[i].is_none() {
            self.uncoloured -= 1;
        }
        self.colours[i] = Some(c);
        Ok(())
    }

    pub fn clear(&mut self, e: Edge) -> Result<(), ColouringError> {
        let i = self.graph.edge_index(e).ok_or(ColouringError::NotAnEdge(e))?;
        if self.colours[i].is_some() {
            self.uncoloured += 1;
        }
        self.colours[i] = None;
        Ok(())
    }

    pub fn colours(&self) -> &[Option<Colour>] {
        &self.colours
    }

    /// `(edge, colour)` for every coloured edge, in edge order.
    pub fn coloured_edges(&self) -> impl Iterator<Item = (Edge, Colour)> + '_ {
        self.graph
            .edges()
            .iter()
            .zip(&self.colours)
            .filter_map(|(&e, c)| c.map(|c| (e, c)))
    }

    /// The spanning subgraph of edges with colour `c`.
    pub fn colour_class(&self, c: Colour) -> Graph {
        let mut i = 0;
        self.graph.filter_edges(|_| {
            let keep = self.colours[i] == Some(c);
            i += 1;
            keep
        })
    }

    /// The same colouring with red and blue exchanged.
    pub fn swapped(&self) -> TwoColouring {
        let colours = self.colours.iter().map(|c| c.map(Colour::flip)).collect();
        TwoColouring::from_colours(self.graph.clone(), colours)
    }

    /// This colouring carried over to a supergraph; new edges are uncoloured.
    pub fn extend_to(&self, host: &Graph) -> Result<TwoColouring, ColouringError> {
        let mut out = TwoColouring::uncoloured(host.clone());
        for (e, c) in self.coloured_edges() {
            out.set(e, c)?;
        }
        Ok(out)
    }

    /// The colouring restricted to the edges of `sub`, which must be a
    /// subgraph on the same vertex set.
    pub fn restrict_to(&self, sub: &Graph) -> Result<TwoColouring, ColouringError> {
        let mut out = TwoColouring::uncoloured(sub.clone());
        for &e in sub.edges() {
            if !self.graph.contains_edge(e) {
                return Err(ColouringError::NotAnEdge(e));
            }
            if let Some(c) = self.get(e) {
                out.set(e, c)?;
            }
        }
        Ok(out)
    }

    /// Writes one `u v c` line per coloured edge.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in self.coloured_edges() {
            s.push_str(&format!("{} {} {}\n", e.u(), e.v(), c.letter()));
        }
        s
    }

    /// Reads `u v c` lines against an existing graph. Unlisted edges stay
    /// uncoloured.
    pub fn parse(graph: &Graph, text: &str) -> Result<TwoColouring, ColouringError> {
        let mut out = TwoColouring::uncoloured(graph.clone());
        let mut seen = HashSet::new();
        for (e, c) in parse_lines(text)? {
            if !seen.insert(e) {
                return Err(ColouringError::DuplicateEdge(e));
            }
            out.set(e, c)?;
        }
        Ok(out)
    }

    /// Reads `u v c` lines as a complete colouring of the listed edges.
    pub fn parse_standalone(n: usize, text: &str) -> Result<TwoColouring, ColouringError> {
        let lines = parse_lines(text)?;
        let graph = Graph::from_edges(n, lines.iter().map(|(e, _)| e.endpoints()))?;
        let mut out = TwoColouring::uncoloured(graph);
        for (e, c) in lines {
            out.set(e, c)?;
        }
        Ok(out)
    }
}

fn parse_lines(text: &str) -> Result<Vec<(Edge, Colour)>, ColouringError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let bad = |message: &str| ColouringError::Parse {
            line: i + 1,
            message: message.to_string(),
        };
        if fields.len() != 3 {
            return Err(bad("expected `u v c`"));
        }
        let u: Vertex = fields[0].parse().map_err(|_| bad("bad vertex"))?;
        let v: Vertex = fields[1].parse().map_err(|_| bad("bad vertex"))?;
        let c = match fields[2] {
            "r" => Colour::Red,
            "b" => Colour::Blue,
            _ => return Err(bad("colour must be r or b")),
        };
        out.push((Edge::try_new(u, v)?, c));
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
struct ColouringRecord {
    n: usize,
    red: Vec<Edge>,
    blue: Vec<Edge>,
    #[serde(default)]
    uncoloured: Vec<Edge>,
}

impl Serialize for TwoColouring {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut rec = ColouringRecord {
            n: self.n(),
            red: Vec::new(),
            blue: Vec::new(),
            uncoloured: Vec::new(),
        };
        for (&e, c) in self.graph.edges().iter().zip(&self.colours) {
            match c {
                Some(Colour::Red) => rec.red.push(e),
                Some(Colour::Blue) => rec.blue.push(e),
                None => rec.uncoloured.push(e),
            }
        }
        rec.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TwoColouring {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rec = ColouringRecord::deserialize(d)?;
        let all = rec.red.iter().chain(&rec.blue).chain(&rec.uncoloured);
        let graph = Graph::from_edges(rec.n, all.map(|e| e.endpoints())).map_err(serde::de::Error::custom)?;
        let mut out = TwoColouring::uncoloured(graph);
        for (list, c) in [(&rec.red, Colour::Red), (&rec.blue, Colour::Blue)] {
            for &e in list {
                out.set(e, c).map_err(serde::de::Error::custom)?;
            }
        }
        Ok(out)
    }
}

/// Per-vertex sorted neighbour lists in each colour.
pub(crate) struct ColourAdjacency {
    pub red: Vec<Vec<Vertex>>,
    pub blue: Vec<Vec<Vertex>>,
}

impl ColourAdjacency {
    pub fn new(phi: &TwoColouring) -> ColourAdjacency {
        let n = phi.n();
        let mut red = vec![Vec::new(); n];
        let mut blue = vec![Vec::new(); n];
        for (e, c) in phi.coloured_edges() {
            let side = if c == Colour::Red { &mut red } else { &mut blue };
            side[e.u()].push(e.v());
            side[e.v()].push(e.u());
        }
        for list in red.iter_mut().chain(blue.iter_mut()) {
            list.sort_unstable();
        }
        ColourAdjacency { red, blue }
    }
}

pub fn monochromatic_triangles(phi: &TwoColouring) -> Result<Vec<[Vertex; 3]>, ColouringError> {
    phi.require_complete()?;
    Ok(triangles(phi.graph())
        .into_iter()
        .filter(|&[a, b, c]| {
            let ab = phi.colour(a, b);
            ab == phi.colour(a, c) && ab == phi.colour(b, c)
        })
        .collect())
}

/// A coloured 4-cycle `u - red_mid - v - blue_mid - u` with both edges at
/// `red_mid` red and both edges at `blue_mid` blue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crrbb {
    pub u: Vertex,
    pub v: Vertex,
    pub red_mid: Vertex,
    pub blue_mid: Vertex,
}

impl Crrbb {
    pub fn edges(&self) -> [Edge; 4] {
        [
            Edge::new(self.u, self.red_mid),
            Edge::new(self.red_mid, self.v),
            Edge::new(self.v, self.blue_mid),
            Edge::new(self.blue_mid, self.u),
        ]
    }

    /// The two edges of the cycle in cycle order starting at `u`.
    pub fn cycle(&self) -> [Vertex; 4] {
        [self.u, self.red_mid, self.v, self.blue_mid]
    }
}

/// Monochromatic cherry apexes per unordered endpoint pair, in one colour.
fn cherry_apexes(adj: &[Vec<Vertex>]) -> HashMap<(Vertex, Vertex), Vec<Vertex>> {
    let mut map: HashMap<(Vertex, Vertex), Vec<Vertex>> = HashMap::new();
    for (w, nb) in adj.iter().enumerate() {
        for (i, &x) in nb.iter().enumerate() {
            for &y in &nb[i + 1..] {
                map.entry((x, y)).or_default().push(w);
            }
        }
    }
    map
}

/// Number of `C_rrbb` copies. The two colour-change vertices `u, v` of such
/// a cycle are determined by the colouring, so the count is
/// `Σ r(u,v)·b(u,v)` over unordered pairs, with `r`, `b` the numbers of red
/// and blue cherries joining them.
pub fn count_crrbb(phi: &TwoColouring) -> Result<u64, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let red = cherry_apexes(&adj.red);
    let blue = cherry_apexes(&adj.blue);
    Ok(red
        .iter()
        .map(|(k, r)| blue.get(k).map_or(0, |b| (r.len() * b.len()) as u64))
        .sum())
}

pub fn enumerate_crrbb(phi: &TwoColouring) -> Result<Vec<Crrbb>, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let red = cherry_apexes(&adj.red);
    let blue = cherry_apexes(&adj.blue);
    let mut out = Vec::new();
    for (&(u, v), reds) in &red {
        if let Some(blues) = blue.get(&(u, v)) {
            for &r in reds {
                for &b in blues {
                    out.push(Crrbb {
                        u,
                        v,
                        red_mid: r,
                        blue_mid: b,
                    });
                }
            }
        }
    }
    out.sort_unstable_by_key(|c| (c.u, c.v, c.red_mid, c.blue_mid));
    Ok(out)
}

/// A 5-cycle `u1 - u2 - w2 - w - w1 - u1` with `u1u2` red and the other four
/// edges blue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Crbbbb {
    pub u1: Vertex,
    pub u2: Vertex,
    pub w1: Vertex,
    pub w: Vertex,
    pub w2: Vertex,
}

/// Blue paths `a - x - w - y - b` of length four, grouped by middle vertex:
/// returns `(w, x, y)` triples.
fn blue_4_paths(adj: &ColourAdjacency, a: Vertex, b: Vertex) -> Vec<(Vertex, Vertex, Vertex)> {
    let mut out = Vec::new();
    let blue = &adj.blue;
    for &x in &blue[a] {
        if x == b {
            continue;
        }
        for &w in &blue[x] {
            if w == a || w == b {
                continue;
            }
            for &y in &blue[w] {
                if y != x && y != a && y != b && blue[y].binary_search(&b).is_ok() {
                    out.push((w, x, y));
                }
            }
        }
    }
    out
}

/// Number of `C_rbbbb` copies: for each red edge `u1u2` and middle vertex
/// `w`, the blue cherries `u1-w1-w` and `u2-w2-w` combine in `a·b − c` ways,
/// `c` correcting for `w1 = w2`.
pub fn count_crbbbb(phi: &TwoColouring) -> Result<u64, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let n = phi.n();
    let mut a = vec![0u64; n];
    let mut b = vec![0u64; n];
    let mut touched = Vec::new();
    let mut total = 0u64;
    for (e, c) in phi.coloured_edges() {
        if c != Colour::Red {
            continue;
        }
        let (u1, u2) = e.endpoints();
        for (side, counts) in [(u1, &mut a), (u2, &mut b)] {
            for &x in &adj.blue[side] {
                for &w in &adj.blue[x] {
                    if w != u1 && w != u2 {
                        counts[w] += 1;
                        touched.push(w);
                    }
                }
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for &w in &touched {
            total += a[w] * b[w];
            a[w] = 0;
            b[w] = 0;
        }
        touched.clear();
        // Subtract coincident middles z = w1 = w2 with z blue to u1, u2 and w.
        for z in intersect_sorted(&adj.blue[u1], &adj.blue[u2]) {
            total -= adj.blue[z].iter().filter(|&&w| w != u1 && w != u2).count() as u64;
        }
    }
    Ok(total)
}

pub fn enumerate_crbbbb(phi: &TwoColouring) -> Result<Vec<Crbbbb>, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let mut out = Vec::new();
    for (e, c) in phi.coloured_edges() {
        if c != Colour::Red {
            continue;
        }
        let (u1, u2) = e.endpoints();
        for (w, w1, w2) in blue_4_paths(&adj, u1, u2) {
            out.push(Crbbbb { u1, u2, w1, w, w2 });
        }
    }
    Ok(out)
}

/// Pairs `{x, y}` of `K_n` joined by both a red and a blue cherry.
///
/// With `include_edges` false, pairs that are edges of the coloured graph
/// are left out.
pub fn dangerous_pairs(phi: &TwoColouring, include_edges: bool) -> Result<EdgeSubset, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let red = cherry_apexes(&adj.red);
    let blue = cherry_apexes(&adj.blue);
    let pairs = red
        .keys()
        .filter(|k| blue.contains_key(k))
        .filter(|&&(x, y)| include_edges || !phi.graph().has_edge(x, y))
        .map(|&(x, y)| Edge::new(x, y));
    Ok(EdgeSubset::from_edges(phi.n(), pairs)?)
}

/// A cherry `{w u1, w u2}` of non-edges with `u1u2` red and blue paths
/// `u1 - w1 - w - w2 - u2` on distinct `w1 ≠ w2`. Colouring both new edges
/// red closes a red triangle, and any other choice puts a blue edge on a blue
/// cherry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DangerousCherry {
    pub centre: Vertex,
    pub u1: Vertex,
    pub u2: Vertex,
}

/// Dangerous cherries, sorted by `(centre, u1, u2)` with `u1 < u2`.
pub fn dangerous_k12(phi: &TwoColouring) -> Result<Vec<DangerousCherry>, ColouringError> {
    phi.require_complete()?;
    let adj = ColourAdjacency::new(phi);
    let g = phi.graph();
    let n = phi.n();
    let mut a = vec![0u64; n];
    let mut b = vec![0u64; n];
    let mut c = vec![0u64; n];
    let mut touched = Vec::new();
    let mut out = Vec::new();
    for (e, col) in phi.coloured_edges() {
        if col != Colour::Red {
            continue;
        }
        let (u1, u2) = e.endpoints();
        for (side, counts) in [(u1, &mut a), (u2, &mut b)] {
            for &x in &adj.blue[side] {
                for &w in &adj.blue[x] {
                    counts[w] += 1;
                    touched.push(w);
                }
            }
        }
        for z in intersect_sorted(&adj.blue[u1], &adj.blue[u2]) {
            for &w in &adj.blue[z] {
                c[w] += 1;
            }
        }
        touched.sort_unstable();
        touched.dedup();
        for &w in &touched {
            let valid = w != u1 && w != u2 && !g.has_edge(w, u1) && !g.has_edge(w, u2);
            if valid && a[w] * b[w] > c[w] {
                out.push(DangerousCherry { centre: w, u1, u2 });
            }
            a[w] = 0;
            b[w] = 0;
            c[w] = 0;
        }
        touched.clear();
    }
    out.sort_unstable();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub mono_triangles: Vec<[Vertex; 3]>,
    pub crrbb_count: u64,
    pub crbbbb_count: u64,
    pub dangerous_pairs: EdgeSubset,
    pub dangerous_k12: Vec<DangerousCherry>,
}

pub fn obstruction_report(phi: &TwoColouring) -> Result<ObstructionReport, ColouringError> {
    Ok(ObstructionReport {
        mono_triangles: monochromatic_triangles(phi)?,
        crrbb_count: count_crrbb(phi)?,
        crbbbb_count: count_crbbbb(phi)?,
        dangerous_pairs: dangerous_pairs(phi, false)?,
        dangerous_k12: dangerous_k12(phi)?,
    })
}

/// Outcome of the goodness test, naming the first failed condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Goodness {
    Good,
    MonochromaticTriangle { triangle: [Vertex; 3] },
    RedEdgeOutsideTriangles { edge: Edge },
    TooManyCrrbb { count: u64, limit: u64 },
}

impl Goodness {
    pub fn is_good(&self) -> bool {
        matches!(self, Goodness::Good)
    }
}

/// `t`-goodness: no monochromatic triangle, every edge outside all
/// triangles blue, and fewer than `t` copies of `C_rrbb`.
pub fn is_t_good(phi: &TwoColouring, t: u64) -> Result<Goodness, ColouringError> {
    if let Some(&triangle) = monochromatic_triangles(phi)?.first() {
        return Ok(Goodness::MonochromaticTriangle { triangle });
    }
    let g = phi.graph();
    for (e, c) in phi.coloured_edges() {
        if c == Colour::Red && g.common_neighbours(e.u(), e.v()).is_empty() {
            return Ok(Goodness::RedEdgeOutsideTriangles { edge: e });
        }
    }
    let count = count_crrbb(phi)?;
    if count >= t {
        return Ok(Goodness::TooManyCrrbb { count, limit: t });
    }
    Ok(Goodness::Good)
}

/// Good with no `C_rrbb` at all.
pub fn is_very_good(phi: &TwoColouring) -> Result<Goodness, ColouringError> {
    is_t_good(phi, 1)
}

/// Result of the exact triangle-free colouring search.
#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Found(TwoColouring),
    /// Every colouring has a monochromatic triangle.
    Impossible,
    /// The node budget ran out before the search finished.
    BudgetExhausted { nodes: u64 },
}

/// Backtracking search for a colouring without monochromatic triangles.
///
/// Edges in no triangle are coloured blue. The rest split into classes
/// linked by shared triangles, which are solved independently; within a
/// class the first edge is fixed red (colour symmetry) and the remaining
/// edges are branched on in decreasing order of triangle count, with
/// propagation whenever two edges of a triangle agree. `budget` bounds the
/// number of branching nodes.
pub fn find_triangle_free_colouring(g: &Graph, budget: u64) -> SearchOutcome {
    let tris = triangles(g);
    let m = g.edge_count();
    let tri_edges: Vec<[usize; 3]> = tris
        .iter()
        .map(|&[a, b, c]| {
            [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)]
                .map(|e| g.edge_index(e).expect("triangle edge exists"))
        })
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); m];
    for (t, es) in tri_edges.iter().enumerate() {
        for &e in es {
            incident[e].push(t);
        }
    }

    let mut search = Search {
        tri_edges: &tri_edges,
        incident: &incident,
        assign: vec![None; m],
        trail: Vec::new(),
        nodes: 0,
        budget,
    };
    for class in triangle_classes(m, &tri_edges) {
        let mut order = class;
        order.sort_by_key(|&e| (std::cmp::Reverse(incident[e].len()), e));
        // Classes share no triangle, so a lone assignment cannot conflict.
        let fresh = search.assign_and_propagate(order[0], Colour::Red);
        debug_assert!(fresh);
        match search.solve(&order) {
            Ok(true) => {}
            Ok(false) => return SearchOutcome::Impossible,
            Err(()) => return SearchOutcome::BudgetExhausted { nodes: search.nodes },
        }
    }
    let colours = search
        .assign
        .iter()
        .map(|c| Some(c.unwrap_or(Colour::Blue)))
        .collect();
    SearchOutcome::Found(TwoColouring::from_colours(g.clone(), colours))
}

/// Edge classes under "share a triangle", each listed in edge order.
fn triangle_classes(m: usize, tri_edges: &[[usize; 3]]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut in_triangle = vec![false; m];
    for es in tri_edges {
        for &e in es {
            in_triangle[e] = true;
        }
        let r0 = find(&mut parent, es[0]);
        for &e in &es[1..] {
            let r = find(&mut parent, e);
            parent[r] = r0;
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut roots = Vec::new();
    for e in (0..m).filter(|&e| in_triangle[e]) {
        let r = find(&mut parent, e);
        groups
            .entry(r)
            .or_insert_with(|| {
                roots.push(r);
                Vec::new()
            })
            .push(e);
    }
    roots.into_iter().map(|r| groups.remove(&r).unwrap()).collect()
}

struct Search<'a> {
    tri_edges: &'a [[usize; 3]],
    incident: &'a [Vec<usize>],
    assign: Vec<Option<Colour>>,
    trail: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    /// Assigns `e` and propagates forced colours; false on a conflict.
    fn assign_and_propagate(&mut self, e: usize, c: Colour) -> bool {
        let mut queue = vec![(e, c)];
        while let Some((e, c)) = queue.pop() {
            match self.assign[e] {
                Some(existing) if existing == c => continue,
                Some(_) => return false,
                None => {}
            }
            self.assign[e] = Some(c);
            self.trail.push(e);
            for &t in &self.incident[e] {
                let others: Vec<usize> = self.tri_edges[t].iter().copied().filter(|&x| x != e).collect();
                let (x, y) = (others[0], others[1]);
                match (self.assign[x], self.assign[y]) {
                    (Some(a), Some(b)) if a == c && b == c => return false,
                    (Some(a), None) if a == c => queue.push((y, c.flip())),
                    (None, Some(b)) if b == c => queue.push((x, c.flip())),
                    _ => {}
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let e = self.trail.pop().unwrap();
            self.assign[e] = None;
        }
    }

    /// `Ok(true)` when every edge of `order` is coloured consistently.
    fn solve(&mut self, order: &[usize]) -> Result<bool, ()> {
        let Some(&e) = order.iter().find(|&&e| self.assign[e].is_none()) else {
            return Ok(true);
        };
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        for c in [Colour::Blue, Colour::Red] {
            let mark = self.trail.len();
            if self.assign_and_propagate(e, c) && self.solve(order)? {
                return Ok(true);
            }
            self.undo_to(mark);
        }
        Ok(false)
    }
}
