//! Very good colourings of sparse collages by discharging.
//!
//! Every vertex starts with weight 5 and every edge with −3, so the total is
//! `5v − 3e`, positive whenever `e/v < 5/3`. Six redistribution stages move
//! all weight onto blocks; a positive block then has one edge (triangle) or
//! a pair of edges (`K4⁻`) that no `F0⁻` 4-cycle uses. Removing them,
//! colouring the rest recursively and extending gives a colouring with no
//! monochromatic triangle and no `C_rrbb`.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{enumerate_copies, k4s, triangles, Pattern};
use crate::collage::{blocks, maximal_collages, Block, Collage};
use crate::colouring::{is_very_good, Colour, ColouringError, Goodness, TwoColouring};
use crate::graph::{Edge, Graph, Vertex};

pub type Weight = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq, Serialize, Deserialize)]
pub enum DischargeError {
    /// The collage contains `K4`, `F2` or `F3`, so blocks may overlap.
    #[error("collage contains a copy of {pattern}")]
    ForbiddenSubgraph { pattern: String },
    #[error("edge {edge} lies in two blocks")]
    OverlappingBlocks { edge: Edge },
    #[error("edge {edge} has no endpoint in a block")]
    EdgeWithoutBlock { edge: Edge },
    /// A step the argument guarantees did not go through. `collage` is the
    /// offending instance in host labels.
    #[error("falsification: {claim} (instance with {} edges)", collage.len())]
    Falsified { claim: String, collage: Vec<Edge> },
    #[error("colouring: {0}")]
    Colouring(String),
}

impl From<ColouringError> for DischargeError {
    fn from(e: ColouringError) -> Self {
        DischargeError::Colouring(e.to_string())
    }
}

/// Weights on vertices, edges and blocks after one stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: u8,
    pub vertex_weights: Vec<Weight>,
    pub edge_weights: Vec<Weight>,
    pub block_weights: Vec<Weight>,
}

/// Result of the six discharging stages on one graph.
///
/// Vertices and edges are indexed by the graph the weights were computed
/// on; vertices outside its support carry no weight.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockWeights {
    pub blocks: Vec<Block>,
    pub weights: Vec<Weight>,
    pub stages: Vec<StageRecord>,
    pub vertices: usize,
    pub edges: usize,
}

impl BlockWeights {
    pub fn total(&self) -> Weight {
        self.weights.iter().copied().sum()
    }

    /// `5v − 3e`, the weight before redistribution.
    pub fn initial_total(&self) -> Weight {
        Weight::from_integer(5 * self.vertices as i64 - 3 * self.edges as i64)
    }

    pub fn is_conserved(&self) -> bool {
        self.total() == self.initial_total()
    }

    /// Index of the first block with positive weight.
    pub fn positive_block(&self) -> Option<usize> {
        self.weights.iter().position(|w| *w > Weight::zero())
    }

    pub fn weight_of(&self, block: &Block) -> Option<Weight> {
        self.blocks.iter().position(|b| b == block).map(|i| self.weights[i])
    }
}

/// Checks the absence of `K4`, `F2` and `F3`.
pub fn check_forbidden(g: &Graph) -> Result<(), DischargeError> {
    if !k4s(g).is_empty() {
        return Err(DischargeError::ForbiddenSubgraph { pattern: "K4".into() });
    }
    for name in ["F2", "F3"] {
        let p = Pattern::named(name).expect("library pattern");
        if !enumerate_copies(g, &p).expect("fits").is_empty() {
            return Err(DischargeError::ForbiddenSubgraph { pattern: name.into() });
        }
    }
    Ok(())
}

/// Runs the six stages on `g` and returns the block weights.
pub fn assign_block_weights(g: &Graph) -> Result<BlockWeights, DischargeError> {
    check_forbidden(g)?;
    let blocks = blocks(g);
    let n = g.n();
    let m = g.edge_count();
    let five = Weight::from_integer(5);
    let in_support: Vec<bool> = (0..n).map(|v| g.degree(v) > 0).collect();
    let mut vw: Vec<Weight> = (0..n).map(|v| if in_support[v] { five } else { Weight::zero() }).collect();
    let mut ew = vec![Weight::from_integer(-3); m];
    let mut bw = vec![Weight::zero(); blocks.len()];
    let mut stages = Vec::new();
    let mut record = |stage: u8, vw: &[Weight], ew: &[Weight], bw: &[Weight]| {
        stages.push(StageRecord {
            stage,
            vertex_weights: vw.to_vec(),
            edge_weights: ew.to_vec(),
            block_weights: bw.to_vec(),
        });
    };
    record(1, &vw, &ew, &bw);

    let mut block_of_edge: Vec<Option<usize>> = vec![None; m];
    let mut blocks_at: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (b, block) in blocks.iter().enumerate() {
        for e in block.edges() {
            let i = g.edge_index(e).expect("block edge in graph");
            if block_of_edge[i].is_some() {
                return Err(DischargeError::OverlappingBlocks { edge: e });
            }
            block_of_edge[i] = Some(b);
        }
        for v in block.vertices() {
            blocks_at[v].push(b);
        }
    }

    // Stage 2: a vertex in exactly one block gives it everything.
    for v in 0..n {
        if let [b] = blocks_at[v][..] {
            bw[b] += vw[v];
            vw[v] = Weight::zero();
        }
    }
    record(2, &vw, &ew, &bw);

    // Stage 3: a vertex in several blocks gives 5/2 to each of the two
    // earliest ones.
    for v in 0..n {
        if blocks_at[v].len() >= 2 {
            let half = vw[v] / 2;
            for &b in &blocks_at[v][..2] {
                bw[b] += half;
            }
            vw[v] = Weight::zero();
        }
    }
    record(3, &vw, &ew, &bw);

    // Stage 4: block edges give their weight to their block.
    for i in 0..m {
        if let Some(b) = block_of_edge[i] {
            bw[b] += ew[i];
            ew[i] = Weight::zero();
        }
    }
    record(4, &vw, &ew, &bw);

    // Stage 5: blockless vertices spread weight over incident edges.
    for v in 0..n {
        if in_support[v] && blocks_at[v].is_empty() {
            let share = vw[v] / g.degree(v) as i64;
            for &w in g.neighbours(v) {
                let i = g.edge_index(Edge::new(v, w)).expect("incident edge");
                ew[i] += share;
            }
            vw[v] = Weight::zero();
        }
    }
    record(5, &vw, &ew, &bw);

    // Stage 6: blockless edges pass weight to the blocks at their endpoints.
    for (i, e) in g.edges().iter().enumerate() {
        if block_of_edge[i].is_some() {
            continue;
        }
        let (a, b) = (&blocks_at[e.u()], &blocks_at[e.v()]);
        let sides: Vec<&Vec<usize>> = [a, b].into_iter().filter(|s| !s.is_empty()).collect();
        if sides.is_empty() {
            return Err(DischargeError::EdgeWithoutBlock { edge: *e });
        }
        let per_side = ew[i] / sides.len() as i64;
        for side in sides {
            let share = per_side / side.len() as i64;
            for &blk in side {
                bw[blk] += share;
            }
        }
        ew[i] = Weight::zero();
    }
    record(6, &vw, &ew, &bw);

    Ok(BlockWeights {
        blocks,
        weights: bw,
        stages,
        vertices: in_support.iter().filter(|&&s| s).count(),
        edges: m,
    })
}

/// Edges lying on the 4-cycle of some `F0⁻` copy.
pub fn f0_minus_cycle_edges(g: &Graph) -> HashSet<Edge> {
    let p = Pattern::named("F0_minus").expect("library pattern");
    let copies = enumerate_copies(g, &p).expect("fits");
    let mut out = HashSet::new();
    for m in &copies.maps {
        // u1 - u2 - w1 - u3 - u1.
        out.extend([
            Edge::new(m[0], m[1]),
            Edge::new(m[1], m[3]),
            Edge::new(m[3], m[2]),
            Edge::new(m[2], m[0]),
        ]);
    }
    out
}

/// The edges taken out of a positive block before recursing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Removal {
    /// Edge `e` of a triangle whose other edges are `others`.
    Triangle { e: Edge, others: [Edge; 2] },
    /// `e1 = x1y`, `f1 = x1z` removed from the `K4⁻` with `e2 = x2y`,
    /// `f2 = x2z` and `g = yz`.
    K4Minus { e1: Edge, f1: Edge, e2: Edge, f2: Edge, g: Edge },
}

impl Removal {
    pub fn removed(&self) -> Vec<Edge> {
        match *self {
            Removal::Triangle { e, .. } => vec![e],
            Removal::K4Minus { e1, f1, .. } => vec![e1, f1],
        }
    }

    fn map(&self, f: impl Fn(Edge) -> Edge) -> Removal {
        match *self {
            Removal::Triangle { e, others } => Removal::Triangle {
                e: f(e),
                others: others.map(&f),
            },
            Removal::K4Minus { e1, f1, e2, f2, g } => Removal::K4Minus {
                e1: f(e1),
                f1: f(f1),
                e2: f(e2),
                f2: f(f2),
                g: f(g),
            },
        }
    }
}

/// Edges of `block` that no `F0⁻` 4-cycle of `g` uses: one for a triangle,
/// a pair `{x_i y, x_i z}` for a `K4⁻`.
pub fn removable_edges(g: &Graph, block: &Block) -> Option<Removal> {
    let cycles = f0_minus_cycle_edges(g);
    match *block {
        Block::Triangle([a, b, c]) => {
            let es = [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)];
            (0..3).find(|&i| !cycles.contains(&es[i])).map(|i| Removal::Triangle {
                e: es[i],
                others: [es[(i + 1) % 3], es[(i + 2) % 3]],
            })
        }
        Block::K4Minus { x1, x2, y, z } => [(x1, x2), (x2, x1)].into_iter().find_map(|(xa, xb)| {
            let (e1, f1) = (Edge::new(xa, y), Edge::new(xa, z));
            (!cycles.contains(&e1) && !cycles.contains(&f1)).then(|| Removal::K4Minus {
                e1,
                f1,
                e2: Edge::new(xb, y),
                f2: Edge::new(xb, z),
                g: Edge::new(y, z),
            })
        }),
    }
}

/// One level of the recursion, in host labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DischargeStep {
    pub collage: Vec<Edge>,
    pub block: Block,
    pub block_weight: Weight,
    pub removal: Removal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VeryGoodColouring {
    pub colouring: TwoColouring,
    /// Recursion steps in the order they were taken.
    pub steps: Vec<DischargeStep>,
}

fn falsified(claim: &str, c: &Collage) -> DischargeError {
    DischargeError::Falsified {
        claim: claim.to_string(),
        collage: c.host_edges().edges().to_vec(),
    }
}

/// Very good colouring of a collage with every sub-collage sparser than
/// 5/3 and no dense 4-, 5- or 8-vertex subgraph.
///
/// Those conditions are the caller's to establish; this function verifies
/// its output and reports any failed step as [`DischargeError::Falsified`].
pub fn very_good_colouring(c: &Collage) -> Result<VeryGoodColouring, DischargeError> {
    check_forbidden(c.local())?;
    let host_n = c.host_n();
    let mut colours: HashMap<Edge, Colour> = HashMap::new();
    let mut steps: Vec<DischargeStep> = Vec::new();
    let mut stack = vec![c.clone()];
    while let Some(cur) = stack.pop() {
        let local = cur.local();
        if triangles(local).is_empty() {
            for e in cur.host_edges().iter() {
                colours.insert(e, Colour::Blue);
            }
            continue;
        }
        let weights = assign_block_weights(local).map_err(|err| match err {
            DischargeError::ForbiddenSubgraph { pattern } => DischargeError::Falsified {
                claim: format!("sub-collage contains {pattern}"),
                collage: cur.host_edges().edges().to_vec(),
            },
            other => other,
        })?;
        if !weights.is_conserved() {
            return Err(falsified("block weights do not sum to 5v - 3e", &cur));
        }
        let Some(bi) = weights.positive_block() else {
            return Err(falsified("no block has positive weight", &cur));
        };
        let block = weights.blocks[bi];
        let Some(removal) = removable_edges(local, &block) else {
            return Err(falsified("positive block has no removable edges", &cur));
        };
        let removal = removal.map(|e| cur.to_host(e));
        let removed: HashSet<Edge> = removal.removed().into_iter().collect();
        steps.push(DischargeStep {
            collage: cur.host_edges().edges().to_vec(),
            block: block.map(|v| cur.labels()[v]),
            block_weight: weights.weights[bi],
            removal,
        });
        let rest: Vec<Edge> = cur.host_edges().iter().filter(|e| !removed.contains(e)).collect();
        if rest.is_empty() {
            continue;
        }
        let rest_graph = Graph::from_edge_iter_dedup(host_n, rest).expect("edges in range");
        let mut subs = maximal_collages(&rest_graph);
        // Pop order follows least edge.
        subs.reverse();
        stack.extend(subs);
    }

    for step in steps.iter().rev() {
        extend(&mut colours, &step.removal);
    }

    let host = c.host_graph();
    let colouring = TwoColouring::from_fn(host, |e| colours[&e]);
    match is_very_good(&colouring)? {
        Goodness::Good => Ok(VeryGoodColouring { colouring, steps }),
        bad => Err(falsified(&format!("output is not very good: {bad:?}"), c)),
    }
}

fn extend(colours: &mut HashMap<Edge, Colour>, removal: &Removal) {
    use Colour::{Blue, Red};
    match *removal {
        Removal::Triangle { e, others } => {
            let both_blue = others.iter().all(|o| colours.get(o) == Some(&Blue));
            colours.insert(e, if both_blue { Red } else { Blue });
        }
        Removal::K4Minus { e1, f1, e2, f2, .. } => {
            // Cycle x1 - y - x2 - z - x1 runs e1, e2, f2, f1.
            let cycle = [Some(Red), colours.get(&e2).copied(), colours.get(&f2).copied(), Some(Blue)];
            let (c1, d1) = if is_rrbb(&cycle) { (Blue, Red) } else { (Red, Blue) };
            colours.insert(e1, c1);
            colours.insert(f1, d1);
        }
    }
}

/// Whether four colours in cycle order form two adjacent reds followed by
/// two adjacent blues, up to rotation.
fn is_rrbb(cycle: &[Option<Colour>; 4]) -> bool {
    use Colour::{Blue, Red};
    (0..4).any(|r| {
        let at = |i: usize| cycle[(r + i) % 4];
        at(0) == Some(Red) && at(1) == Some(Red) && at(2) == Some(Blue) && at(3) == Some(Blue)
    })
}

/// Very good colouring of every maximal collage of `g`, combined.
pub fn very_good_colouring_of_graph(g: &Graph) -> Result<TwoColouring, DischargeError> {
    let mut colours: HashMap<Edge, Colour> = HashMap::new();
    for c in maximal_collages(g) {
        let part = very_good_colouring(&c)?;
        colours.extend(part.colouring.coloured_edges());
    }
    Ok(TwoColouring::from_fn(g.clone(), |e| colours[&e]))
}

/// Stage audit: after stage 4 block edges are drained, after stage 5
/// blockless vertices are drained, after stage 6 everything is.
pub fn stages_drain(weights: &BlockWeights, g: &Graph) -> bool {
    let zero = Weight::zero();
    let stage = |k: u8| weights.stages.iter().find(|s| s.stage == k).expect("all stages recorded");
    let in_block: HashSet<Edge> = weights.blocks.iter().flat_map(|b| b.edges()).collect();
    let block_vertices: HashSet<Vertex> = weights.blocks.iter().flat_map(|b| b.vertices()).collect();
    let s4 = stage(4);
    let s5 = stage(5);
    let s6 = stage(6);
    let edges_ok = g
        .edges()
        .iter()
        .enumerate()
        .all(|(i, e)| !in_block.contains(e) || s4.edge_weights[i] == zero);
    let vertices_ok = (0..g.n()).all(|v| block_vertices.contains(&v) || s5.vertex_weights[v] == zero);
    let final_ok = s6.vertex_weights.iter().chain(&s6.edge_weights).all(|w| *w == zero);
    edges_ok && vertices_ok && final_ok
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::{count_crrbb, monochromatic_triangles};

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn single_triangle() {
        let w = assign_block_weights(&Graph::complete(3)).unwrap();
        assert_eq!(w.weights, vec![Weight::from_integer(6)]);
        assert_eq!(w.positive_block(), Some(0));
        assert!(stages_drain(&w, &Graph::complete(3)));
    }

    #[test]
    fn hanging_triangles_weights() {
        // X = 0 1 2 with triangles 0 3 4 and 1 5 6 hanging at two vertices.
        let two = graph(7, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (1, 5), (1, 6), (5, 6)]);
        let w = assign_block_weights(&two).unwrap();
        let x = Block::Triangle([0, 1, 2]);
        assert_eq!(w.weight_of(&x), Some(Weight::from_integer(1)));
        assert!(w.is_conserved());

        // Triangles at all three vertices of X.
        let three = graph(
            9,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (1, 5), (1, 6), (5, 6), (2, 7), (2, 8), (7, 8)],
        );
        let w = assign_block_weights(&three).unwrap();
        assert_eq!(w.weight_of(&x), Some(Weight::new(-3, 2)));
        assert!(w.is_conserved());
    }

    #[test]
    fn path_configuration_is_non_positive() {
        // X = v1 v2 v3 = 0 1 2; triangles at v1 (0 3 4) and v2 (1 5 6);
        // x = 2 reaches u1 = 3 via x1 = 7 and w1 = 5 via x2 = 8.
        let g = graph(
            9,
            &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4), (1, 5), (1, 6), (5, 6), (2, 7), (7, 3), (2, 8), (8, 5)],
        );
        let w = assign_block_weights(&g).unwrap();
        assert_eq!(w.weight_of(&Block::Triangle([0, 1, 2])), Some(Weight::zero()));
        assert!(w.is_conserved());
    }

    #[test]
    fn forbidden_subgraphs_rejected() {
        assert_eq!(
            assign_block_weights(&Graph::complete(4)),
            Err(DischargeError::ForbiddenSubgraph { pattern: "K4".into() })
        );
        let f2 = Pattern::named("F2").unwrap().graph;
        assert!(matches!(assign_block_weights(&f2), Err(DischargeError::ForbiddenSubgraph { .. })));
    }

    #[test]
    fn removable_edges_of_isolated_blocks() {
        let tri = Graph::complete(3);
        assert!(removable_edges(&tri, &blocks(&tri)[0]).is_some());
        let k4m = Pattern::named("K4_minus").unwrap().graph;
        let b = blocks(&k4m)[0];
        match removable_edges(&k4m, &b).unwrap() {
            Removal::K4Minus { e1, f1, .. } => {
                assert_eq!((e1, f1), (Edge::new(0, 2), Edge::new(0, 3)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn colours_small_collages() {
        for name in ["K3", "K4_minus", "F0_minus", "F1_minus"] {
            let g = Pattern::named(name).unwrap().graph;
            let c = Collage::from_graph(&g).unwrap();
            let out = very_good_colouring(&c).unwrap_or_else(|e| panic!("{name}: {e}"));
            let phi = &out.colouring;
            assert!(monochromatic_triangles(phi).unwrap().is_empty(), "{name}");
            assert_eq!(count_crrbb(phi).unwrap(), 0, "{name}");
        }
    }

    #[test]
    fn dense_inputs_rejected_up_front() {
        for name in ["F0", "F1"] {
            let c = Collage::from_graph(&Pattern::named(name).unwrap().graph).unwrap();
            assert!(matches!(very_good_colouring(&c), Err(DischargeError::ForbiddenSubgraph { .. })), "{name}");
        }
    }

    #[test]
    fn k4_minus_rule_avoids_crrbb() {
        use Colour::{Blue, Red};
        assert!(is_rrbb(&[Some(Red), Some(Red), Some(Blue), Some(Blue)]));
        assert!(is_rrbb(&[Some(Blue), Some(Red), Some(Red), Some(Blue)]));
        assert!(!is_rrbb(&[Some(Red), Some(Blue), Some(Red), Some(Blue)]));
        let mut colours = HashMap::new();
        let (e1, f1, e2, f2, g) = (Edge::new(0, 2), Edge::new(0, 3), Edge::new(1, 2), Edge::new(1, 3), Edge::new(2, 3));
        colours.insert(e2, Red);
        colours.insert(f2, Blue);
        colours.insert(g, Red);
        extend(&mut colours, &Removal::K4Minus { e1, f1, e2, f2, g });
        assert_eq!((colours[&e1], colours[&f1]), (Blue, Red));
    }
}
