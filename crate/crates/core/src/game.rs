//! The two-round game and its online variant.
//!
//! Round one colours `G1` without monochromatic triangles. Round two
//! reveals `G2` and extends greedily: each new edge is blue unless that
//! closes a blue triangle, in which case it is red. The extension fails at
//! the first edge that closes triangles in both colours.

use std::collections::HashSet;

use rand::seq::index;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{dense_pair_violations, triangles};
use crate::collage::{density_check, maximal_collages, Collage, CollageError, WellBehavedOptions};
use crate::colouring::{
    find_triangle_free_colouring, monochromatic_triangles, obstruction_report, Colour, ColouringError, SearchOutcome,
    TwoColouring,
};
use crate::discharge::{very_good_colouring, DischargeError};
use crate::graph::{decode_pair_indices, sample_gnp, Edge, Graph, GraphError, RngSpec, Vertex};

pub const DEFAULT_SEARCH_BUDGET: u64 = 2_000_000;

#[derive(Debug, Error)]
pub enum GameError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error(transparent)]
    Collage(#[from] CollageError),
    #[error(transparent)]
    Discharge(#[from] DischargeError),
    #[error("first-round colouring has a monochromatic triangle {0:?}")]
    ImproperStart([Vertex; 3]),
    #[error("arrival order: {0}")]
    BadOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyVariant {
    /// Very good colourings on collages the discharging argument covers,
    /// triangle-free search elsewhere.
    GoodColouring,
    /// Triangle-free search on the whole graph.
    NaiveTriangleFree,
    /// The greedy extension rule applied to `G1` itself, in random order.
    AllBlueGreedy,
}

impl std::str::FromStr for StrategyVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.replace('-', "_").as_str() {
            "good_colouring" | "good" => Ok(StrategyVariant::GoodColouring),
            "naive_triangle_free" | "naive" => Ok(StrategyVariant::NaiveTriangleFree),
            "all_blue_greedy" | "greedy" => Ok(StrategyVariant::AllBlueGreedy),
            other => Err(format!("unknown strategy {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategySpec {
    pub variant: StrategyVariant,
    /// Node budget for each triangle-free search.
    pub search_budget: u64,
    /// Recolour edges in no triangle blue after a search.
    pub recolour_blue: bool,
    #[serde(default)]
    pub well_behaved: WellBehavedOptions,
}

impl StrategySpec {
    pub fn new(variant: StrategyVariant, search_budget: u64) -> Result<StrategySpec, GameError> {
        if search_budget == 0 {
            return Err(GameError::InvalidParameter("search budget must be positive".into()));
        }
        Ok(StrategySpec {
            variant,
            search_budget,
            recolour_blue: true,
            well_behaved: WellBehavedOptions::default(),
        })
    }
}

impl Default for StrategySpec {
    fn default() -> Self {
        StrategySpec::new(StrategyVariant::GoodColouring, DEFAULT_SEARCH_BUDGET).expect("valid default")
    }
}

/// How round one failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FirstRoundFailure {
    /// A collage with no triangle-free colouring.
    Ramsey { collage: Vec<Edge> },
    /// The search gave up; the collage may or may not be Ramsey.
    BudgetExhausted { collage: Vec<Edge>, nodes: u64 },
    /// The greedy strategy closed a red triangle.
    Greedy { edge: Edge, red_triangle: [Vertex; 3] },
}

/// How many collages went each way in round one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routing {
    pub triangle_free: usize,
    pub discharged: usize,
    pub searched: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum FirstRound {
    Coloured { colouring: TwoColouring, routing: Routing },
    Failed(FirstRoundFailure),
}

/// Colours `g` for round one. `rng` is only drawn from by the greedy
/// variant.
pub fn first_round_colouring(g: &Graph, strategy: &StrategySpec, rng: &RngSpec) -> Result<FirstRound, GameError> {
    match strategy.variant {
        StrategyVariant::GoodColouring => good_colouring(g, strategy),
        StrategyVariant::NaiveTriangleFree => {
            let edges = g.edges().to_vec();
            Ok(match searched(g, &edges, strategy)? {
                Ok(colouring) => FirstRound::Coloured {
                    colouring,
                    routing: Routing {
                        searched: 1,
                        ..Routing::default()
                    },
                },
                Err(f) => FirstRound::Failed(f),
            })
        }
        StrategyVariant::AllBlueGreedy => {
            let mut order = g.edges().to_vec();
            order.shuffle(&mut rng.rng());
            let mut state = GreedyState::new(g.n());
            for &e in &order {
                if let Err((edge, red_triangle, _)) = state.colour_next(e) {
                    return Ok(FirstRound::Failed(FirstRoundFailure::Greedy { edge, red_triangle }));
                }
            }
            Ok(FirstRound::Coloured {
                colouring: state.to_colouring(g.clone()),
                routing: Routing::default(),
            })
        }
    }
}

fn good_colouring(g: &Graph, strategy: &StrategySpec) -> Result<FirstRound, GameError> {
    let mut colours: Vec<Option<Colour>> = vec![None; g.edge_count()];
    let mut routing = Routing::default();
    for c in maximal_collages(g) {
        let part: Vec<(Edge, Colour)> = if triangles(c.local()).is_empty() {
            routing.triangle_free += 1;
            c.host_edges().iter().map(|e| (e, Colour::Blue)).collect()
        } else if discharge_applies(&c, &strategy.well_behaved)? {
            routing.discharged += 1;
            very_good_colouring(&c)?.colouring.coloured_edges().collect()
        } else {
            routing.searched += 1;
            match searched(c.local(), c.local().edges(), strategy)? {
                Ok(local) => local.coloured_edges().map(|(e, col)| (c.to_host(e), col)).collect(),
                Err(f) => return Ok(FirstRound::Failed(relabel_failure(f, &c))),
            }
        };
        for (e, col) in part {
            colours[g.edge_index(e).expect("collage edge in host")] = Some(col);
        }
    }
    Ok(FirstRound::Coloured {
        colouring: TwoColouring::from_colours(g.clone(), colours),
        routing,
    })
}

/// Density below 5/3 on every sub-collage and no dense 4-, 5- or 8-vertex
/// subgraph. The size bound is not required.
pub fn discharge_applies(c: &Collage, opts: &WellBehavedOptions) -> Result<bool, GameError> {
    if !density_check(c, opts)?.passed() {
        return Ok(false);
    }
    Ok(dense_pair_violations(c.local()).map_err(CollageError::from)?.is_empty())
}

fn relabel_failure(f: FirstRoundFailure, c: &Collage) -> FirstRoundFailure {
    let host = |edges: Vec<Edge>| edges.into_iter().map(|e| c.to_host(e)).collect();
    match f {
        FirstRoundFailure::Ramsey { collage } => FirstRoundFailure::Ramsey { collage: host(collage) },
        FirstRoundFailure::BudgetExhausted { collage, nodes } => FirstRoundFailure::BudgetExhausted {
            collage: host(collage),
            nodes,
        },
        other => other,
    }
}

fn searched(
    g: &Graph,
    edges: &[Edge],
    strategy: &StrategySpec,
) -> Result<Result<TwoColouring, FirstRoundFailure>, GameError> {
    Ok(match find_triangle_free_colouring(g, strategy.search_budget) {
        SearchOutcome::Found(phi) => Ok(if strategy.recolour_blue { recolour_blue(phi) } else { phi }),
        SearchOutcome::Impossible => Err(FirstRoundFailure::Ramsey { collage: edges.to_vec() }),
        SearchOutcome::BudgetExhausted { nodes } => Err(FirstRoundFailure::BudgetExhausted {
            collage: edges.to_vec(),
            nodes,
        }),
    })
}

fn recolour_blue(phi: TwoColouring) -> TwoColouring {
    let in_triangle: HashSet<Edge> = triangles(phi.graph())
        .into_iter()
        .flat_map(|[a, b, c]| [Edge::new(a, b), Edge::new(a, c), Edge::new(b, c)])
        .collect();
    let g = phi.graph().clone();
    TwoColouring::from_fn(g, |e| {
        if in_triangle.contains(&e) {
            phi.get(e).expect("complete")
        } else {
            Colour::Blue
        }
    })
}

/// Red and blue adjacency as bit rows, for constant-time triangle closing
/// tests.
struct GreedyState {
    n: usize,
    words: usize,
    red: Vec<u64>,
    blue: Vec<u64>,
    decided: Vec<(Edge, Colour)>,
}

impl GreedyState {
    fn new(n: usize) -> GreedyState {
        let words = n.div_ceil(64).max(1);
        GreedyState {
            n,
            words,
            red: vec![0; n * words],
            blue: vec![0; n * words],
            decided: Vec::new(),
        }
    }

    fn from_colouring(phi: &TwoColouring) -> GreedyState {
        let mut s = GreedyState::new(phi.n());
        for (e, c) in phi.coloured_edges() {
            s.set(e, c);
        }
        s
    }

    fn set(&mut self, e: Edge, c: Colour) {
        let rows = match c {
            Colour::Red => &mut self.red,
            Colour::Blue => &mut self.blue,
        };
        let (u, v) = e.endpoints();
        rows[u * self.words + v / 64] |= 1 << (v % 64);
        rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    /// A vertex joined to both ends of `e` in colour `c`.
    fn common(&self, e: Edge, c: Colour) -> Option<Vertex> {
        let rows = match c {
            Colour::Red => &self.red,
            Colour::Blue => &self.blue,
        };
        let (u, v) = e.endpoints();
        let (ru, rv) = (&rows[u * self.words..][..self.words], &rows[v * self.words..][..self.words]);
        ru.iter().zip(rv).enumerate().find_map(|(i, (a, b))| {
            let both = a & b;
            (both != 0).then(|| i * 64 + both.trailing_zeros() as usize)
        })
    }

    /// Applies the greedy rule to `e`. On failure returns the edge, the red
    /// triangle it would close and the apex of the blue one.
    fn colour_next(&mut self, e: Edge) -> Result<Colour, (Edge, [Vertex; 3], Vertex)> {
        let colour = match self.common(e, Colour::Blue) {
            None => Colour::Blue,
            Some(blue_apex) => {
                if let Some(red_apex) = self.common(e, Colour::Red) {
                    let mut t = [e.u(), e.v(), red_apex];
                    t.sort_unstable();
                    return Err((e, t, blue_apex));
                }
                Colour::Red
            }
        };
        self.set(e, colour);
        self.decided.push((e, colour));
        Ok(colour)
    }

    fn to_colouring(&self, g: Graph) -> TwoColouring {
        let words = self.words;
        TwoColouring::from_fn(g, |e| {
            let (u, v) = e.endpoints();
            if self.red[u * words + v / 64] >> (v % 64) & 1 == 1 {
                Colour::Red
            } else {
                Colour::Blue
            }
        })
    }
}

/// A failed extension: `edge` closes the blue triangle through
/// `blue_apex`, so it must be red, and red closes `red_triangle`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionFailure {
    /// Index of `edge` in the arrival order.
    pub position: usize,
    pub edge: Edge,
    pub red_triangle: [Vertex; 3],
    pub blue_apex: Vertex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extension {
    /// Colours chosen for the new edges, in arrival order.
    pub decisions: Vec<Colour>,
    pub result: Result<TwoColouring, ExtensionFailure>,
}

/// Extends `phi1` to `g1 ∪ g2` greedily along `order`, which must list
/// `E(g2) \ E(g1)` exactly once each.
pub fn greedy_extend(g1: &Graph, phi1: &TwoColouring, g2: &Graph, order: &[Edge]) -> Result<Extension, GameError> {
    phi1.require_complete()?;
    if phi1.graph() != g1 {
        return Err(GameError::BadOrder("colouring is not on the first-round graph".into()));
    }
    if let Some(&t) = monochromatic_triangles(phi1)?.first() {
        return Err(GameError::ImproperStart(t));
    }
    let fresh: HashSet<Edge> = g2.edges_not_in(g1).collect();
    let listed: HashSet<Edge> = order.iter().copied().collect();
    if listed.len() != order.len() || listed != fresh {
        return Err(GameError::BadOrder("not a permutation of the new edges".into()));
    }
    let union = g1.union(g2)?;
    let mut state = GreedyState::from_colouring(phi1);
    for (position, &e) in order.iter().enumerate() {
        if let Err((edge, red_triangle, blue_apex)) = state.colour_next(e) {
            return Ok(Extension {
                decisions: state.decided.iter().map(|&(_, c)| c).collect(),
                result: Err(ExtensionFailure {
                    position,
                    edge,
                    red_triangle,
                    blue_apex,
                }),
            });
        }
    }
    Ok(Extension {
        decisions: state.decided.iter().map(|&(_, c)| c).collect(),
        result: Ok(state.to_colouring(union)),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalMode {
    #[default]
    Random,
    Lex,
}

impl std::str::FromStr for ArrivalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "random" => Ok(ArrivalMode::Random),
            "lex" => Ok(ArrivalMode::Lex),
            other => Err(format!("unknown arrival mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub arrival: ArrivalMode,
}

/// Seeds for one trial. The four streams used are `4·trial_stream + k` for
/// `k < 4`, so distinct trial streams below `2^62` never collide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub master_seed: u64,
    pub trial_stream: u64,
}

impl TrialSeeds {
    pub fn new(master_seed: u64, trial_stream: u64) -> TrialSeeds {
        TrialSeeds {
            master_seed,
            trial_stream,
        }
    }

    pub fn first_graph(&self) -> RngSpec {
        self.stream(0)
    }

    pub fn second_graph(&self) -> RngSpec {
        self.stream(1)
    }

    pub fn arrival(&self) -> RngSpec {
        self.stream(2)
    }

    pub fn strategy(&self) -> RngSpec {
        self.stream(3)
    }

    fn stream(&self, k: u64) -> RngSpec {
        RngSpec::new(self.master_seed, self.trial_stream * 4 + k)
    }
}

/// Obstruction counts of the round-one colouring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundOneStats {
    pub crrbb: u64,
    pub crbbbb: u64,
    pub dangerous_pairs: u64,
    pub dangerous_k12: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum GameOutcome {
    Success,
    Failure(ExtensionFailure),
    FirstRoundFailure(FirstRoundFailure),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameTranscript {
    pub params: GameParams,
    pub strategy: StrategySpec,
    pub seeds: TrialSeeds,
    pub g1: Graph,
    pub phi1: Option<TwoColouring>,
    pub g2: Graph,
    /// New edges of `G2` in arrival order.
    pub arrival_order: Vec<Edge>,
    /// Greedy decisions; shorter than the order after a failure.
    pub decisions: Vec<Colour>,
    pub round_one: Option<RoundOneStats>,
    pub routing: Option<Routing>,
    pub outcome: GameOutcome,
}

impl GameTranscript {
    pub fn succeeded(&self) -> bool {
        self.outcome == GameOutcome::Success
    }
}

fn check_probability(name: &str, x: f64) -> Result<(), GameError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(GameError::InvalidParameter(format!("{name} = {x} is not in [0, 1]")))
    }
}

pub fn round_one_stats(phi: &TwoColouring) -> Result<RoundOneStats, GameError> {
    let r = obstruction_report(phi)?;
    Ok(RoundOneStats {
        crrbb: r.crrbb_count,
        crbbbb: r.crbbbb_count,
        dangerous_pairs: r.dangerous_pairs.len() as u64,
        dangerous_k12: r.dangerous_k12.len() as u64,
    })
}

/// Plays one game: `G1 ~ G(n, p)`, `G2 ~ G(n, q)` on separate streams.
pub fn two_round_game(
    params: &GameParams,
    strategy: &StrategySpec,
    seeds: &TrialSeeds,
) -> Result<GameTranscript, GameError> {
    check_probability("p", params.p)?;
    check_probability("q", params.q)?;
    let g1 = sample_gnp(params.n, params.p, &seeds.first_graph())?;
    let g2 = sample_gnp(params.n, params.q, &seeds.second_graph())?;
    let mut order: Vec<Edge> = g2.edges_not_in(&g1).collect();
    if params.arrival == ArrivalMode::Random {
        order.shuffle(&mut seeds.arrival().rng());
    }
    let mut t = GameTranscript {
        params: *params,
        strategy: *strategy,
        seeds: *seeds,
        g1,
        phi1: None,
        g2,
        arrival_order: order,
        decisions: Vec::new(),
        round_one: None,
        routing: None,
        outcome: GameOutcome::Success,
    };
    let (phi1, routing) = match first_round_colouring(&t.g1, strategy, &seeds.strategy())? {
        FirstRound::Coloured { colouring, routing } => (colouring, routing),
        FirstRound::Failed(f) => {
            t.outcome = GameOutcome::FirstRoundFailure(f);
            return Ok(t);
        }
    };
    t.round_one = Some(round_one_stats(&phi1)?);
    t.routing = Some(routing);
    let ext = greedy_extend(&t.g1, &phi1, &t.g2, &t.arrival_order)?;
    t.decisions = ext.decisions;
    if let Err(f) = ext.result {
        t.outcome = GameOutcome::Failure(f);
    }
    t.phi1 = Some(phi1);
    Ok(t)
}

/// What a transcript check found.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayReport {
    /// Replaying from the seeds gives the same transcript.
    pub reproduced: bool,
    /// Problems found when re-checking the stored decisions.
    pub problems: Vec<String>,
}

impl ReplayReport {
    pub fn ok(&self) -> bool {
        self.reproduced && self.problems.is_empty()
    }
}

/// Re-plays a transcript from its seeds and re-checks its stored content.
pub fn replay_transcript(t: &GameTranscript) -> Result<ReplayReport, GameError> {
    let again = two_round_game(&t.params, &t.strategy, &t.seeds)?;
    Ok(ReplayReport {
        reproduced: &again == t,
        problems: verify_transcript(t),
    })
}

/// Checks the stored decisions and witness without using the seeds.
pub fn verify_transcript(t: &GameTranscript) -> Vec<String> {
    let mut problems = Vec::new();
    let Some(phi1) = &t.phi1 else {
        if !matches!(t.outcome, GameOutcome::FirstRoundFailure(_)) {
            problems.push("no first-round colouring recorded".into());
        }
        return problems;
    };
    match greedy_extend(&t.g1, phi1, &t.g2, &t.arrival_order) {
        Err(e) => problems.push(format!("extension rejected: {e}")),
        Ok(ext) => {
            if ext.decisions != t.decisions {
                problems.push("decisions differ from the greedy rule".into());
            }
            let outcome = match ext.result {
                Ok(_) => GameOutcome::Success,
                Err(f) => GameOutcome::Failure(f),
            };
            if outcome != t.outcome {
                problems.push("outcome differs from the greedy rule".into());
            }
        }
    }
    if let GameOutcome::Failure(f) = &t.outcome {
        if let Err(p) = check_failure_witness(phi1, &t.arrival_order, &t.decisions, f) {
            problems.push(p);
        }
    }
    problems
}

/// Confirms that the failing edge closes a blue triangle and a red one in
/// the colouring reached just before it.
pub fn check_failure_witness(
    phi1: &TwoColouring,
    order: &[Edge],
    decisions: &[Colour],
    f: &ExtensionFailure,
) -> Result<(), String> {
    if order.get(f.position) != Some(&f.edge) || decisions.len() != f.position {
        return Err("failure position does not match the arrival order".into());
    }
    let mut coloured: std::collections::HashMap<Edge, Colour> = phi1.coloured_edges().collect();
    coloured.extend(order.iter().copied().zip(decisions.iter().copied()));
    let colour_of = |a: Vertex, b: Vertex| coloured.get(&Edge::new(a, b)).copied();
    let (u, v) = f.edge.endpoints();
    let w = f.blue_apex;
    if colour_of(u, w) != Some(Colour::Blue) || colour_of(v, w) != Some(Colour::Blue) {
        return Err(format!("no blue triangle through {} and {w}", f.edge));
    }
    let t = f.red_triangle;
    if !t.contains(&u) || !t.contains(&v) {
        return Err("red triangle misses the failing edge".into());
    }
    let x = t.iter().copied().find(|&x| x != u && x != v).expect("three vertices");
    if colour_of(u, x) != Some(Colour::Red) || colour_of(v, x) != Some(Colour::Red) {
        return Err(format!("no red triangle through {} and {x}", f.edge));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnlineResult {
    /// 1-based index of the edge that forced a monochromatic triangle, or
    /// the budget when none did.
    pub rounds: usize,
    pub failed: bool,
}

/// Feeds `budget` uniformly random distinct edges of `K_n` one at a time,
/// colouring each with the greedy rule.
pub fn online_game(n: usize, budget: usize, rng: &RngSpec) -> Result<OnlineResult, GameError> {
    let total = n * n.saturating_sub(1) / 2;
    if budget > total {
        return Err(GameError::InvalidParameter(format!("budget {budget} exceeds {total} pairs")));
    }
    let mut r = rng.rng();
    let mut picks = index::sample(&mut r, total, budget).into_vec();
    picks.sort_unstable();
    let mut edges = decode_pair_indices(n, &picks);
    edges.shuffle(&mut r);
    online_game_with_order(n, &edges)
}

/// The online game along a fixed edge order.
pub fn online_game_with_order(n: usize, edges: &[Edge]) -> Result<OnlineResult, GameError> {
    let mut state = GreedyState::new(n);
    if let Some(e) = edges.iter().find(|e| e.v() >= state.n) {
        return Err(GraphError::VertexOutOfRange { vertex: e.v(), n }.into());
    }
    for (i, &e) in edges.iter().enumerate() {
        if state.colour_next(e).is_err() {
            return Ok(OnlineResult {
                rounds: i + 1,
                failed: true,
            });
        }
    }
    Ok(OnlineResult {
        rounds: edges.len(),
        failed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::Pattern;
    use crate::colouring::count_crrbb;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    #[test]
    fn triangle_free_graph_all_blue() {
        let g = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        for variant in [
            StrategyVariant::GoodColouring,
            StrategyVariant::NaiveTriangleFree,
            StrategyVariant::AllBlueGreedy,
        ] {
            let s = StrategySpec::new(variant, 1000).unwrap();
            match first_round_colouring(&g, &s, &RngSpec::new(1, 1)).unwrap() {
                FirstRound::Coloured { colouring, .. } => {
                    assert!(colouring.coloured_edges().all(|(_, c)| c == Colour::Blue));
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn triangle_plus_f0_minus() {
        let f0m = Pattern::named("F0_minus").unwrap().graph;
        let mut edges: Vec<(usize, usize)> = vec![(0, 1), (0, 2), (1, 2)];
        edges.extend(f0m.edges().iter().map(|e| (e.u() + 3, e.v() + 3)));
        let g = graph(9, &edges);
        let FirstRound::Coloured { colouring, routing } =
            first_round_colouring(&g, &StrategySpec::default(), &RngSpec::new(0, 0)).unwrap()
        else {
            panic!("failed");
        };
        assert_eq!(routing.discharged, 2);
        assert!(monochromatic_triangles(&colouring).unwrap().is_empty());
        assert_eq!(count_crrbb(&colouring).unwrap(), 0);
    }

    #[test]
    fn k6_is_ramsey() {
        let s = StrategySpec::default();
        match first_round_colouring(&Graph::complete(6), &s, &RngSpec::new(0, 0)).unwrap() {
            FirstRound::Failed(FirstRoundFailure::Ramsey { collage }) => assert_eq!(collage.len(), 15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn single_new_edge_is_blue() {
        let g1 = graph(4, &[(0, 1)]);
        let phi1 = TwoColouring::monochromatic(g1.clone(), Colour::Blue);
        let g2 = graph(4, &[(2, 3)]);
        let ext = greedy_extend(&g1, &phi1, &g2, &[Edge::new(2, 3)]).unwrap();
        assert_eq!(ext.decisions, vec![Colour::Blue]);
        assert!(ext.result.is_ok());
    }

    #[test]
    fn splitting_diagonal_of_crrbb_fails() {
        // 4-cycle 0-1-2-3 with 01, 12 red and 23, 30 blue; the diagonal 02
        // closes blue 0-3-2 and red 0-1-2.
        let g1 = graph(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]);
        let phi1 = TwoColouring::from_fn(g1.clone(), |e| {
            if e == Edge::new(0, 1) || e == Edge::new(1, 2) {
                Colour::Red
            } else {
                Colour::Blue
            }
        });
        let g2 = graph(4, &[(0, 2)]);
        let ext = greedy_extend(&g1, &phi1, &g2, &[Edge::new(0, 2)]).unwrap();
        let f = ext.result.unwrap_err();
        assert_eq!((f.edge, f.red_triangle, f.blue_apex), (Edge::new(0, 2), [0, 1, 2], 3));
        check_failure_witness(&phi1, &[Edge::new(0, 2)], &ext.decisions, &f).unwrap();
    }

    #[test]
    fn bad_orders_rejected() {
        let g1 = graph(4, &[(0, 1)]);
        let phi1 = TwoColouring::monochromatic(g1.clone(), Colour::Blue);
        let g2 = graph(4, &[(2, 3), (1, 2)]);
        assert!(greedy_extend(&g1, &phi1, &g2, &[Edge::new(2, 3)]).is_err());
        assert!(greedy_extend(&g1, &phi1, &g2, &[Edge::new(2, 3), Edge::new(2, 3)]).is_err());
    }

    #[test]
    fn q_zero_succeeds() {
        let params = GameParams {
            n: 40,
            p: 0.1,
            q: 0.0,
            arrival: ArrivalMode::Random,
        };
        for s in 0..10 {
            let t = two_round_game(&params, &StrategySpec::default(), &TrialSeeds::new(5, s)).unwrap();
            if !matches!(t.outcome, GameOutcome::FirstRoundFailure(_)) {
                assert!(t.succeeded());
            }
        }
    }

    #[test]
    fn transcripts_replay() {
        let params = GameParams {
            n: 60,
            p: 0.08,
            q: 0.05,
            arrival: ArrivalMode::Random,
        };
        for s in 0..5 {
            let t = two_round_game(&params, &StrategySpec::default(), &TrialSeeds::new(9, s)).unwrap();
            let json = serde_json::to_string(&t).unwrap();
            let back: GameTranscript = serde_json::from_str(&json).unwrap();
            assert_eq!(back, t);
            let r = replay_transcript(&back).unwrap();
            assert!(r.ok(), "{r:?}");
        }
    }

    #[test]
    fn online_k4_fails_only_at_last_edge() {
        let all: Vec<Edge> = Graph::complete(4).edges().to_vec();
        let mut idx: Vec<usize> = (0..6).collect();
        let mut fails = 0;
        permute(&mut idx, 0, &mut |perm| {
            let order: Vec<Edge> = perm.iter().map(|&i| all[i]).collect();
            let r = online_game_with_order(4, &order).unwrap();
            if r.failed {
                assert_eq!(r.rounds, 6);
                fails += 1;
            }
        });
        assert!(fails > 0);
    }

    fn permute(xs: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == xs.len() {
            f(xs);
            return;
        }
        for i in k..xs.len() {
            xs.swap(k, i);
            permute(xs, k + 1, f);
            xs.swap(k, i);
        }
    }

    #[test]
    fn online_single_edge_survives() {
        let r = online_game(10, 1, &RngSpec::new(0, 0)).unwrap();
        assert_eq!(r, OnlineResult { rounds: 1, failed: false });
    }
}
