//! Wedge statistics of a graph `S ⊆ K_n` and the completion-threshold
//! formula.
//!
//! `X₂(S)` counts wedges (copies of `K_{1,2}`) in `S`, `Π(S)` is the set of
//! pairs closing a wedge of `S` into a triangle, and `𝒳_S` is the family
//! of wedges of `K_n` that close a 4-cycle with a wedge of `S`. The Janson
//! parameters of `𝒳_S` are computed by exact counting.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::census::{choose2, count_copies, greedy_edge_disjoint_triangles, Pattern};
use crate::graph::{Edge, EdgeSubset, Graph, Vertex};

/// Default cap on `|𝒳_S|` for exact pair counting.
pub const DEFAULT_FAMILY_CAP: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("family of {size} wedges exceeds the cap of {cap}")]
    FamilyTooLarge { size: usize, cap: usize },
    #[error("count overflow")]
    Overflow,
    #[error("domain: {0}")]
    Domain(String),
}

/// A wedge `{x u1, x u2}` with apex `x` and `u1 < u2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Wedge {
    pub apex: Vertex,
    pub leaves: (Vertex, Vertex),
}

impl Wedge {
    pub fn new(apex: Vertex, a: Vertex, b: Vertex) -> Wedge {
        assert!(apex != a && apex != b && a != b, "wedge needs three distinct vertices");
        Wedge {
            apex,
            leaves: (a.min(b), a.max(b)),
        }
    }

    pub fn edges(&self) -> [Edge; 2] {
        [Edge::new(self.apex, self.leaves.0), Edge::new(self.apex, self.leaves.1)]
    }
}

/// `Σ_v C(d(v), 2)`.
pub fn x2_count(s: &EdgeSubset) -> u64 {
    let g = s.to_graph();
    (0..g.n()).map(|v| choose2(g.degree(v)) as u64).sum()
}

/// Pairs `{u1, u2}` of `K_n` with a common neighbour in `S`.
pub fn pi_set(s: &EdgeSubset) -> EdgeSubset {
    let g = s.to_graph();
    EdgeSubset::from_edges(g.n(), pi_pairs(&g).into_keys()).expect("pairs in range")
}

/// Each pair of `Π(S)` with its sorted apexes in `S`.
fn pi_pairs(g: &Graph) -> HashMap<Edge, Vec<Vertex>> {
    let mut out: HashMap<Edge, Vec<Vertex>> = HashMap::new();
    for w in 0..g.n() {
        let nb = g.neighbours(w);
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                out.entry(Edge::new(a, b)).or_default().push(w);
            }
        }
    }
    out
}

/// Wedges `{x u1, x u2}` of `K_n` such that `u1 w u2` is a wedge of `S` for
/// some `w ≠ x`, so that `u1 w u2 x` is a 4-cycle. Wedges using an edge of
/// `exclude` are dropped. Sorted.
pub fn xs_family(s: &EdgeSubset, exclude: Option<&EdgeSubset>) -> Vec<Wedge> {
    let g = s.to_graph();
    let n = g.n();
    let banned: HashSet<Edge> = exclude.map(|x| x.iter().collect()).unwrap_or_default();
    let mut out = Vec::new();
    for (pair, apexes) in pi_pairs(&g) {
        let (a, b) = pair.endpoints();
        for x in 0..n {
            if x == a || x == b {
                continue;
            }
            if apexes.len() == 1 && apexes[0] == x {
                continue;
            }
            let w = Wedge::new(x, a, b);
            if w.edges().iter().any(|e| banned.contains(e)) {
                continue;
            }
            out.push(w);
        }
    }
    out.sort_unstable();
    out
}

/// Ordered pairs of distinct family members sharing an edge, split by the
/// shape of their union.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapCounts {
    /// Union is a path with three edges.
    pub path: u64,
    /// Union is `K_{1,3}`.
    pub star: u64,
    /// Union is a triangle.
    pub triangle: u64,
}

impl OverlapCounts {
    pub fn total(&self) -> u64 {
        self.path + self.star + self.triangle
    }
}

/// Counts overlapping ordered pairs in `family` (assumed duplicate-free).
pub fn overlap_counts(family: &[Wedge]) -> Result<OverlapCounts, DensityError> {
    let members: HashSet<Wedge> = family.iter().copied().collect();
    let mut by_edge: HashMap<Edge, u64> = HashMap::new();
    let mut by_arm: HashMap<(Vertex, Vertex), u64> = HashMap::new();
    for w in family {
        for e in w.edges() {
            *by_edge.entry(e).or_default() += 1;
        }
        *by_arm.entry((w.apex, w.leaves.0)).or_default() += 1;
        *by_arm.entry((w.apex, w.leaves.1)).or_default() += 1;
    }
    // Two distinct wedges share at most one edge, so summing over edges
    // counts each overlapping pair once.
    let sharing = ordered_pairs(by_edge.values())?;
    let star = ordered_pairs(by_arm.values())?;
    let mut triangle = 0u64;
    for w in family {
        let (a, b) = w.leaves;
        for (apex, other) in [(a, b), (b, a)] {
            if members.contains(&Wedge::new(apex, w.apex, other)) {
                triangle += 1;
            }
        }
    }
    Ok(OverlapCounts {
        path: sharing - star - triangle,
        star,
        triangle,
    })
}

fn ordered_pairs<'a>(counts: impl Iterator<Item = &'a u64>) -> Result<u64, DensityError> {
    counts.into_iter().try_fold(0u64, |acc, &c| {
        c.checked_mul(c.saturating_sub(1))
            .and_then(|x| acc.checked_add(x))
            .ok_or(DensityError::Overflow)
    })
}

/// Wedge statistics of `S` and the Janson parameters of `𝒳_S`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub n: usize,
    pub p: f64,
    pub edges: usize,
    pub x2: u64,
    pub pi: EdgeSubset,
    pub xs_size: u64,
    pub overlaps: OverlapCounts,
    /// `|𝒳_S| p²`.
    pub mu: f64,
    /// Path-shaped pairs times `p³`.
    pub delta1: f64,
    /// Star-shaped pairs times `p³`.
    pub delta2: f64,
    /// `Δ₁ + Δ₂ + μ`.
    pub delta_total: f64,
    /// Triangle-shaped pairs times `p³`, kept apart from `delta_total`.
    pub delta_triangle: f64,
    /// `μ² / Δ` with `Δ = delta_total + delta_triangle`.
    pub mu_sq_over_delta: f64,
}

pub fn janson_params(s: &EdgeSubset, p: f64, cap: usize) -> Result<DensityReport, DensityError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(DensityError::Domain(format!("p = {p} is not in (0, 1)")));
    }
    let pi = pi_set(s);
    let family = xs_family(s, None);
    if family.len() > cap {
        return Err(DensityError::FamilyTooLarge {
            size: family.len(),
            cap,
        });
    }
    let overlaps = overlap_counts(&family)?;
    let p2 = p * p;
    let p3 = p2 * p;
    let mu = family.len() as f64 * p2;
    let delta1 = overlaps.path as f64 * p3;
    let delta2 = overlaps.star as f64 * p3;
    let delta_triangle = overlaps.triangle as f64 * p3;
    let delta_total = delta1 + delta2 + mu;
    let full = delta_total + delta_triangle;
    Ok(DensityReport {
        n: s.n(),
        p,
        edges: s.len(),
        x2: x2_count(s),
        pi,
        xs_size: family.len() as u64,
        overlaps,
        mu,
        delta1,
        delta2,
        delta_total,
        delta_triangle,
        mu_sq_over_delta: if full > 0.0 { mu * mu / full } else { 0.0 },
    })
}

/// `X₂(S) ≥ 3e(S)²/(2n)` for graphs with at least `2n` edges. Returns
/// `None` when `S` is too sparse for the bound to apply.
pub fn wedge_lower_bound_holds(s: &EdgeSubset) -> Option<bool> {
    let (n, e) = (s.n() as u128, s.len() as u128);
    if e < 2 * n {
        return None;
    }
    Some(2 * n * x2_count(s) as u128 >= 3 * e * e)
}

/// Instance check of `|Π(S)| ≥ X₂(S)/12`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiBoundCheck {
    pub pi: u64,
    pub x2: u64,
    pub k2_10_copies: u128,
    /// `n^11 p^18`.
    pub k2_10_limit: f64,
    /// Packing constant used in the edge-count hypothesis.
    pub theta: f64,
    /// `θ n³ p³ / 2`.
    pub edge_threshold: f64,
    pub hypotheses_hold: bool,
    /// `12 |Π(S)| ≥ X₂(S)`.
    pub bound_holds: bool,
}

impl PiBoundCheck {
    /// The bound fails on an instance meeting the hypotheses.
    pub fn is_counterexample(&self) -> bool {
        self.hypotheses_hold && !self.bound_holds
    }
}

/// `θ` estimated from a host: greedy edge-disjoint triangle packing size
/// over `n³p³`.
pub fn observed_theta(host: &Graph, p: f64) -> f64 {
    let packing = greedy_edge_disjoint_triangles(host, None).expect("no vertex order given").len() as f64;
    packing / (host.n() as f64 * p).powi(3)
}

pub fn pi_lower_bound_check(s: &EdgeSubset, p: f64, theta: f64) -> PiBoundCheck {
    let n = s.n() as f64;
    let g = s.to_graph();
    let k2_10 = Pattern::named("K2_10").expect("library pattern");
    let copies = count_copies(&g, &k2_10).expect("fits");
    let k2_10_limit = n.powi(11) * p.powi(18);
    let edge_threshold = theta * (n * p).powi(3) / 2.0;
    let pi = pi_set(s).len() as u64;
    let x2 = x2_count(s);
    PiBoundCheck {
        pi,
        x2,
        k2_10_copies: copies,
        k2_10_limit,
        theta,
        edge_threshold,
        hypotheses_hold: s.len() as f64 >= edge_threshold && (copies as f64) <= k2_10_limit,
        bound_holds: 12 * pi >= x2,
    }
}

/// Outcome of degree peeling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeelResult {
    pub remaining: EdgeSubset,
    /// Removed vertices in peeling order.
    pub removed: Vec<Vertex>,
    /// The degree bound at the final edge count.
    pub bound: f64,
}

/// `c·n·p / (ln(n²p) − ln t)`; infinite for `t = 0`.
pub fn peel_bound(n: usize, p: f64, c: f64, t: usize) -> f64 {
    if t == 0 {
        return f64::INFINITY;
    }
    let n = n as f64;
    c * n * p / ((n * n * p).ln() - (t as f64).ln())
}

/// Removes vertices of maximum degree (least label first) while the
/// maximum degree exceeds [`peel_bound`] at the current edge count.
/// Returns `None` once `n/2` vertices have gone.
pub fn peel_bounded_degree(t: &EdgeSubset, p: f64, c: f64) -> Result<Option<PeelResult>, DensityError> {
    let n = t.n();
    if t.is_empty() || (t.len() as f64) >= (n * n) as f64 * p {
        return Err(DensityError::Domain(format!(
            "need 1 <= e(T) < n^2 p, got e(T) = {} with n^2 p = {}",
            t.len(),
            (n * n) as f64 * p
        )));
    }
    if c <= 0.0 {
        return Err(DensityError::Domain(format!("c = {c} must be positive")));
    }
    let mut g = t.to_graph();
    let mut removed = Vec::new();
    loop {
        let bound = peel_bound(n, p, c, g.edge_count());
        let max = g.max_degree();
        if (max as f64) <= bound {
            return Ok(Some(PeelResult {
                remaining: g.to_edge_subset(),
                removed,
                bound,
            }));
        }
        if 2 * (removed.len() + 1) > n {
            return Ok(None);
        }
        let v = (0..n).find(|&v| g.degree(v) == max).expect("max degree attained");
        g = g.filter_edges(|e| !e.contains(v));
        removed.push(v);
    }
}

/// Which range of `p` the threshold formula is evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRegime {
    /// `p ≤ n^{-2/3}`.
    BelowRange,
    /// `n^{-2/3} < p < n^{-3/5}`: `n^{-3} p^{-7/2}`.
    Lower,
    /// Within the configured factor of `n^{-3/5}`.
    CriticalWindow,
    /// `p > n^{-3/5}`: `n^{-6} p^{-8}`.
    Upper,
    /// `p ≥ C n^{-1/2}`: `G1` is already Ramsey.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    /// The window is `[n^{-3/5}/f, f·n^{-3/5}]`.
    pub window_factor: f64,
    /// `C` in `p ≥ C n^{-1/2}`.
    pub zero_constant: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            window_factor: 2.0,
            zero_constant: 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub p: f64,
    pub regime: ThresholdRegime,
    /// Set only outside the window, zero and below-range regimes.
    pub value: Option<f64>,
    /// The branch formula on the side of `n^{-3/5}` containing `p`,
    /// reported in every regime.
    pub nominal: f64,
    /// `n^{-6} p^{-8}`.
    pub upper_formula: f64,
    /// `n^{-3} p^{-7/2}`.
    pub lower_formula: f64,
    pub critical_window: bool,
    pub zero: bool,
    pub below_range: bool,
}

pub fn completion_threshold(n: usize, p: f64, opts: &ThresholdOptions) -> Result<ThresholdReport, DensityError> {
    if n < 3 {
        return Err(DensityError::Domain(format!("n = {n} is below 3")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(DensityError::Domain(format!("p = {p} is not in (0, 1)")));
    }
    if opts.window_factor < 1.0 || opts.zero_constant <= 0.0 {
        return Err(DensityError::Domain("window factor must be at least 1 and C positive".into()));
    }
    let ln_n = (n as f64).ln();
    let ln_p = p.ln();
    let upper_formula = (-6.0 * ln_n - 8.0 * ln_p).exp();
    let lower_formula = (-3.0 * ln_n - 3.5 * ln_p).exp();
    let critical = (n as f64).powf(-0.6);
    let below_range = ln_p <= -2.0 / 3.0 * ln_n;
    let zero = p >= opts.zero_constant * (n as f64).powf(-0.5);
    let critical_window = p >= critical / opts.window_factor && p <= critical * opts.window_factor;
    let nominal = if p > critical { upper_formula } else { lower_formula };
    let regime = if below_range {
        ThresholdRegime::BelowRange
    } else if zero {
        ThresholdRegime::Zero
    } else if critical_window {
        ThresholdRegime::CriticalWindow
    } else if p > critical {
        ThresholdRegime::Upper
    } else {
        ThresholdRegime::Lower
    };
    let value = matches!(regime, ThresholdRegime::Upper | ThresholdRegime::Lower).then_some(nominal);
    Ok(ThresholdReport {
        n,
        p,
        regime,
        value,
        nominal,
        upper_formula,
        lower_formula,
        critical_window,
        zero,
        below_range,
    })
}
