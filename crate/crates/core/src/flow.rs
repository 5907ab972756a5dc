//! Exact densest subgraph, `max e(S)/|S|`.
//!
//! Small graphs are scanned exhaustively. Larger ones use Dinkelbach
//! iteration: for a candidate ratio `a/b`, maximise `b·e(S) − a·|S|` as a
//! maximum-weight closure (edge nodes need both endpoints), solved by a
//! Dinic min cut.

use num_rational::Ratio;

use crate::census::max_density_by_scan;
use crate::graph::{Graph, Vertex};

const SCAN_LIMIT: usize = 20;

/// Maximum density over nonempty vertex subsets, with a subset attaining it.
/// The empty graph on zero vertices has density 0.
pub fn densest_subgraph(g: &Graph) -> (Ratio<i64>, Vec<Vertex>) {
    if g.n() <= SCAN_LIMIT {
        return max_density_by_scan(g);
    }
    densest_by_flow(g)
}

fn densest_by_flow(g: &Graph) -> (Ratio<i64>, Vec<Vertex>) {
    let support = g.support();
    if support.is_empty() {
        return (Ratio::from_integer(0), vec![0]);
    }
    let mut best_set = support;
    let mut best = Ratio::new(g.edge_count() as i64, best_set.len() as i64);
    loop {
        let (gain, set) = best_closure(g, best);
        if gain <= 0 || set.is_empty() {
            return (best, best_set);
        }
        let mask = membership(g.n(), &set);
        let e = g.edges().iter().filter(|e| mask[e.u()] && mask[e.v()]).count();
        let density = Ratio::new(e as i64, set.len() as i64);
        debug_assert!(density > best);
        best = density;
        best_set = set;
    }
}

fn membership(n: usize, set: &[Vertex]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &v in set {
        m[v] = true;
    }
    m
}

/// Maximises `b·e(S) − a·|S|` for `lambda = a/b`; returns the optimum and
/// the vertex part of an optimal closure.
fn best_closure(g: &Graph, lambda: Ratio<i64>) -> (i64, Vec<Vertex>) {
    let (a, b) = (*lambda.numer(), *lambda.denom());
    let n = g.n();
    let m = g.edge_count();
    // Nodes: source, sink, one per edge, one per vertex.
    let source = 0;
    let sink = 1;
    let edge_node = |i: usize| 2 + i;
    let vertex_node = |v: Vertex| 2 + m + v;
    let mut net = Dinic::new(2 + m + n);
    let inf = b * (m as i64) + 1;
    for (i, e) in g.edges().iter().enumerate() {
        net.add_arc(source, edge_node(i), b);
        net.add_arc(edge_node(i), vertex_node(e.u()), inf);
        net.add_arc(edge_node(i), vertex_node(e.v()), inf);
    }
    for v in 0..n {
        if g.degree(v) > 0 {
            net.add_arc(vertex_node(v), sink, a);
        }
    }
    let cut = net.max_flow(source, sink);
    let gain = b * m as i64 - cut;
    let reach = net.source_side(source);
    let set = (0..n).filter(|&v| reach[vertex_node(v)]).collect();
    (gain, set)
}

struct Arc {
    to: usize,
    cap: i64,
}

struct Dinic {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl Dinic {
    fn new(nodes: usize) -> Dinic {
        Dinic {
            arcs: Vec::new(),
            out: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, cap: i64) {
        self.out[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.out[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &id in &self.out[x] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && self.level[arc.to] < 0 {
                    self.level[arc.to] = self.level[x] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, x: usize, t: usize, pushed: i64) -> i64 {
        if x == t {
            return pushed;
        }
        while self.next[x] < self.out[x].len() {
            let id = self.out[x][self.next[x]];
            let (to, cap) = (self.arcs[id].to, self.arcs[id].cap);
            if cap > 0 && self.level[to] == self.level[x] + 1 {
                let got = self.dfs(to, t, pushed.min(cap));
                if got > 0 {
                    self.arcs[id].cap -= got;
                    self.arcs[id ^ 1].cap += got;
                    return got;
                }
            }
            self.next[x] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
        flow
    }

    /// Nodes reachable from `s` in the residual network.
    fn source_side(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.out.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &id in &self.out[x] {
                let arc = &self.arcs[id];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    stack.push(arc.to);
                }
            }
        }
        seen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{sample_gnp, Edge, RngSpec};

    #[test]
    fn flow_matches_scan() {
        for s in 0..40 {
            let g = sample_gnp(20, 0.15 + 0.01 * (s % 10) as f64, &RngSpec::new(8, s)).unwrap();
            let (scan, _) = max_density_by_scan(&g);
            if g.edge_count() == 0 {
                continue;
            }
            let (flow, set) = densest_by_flow(&g);
            assert_eq!(flow, scan, "seed {s}");
            let m = membership(g.n(), &set);
            let e = g.edges().iter().filter(|e| m[e.u()] && m[e.v()]).count();
            assert_eq!(Ratio::new(e as i64, set.len() as i64), scan);
        }
    }

    #[test]
    fn large_graph_uses_flow() {
        // K5 hidden in a long path: density 2.
        let mut edges: Vec<(usize, usize)> = (5..40).map(|v| (v - 1, v)).collect();
        for a in 0..5 {
            for b in a + 1..5 {
                edges.push((a, b));
            }
        }
        let g = Graph::from_edges(40, edges).unwrap();
        let (d, set) = densest_subgraph(&g);
        assert_eq!(d, Ratio::from_integer(2));
        assert_eq!(set, vec![0, 1, 2, 3, 4]);
        assert!(g.contains_edge(Edge::new(0, 4)));
    }
}
