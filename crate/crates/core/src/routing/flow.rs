//! Dinic max-flow on small integer-capacity graphs.

use std::collections::VecDeque;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: i64,
    flow: i64,
}

#[derive(Debug, Clone)]
pub struct FlowGraph {
    edges: Vec<Edge>,
    adj: Vec<Vec<usize>>,
    level: Vec<i32>,
    next: Vec<usize>,
}

impl FlowGraph {
    pub fn new(nodes: usize) -> Self {
        FlowGraph {
            edges: Vec::new(),
            adj: vec![Vec::new(); nodes],
            level: vec![0; nodes],
            next: vec![0; nodes],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    /// Add `u -> v` with capacity `cap`; returns the edge id.
    pub fn add_edge(&mut self, u: usize, v: usize, cap: i64) -> usize {
        let id = self.edges.len();
        self.edges.push(Edge { to: v, cap, flow: 0 });
        self.edges.push(Edge { to: u, cap: 0, flow: 0 });
        self.adj[u].push(id);
        self.adj[v].push(id + 1);
        id
    }

    pub fn flow_on(&self, edge: usize) -> i64 {
        self.edges[edge].flow
    }

    fn bfs(&mut self, s: usize, t: usize) -> bool {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.adj[u] {
                let Edge { to, cap, flow } = self.edges[e];
                if cap - flow > 0 && self.level[to] < 0 {
                    self.level[to] = self.level[u] + 1;
                    q.push_back(to);
                }
            }
        }
        self.level[t] >= 0
    }

    fn dfs(&mut self, u: usize, t: usize, pushed: i64) -> i64 {
        if u == t {
            return pushed;
        }
        while self.next[u] < self.adj[u].len() {
            let e = self.adj[u][self.next[u]];
            let Edge { to, cap, flow } = self.edges[e];
            if cap - flow > 0 && self.level[to] == self.level[u] + 1 {
                let got = self.dfs(to, t, pushed.min(cap - flow));
                if got > 0 {
                    self.edges[e].flow += got;
                    self.edges[e ^ 1].flow -= got;
                    return got;
                }
            }
            self.next[u] += 1;
        }
        0
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut total = 0;
        while self.bfs(s, t) {
            self.next.iter_mut().for_each(|x| *x = 0);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
        total
    }

    /// Split the current flow into unit `s -> t` walks (node sequences,
    /// endpoints included) and erase loops from each. Consumes the flow.
    pub fn decompose_unit_paths(&mut self, s: usize, t: usize) -> Vec<Vec<usize>> {
        let mut paths = Vec::new();
        loop {
            let mut walk = vec![s];
            let mut u = s;
            while u != t {
                let Some(&e) = self.adj[u]
                    .iter()
                    .find(|&&e| e % 2 == 0 && self.edges[e].flow > 0)
                else {
                    break;
                };
                self.edges[e].flow -= 1;
                self.edges[e ^ 1].flow += 1;
                u = self.edges[e].to;
                walk.push(u);
            }
            if u != t {
                return paths;
            }
            paths.push(erase_loops(&walk));
        }
    }
}

/// Remove cycles: whenever a node repeats, drop everything after its first
/// visit.
pub fn erase_loops(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk {
        if let Some(pos) = out.iter().position(|&w| w == v) {
            out.truncate(pos + 1);
        } else {
            out.push(v);
        }
    }
    out
}
