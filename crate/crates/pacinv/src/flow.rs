//! Small integer max-flow solver (Ford–Fulkerson with depth-first
//! augmentation).
//!
//! Capacities here are tiny (unit arcs plus per-vertex quotas), so the
//! simple O(V·E·F) bound is more than enough. Augmenting paths explore
//! arcs in insertion order; callers rely on that to express a
//! deterministic preference between otherwise symmetric assignments.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcId(usize);

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: i64,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    adj: Vec<Vec<usize>>,
    arcs: Vec<Arc>,
}

impl FlowNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes], arcs: Vec::new() }
    }

    /// Adds a directed arc and its zero-capacity reverse.
    pub fn add_arc(&mut self, from: usize, to: usize, cap: i64) -> ArcId {
        assert!(from < self.adj.len() && to < self.adj.len());
        assert!(cap >= 0);
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap });
        self.arcs.push(Arc { to: from, cap: 0 });
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
        ArcId(id)
    }

    /// Flow currently routed through an arc (reverse arc's capacity).
    pub fn flow(&self, arc: ArcId) -> i64 {
        self.arcs[arc.0 + 1].cap
    }

    /// Pushes flow until no augmenting path remains; returns the total.
    pub fn max_flow(&mut self, source: usize, sink: usize) -> i64 {
        assert_ne!(source, sink);
        let mut total = 0;
        loop {
            let mut visited = vec![false; self.adj.len()];
            let pushed = self.augment(source, sink, i64::MAX, &mut visited);
            if pushed == 0 {
                return total;
            }
            total += pushed;
        }
    }

    fn augment(&mut self, node: usize, sink: usize, limit: i64, visited: &mut [bool]) -> i64 {
        if node == sink {
            return limit;
        }
        visited[node] = true;
        for i in 0..self.adj[node].len() {
            let arc_id = self.adj[node][i];
            let Arc { to, cap } = self.arcs[arc_id];
            if cap <= 0 || visited[to] {
                continue;
            }
            let pushed = self.augment(to, sink, limit.min(cap), visited);
            if pushed > 0 {
                self.arcs[arc_id].cap -= pushed;
                self.arcs[arc_id ^ 1].cap += pushed;
                return pushed;
            }
        }
        0
    }
}
