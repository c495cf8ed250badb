//! Minimum-cost flow via successive shortest paths with Johnson
//! potentials. The instances here are small transportation networks
//! (a few hundred nodes), so a binary-heap Dijkstra per unit of pushed
//! flow is plenty.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

const INF: i64 = i64::MAX / 4;

pub(crate) struct MinCostFlow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    initial_cap: Vec<i64>,
    cost: Vec<i64>,
}

impl MinCostFlow {
    pub fn new(num_nodes: usize) -> Self {
        MinCostFlow {
            head: vec![Vec::new(); num_nodes],
            to: Vec::new(),
            cap: Vec::new(),
            initial_cap: Vec::new(),
            cost: Vec::new(),
        }
    }

    /// Adds a directed edge and its residual twin; returns the edge id.
    /// Costs must be nonnegative (potentials assume it for the first run).
    pub fn add_edge(&mut self, from: usize, to: usize, cap: i64, cost: i64) -> usize {
        debug_assert!(cost >= 0);
        let id = self.to.len();
        self.head[from].push(id);
        self.to.push(to);
        self.cap.push(cap);
        self.initial_cap.push(cap);
        self.cost.push(cost);
        self.head[to].push(id + 1);
        self.to.push(from);
        self.cap.push(0);
        self.initial_cap.push(0);
        self.cost.push(-cost);
        id
    }

    /// Flow currently routed through edge `id` (forward edges only).
    pub fn flow_on(&self, id: usize) -> i64 {
        self.initial_cap[id] - self.cap[id]
    }

    /// Pushes exactly `target` units from `s` to `t` at minimum cost.
    /// Returns the total cost, or `None` if less than `target` is feasible.
    pub fn solve(&mut self, s: usize, t: usize, target: i64) -> Option<i64> {
        let n = self.head.len();
        let mut potential = vec![0i64; n];
        let mut dist = vec![INF; n];
        let mut prev_edge = vec![usize::MAX; n];
        let mut remaining = target;
        let mut total_cost = 0i64;

        while remaining > 0 {
            dist.fill(INF);
            prev_edge.fill(usize::MAX);
            dist[s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &id in &self.head[u] {
                    if self.cap[id] <= 0 {
                        continue;
                    }
                    let v = self.to[id];
                    let reduced = d + self.cost[id] + potential[u] - potential[v];
                    if reduced < dist[v] {
                        dist[v] = reduced;
                        prev_edge[v] = id;
                        heap.push(Reverse((reduced, v)));
                    }
                }
            }
            if dist[t] >= INF {
                return None;
            }
            for u in 0..n {
                if dist[u] < INF {
                    potential[u] += dist[u];
                }
            }

            let mut push = remaining;
            let mut v = t;
            while v != s {
                let id = prev_edge[v];
                push = push.min(self.cap[id]);
                v = self.to[id ^ 1];
            }
            let mut v = t;
            while v != s {
                let id = prev_edge[v];
                self.cap[id] -= push;
                self.cap[id ^ 1] += push;
                total_cost += push * self.cost[id];
                v = self.to[id ^ 1];
            }
            remaining -= push;
        }
        Some(total_cost)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_cheapest_path_first() {
        // s -> a -> t costs 1, s -> b -> t costs 3, all caps 1.
        let mut net = MinCostFlow::new(4);
        let (s, a, b, t) = (0, 1, 2, 3);
        let sa = net.add_edge(s, a, 1, 0);
        net.add_edge(a, t, 1, 1);
        let sb = net.add_edge(s, b, 1, 0);
        net.add_edge(b, t, 1, 3);
        assert_eq!(net.solve(s, t, 1), Some(1));
        assert_eq!(net.flow_on(sa), 1);
        assert_eq!(net.flow_on(sb), 0);
    }

    #[test]
    fn respects_target_and_reports_infeasible() {
        let mut net = MinCostFlow::new(2);
        net.add_edge(0, 1, 2, 5);
        assert_eq!(net.solve(0, 1, 3), None);
        let mut net = MinCostFlow::new(2);
        net.add_edge(0, 1, 2, 5);
        assert_eq!(net.solve(0, 1, 2), Some(10));
    }

    #[test]
    fn rerouting_through_residual_edges() {
        // Classic diamond where the second unit must undo part of the
        // first unit's path to stay optimal.
        let mut net = MinCostFlow::new(4);
        let (s, a, b, t) = (0, 1, 2, 3);
        net.add_edge(s, a, 2, 1);
        net.add_edge(a, b, 1, 0);
        net.add_edge(b, t, 2, 1);
        net.add_edge(s, b, 1, 4);
        net.add_edge(a, t, 1, 4);
        // best pair of unit paths: s-a-b-t (2) and s-a-t (5) = 7,
        // versus s-a-b-t (2) and s-b-t (5) = 7; either way cost 7.
        assert_eq!(net.solve(s, t, 2), Some(7));
    }

    #[test]
    fn small_transportation_instance() {
        // 3 unit supplies, 2 sinks with caps (2, 1); cost matrix rows:
        // v0: (0, 9), v1: (5, 1), v2: (4, 2). Optimum: v0->A, v1->B,
        // v2->A = 0 + 1 + 4 = 5.
        let mut net = MinCostFlow::new(7);
        let s = 0;
        let t = 6;
        let costs = [[0, 9], [5, 1], [4, 2]];
        for (i, row) in costs.iter().enumerate() {
            net.add_edge(s, 1 + i, 1, 0);
            for (j, &c) in row.iter().enumerate() {
                net.add_edge(1 + i, 4 + j, 1, c);
            }
        }
        net.add_edge(4, t, 2, 0);
        net.add_edge(5, t, 1, 0);
        assert_eq!(net.solve(s, t, 3), Some(5));
    }
}
