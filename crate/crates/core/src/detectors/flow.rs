//! Dinic maximum flow on integer capacities.

use std::collections::VecDeque;

pub(crate) struct FlowNetwork {
    head: Vec<usize>,
    next: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<i64>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

const NONE: usize = usize::MAX;

impl FlowNetwork {
    pub(crate) fn new(num_vertices: usize) -> Self {
        FlowNetwork {
            head: vec![NONE; num_vertices],
            next: Vec::new(),
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![0; num_vertices],
            iter: vec![0; num_vertices],
        }
    }

    fn push_arc(&mut self, u: usize, v: usize, c: i64) {
        self.to.push(v);
        self.cap.push(c);
        self.next.push(self.head[u]);
        self.head[u] = self.to.len() - 1;
    }

    /// Arc `u -> v` with capacity `c` and its zero-capacity reverse.
    pub(crate) fn add_edge(&mut self, u: usize, v: usize, c: i64) {
        debug_assert!(c >= 0);
        self.push_arc(u, v, c);
        self.push_arc(v, u, 0);
    }

    /// Undirected edge: capacity `c` in both directions.
    pub(crate) fn add_undirected(&mut self, u: usize, v: usize, c: i64) {
        self.push_arc(u, v, c);
        self.push_arc(v, u, c);
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut e = self.head[u];
            while e != NONE {
                let v = self.to[e];
                if self.cap[e] > 0 && self.level[v] < 0 {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
                e = self.next[e];
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: i64) -> i64 {
        if u == t {
            return f;
        }
        while self.iter[u] != NONE {
            let e = self.iter[u];
            let v = self.to[e];
            if self.cap[e] > 0 && self.level[v] == self.level[u] + 1 {
                let d = self.dfs(v, t, f.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] = self.next[e];
        }
        0
    }

    pub(crate) fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let mut flow = 0i64;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                return flow;
            }
            self.iter.copy_from_slice(&self.head);
            loop {
                let f = self.dfs(s, t, i64::MAX);
                if f == 0 {
                    break;
                }
                flow += f;
            }
        }
    }

    /// Vertices reachable from `s` in the residual network.
    pub(crate) fn reachable_from(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            let mut e = self.head[u];
            while e != NONE {
                let v = self.to[e];
                if self.cap[e] > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
                e = self.next[e];
            }
        }
        seen
    }

    /// Vertices that can still reach `t` in the residual network.
    pub(crate) fn reaching(&self, t: usize) -> Vec<bool> {
        let n = self.head.len();
        // reverse adjacency over residual arcs
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
        for u in 0..n {
            let mut e = self.head[u];
            while e != NONE {
                if self.cap[e] > 0 {
                    rev[self.to[e]].push(u);
                }
                e = self.next[e];
            }
        }
        let mut seen = vec![false; n];
        seen[t] = true;
        let mut stack = vec![t];
        while let Some(v) = stack.pop() {
            for &u in &rev[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
        seen
    }
}
