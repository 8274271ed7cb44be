//! Vertex and edge connectivity by unit-capacity max-flow.

use crate::graph::{mask_vertices, Graph, MAX_ORDER};

const NODES: usize = 2 * MAX_ORDER;

/// Dense residual network small enough to live on the stack.
struct FlowNetwork {
    size: usize,
    cap: [[u8; NODES]; NODES],
}

impl FlowNetwork {
    fn new(size: usize) -> Self {
        FlowNetwork {
            size,
            cap: [[0; NODES]; NODES],
        }
    }

    /// Edmonds-Karp, stopping once the flow reaches `limit`.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        let mut flow = 0;
        let mut parent = [usize::MAX; NODES];
        let mut queue = [0usize; NODES];
        while flow < limit {
            parent[..self.size].fill(usize::MAX);
            parent[s] = s;
            let (mut head, mut tail) = (0, 1);
            queue[0] = s;
            'bfs: while head < tail {
                let u = queue[head];
                head += 1;
                for v in 0..self.size {
                    if parent[v] == usize::MAX && self.cap[u][v] > 0 {
                        parent[v] = u;
                        if v == t {
                            break 'bfs;
                        }
                        queue[tail] = v;
                        tail += 1;
                    }
                }
            }
            if parent[t] == usize::MAX {
                break;
            }
            // All capacities on an augmenting path are at least 1 and the
            // bottleneck is always a unit arc or the limit.
            let mut v = t;
            while v != s {
                let u = parent[v];
                self.cap[u][v] -= 1;
                self.cap[v][u] += 1;
                v = u;
            }
            flow += 1;
        }
        flow
    }
}

/// Maximum number of internally vertex-disjoint s-t paths for non-adjacent
/// `s`, `t`, capped at `limit`.
fn vertex_disjoint_paths(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    let n = g.order();
    // v_in = v, v_out = v + n
    let big = MAX_ORDER as u8;
    let mut net = FlowNetwork::new(2 * n);
    for v in 0..n {
        net.cap[v][v + n] = if v == s || v == t { big } else { 1 };
        for w in mask_vertices(g.neighbor_mask(v)) {
            net.cap[v + n][w] = big;
        }
    }
    net.max_flow(s + n, t, limit)
}

fn edge_disjoint_paths(g: &Graph, s: usize, t: usize, limit: usize) -> usize {
    let n = g.order();
    let mut net = FlowNetwork::new(n);
    for v in 0..n {
        for w in mask_vertices(g.neighbor_mask(v)) {
            net.cap[v][w] = 1;
        }
    }
    net.max_flow(s, t, limit)
}

/// Minimum number of vertices whose removal disconnects the graph (or leaves
/// a single vertex). Zero for disconnected graphs and `n = 1`, `n - 1` for
/// complete graphs.
pub fn node_connectivity(g: &Graph) -> usize {
    let n = g.order();
    if n <= 1 || !g.is_connected() {
        return 0;
    }
    if g.size() == n * (n - 1) / 2 {
        return n - 1;
    }
    let mut best = g.min_degree();
    for s in 0..n {
        let row = g.neighbor_mask(s);
        for t in s + 1..n {
            if row & (1 << t) != 0 {
                continue;
            }
            best = best.min(vertex_disjoint_paths(g, s, t, best));
            if best == 1 {
                return 1;
            }
        }
    }
    best
}

/// Minimum number of edges whose removal disconnects the graph; zero for
/// disconnected graphs and `n = 1`.
pub fn edge_connectivity(g: &Graph) -> usize {
    let n = g.order();
    if n <= 1 || !g.is_connected() {
        return 0;
    }
    let mut best = g.min_degree();
    for t in 1..n {
        if best <= 1 {
            break;
        }
        best = best.min(edge_disjoint_paths(g, 0, t, best));
    }
    best
}
