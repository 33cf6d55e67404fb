//! Exact balanced optimal transport on small bipartite instances.
//!
//! Two routes: direct enumeration of spanning-tree basic solutions when each
//! side has at most four support points, and successive shortest paths above
//! that. The shortest-path route also yields optimal dual potentials
//! `(u, v)` with `u_i + v_j <= c_ij`, tight on every arc carrying flow.

const FLOW_EPS: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct TransportProblem {
    pub supply: Vec<f64>,
    pub demand: Vec<f64>,
    pub cost: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct TransportSolution {
    pub value: f64,
    pub potential_u: Vec<f64>,
    pub potential_v: Vec<f64>,
}

/// Upper bound on the support size per side for the enumeration route.
pub const ENUMERATION_LIMIT: usize = 4;

fn for_each_combination(pool: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > pool {
        return;
    }
    if k == 0 {
        visit(&[]);
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let mut i = k - 1;
        while idx[i] == i + pool - k {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Cost of the unique flow on a spanning tree, or `None` if the tree flow is
/// infeasible (negative on some arc).
fn tree_flow_cost(
    p: &TransportProblem,
    edges: &[(usize, usize)], // (source node i, sink node m+j) pairs
) -> Option<f64> {
    let m = p.supply.len();
    let n = p.demand.len();
    let nodes = m + n;
    let mut balance: Vec<f64> = p
        .supply
        .iter()
        .copied()
        .chain(p.demand.iter().map(|d| -d))
        .collect();
    let mut alive_edge = vec![true; edges.len()];
    let mut alive_node = vec![true; nodes];
    let mut degree = vec![0usize; nodes];
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
    }
    let mut cost = 0.0;
    for _ in 0..edges.len() {
        let leaf = (0..nodes).find(|&u| alive_node[u] && degree[u] == 1)?;
        let (t, &(a, b)) = edges
            .iter()
            .enumerate()
            .find(|&(t, &(a, b))| alive_edge[t] && (a == leaf || b == leaf))?;
        // Flow from source a to sink b required to zero the leaf's balance.
        let f = if leaf == a { balance[a] } else { -balance[b] };
        if f < -1e-9 {
            return None;
        }
        let (i, j) = (a, b - m);
        cost += f.max(0.0) * p.cost[i][j];
        let other = if leaf == a { b } else { a };
        balance[other] += balance[leaf];
        balance[leaf] = 0.0;
        alive_edge[t] = false;
        alive_node[leaf] = false;
        degree[leaf] = 0;
        degree[other] -= 1;
    }
    Some(cost)
}

/// Minimum transport cost by enumerating spanning-tree basic solutions.
///
/// Every vertex of the transportation polytope solves some spanning tree of
/// the complete bipartite support graph, so scanning all trees and keeping
/// the feasible ones is exact.
pub fn enumerate_min_cost(p: &TransportProblem) -> f64 {
    let m = p.supply.len();
    let n = p.demand.len();
    if m == 0 || n == 0 {
        return 0.0;
    }
    let nodes = m + n;
    let arcs: Vec<(usize, usize)> = (0..m)
        .flat_map(|i| (0..n).map(move |j| (i, m + j)))
        .collect();
    let mut best = f64::INFINITY;
    for_each_combination(arcs.len(), nodes - 1, |subset| {
        let edges: Vec<(usize, usize)> = subset.iter().map(|&s| arcs[s]).collect();
        // Connectivity check; |edges| = nodes - 1 then implies a tree.
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; nodes];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != nodes {
            return;
        }
        if let Some(cost) = tree_flow_cost(p, &edges) {
            if cost < best {
                best = cost;
            }
        }
    });
    best
}

/// Successive shortest paths with Bellman-Ford, returning the optimal value
/// and dual potentials.
pub fn solve_min_cost(p: &TransportProblem) -> TransportSolution {
    let m = p.supply.len();
    let n = p.demand.len();
    if m == 0 || n == 0 {
        return TransportSolution {
            value: 0.0,
            potential_u: vec![0.0; m],
            potential_v: vec![0.0; n],
        };
    }
    let mut flow = vec![vec![0.0f64; n]; m];
    let mut rem_supply = p.supply.clone();
    let mut rem_demand = p.demand.clone();

    loop {
        let pending = rem_supply
            .iter()
            .sum::<f64>()
            .min(rem_demand.iter().sum::<f64>());
        if pending <= FLOW_EPS {
            break;
        }
        let (dist, parent) = bellman_ford(p, &flow, Some(&rem_supply));
        // Cheapest unsaturated sink, lowest index on ties.
        let mut target: Option<usize> = None;
        for j in 0..n {
            if rem_demand[j] > FLOW_EPS && dist[m + j].is_finite() {
                if target.map_or(true, |t| dist[m + j] < dist[m + t]) {
                    target = Some(j);
                }
            }
        }
        let j = target.expect("balanced problem must admit an augmenting path");
        // Reconstruct the path and its bottleneck.
        let mut path = Vec::new();
        let mut node = m + j;
        let mut bottleneck = rem_demand[j];
        while let Some(prev) = parent[node] {
            path.push((prev, node));
            if prev >= m {
                // Backward arc: node is the source, prev - m the sink.
                bottleneck = bottleneck.min(flow[node][prev - m]);
            }
            node = prev;
        }
        debug_assert!(node < m, "augmenting path must start at a source");
        bottleneck = bottleneck.min(rem_supply[node]);
        for &(a, b) in &path {
            if a < m {
                flow[a][b - m] += bottleneck;
            } else {
                flow[b][a - m] -= bottleneck;
            }
        }
        rem_supply[node] -= bottleneck;
        rem_demand[j] -= bottleneck;
    }

    let value = (0..m)
        .map(|i| (0..n).map(|j| flow[i][j] * p.cost[i][j]).sum::<f64>())
        .sum();

    // Potentials: multi-source shortest distances in the final residual
    // graph. Forward arcs are always present, so every node is reachable,
    // and optimality of the flow rules out negative cycles.
    let (pi, _) = bellman_ford(p, &flow, None);
    TransportSolution {
        value,
        potential_u: (0..m).map(|i| -pi[i]).collect(),
        potential_v: (0..n).map(|j| pi[m + j]).collect(),
    }
}

/// Bellman-Ford over the residual graph. Sources with remaining supply (or
/// all sources, when `active` is `None`) start at distance zero.
fn bellman_ford(
    p: &TransportProblem,
    flow: &[Vec<f64>],
    active: Option<&[f64]>,
) -> (Vec<f64>, Vec<Option<usize>>) {
    let m = p.supply.len();
    let n = p.demand.len();
    let nodes = m + n;
    let mut dist = vec![f64::INFINITY; nodes];
    let mut parent: Vec<Option<usize>> = vec![None; nodes];
    for i in 0..m {
        let is_active = active.map_or(true, |rem| rem[i] > FLOW_EPS);
        if is_active {
            dist[i] = 0.0;
        }
    }
    for _ in 0..nodes {
        let mut changed = false;
        for i in 0..m {
            if !dist[i].is_finite() {
                continue;
            }
            for j in 0..n {
                let nd = dist[i] + p.cost[i][j];
                if nd < dist[m + j] - 1e-15 {
                    dist[m + j] = nd;
                    parent[m + j] = Some(i);
                    changed = true;
                }
            }
        }
        for j in 0..n {
            if !dist[m + j].is_finite() {
                continue;
            }
            for i in 0..m {
                if flow[i][j] > FLOW_EPS {
                    let nd = dist[m + j] - p.cost[i][j];
                    if nd < dist[i] - 1e-15 {
                        dist[i] = nd;
                        parent[i] = Some(m + j);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    (dist, parent)
}
