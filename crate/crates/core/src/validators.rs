//! Graph-language membership predicates, the counter-based stability tests,
//! and structural invariants of reachable configurations.

use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::model::Graph;
use crate::model::{Configuration, NodeState, Protocol};
use crate::protocols;

/// Rooted spanning tree in which every node has at most `k` children.
pub fn is_k_children_tree(g: &Graph, root: usize, k: u32) -> bool {
    let n = g.vertex_count();
    if root >= n || g.edge_count() + 1 != n {
        return false;
    }
    let adj = g.adjacency();
    let mut parent = vec![usize::MAX; n];
    parent[root] = root;
    let mut stack = vec![root];
    let mut seen = 1;
    while let Some(u) = stack.pop() {
        let children = adj[u].iter().filter(|&&w| w != parent[u]).count();
        if children > k as usize {
            return false;
        }
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                seen += 1;
                stack.push(w);
            }
        }
    }
    // n - 1 edges and connected implies acyclic
    seen == n
}

/// (l, k)-regular membership: nodes of degree < l are pairwise adjacent, all
/// other nodes have degree in [l, k]. With `spanning`, the graph must also
/// be connected.
pub fn is_lk_regular(g: &Graph, l: u32, k: u32, spanning: bool) -> Result<bool> {
    if l >= k {
        return Err(Error::InvalidParameter(format!("need l < k, got l = {l}, k = {k}")));
    }
    let deg = g.degrees();
    if deg.iter().any(|&d| d > k as usize) {
        return Ok(false);
    }
    let low: Vec<usize> = (0..g.vertex_count()).filter(|&u| deg[u] < l as usize).collect();
    for (i, &u) in low.iter().enumerate() {
        if low[i + 1..].iter().any(|&v| !g.has_edge(u, v)) {
            return Ok(false);
        }
    }
    Ok(!spanning || g.is_connected())
}

/// Canonical code of the tree reachable from `root`: children's codes sorted
/// and wrapped in parentheses. Equal codes mean isomorphic rooted trees.
pub fn rooted_tree_code(g: &Graph, root: usize) -> String {
    fn code(adj: &[Vec<usize>], u: usize, parent: usize) -> String {
        let mut kids: Vec<String> = adj[u].iter().filter(|&&w| w != parent).map(|&w| code(adj, w, u)).collect();
        kids.sort_unstable();
        format!("({})", kids.concat())
    }
    code(&g.adjacency(), root, usize::MAX)
}

pub(crate) fn pairwise_adjacent(config: &Configuration, nodes: &[usize]) -> bool {
    nodes.iter().enumerate().all(|(i, &u)| nodes[i + 1..].iter().all(|&v| config.edge(u, v)))
}

/// Tree protocols: every rule needs a free responder, and while free nodes
/// remain some tree node has an open slot.
pub(crate) fn tree_stable(config: &Configuration) -> bool {
    config.free_count() == 0
}

/// Cross-edges: no free nodes, and the nodes with counter <= k - 2 (the only
/// ones able to take a cross edge) are already pairwise adjacent.
pub(crate) fn cross_edges_stable(config: &Configuration, k: u32) -> bool {
    if config.free_count() != 0 {
        return false;
    }
    let low: Vec<usize> = (0..config.n()).filter(|&u| config.state(u).counter().is_some_and(|c| c + 2 <= k)).collect();
    pairwise_adjacent(config, &low)
}

/// Counter-based stability predicate for the shipped protocols.
pub fn fast_stable(config: &Configuration, protocol: &Protocol) -> Result<bool> {
    Ok(protocols::strategy_for(protocol)?.is_stable(config, protocol.k()))
}

fn broken(msg: String) -> Error {
    Error::InvalidState(msg)
}

fn unique_leader(config: &Configuration) -> Result<usize> {
    let mut leaders = (0..config.n()).filter(|&u| matches!(config.state(u), NodeState::Leader(_)));
    let l = leaders.next().ok_or_else(|| broken("no leader".into()))?;
    if leaders.next().is_some() {
        return Err(broken("more than one leader".into()));
    }
    Ok(l)
}

fn adjacency(config: &Configuration) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); config.n()];
    for (u, v) in config.active_edges() {
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Shared checks: cached degrees match a recount, free nodes are isolated,
/// and the non-free nodes form one component containing the leader.
/// Returns the leader and the adjacency lists.
fn check_component(config: &Configuration) -> Result<(usize, Vec<Vec<usize>>)> {
    if config.recount_degrees() != config.degrees() {
        return Err(broken("degree cache out of sync with edge set".into()));
    }
    let leader = unique_leader(config)?;
    let adj = adjacency(config);
    let mut reached = vec![false; config.n()];
    reached[leader] = true;
    let mut order = vec![leader];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &w in &adj[u] {
            if !reached[w] {
                reached[w] = true;
                order.push(w);
            }
        }
    }
    for (u, &seen) in reached.iter().enumerate() {
        let s = config.state(u);
        if s.is_free() && config.degree(u) != 0 {
            return Err(broken(format!("free node {u} has active edges")));
        }
        if !s.is_free() && !seen {
            return Err(broken(format!("node {u} in {s} is not connected to the leader")));
        }
    }
    Ok((leader, adj))
}

/// Tree protocols: the non-free nodes form a tree rooted at the leader, and
/// each counter equals the node's number of children (at most `k`).
pub fn check_tree_invariants(config: &Configuration, k: u32) -> Result<()> {
    let (leader, adj) = check_component(config)?;
    let members = config.n() - config.free_count();
    if config.edge_count() + 1 != members {
        return Err(broken(format!("{} edges on {members} tree nodes", config.edge_count())));
    }
    for (u, nbrs) in adj.iter().enumerate() {
        let Some(c) = config.state(u).counter() else { continue };
        let children = nbrs.len() - usize::from(u != leader);
        if c as usize != children || c > k {
            return Err(broken(format!("node {u}: counter {c}, children {children}, k {k}")));
        }
    }
    Ok(())
}

/// Cross-edges: one component around the leader, each counter equals the
/// node's degree, and no counter exceeds `k`.
pub fn check_degree_invariants(config: &Configuration, k: u32) -> Result<()> {
    check_component(config)?;
    for u in 0..config.n() {
        let Some(c) = config.state(u).counter() else { continue };
        if c != config.degree(u) || c > k {
            return Err(broken(format!("node {u}: counter {c}, degree {}, k {k}", config.degree(u))));
        }
    }
    Ok(())
}

/// Structural invariants for any shipped protocol.
pub fn check_run_invariants(config: &Configuration, protocol: &Protocol) -> Result<()> {
    protocols::strategy_for(protocol)?.check_invariants(config, protocol.k())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub n: usize,
    pub k: u32,
    pub free_count: usize,
    /// Non-free nodes with counter < k.
    pub below_k_count: usize,
    /// Non-free nodes with counter <= k - 2.
    pub low_degree_ids: Vec<usize>,
    pub low_degree_is_clique: bool,
    pub isolated_count: usize,
    /// Nodes with counter k - 1 or k.
    pub top_degree_count: usize,
    /// n - k - 2, reported for comparison with `top_degree_count`; not enforced.
    pub top_degree_literal_bound: i64,
}

impl StabilityReport {
    pub fn top_degree_within_literal_bound(&self) -> bool {
        (self.top_degree_count as i64) <= self.top_degree_literal_bound
    }
}

/// Summarizes a configuration's counters without asserting anything.
pub fn stability_report(config: &Configuration, k: u32) -> StabilityReport {
    let counters: Vec<Option<u32>> = config.states().iter().map(|s| s.counter()).collect();
    let low_degree_ids: Vec<usize> = (0..config.n()).filter(|&u| counters[u].is_some_and(|c| c + 2 <= k)).collect();
    StabilityReport {
        n: config.n(),
        k,
        free_count: config.free_count(),
        below_k_count: counters.iter().filter(|c| c.is_some_and(|c| c < k)).count(),
        low_degree_is_clique: pairwise_adjacent(config, &low_degree_ids),
        low_degree_ids,
        isolated_count: if config.n() > 1 { config.degrees().iter().filter(|&&d| d == 0).count() } else { 0 },
        top_degree_count: counters.iter().filter(|c| c.is_some_and(|c| c + 1 >= k)).count(),
        top_degree_literal_bound: config.n() as i64 - k as i64 - 2,
    }
}

/// Report on a stabilized cross-edges configuration (n > 3), failing if any
/// of the end-state properties does not hold: some node below k, no free or
/// isolated nodes, and at most k - 2 low-degree nodes forming a clique.
pub fn stability_invariants(config: &Configuration, k: u32) -> Result<StabilityReport> {
    if k < 3 {
        return Err(Error::InvalidParameter(format!("cross-edges requires k >= 3, got {k}")));
    }
    if config.n() <= 3 {
        return Err(Error::InvalidParameter(format!("end-state properties need n > 3, got {}", config.n())));
    }
    if !cross_edges_stable(config, k) {
        return Err(broken("configuration is not stable".into()));
    }
    let r = stability_report(config, k);
    if r.below_k_count == 0 {
        return Err(broken("every node has counter k".into()));
    }
    if r.free_count != 0 || r.isolated_count != 0 {
        return Err(broken(format!("{} free and {} isolated nodes", r.free_count, r.isolated_count)));
    }
    if r.low_degree_ids.len() > (k - 2) as usize || !r.low_degree_is_clique {
        return Err(broken(format!("low-degree set {:?} violates the clique bound", r.low_degree_ids)));
    }
    Ok(r)
}
