use super::edges::EdgeSet;
use super::graph::Graph;
use super::protocol::{Protocol, TransitionRule};
use super::state::NodeState;
use crate::error::{Error, Result};

/// States of all nodes and edges of the complete interaction graph, with
/// per-node active-degree caches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    states: Vec<NodeState>,
    edges: EdgeSet,
    degrees: Vec<u32>,
    free_count: usize,
}

impl Configuration {
    /// All nodes in `initial`, all edges inactive.
    pub fn uniform(n: usize, initial: NodeState) -> Configuration {
        Configuration {
            states: vec![initial; n],
            edges: EdgeSet::new(n),
            degrees: vec![0; n],
            free_count: if initial.is_free() { n } else { 0 },
        }
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, u: usize) -> NodeState {
        self.states[u]
    }

    pub fn states(&self) -> &[NodeState] {
        &self.states
    }

    pub fn degree(&self, u: usize) -> u32 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(u, v)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn active_edges(&self) -> Vec<(usize, usize)> {
        self.edges.sorted_pairs()
    }

    pub fn leader(&self) -> Option<usize> {
        self.states.iter().position(|s| matches!(s, NodeState::Leader(_)))
    }

    pub fn set_state(&mut self, u: usize, s: NodeState) {
        let old = std::mem::replace(&mut self.states[u], s);
        match (old.is_free(), s.is_free()) {
            (true, false) => self.free_count -= 1,
            (false, true) => self.free_count += 1,
            _ => {}
        }
    }

    /// Sets edge {u, v}, keeping the degree caches coherent.
    pub fn set_edge(&mut self, u: usize, v: usize, on: bool) {
        let was = self.edges.set(u, v, on);
        if was != on {
            if on {
                self.degrees[u] += 1;
                self.degrees[v] += 1;
            } else {
                self.degrees[u] -= 1;
                self.degrees[v] -= 1;
            }
        }
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u == v || u >= self.n() || v >= self.n() {
            return Err(Error::InvalidArguments(format!("encounter ({u}, {v}) on {} nodes", self.n())));
        }
        Ok(())
    }

    /// The rule that would fire on encounter {u, v}, trying `(u, v)` first
    /// when `coin` is set and `(v, u)` first otherwise. Returns the rule with
    /// the orientation it matched in as (initiator, responder).
    #[inline]
    pub fn matching_rule<'p>(
        &self,
        protocol: &'p Protocol,
        u: usize,
        v: usize,
        coin: bool,
    ) -> Option<(&'p TransitionRule, usize, usize)> {
        let (first, second) = if coin { ((u, v), (v, u)) } else { ((v, u), (u, v)) };
        let e = self.edges.contains(u, v);
        for (a, b) in [first, second] {
            if let Some(r) = protocol.lookup_rule(self.states[a], self.states[b], e) {
                return Some((r, a, b));
            }
        }
        None
    }

    /// Applies one encounter in place. Returns whether a rule fired.
    pub fn apply_encounter(&mut self, protocol: &Protocol, u: usize, v: usize, coin: bool) -> Result<bool> {
        self.check_pair(u, v)?;
        Ok(self.apply_unchecked(protocol, u, v, coin))
    }

    #[inline]
    pub(crate) fn apply_unchecked(&mut self, protocol: &Protocol, u: usize, v: usize, coin: bool) -> bool {
        match self.matching_rule(protocol, u, v, coin) {
            Some((rule, a, b)) => {
                let post = rule.post;
                self.set_state(a, post.initiator);
                self.set_state(b, post.responder);
                self.set_edge(a, b, post.edge);
                true
            }
            None => false,
        }
    }

    /// Reference stability test: no pair admits an effective transition in
    /// either orientation. Quadratic in `n`.
    pub fn is_stable_naive(&self, protocol: &Protocol) -> bool {
        let n = self.n();
        for v in 1..n {
            for u in 0..v {
                if self.matching_rule(protocol, u, v, true).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Active subgraph induced by nodes in output states, relabelled to
    /// `0..m` in node-id order. The root is the leader when it is an output node.
    pub fn output_graph(&self, protocol: &Protocol) -> Graph {
        let out = protocol.output_states();
        let mut relabel = vec![usize::MAX; self.n()];
        let mut m = 0;
        for (u, &s) in self.states.iter().enumerate() {
            if out.contains(s) {
                relabel[u] = m;
                m += 1;
            }
        }
        let mut g = Graph::new(m);
        for (u, v) in self.edges.sorted_pairs() {
            if relabel[u] != usize::MAX && relabel[v] != usize::MAX {
                g.add_edge(relabel[u], relabel[v]).expect("edge set has no self-pairs or duplicates");
            }
        }
        match self.leader().map(|l| relabel[l]) {
            Some(r) if r != usize::MAX => g.with_root(r),
            _ => g,
        }
    }

    /// Degree recount from the edge set; used to audit the caches.
    pub fn recount_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n()];
        for (u, v) in self.edges.sorted_pairs() {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }
}
