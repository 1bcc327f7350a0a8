//! The shipped constructions, each behind [`ConstructionStrategy`] and
//! registered under its CLI name.
//!
//! | name          | kind             | k        | target language            |
//! |---------------|------------------|----------|----------------------------|
//! | `two-slot`    | `TwoSlot`        | 2        | trees, ≤ 2 children        |
//! | `k-slot`      | `KSlot`          | k ≥ 2    | trees, ≤ k children        |
//! | `cross-edges` | `CrossEdgesTree` | k ≥ 3    | (k−1, k)-regular networks  |

use std::collections::BTreeMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{Configuration, Graph, NodeState, OutputStates, Protocol, ProtocolKind, TransitionRule, Triple};
use crate::validators;

/// Per-run incremental stability detection. `observe` is called after every
/// effective encounter with the two nodes it touched.
pub trait StabilityTracker {
    fn observe(&mut self, config: &Configuration, touched: [usize; 2]);
    fn is_stable(&self, config: &Configuration) -> bool;
}

pub trait ConstructionStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    fn kind(&self) -> ProtocolKind;
    fn min_k(&self) -> u32;
    /// Some(k) when the construction admits only one parameter value.
    fn fixed_k(&self) -> Option<u32> {
        None
    }
    fn build(&self, k: u32) -> Result<Protocol>;
    /// Exact counter-based test for "no effective transition exists".
    fn is_stable(&self, config: &Configuration, k: u32) -> bool;
    fn tracker(&self, config: &Configuration, k: u32) -> Box<dyn StabilityTracker>;
    /// Structural invariants every reachable configuration satisfies.
    fn check_invariants(&self, config: &Configuration, k: u32) -> Result<()>;
    /// Membership of a stabilized output graph in the target language.
    fn in_language(&self, graph: &Graph, k: u32) -> bool;
}

fn rule(a: NodeState, b: NodeState, a2: NodeState, b2: NodeState) -> TransitionRule {
    TransitionRule::new(Triple::new(a, b, false), Triple::new(a2, b2, true))
}

/// The two attachment families shared by all shipped protocols. A node in
/// `L_x` / `O_y` with `x, y < k` recruits a free node, which enters as
/// `O_joined`.
fn attachment_rules(k: u32, joined: u32) -> Vec<TransitionRule> {
    use NodeState::*;
    let mut rules = Vec::with_capacity(2 * k as usize);
    for x in 0..k {
        rules.push(rule(Leader(x), Free, Leader(x + 1), Ordinary(joined)));
    }
    for y in 0..k {
        rules.push(rule(Ordinary(y), Free, Ordinary(y + 1), Ordinary(joined)));
    }
    rules
}

struct SlotTree {
    name: &'static str,
    kind: ProtocolKind,
    fixed: Option<u32>,
}

struct CrossEdges;

impl ConstructionStrategy for SlotTree {
    fn name(&self) -> &'static str {
        self.name
    }

    fn kind(&self) -> ProtocolKind {
        self.kind
    }

    fn min_k(&self) -> u32 {
        self.fixed.unwrap_or(2)
    }

    fn fixed_k(&self) -> Option<u32> {
        self.fixed
    }

    fn build(&self, k: u32) -> Result<Protocol> {
        if let Some(f) = self.fixed.filter(|&f| f != k) {
            return Err(Error::InvalidParameter(format!("{} is defined only for k = {f}", self.name)));
        }
        if k < 2 {
            return Err(Error::InvalidParameter(format!("{} requires k >= 2, got {k}", self.name)));
        }
        // counters count children; a recruited node starts with none
        Protocol::new(self.name, self.kind, k, attachment_rules(k, 0), NodeState::Leader(0), OutputStates::All)
    }

    fn is_stable(&self, config: &Configuration, _k: u32) -> bool {
        validators::tree_stable(config)
    }

    fn tracker(&self, _config: &Configuration, _k: u32) -> Box<dyn StabilityTracker> {
        Box::new(FreeCountTracker)
    }

    fn check_invariants(&self, config: &Configuration, k: u32) -> Result<()> {
        validators::check_tree_invariants(config, k)
    }

    fn in_language(&self, graph: &Graph, k: u32) -> bool {
        graph.root().is_some_and(|r| validators::is_k_children_tree(graph, r, k))
    }
}

impl ConstructionStrategy for CrossEdges {
    fn name(&self) -> &'static str {
        "cross-edges"
    }

    fn kind(&self) -> ProtocolKind {
        ProtocolKind::CrossEdgesTree
    }

    fn min_k(&self) -> u32 {
        3
    }

    fn build(&self, k: u32) -> Result<Protocol> {
        use NodeState::*;
        if k < 3 {
            return Err(Error::InvalidParameter(format!("cross-edges requires k >= 3, got {k}")));
        }
        // counters are degrees, so a recruited node starts at 1
        let mut rules = attachment_rules(k, 1);
        for x in 0..k - 1 {
            for y in 0..k - 1 {
                rules.push(rule(Leader(x), Ordinary(y), Leader(x + 1), Ordinary(y + 1)));
            }
        }
        for y in 0..k - 1 {
            for z in 0..k - 1 {
                rules.push(rule(Ordinary(y), Ordinary(z), Ordinary(y + 1), Ordinary(z + 1)));
            }
        }
        Protocol::new("cross-edges", ProtocolKind::CrossEdgesTree, k, rules, Leader(0), OutputStates::All)
    }

    fn is_stable(&self, config: &Configuration, k: u32) -> bool {
        validators::cross_edges_stable(config, k)
    }

    fn tracker(&self, config: &Configuration, k: u32) -> Box<dyn StabilityTracker> {
        Box::new(LowDegreeTracker::new(config, k))
    }

    fn check_invariants(&self, config: &Configuration, k: u32) -> Result<()> {
        validators::check_degree_invariants(config, k)
    }

    fn in_language(&self, graph: &Graph, k: u32) -> bool {
        validators::is_lk_regular(graph, k - 1, k, true).unwrap_or(false)
    }
}

struct FreeCountTracker;

impl StabilityTracker for FreeCountTracker {
    fn observe(&mut self, _config: &Configuration, _touched: [usize; 2]) {}

    fn is_stable(&self, config: &Configuration) -> bool {
        config.free_count() == 0
    }
}

/// Maintains the set of non-free nodes with counter <= k - 2, the only
/// nodes that can still form cross edges.
struct LowDegreeTracker {
    threshold: u32,
    members: Vec<usize>,
    position: Vec<usize>,
}

impl LowDegreeTracker {
    fn new(config: &Configuration, k: u32) -> LowDegreeTracker {
        let mut t = LowDegreeTracker { threshold: k - 2, members: Vec::new(), position: vec![usize::MAX; config.n()] };
        for u in 0..config.n() {
            t.refresh(config, u);
        }
        t
    }

    fn refresh(&mut self, config: &Configuration, u: usize) {
        let low = config.state(u).counter().is_some_and(|c| c <= self.threshold);
        let pos = self.position[u];
        if low && pos == usize::MAX {
            self.position[u] = self.members.len();
            self.members.push(u);
        } else if !low && pos != usize::MAX {
            let last = *self.members.last().expect("member present");
            self.members.swap_remove(pos);
            if last != u {
                self.position[last] = pos;
            }
            self.position[u] = usize::MAX;
        }
    }
}

impl StabilityTracker for LowDegreeTracker {
    fn observe(&mut self, config: &Configuration, touched: [usize; 2]) {
        for u in touched {
            self.refresh(config, u);
        }
    }

    fn is_stable(&self, config: &Configuration) -> bool {
        // a clique whose members all have degree <= k - 2 has at most k - 1 members
        config.free_count() == 0
            && self.members.len() <= self.threshold as usize + 1
            && validators::pairwise_adjacent(config, &self.members)
    }
}

pub struct Registry {
    entries: BTreeMap<&'static str, Box<dyn ConstructionStrategy>>,
}

impl Registry {
    fn builtin() -> Registry {
        let mut r = Registry { entries: BTreeMap::new() };
        r.register(Box::new(SlotTree { name: "two-slot", kind: ProtocolKind::TwoSlot, fixed: Some(2) }));
        r.register(Box::new(SlotTree { name: "k-slot", kind: ProtocolKind::KSlot, fixed: None }));
        r.register(Box::new(CrossEdges));
        r
    }

    fn register(&mut self, s: Box<dyn ConstructionStrategy>) {
        self.entries.insert(s.name(), s);
    }

    pub fn get(&self, name: &str) -> Result<&dyn ConstructionStrategy> {
        self.entries.get(name).map(|b| b.as_ref()).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown protocol {name:?}; expected one of {}", self.names().join(", ")))
        })
    }

    pub fn for_kind(&self, kind: ProtocolKind) -> Result<&dyn ConstructionStrategy> {
        self.entries
            .values()
            .map(|b| b.as_ref())
            .find(|s| s.kind() == kind)
            .ok_or_else(|| Error::Unsupported(format!("no strategy for protocol kind {kind:?}")))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

pub fn registry() -> &'static Registry {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    REGISTRY.get_or_init(Registry::builtin)
}

pub fn strategy_for(protocol: &Protocol) -> Result<&'static dyn ConstructionStrategy> {
    registry().for_kind(protocol.kind())
}

/// Builds a registered protocol by name. `k = None` picks the smallest valid k.
pub fn build(name: &str, k: Option<u32>) -> Result<Protocol> {
    let s = registry().get(name)?;
    s.build(k.or(s.fixed_k()).unwrap_or(s.min_k()))
}

pub fn two_slot() -> Protocol {
    build("two-slot", Some(2)).expect("two-slot is well formed")
}

pub fn k_slot(k: u32) -> Result<Protocol> {
    build("k-slot", Some(k))
}

pub fn cross_edges_tree(k: u32) -> Result<Protocol> {
    build("cross-edges", Some(k))
}

/// All nodes free except `leader_id`, which starts in the leader state.
pub fn initial_configuration(n: usize, protocol: &Protocol, leader_id: usize) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::InvalidParameter("population must be non-empty".into()));
    }
    if leader_id >= n {
        return Err(Error::InvalidParameter(format!("leader id {leader_id} out of range for n = {n}")));
    }
    let mut c = Configuration::uniform(n, protocol.initial_state());
    c.set_state(leader_id, protocol.leader_state());
    Ok(c)
}
