use std::collections::{BTreeSet, HashMap};

use super::state::NodeState;
use crate::error::{Error, Result};

/// Left- or right-hand side of a transition: (initiator, responder, edge bit).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub initiator: NodeState,
    pub responder: NodeState,
    pub edge: bool,
}

impl Triple {
    pub fn new(initiator: NodeState, responder: NodeState, edge: bool) -> Self {
        Triple { initiator, responder, edge }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TransitionRule {
    pub pre: Triple,
    pub post: Triple,
}

impl TransitionRule {
    pub fn new(pre: Triple, post: Triple) -> Self {
        TransitionRule { pre, post }
    }

    pub fn is_effective(&self) -> bool {
        self.pre != self.post
    }
}

/// Which shipped construction a protocol instantiates. `Custom` covers
/// hand-assembled rule tables, which have no fast stability predicate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProtocolKind {
    TwoSlot,
    KSlot,
    CrossEdgesTree,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutputStates {
    /// Q_out = Q.
    All,
    Only(BTreeSet<NodeState>),
}

impl OutputStates {
    pub fn contains(&self, s: NodeState) -> bool {
        match self {
            OutputStates::All => true,
            OutputStates::Only(set) => set.contains(&s),
        }
    }
}

// Dense tables stay below ~1 MiB; larger alphabets fall back to hashing.
const DENSE_LIMIT: usize = 512;
const NO_RULE: u32 = u32::MAX;

#[derive(Clone, Debug)]
enum RuleIndex {
    Dense { width: usize, max_counter: u32, slots: Vec<u32> },
    Sparse(HashMap<Triple, u32>),
}

impl RuleIndex {
    fn build(rules: &[TransitionRule]) -> RuleIndex {
        let max_counter = rules
            .iter()
            .flat_map(|r| [r.pre.initiator, r.pre.responder])
            .filter_map(NodeState::counter)
            .max()
            .unwrap_or(0);
        let width = 2 * (max_counter as usize + 1) + 1;
        if width > DENSE_LIMIT {
            let map = rules.iter().enumerate().map(|(i, r)| (r.pre, i as u32)).collect();
            return RuleIndex::Sparse(map);
        }
        let mut slots = vec![NO_RULE; width * width * 2];
        for (i, r) in rules.iter().enumerate() {
            let a = dense_slot(r.pre.initiator, max_counter).expect("counter within bound");
            let b = dense_slot(r.pre.responder, max_counter).expect("counter within bound");
            slots[(a * width + b) * 2 + r.pre.edge as usize] = i as u32;
        }
        RuleIndex::Dense { width, max_counter, slots }
    }

    #[inline]
    fn find(&self, pre: Triple) -> Option<usize> {
        match self {
            RuleIndex::Dense { width, max_counter, slots } => {
                let a = dense_slot(pre.initiator, *max_counter)?;
                let b = dense_slot(pre.responder, *max_counter)?;
                let i = slots[(a * width + b) * 2 + pre.edge as usize];
                (i != NO_RULE).then_some(i as usize)
            }
            RuleIndex::Sparse(map) => map.get(&pre).map(|&i| i as usize),
        }
    }
}

#[inline]
fn dense_slot(s: NodeState, max_counter: u32) -> Option<usize> {
    match s {
        NodeState::Free => Some(0),
        NodeState::Leader(c) if c <= max_counter => Some(1 + c as usize),
        NodeState::Ordinary(c) if c <= max_counter => Some(2 + (max_counter + c) as usize),
        _ => None,
    }
}

/// A network constructor `(Q, q0, Q_out, δ)` with δ given by its effective
/// rules only. Any triple absent from the table is ineffective.
#[derive(Clone, Debug)]
pub struct Protocol {
    name: String,
    kind: ProtocolKind,
    k: u32,
    rules: Vec<TransitionRule>,
    initial_state: NodeState,
    leader_state: NodeState,
    output_states: OutputStates,
    index: RuleIndex,
}

impl Protocol {
    pub fn new(
        name: impl Into<String>,
        kind: ProtocolKind,
        k: u32,
        rules: Vec<TransitionRule>,
        leader_state: NodeState,
        output_states: OutputStates,
    ) -> Result<Protocol> {
        let initial_state = NodeState::Free;
        if leader_state == initial_state {
            return Err(Error::InvalidParameter("leader state must differ from the initial state".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &rules {
            if !r.is_effective() {
                return Err(Error::InvalidParameter(format!("ineffective rule {r:?}")));
            }
            if !seen.insert(r.pre) {
                return Err(Error::InvalidParameter(format!("duplicate left-hand side {:?}", r.pre)));
            }
        }
        let index = RuleIndex::build(&rules);
        Ok(Protocol { name: name.into(), kind, k, rules, initial_state, leader_state, output_states, index })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn rules(&self) -> &[TransitionRule] {
        &self.rules
    }

    pub fn initial_state(&self) -> NodeState {
        self.initial_state
    }

    pub fn leader_state(&self) -> NodeState {
        self.leader_state
    }

    pub fn output_states(&self) -> &OutputStates {
        &self.output_states
    }

    pub fn with_output_states(mut self, output_states: OutputStates) -> Protocol {
        self.output_states = output_states;
        self
    }

    /// The unique rule whose left-hand side is `(a, b, edge)`.
    #[inline]
    pub fn lookup_rule(&self, a: NodeState, b: NodeState, edge: bool) -> Option<&TransitionRule> {
        self.index.find(Triple::new(a, b, edge)).map(|i| &self.rules[i])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use NodeState::*;

    fn rule(a: NodeState, b: NodeState, e: bool, a2: NodeState, b2: NodeState, e2: bool) -> TransitionRule {
        TransitionRule::new(Triple::new(a, b, e), Triple::new(a2, b2, e2))
    }

    #[test]
    fn rejects_duplicate_pre() {
        let rules = vec![
            rule(Leader(0), Free, false, Leader(1), Ordinary(0), true),
            rule(Leader(0), Free, false, Leader(1), Ordinary(1), true),
        ];
        let err = Protocol::new("x", ProtocolKind::Custom, 1, rules, Leader(0), OutputStates::All);
        assert!(matches!(err, Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn rejects_ineffective_rule_and_free_leader() {
        let rules = vec![rule(Leader(0), Free, false, Leader(0), Free, false)];
        assert!(Protocol::new("x", ProtocolKind::Custom, 1, rules, Leader(0), OutputStates::All).is_err());
        assert!(Protocol::new("x", ProtocolKind::Custom, 1, vec![], Free, OutputStates::All).is_err());
    }

    #[test]
    fn sparse_and_dense_agree() {
        let rules: Vec<_> =
            (0..400).map(|c| rule(Ordinary(c), Free, false, Ordinary(c + 1), Ordinary(0), true)).collect();
        let p = Protocol::new("big", ProtocolKind::Custom, 400, rules.clone(), Leader(0), OutputStates::All).unwrap();
        assert!(matches!(p.index, RuleIndex::Sparse(_)));
        let small =
            Protocol::new("small", ProtocolKind::Custom, 400, rules[..10].to_vec(), Leader(0), OutputStates::All)
                .unwrap();
        assert!(matches!(small.index, RuleIndex::Dense { .. }));
        for c in 0..10 {
            assert_eq!(p.lookup_rule(Ordinary(c), Free, false), small.lookup_rule(Ordinary(c), Free, false));
        }
        assert!(small.lookup_rule(Ordinary(11), Free, false).is_none());
        assert!(small.lookup_rule(Ordinary(3), Free, true).is_none());
        assert!(p.lookup_rule(Ordinary(399), Free, false).is_some());
    }
}
