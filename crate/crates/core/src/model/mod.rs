//! The network constructors model: node states, transition rules,
//! configurations over a complete interaction graph, and encounter semantics.

mod config;
mod edges;
mod graph;
mod protocol;
pub mod snapshot;
mod state;

pub use config::Configuration;
pub use edges::{pair_count, pair_from_index, pair_index, EdgeSet};
pub use graph::Graph;
pub use protocol::{OutputStates, Protocol, ProtocolKind, TransitionRule, Triple};
pub use snapshot::Snapshot;
pub use state::NodeState;

#[cfg(test)]
mod tests {
    use super::NodeState::*;
    use super::*;
    use crate::error::Error;
    use crate::protocols::{cross_edges_tree, initial_configuration, two_slot};

    #[test]
    fn lookup_two_slot() {
        let p = two_slot();
        let r = p.lookup_rule(Leader(0), Free, false).unwrap();
        assert_eq!(r.post, Triple::new(Leader(1), Ordinary(0), true));
        assert!(p.lookup_rule(Ordinary(2), Free, false).is_none());
        assert!(p.lookup_rule(Free, Free, false).is_none());
    }

    #[test]
    fn encounter_leader_attaches_free_node() {
        let p = two_slot();
        let mut c = initial_configuration(5, &p, 0).unwrap();
        assert!(c.apply_encounter(&p, 0, 3, false).unwrap());
        assert_eq!(c.state(0), Leader(1));
        assert_eq!(c.state(3), Ordinary(0));
        assert!(c.edge(0, 3));
        assert_eq!((c.degree(0), c.degree(3)), (1, 1));
        assert_eq!(c.free_count(), 3);
    }

    #[test]
    fn encounter_between_free_nodes_is_a_noop() {
        let p = two_slot();
        let mut c = initial_configuration(5, &p, 0).unwrap();
        let before = snapshot::render(&c, p.name(), p.k());
        assert!(!c.apply_encounter(&p, 1, 2, true).unwrap());
        assert_eq!(snapshot::render(&c, p.name(), p.k()), before);
    }

    #[test]
    fn encounter_cross_edge() {
        let p = cross_edges_tree(3).unwrap();
        let mut c = Configuration::uniform(3, Free);
        c.set_state(0, Leader(1));
        c.set_state(1, Ordinary(1));
        c.set_state(2, Ordinary(0));
        for coin in [false, true] {
            let mut c = c.clone();
            assert!(c.apply_encounter(&p, 1, 2, coin).unwrap());
            assert_eq!((c.state(1), c.state(2)), (Ordinary(2), Ordinary(1)));
            assert!(c.edge(1, 2));
        }
    }

    #[test]
    fn encounter_rejects_bad_pairs() {
        let p = two_slot();
        let mut c = initial_configuration(3, &p, 0).unwrap();
        assert!(matches!(c.apply_encounter(&p, 1, 1, true), Err(Error::InvalidArguments(_))));
        assert!(matches!(c.apply_encounter(&p, 0, 3, true), Err(Error::InvalidArguments(_))));
    }

    #[test]
    fn deactivating_rule_is_applied() {
        let rules = vec![TransitionRule::new(
            Triple::new(Ordinary(1), Ordinary(1), true),
            Triple::new(Ordinary(0), Ordinary(0), false),
        )];
        let p = Protocol::new("cut", ProtocolKind::Custom, 1, rules, Leader(0), OutputStates::All).unwrap();
        let mut c = Configuration::uniform(2, Ordinary(1));
        c.set_edge(0, 1, true);
        assert!(c.apply_encounter(&p, 0, 1, true).unwrap());
        assert!(!c.edge(0, 1));
        assert_eq!(c.degrees(), &[0, 0]);
        assert!(c.is_stable_naive(&p));
    }

    #[test]
    fn stable_naive_small_cases() {
        let p = two_slot();
        let mut c = initial_configuration(3, &p, 0).unwrap();
        assert!(!c.is_stable_naive(&p));
        c.apply_encounter(&p, 0, 1, true).unwrap();
        c.apply_encounter(&p, 0, 2, true).unwrap();
        assert_eq!(c.state(0), Leader(2));
        assert!(c.is_stable_naive(&p));

        let x = cross_edges_tree(3).unwrap();
        let single = initial_configuration(1, &x, 0).unwrap();
        assert!(single.is_stable_naive(&x));
    }

    #[test]
    fn output_graph_of_initial_configuration_has_no_edges() {
        let p = two_slot();
        let c = initial_configuration(6, &p, 2).unwrap();
        let g = c.output_graph(&p);
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.root(), Some(2));
    }

    #[test]
    fn output_graph_restricted_to_output_states() {
        let p = two_slot().with_output_states(OutputStates::Only([Leader(1), Ordinary(0)].into_iter().collect()));
        let mut c = initial_configuration(4, &p, 0).unwrap();
        c.apply_encounter(&p, 0, 2, true).unwrap();
        let g = c.output_graph(&p);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }
}
