//! Semantic-network view of the data-base: facts linked by the rule
//! instances that connect them, with detection of derivation loops.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::formula::Atom;
use crate::infer::{forward_chain, rule_ground_instances, ChainConfig};
use crate::kb::KnowledgeBase;

/// A premise-to-conclusion link contributed by one rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: Atom,
    pub to: Atom,
    pub rule_index: usize,
}

/// Fact nodes and rule-instance edges over the saturated data-base.
/// `loop_nodes` lists the nodes that lie on a directed cycle.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Network {
    pub nodes: Vec<Atom>,
    pub edges: Vec<Edge>,
    pub loop_nodes: Vec<Atom>,
}

/// Saturate the data-base and link each fired rule instance's premises to
/// its conclusion. Nodes keep fact insertion order; edges follow rule
/// order, then instance enumeration order, deduplicated.
pub fn semantic_network(kb: &KnowledgeBase) -> Network {
    let sat = forward_chain(kb, &ChainConfig::default());
    let mut nodes: Vec<Atom> = sat.facts().iter().map(|f| f.atom.clone()).collect();
    let mut edges: Vec<Edge> = Vec::new();
    for rule_index in 0..sat.rules().len() {
        for inst in rule_ground_instances(&sat, rule_index) {
            if !nodes.contains(&inst.conclusion) {
                nodes.push(inst.conclusion.clone());
            }
            for premise in inst.premises {
                let edge = Edge { from: premise, to: inst.conclusion.clone(), rule_index };
                if !edges.contains(&edge) {
                    edges.push(edge);
                }
            }
        }
    }

    let mut graph = DiGraph::<(), ()>::new();
    let indices: Vec<_> = nodes.iter().map(|_| graph.add_node(())).collect();
    let position = |atom: &Atom| nodes.iter().position(|n| n == atom).unwrap();
    for e in &edges {
        graph.add_edge(indices[position(&e.from)], indices[position(&e.to)], ());
    }
    let mut on_cycle = vec![false; nodes.len()];
    for component in tarjan_scc(&graph) {
        if component.len() >= 2 {
            for ix in component {
                on_cycle[ix.index()] = true;
            }
        }
    }
    for e in &edges {
        if e.from == e.to {
            on_cycle[position(&e.from)] = true;
        }
    }
    let loop_nodes = nodes
        .iter()
        .zip(&on_cycle)
        .filter(|(_, &c)| c)
        .map(|(n, _)| n.clone())
        .collect();

    Network { nodes, edges, loop_nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, parse_goal};

    fn kb_from(lines: &[&str]) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for l in lines {
            kb = kb.assert_formula(&parse(l).unwrap()).unwrap();
        }
        kb
    }

    #[test]
    fn elephant_kb_links_premise_to_conclusion() {
        let net = semantic_network(&kb_from(&[
            "(inst Clyde elephant)",
            "(forall (z) (if (inst z elephant) (color z gray)))",
        ]));
        assert_eq!(net.nodes.len(), 2);
        assert_eq!(net.edges.len(), 1);
        assert_eq!(net.edges[0].from, parse_goal("(inst Clyde elephant)").unwrap());
        assert_eq!(net.edges[0].to, parse_goal("(color Clyde gray)").unwrap());
        assert!(net.loop_nodes.is_empty());
    }

    #[test]
    fn empty_kb_gives_empty_network() {
        assert_eq!(semantic_network(&KnowledgeBase::new()), Network::default());
    }

    #[test]
    fn mutual_rules_put_both_facts_on_a_loop() {
        let net = semantic_network(&kb_from(&[
            "(p a)",
            "(forall (x) (if (p x) (q x)))",
            "(forall (x) (if (q x) (p x)))",
        ]));
        assert_eq!(net.loop_nodes.len(), 2);
        assert!(net.loop_nodes.contains(&parse_goal("(p a)").unwrap()));
        assert!(net.loop_nodes.contains(&parse_goal("(q a)").unwrap()));
    }

    #[test]
    fn self_implication_is_a_loop() {
        let net = semantic_network(&kb_from(&["(p a)", "(forall (x) (if (p x) (p x)))"]));
        assert_eq!(net.loop_nodes, vec![parse_goal("(p a)").unwrap()]);
    }

    #[test]
    fn conjunctive_rule_links_every_premise() {
        let net = semantic_network(&kb_from(&[
            "(parent Tom Bob)",
            "(male Tom)",
            "(forall (x y) (if (and (parent x y) (male x)) (father x y)))",
        ]));
        let father = parse_goal("(father Tom Bob)").unwrap();
        let sources: Vec<&Atom> =
            net.edges.iter().filter(|e| e.to == father).map(|e| &e.from).collect();
        assert_eq!(sources.len(), 2);
        assert!(sources.contains(&&parse_goal("(parent Tom Bob)").unwrap()));
        assert!(sources.contains(&&parse_goal("(male Tom)").unwrap()));
    }
}
