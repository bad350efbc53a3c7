//! The inference engine: backward chaining over goals, forward chaining to
//! the saturation fixpoint, and caching of proven answers.
//!
//! Backward search is depth-first. Facts are tried before rules, facts in
//! insertion order, rules in assertion order, antecedents left to right.
//! Rule variables are renamed with a reserved `?_g` prefix before
//! unification; goal variables should avoid that prefix.

use std::collections::HashSet;

use crate::formula::{Atom, Symbol, Term};
use crate::kb::{KnowledgeBase, Provenance, Rule};
use crate::subst::{unify_in, Substitution};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Termination controls for both chaining directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainConfig {
    /// Maximum proof-tree height for backward chaining.
    pub depth_limit: usize,
    /// Maximum saturation rounds for forward chaining.
    pub max_rounds: usize,
    /// Whether `show` stores proven ground answers as derived facts.
    pub cache_derived: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig { depth_limit: 32, max_rounds: 64, cache_derived: true }
    }
}

/// How a proof node was closed: by a stored fact or by applying a rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStep {
    Fact,
    Rule { index: usize },
}

/// One node of a proof tree. Fact nodes are leaves; rule nodes carry one
/// child per antecedent, in antecedent order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofNode {
    pub goal: Atom,
    pub step: ProofStep,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    /// Height of the tree: a fact leaf is 1.
    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ProofNode::depth).max().unwrap_or(0)
    }

    fn substituted(&self, s: &Substitution) -> ProofNode {
        ProofNode {
            goal: s.apply_atom(&self.goal),
            step: self.step.clone(),
            children: self.children.iter().map(|c| c.substituted(s)).collect(),
        }
    }
}

/// Outcome of a backward-chaining query. `bindings[i]` is the answer
/// substitution (restricted to the goal's variables) proved by `proofs[i]`.
/// A proven ground goal has `bindings == [{}]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofResult {
    pub proven: bool,
    pub bindings: Vec<Substitution>,
    pub proofs: Vec<ProofNode>,
    pub depth_limited: bool,
}

struct Searcher<'a> {
    kb: &'a KnowledgeBase,
    depth_limit: usize,
    fresh: u64,
    depth_limited: bool,
}

impl Searcher<'_> {
    fn rename_rule(&mut self, rule: &Rule) -> (Vec<Atom>, Atom) {
        let mut s = Substitution::new();
        for v in &rule.vars {
            let fresh = Term::variable(format!("?_g{}", self.fresh));
            self.fresh += 1;
            s = s.bind(v, &fresh).expect("fresh variable binding cannot fail occurs check");
        }
        (
            rule.antecedents.iter().map(|a| s.apply_atom(a)).collect(),
            s.apply_atom(&rule.consequent),
        )
    }

    /// Enumerate solutions for one goal. Ground goals yield at most one
    /// solution; a resolved ground goal equal to a ground ancestor on the
    /// current path is cut off.
    fn solve(
        &mut self,
        goal: &Atom,
        s: &Substitution,
        depth: usize,
        ancestors: &mut Vec<Atom>,
    ) -> Vec<(Substitution, ProofNode)> {
        let g = s.apply_atom(goal);
        let ground = g.is_ground();
        if ground && ancestors.contains(&g) {
            return Vec::new();
        }
        if ground {
            ancestors.push(g.clone());
        }
        let out = self.solve_resolved(&g, s, depth, ancestors, ground);
        if ground {
            ancestors.pop();
        }
        out
    }

    fn solve_resolved(
        &mut self,
        g: &Atom,
        s: &Substitution,
        depth: usize,
        ancestors: &mut Vec<Atom>,
        ground: bool,
    ) -> Vec<(Substitution, ProofNode)> {
        let mut out = Vec::new();
        for (fact, _) in self.kb.facts_matching(g) {
            if let Some(s2) = unify_in(g, &fact.atom, s) {
                out.push((s2, ProofNode {
                    goal: fact.atom.clone(),
                    step: ProofStep::Fact,
                    children: Vec::new(),
                }));
                if ground {
                    return out;
                }
            }
        }
        for index in 0..self.kb.rules().len() {
            let (antecedents, consequent) = self.rename_rule(&self.kb.rules()[index]);
            let Some(start) = unify_in(g, &consequent, s) else { continue };
            if depth < 2 {
                self.depth_limited = true;
                continue;
            }
            let mut partial: Vec<(Substitution, Vec<ProofNode>)> = vec![(start, Vec::new())];
            for ante in &antecedents {
                let mut next = Vec::new();
                for (sp, nodes) in &partial {
                    for (sc, node) in self.solve(ante, sp, depth - 1, ancestors) {
                        let mut grown = nodes.clone();
                        grown.push(node);
                        next.push((sc, grown));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (sf, children) in partial {
                let node = ProofNode {
                    goal: sf.apply_atom(g),
                    step: ProofStep::Rule { index },
                    children,
                };
                out.push((sf, node));
                if ground {
                    return out;
                }
            }
        }
        out
    }
}

/// Prove a goal against the data-base. Sound for Horn semantics and
/// complete up to `cfg.depth_limit` proof height; `depth_limited` reports
/// whether any branch was cut off by the limit.
pub fn backward_chain(kb: &KnowledgeBase, goal: &Atom, cfg: &ChainConfig) -> ProofResult {
    let mut searcher = Searcher { kb, depth_limit: cfg.depth_limit, fresh: 0, depth_limited: false };
    let depth = searcher.depth_limit;
    let mut ancestors = Vec::new();
    let solutions = searcher.solve(goal, &Substitution::new(), depth, &mut ancestors);
    let vars = goal.variables();
    let mut bindings = Vec::new();
    let mut proofs = Vec::new();
    for (s, node) in solutions {
        let answer = s.restrict(&vars);
        if bindings.contains(&answer) {
            continue;
        }
        bindings.push(answer);
        proofs.push(node.substituted(&s));
    }
    ProofResult { proven: !bindings.is_empty(), bindings, proofs, depth_limited: searcher.depth_limited }
}

/// Prove a goal, then store each proven ground answer as a derived fact
/// (when `cfg.cache_derived`). Unproven or non-ground answers leave the
/// data-base untouched.
pub fn show(kb: &KnowledgeBase, goal: &Atom, cfg: &ChainConfig) -> (ProofResult, KnowledgeBase) {
    let result = backward_chain(kb, goal, cfg);
    if !cfg.cache_derived || !result.proven {
        return (result, kb.clone());
    }
    let mut kb2 = kb.clone();
    let gen = kb2.next_generation();
    let mut cached = false;
    for s in &result.bindings {
        let atom = s.apply_atom(goal);
        if atom.is_ground() {
            cached |= kb2.insert_fact(atom, Provenance::Derived, gen);
        }
    }
    if cached {
        kb2.note_generation(gen);
    }
    (result, kb2)
}

/// A ground firing of one rule: the matched premises and the conclusion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RuleInstance {
    pub rule_index: usize,
    pub premises: Vec<Atom>,
    pub conclusion: Atom,
}

/// All ground firings of a rule against the current facts. Consequent
/// variables not bound by the antecedents range over the data-base's
/// constants.
pub(crate) fn rule_ground_instances(kb: &KnowledgeBase, rule_index: usize) -> Vec<RuleInstance> {
    let rule = &kb.rules()[rule_index];
    let mut partial: Vec<(Substitution, Vec<Atom>)> = vec![(Substitution::new(), Vec::new())];
    for ante in &rule.antecedents {
        let mut next = Vec::new();
        for (s, premises) in &partial {
            let pat = s.apply_atom(ante);
            for (fact, _) in kb.facts_matching(&pat) {
                if let Some(s2) = unify_in(&pat, &fact.atom, s) {
                    let mut grown = premises.clone();
                    grown.push(fact.atom.clone());
                    next.push((s2, grown));
                }
            }
        }
        partial = next;
        if partial.is_empty() {
            return Vec::new();
        }
    }
    let constants = kb.constants();
    let mut out = Vec::new();
    for (s, premises) in partial {
        let free: Vec<Symbol> = rule
            .consequent
            .variables()
            .into_iter()
            .filter(|v| s.get(v).is_none())
            .collect();
        let groundings = enumerate_groundings(&s, &free, &constants);
        for sg in groundings {
            let conclusion = sg.apply_atom(&rule.consequent);
            if conclusion.is_ground() {
                out.push(RuleInstance { rule_index, premises: premises.clone(), conclusion });
            }
        }
    }
    out
}

fn enumerate_groundings(s: &Substitution, free: &[Symbol], constants: &[Symbol]) -> Vec<Substitution> {
    let mut acc = vec![s.clone()];
    for v in free {
        let mut next = Vec::new();
        for base in &acc {
            for c in constants {
                if let Some(ext) = base.bind(v, &Term::Constant(c.clone())) {
                    next.push(ext);
                }
            }
        }
        acc = next;
    }
    acc
}

fn new_round_atoms(kb: &KnowledgeBase, per_rule: Vec<Vec<Atom>>) -> Vec<Atom> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for atom in per_rule.into_iter().flatten() {
        if !kb.contains(&atom) && seen.insert(atom.clone()) {
            out.push(atom);
        }
    }
    out
}

fn run_rounds(
    kb: &KnowledgeBase,
    cfg: &ChainConfig,
    round: impl Fn(&KnowledgeBase) -> Vec<Vec<Atom>>,
) -> KnowledgeBase {
    let mut kb = kb.clone();
    let mut rounds_used = 0;
    loop {
        let additions = new_round_atoms(&kb, round(&kb));
        if additions.is_empty() {
            kb.set_saturation_truncated(false);
            break;
        }
        if rounds_used == cfg.max_rounds {
            kb.set_saturation_truncated(true);
            break;
        }
        let gen = kb.bump_generation();
        for atom in additions {
            kb.insert_fact(atom, Provenance::Derived, gen);
        }
        rounds_used += 1;
    }
    kb
}

fn sequential_round(kb: &KnowledgeBase) -> Vec<Vec<Atom>> {
    (0..kb.rules().len())
        .map(|i| rule_ground_instances(kb, i).into_iter().map(|inst| inst.conclusion).collect())
        .collect()
}

/// Saturate by naive round-based rule application: each round fires every
/// rule against the start-of-round snapshot, then appends the new
/// conclusions. Stops at the fixpoint or after `cfg.max_rounds` rounds
/// (reported by `saturation_truncated` in stats). Always equals
/// `forward_chain` regardless of the `parallel` feature.
pub fn forward_chain_sequential(kb: &KnowledgeBase, cfg: &ChainConfig) -> KnowledgeBase {
    run_rounds(kb, cfg, sequential_round)
}

/// Saturate with rules evaluated in parallel within each round. Conclusions
/// are recombined in rule order, so the result is identical to
/// `forward_chain_sequential`.
#[cfg(feature = "parallel")]
pub fn forward_chain_parallel(kb: &KnowledgeBase, cfg: &ChainConfig) -> KnowledgeBase {
    run_rounds(kb, cfg, |kb| {
        (0..kb.rules().len())
            .into_par_iter()
            .map(|i| rule_ground_instances(kb, i).into_iter().map(|inst| inst.conclusion).collect())
            .collect()
    })
}

/// Saturate the data-base. Dispatches to the parallel evaluator when the
/// `parallel` feature is enabled, the sequential one otherwise.
pub fn forward_chain(kb: &KnowledgeBase, cfg: &ChainConfig) -> KnowledgeBase {
    #[cfg(feature = "parallel")]
    {
        forward_chain_parallel(kb, cfg)
    }
    #[cfg(not(feature = "parallel"))]
    {
        forward_chain_sequential(kb, cfg)
    }
}
