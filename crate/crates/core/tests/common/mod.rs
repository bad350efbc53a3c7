//! Shared test oracles and random generators.
//!
//! Everything here recomputes expected results from first principles:
//! ground substitution over an explicit constant universe, exhaustive
//! enumeration, and plain set logic. None of it calls into the engine's
//! unification, chaining, or reduction internals, so a bug there cannot
//! cancel out in the checks.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use pckb_core::formula::{Atom, Formula, Symbol, Term};
use pckb_core::KnowledgeBase;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// Term-level helpers: plain-map substitution, matching, alpha equivalence.

/// Apply a variable assignment once, without chasing bindings.
pub fn apply_map(map: &BTreeMap<Symbol, Term>, t: &Term) -> Term {
    match t {
        Term::Variable(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Constant(_) => t.clone(),
        Term::Compound(f, args) => {
            Term::Compound(f.clone(), args.iter().map(|a| apply_map(map, a)).collect())
        }
    }
}

pub fn apply_map_atom(map: &BTreeMap<Symbol, Term>, a: &Atom) -> Atom {
    Atom { predicate: a.predicate.clone(), args: a.args.iter().map(|t| apply_map(map, t)).collect() }
}

pub fn term_vars(t: &Term, out: &mut Vec<Symbol>) {
    match t {
        Term::Variable(v) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        Term::Constant(_) => {}
        Term::Compound(_, args) => {
            for a in args {
                term_vars(a, out);
            }
        }
    }
}

/// First-order matching of a pattern against a ground term: structural
/// recursion binding pattern variables consistently.
pub fn ground_match(pattern: &Term, target: &Term, bound: &mut BTreeMap<Symbol, Term>) -> bool {
    match pattern {
        Term::Variable(v) => match bound.get(v) {
            Some(seen) => seen == target,
            None => {
                bound.insert(v.clone(), target.clone());
                true
            }
        },
        Term::Constant(c) => matches!(target, Term::Constant(d) if c == d),
        Term::Compound(f, args) => match target {
            Term::Compound(g, targs) if f == g && args.len() == targs.len() => {
                args.iter().zip(targs).all(|(p, t)| ground_match(p, t, bound))
            }
            _ => false,
        },
    }
}

/// Equality up to a bijective renaming of variables.
pub fn alpha_equivalent(a: &Term, b: &Term) -> bool {
    fn go(
        a: &Term,
        b: &Term,
        ab: &mut BTreeMap<Symbol, Symbol>,
        ba: &mut BTreeMap<Symbol, Symbol>,
    ) -> bool {
        match (a, b) {
            (Term::Variable(x), Term::Variable(y)) => {
                match ab.get(x) {
                    Some(m) if m != y => return false,
                    None => {
                        ab.insert(x.clone(), y.clone());
                    }
                    _ => {}
                }
                match ba.get(y) {
                    Some(m) if m != x => return false,
                    None => {
                        ba.insert(y.clone(), x.clone());
                    }
                    _ => {}
                }
                true
            }
            (Term::Constant(x), Term::Constant(y)) => x == y,
            (Term::Compound(f, xs), Term::Compound(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, ab, ba))
            }
            _ => false,
        }
    }
    go(a, b, &mut BTreeMap::new(), &mut BTreeMap::new())
}

// ---------------------------------------------------------------------------
// Ground-term universes and brute-force unifier enumeration.

pub fn cartesian(pool: &[Term], n: usize) -> Vec<Vec<Term>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for prefix in &out {
            for t in pool {
                let mut v = prefix.clone();
                v.push(t.clone());
                next.push(v);
            }
        }
        out = next;
    }
    out
}

/// All ground terms over the constants and functors up to the given depth.
pub fn ground_universe(constants: &[&str], functors: &[(&str, usize)], depth: usize) -> Vec<Term> {
    let mut layer: Vec<Term> =
        constants.iter().map(|c| Term::Constant(Symbol::new(*c))).collect();
    for _ in 1..depth {
        let mut next = layer.clone();
        for (f, arity) in functors {
            for combo in cartesian(&layer, *arity) {
                let t = Term::Compound(Symbol::new(*f), combo);
                if !next.contains(&t) {
                    next.push(t);
                }
            }
        }
        layer = next;
    }
    layer
}

/// Every assignment of universe terms to the variables of `s` and `t` that
/// makes the two terms literally equal.
pub fn ground_unifiers(s: &Term, t: &Term, universe: &[Term]) -> Vec<BTreeMap<Symbol, Term>> {
    let mut vars = Vec::new();
    term_vars(s, &mut vars);
    term_vars(t, &mut vars);
    let mut out = Vec::new();
    for combo in cartesian(universe, vars.len()) {
        let map: BTreeMap<Symbol, Term> = vars.iter().cloned().zip(combo).collect();
        if apply_map(&map, s) == apply_map(&map, t) {
            out.push(map);
        }
    }
    out
}

/// Random term of bounded depth over fixed pools.
pub fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    const VARS: [&str; 3] = ["?x", "?y", "?z"];
    const CONSTANTS: [&str; 3] = ["a", "b", "c"];
    const FUNCTORS: [(&str, usize); 2] = [("f", 1), ("g", 2)];
    let top = if depth <= 1 { 2 } else { 3 };
    match rng.gen_range(0..top) {
        0 => Term::Variable(Symbol::new(*VARS.choose(rng).unwrap())),
        1 => Term::Constant(Symbol::new(*CONSTANTS.choose(rng).unwrap())),
        _ => {
            let (f, arity) = FUNCTORS.choose(rng).unwrap();
            Term::Compound(
                Symbol::new(*f),
                (0..*arity).map(|_| random_term(rng, depth - 1)).collect(),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Horn data-base model: generation and a naive bottom-up evaluator.

#[derive(Debug, Clone)]
pub struct HornRule {
    pub vars: Vec<Symbol>,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
}

#[derive(Debug, Clone)]
pub struct HornModel {
    pub predicates: Vec<(Symbol, usize)>,
    pub constants: Vec<Symbol>,
    pub facts: Vec<Atom>,
    pub rules: Vec<HornRule>,
}

impl HornModel {
    /// Assemble the engine-side data-base through the public API.
    pub fn to_kb(&self) -> KnowledgeBase {
        let mut kb = KnowledgeBase::new();
        for f in &self.facts {
            kb = kb.assert_formula(&Formula::Atom(f.clone())).unwrap();
        }
        for r in &self.rules {
            kb = kb.assert_formula(&rule_formula(r)).unwrap();
        }
        kb
    }

    /// Every ground atom over the model's predicates and the constants that
    /// actually appear in its facts and rules. A pool constant no rule or
    /// fact mentions is outside the Herbrand universe: an unrestricted rule
    /// variable would prove goals about it that saturation, which grounds
    /// over the data-base's own constants, can never produce.
    pub fn herbrand_base(&self) -> Vec<Atom> {
        let mut used = BTreeSet::new();
        for f in &self.facts {
            atom_constants(f, &mut used);
        }
        for r in &self.rules {
            for a in &r.antecedents {
                atom_constants(a, &mut used);
            }
            atom_constants(&r.consequent, &mut used);
        }
        let consts: Vec<Term> = used.into_iter().map(Term::Constant).collect();
        let mut out = Vec::new();
        for (p, arity) in &self.predicates {
            for combo in cartesian(&consts, *arity) {
                out.push(Atom { predicate: p.clone(), args: combo });
            }
        }
        out
    }
}

pub fn rule_formula(r: &HornRule) -> Formula {
    let antecedent = if r.antecedents.len() == 1 {
        Formula::Atom(r.antecedents[0].clone())
    } else {
        Formula::And(r.antecedents.iter().cloned().map(Formula::Atom).collect())
    };
    Formula::ForAll(
        r.vars.clone(),
        Box::new(Formula::If(Box::new(antecedent), Box::new(Formula::Atom(r.consequent.clone())))),
    )
}

fn atom_constants(a: &Atom, out: &mut BTreeSet<Symbol>) {
    fn term(t: &Term, out: &mut BTreeSet<Symbol>) {
        match t {
            Term::Constant(c) => {
                out.insert(c.clone());
            }
            Term::Variable(_) => {}
            Term::Compound(_, args) => {
                for a in args {
                    term(a, out);
                }
            }
        }
    }
    for t in &a.args {
        term(t, out);
    }
}

/// Naive bottom-up fixpoint: ground every rule over the constants that
/// appear anywhere in the model and fire it against the current set until
/// nothing new is produced. Deliberately substitution-based, with no
/// unification anywhere.
pub fn naive_saturate(facts: &[Atom], rules: &[HornRule]) -> BTreeSet<Atom> {
    let mut constants = BTreeSet::new();
    for f in facts {
        atom_constants(f, &mut constants);
    }
    for r in rules {
        for a in &r.antecedents {
            atom_constants(a, &mut constants);
        }
        atom_constants(&r.consequent, &mut constants);
    }
    let consts: Vec<Term> = constants.into_iter().map(Term::Constant).collect();
    let mut set: BTreeSet<Atom> = facts.iter().cloned().collect();
    loop {
        let mut added = Vec::new();
        for r in rules {
            for combo in cartesian(&consts, r.vars.len()) {
                let map: BTreeMap<Symbol, Term> = r.vars.iter().cloned().zip(combo).collect();
                if r.antecedents.iter().all(|a| set.contains(&apply_map_atom(&map, a))) {
                    let c = apply_map_atom(&map, &r.consequent);
                    if !set.contains(&c) {
                        added.push(c);
                    }
                }
            }
        }
        if added.is_empty() {
            return set;
        }
        set.extend(added);
    }
}

/// Random Horn model small enough for exhaustive agreement checks. Rules
/// are stratified (antecedent predicates strictly below the consequent's,
/// except for an occasional linear self-recursive rule) and antecedent
/// variables are drawn from the consequent's, so that the memoization-free
/// proof search stays polynomial; dense cyclic and existential-join shapes
/// get their own targeted tests.
pub fn random_horn_model(rng: &mut ChaCha8Rng) -> HornModel {
    const CONSTANT_POOL: [&str; 4] = ["a", "b", "c", "d"];
    const VAR_POOL: [&str; 2] = ["x", "y"];
    let nc = rng.gen_range(1..=4);
    let constants: Vec<Symbol> = CONSTANT_POOL[..nc].iter().map(|c| Symbol::new(*c)).collect();
    let np = rng.gen_range(1..=6);
    let predicates: Vec<(Symbol, usize)> =
        (0..np).map(|i| (Symbol::new(format!("p{i}")), rng.gen_range(0..=2))).collect();

    let mut facts = Vec::new();
    for _ in 0..rng.gen_range(1..=8) {
        let (p, arity) = predicates.choose(rng).unwrap();
        let args =
            (0..*arity).map(|_| Term::Constant(constants.choose(rng).unwrap().clone())).collect();
        let atom = Atom { predicate: p.clone(), args };
        if !facts.contains(&atom) {
            facts.push(atom);
        }
    }

    let mut rules: Vec<HornRule> = Vec::new();
    for _ in 0..rng.gen_range(0..=6) {
        let ci = rng.gen_range(0..np);
        let (cp, c_arity) = predicates[ci].clone();
        let vars: Vec<Symbol> = VAR_POOL[..c_arity.min(2).max(1)]
            .iter()
            .map(|v| Symbol::new(*v))
            .collect();
        let consequent_args: Vec<Term> = (0..c_arity)
            .map(|k| {
                if rng.gen_bool(0.8) {
                    Term::Variable(vars[k % vars.len()].clone())
                } else {
                    Term::Constant(constants.choose(rng).unwrap().clone())
                }
            })
            .collect();
        let consequent = Atom { predicate: cp.clone(), args: consequent_args.clone() };

        let bound: Vec<Symbol> = {
            let mut vs = Vec::new();
            for t in &consequent_args {
                term_vars(t, &mut vs);
            }
            vs
        };
        let mut antecedents = Vec::new();
        let self_recursive = ci > 0 || c_arity > 0;
        if rng.gen_bool(0.25) && self_recursive && !bound.is_empty() && c_arity > 0 {
            // linear self-recursion: same predicate, permuted variables
            let mut perm: Vec<Term> = (0..c_arity)
                .map(|k| Term::Variable(bound[(k + 1) % bound.len()].clone()))
                .collect();
            if perm == consequent_args {
                perm.reverse();
            }
            antecedents.push(Atom { predicate: cp.clone(), args: perm });
            if ci > 0 && rng.gen_bool(0.5) {
                antecedents.push(random_lower_atom(rng, &predicates[..ci], &bound, &constants));
            }
        } else if ci > 0 {
            for _ in 0..rng.gen_range(1..=2) {
                antecedents.push(random_lower_atom(rng, &predicates[..ci], &bound, &constants));
            }
        } else {
            continue; // stratum 0 admits no rule body
        }
        if antecedents.is_empty() {
            continue;
        }
        let used: Vec<Symbol> = {
            let mut vs = Vec::new();
            for a in antecedents.iter().chain(std::iter::once(&consequent)) {
                for t in &a.args {
                    term_vars(t, &mut vs);
                }
            }
            vs
        };
        rules.push(HornRule { vars: used, antecedents, consequent });
    }

    HornModel { predicates, constants, facts, rules }
}

fn random_lower_atom(
    rng: &mut ChaCha8Rng,
    lower: &[(Symbol, usize)],
    bound: &[Symbol],
    constants: &[Symbol],
) -> Atom {
    let (p, arity) = lower.choose(rng).unwrap();
    let args = (0..*arity)
        .map(|_| {
            if !bound.is_empty() && rng.gen_bool(0.7) {
                Term::Variable(bound.choose(rng).unwrap().clone())
            } else {
                Term::Constant(constants.choose(rng).unwrap().clone())
            }
        })
        .collect();
    Atom { predicate: p.clone(), args }
}

// ---------------------------------------------------------------------------
// Random closed formulas for parser round-trips.

pub fn random_closed_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let mut scope = Vec::new();
    random_formula(rng, depth, &mut scope)
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize, scope: &mut Vec<Symbol>) -> Formula {
    const BINDERS: [&str; 6] = ["x", "y", "z", "w", "u", "v"];
    if depth == 0 {
        return Formula::Atom(random_scoped_atom(rng, scope));
    }
    match rng.gen_range(0..7) {
        0 => Formula::Atom(random_scoped_atom(rng, scope)),
        1 | 2 => {
            let n = rng.gen_range(2..=3);
            let items = (0..n).map(|_| random_formula(rng, depth - 1, scope)).collect();
            if rng.gen_bool(0.5) {
                Formula::And(items)
            } else {
                Formula::Or(items)
            }
        }
        3 => Formula::Not(Box::new(random_formula(rng, depth - 1, scope))),
        4 => Formula::If(
            Box::new(random_formula(rng, depth - 1, scope)),
            Box::new(random_formula(rng, depth - 1, scope)),
        ),
        _ => {
            let mut names: Vec<&str> = BINDERS.to_vec();
            names.shuffle(rng);
            let binders: Vec<Symbol> =
                names[..rng.gen_range(1..=2)].iter().map(|n| Symbol::new(*n)).collect();
            let before = scope.len();
            scope.extend(binders.iter().cloned());
            let body = random_formula(rng, depth - 1, scope);
            scope.truncate(before);
            if rng.gen_bool(0.5) {
                Formula::ForAll(binders, Box::new(body))
            } else {
                Formula::Exists(binders, Box::new(body))
            }
        }
    }
}

fn random_scoped_atom(rng: &mut ChaCha8Rng, scope: &[Symbol]) -> Atom {
    const PREDICATES: [&str; 4] = ["p", "q", "likes", "on"];
    const CONSTANTS: [&str; 3] = ["a", "b", "Clyde"];
    let arity = rng.gen_range(0..=3);
    let args = (0..arity).map(|_| random_scoped_term(rng, scope, 2)).collect();
    Atom { predicate: Symbol::new(*PREDICATES.choose(rng).unwrap()), args }
}

fn random_scoped_term(rng: &mut ChaCha8Rng, scope: &[Symbol], depth: usize) -> Term {
    let top = if depth <= 1 { 2 } else { 3 };
    match rng.gen_range(0..top) {
        0 if !scope.is_empty() => Term::Variable(scope.choose(rng).unwrap().clone()),
        0 | 1 => Term::Constant(Symbol::new(
            *["a", "b", "Clyde"].choose(rng).unwrap(),
        )),
        _ => {
            let arity = rng.gen_range(1..=2);
            Term::Compound(
                Symbol::new(if arity == 1 { "f" } else { "g" }),
                (0..arity).map(|_| random_scoped_term(rng, scope, depth - 1)).collect(),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// Watcher simulation over plain token tuples.

#[derive(Debug, Clone)]
pub struct WatcherSim {
    pub emitted_per_generation: Vec<usize>,
    pub pre_tick_fact_counts: Vec<usize>,
    pub awareness_generation: Option<u32>,
    pub facts: BTreeSet<Vec<String>>,
}

/// Replay the watcher's contract over a set of token tuples: per tick,
/// snapshot the pre-tick state, insert the snapshot sentences, and once
/// snapshots exist and the threshold generation is reached, insert the
/// awareness sentence. Counting relies only on set insertion.
pub fn simulate_watcher(
    initial_facts: &[Vec<String>],
    rule_count: usize,
    generations: u32,
    threshold: u32,
) -> WatcherSim {
    let mut facts: BTreeSet<Vec<String>> = initial_facts.iter().cloned().collect();
    let mut watcher_present = false;
    let mut emitted = Vec::new();
    let mut pre_counts = Vec::new();
    let mut awareness_generation = None;
    for gen in 1..=generations {
        let had_watcher = watcher_present;
        let pre_count = facts.len();
        pre_counts.push(pre_count);
        let predicates: BTreeSet<String> = facts.iter().map(|f| f[0].clone()).collect();
        let mut snapshot: Vec<Vec<String>> = vec![
            vec!["db-fact-count".into(), pre_count.to_string()],
            vec!["db-rule-count".into(), rule_count.to_string()],
        ];
        for p in &predicates {
            snapshot.push(vec!["db-has-predicate".into(), p.clone()]);
        }
        snapshot.push(vec!["watcher-generation".into(), gen.to_string()]);
        let mut new_this_tick = 0;
        for atom in snapshot {
            if facts.insert(atom) {
                new_this_tick += 1;
                watcher_present = true;
            }
        }
        if gen >= threshold && had_watcher {
            if facts.insert(vec!["have-impression-of".into(), "mind".into()]) {
                new_this_tick += 1;
                watcher_present = true;
                if awareness_generation.is_none() {
                    awareness_generation = Some(gen);
                }
            }
        }
        emitted.push(new_this_tick);
    }
    WatcherSim {
        emitted_per_generation: emitted,
        pre_tick_fact_counts: pre_counts,
        awareness_generation,
        facts,
    }
}

/// Flatten a ground atom into the token tuple the simulation uses.
pub fn atom_tokens(a: &Atom) -> Vec<String> {
    let mut out = vec![a.predicate.to_string()];
    for t in &a.args {
        out.push(t.to_string());
    }
    out
}

// ---------------------------------------------------------------------------
// Bridge-law relation oracle and exhaustive explanation search.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationOracle {
    pub uncovered_t1: BTreeSet<Symbol>,
    pub has_determinism_conflict: bool,
    pub has_collision: bool,
    pub uncovered_t0: BTreeSet<Symbol>,
    pub is_map: bool,
    pub injective: bool,
    pub onto: bool,
}

/// Nested-loop relation check over (id, args, output) triples.
pub fn relation_oracle(
    laws: &[(Symbol, Vec<Symbol>, Symbol)],
    t1_ids: &[Symbol],
    t0_ids: &[Symbol],
) -> RelationOracle {
    let mut covered = BTreeSet::new();
    for (_, args, _) in laws {
        for a in args {
            covered.insert(a.clone());
        }
    }
    let uncovered_t1: BTreeSet<Symbol> =
        t1_ids.iter().filter(|id| !covered.contains(*id)).cloned().collect();
    let mut has_determinism_conflict = false;
    let mut has_collision = false;
    for i in 0..laws.len() {
        for j in i + 1..laws.len() {
            let (ia, aa, oa) = &laws[i];
            let (ib, ab, ob) = &laws[j];
            if ia == ib && aa == ab && oa != ob {
                has_determinism_conflict = true;
            }
            if aa != ab && oa == ob {
                has_collision = true;
            }
        }
    }
    let outputs: BTreeSet<Symbol> = laws.iter().map(|(_, _, o)| o.clone()).collect();
    let uncovered_t0: BTreeSet<Symbol> =
        t0_ids.iter().filter(|id| !outputs.contains(*id)).cloned().collect();
    RelationOracle {
        is_map: uncovered_t1.is_empty() && !has_determinism_conflict,
        injective: !has_collision,
        onto: uncovered_t0.is_empty(),
        uncovered_t1,
        has_determinism_conflict,
        has_collision,
        uncovered_t0,
    }
}

/// A sentence of a generated concrete theory, with the fact/rule split the
/// oracle saturates over kept alongside the engine-facing formula.
#[derive(Debug, Clone)]
pub struct OracleSentence {
    pub id: Symbol,
    pub form: Formula,
    pub fact: Option<Atom>,
    pub rule: Option<HornRule>,
}

/// Exhaustive minimal-explanation search: try every subset of sentence ids
/// up to `cap`, decide derivability with the naive evaluator, and keep the
/// subsets no proper proving subset undercuts.
pub fn exhaustive_explanations(
    sentences: &[OracleSentence],
    goal: &Atom,
    cap: usize,
) -> Vec<BTreeSet<Symbol>> {
    let n = sentences.len();
    let mut proving: Vec<(u32, BTreeSet<Symbol>)> = Vec::new();
    for mask in 0u32..(1 << n) {
        if (mask.count_ones() as usize) > cap {
            continue;
        }
        let mut facts = Vec::new();
        let mut rules = Vec::new();
        for (i, s) in sentences.iter().enumerate() {
            if mask & (1 << i) != 0 {
                if let Some(f) = &s.fact {
                    facts.push(f.clone());
                }
                if let Some(r) = &s.rule {
                    rules.push(r.clone());
                }
            }
        }
        if naive_saturate(&facts, &rules).contains(goal) {
            let ids = sentences
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.id.clone())
                .collect();
            proving.push((mask, ids));
        }
    }
    proving
        .iter()
        .filter(|(mask, _)| {
            !proving.iter().any(|(other, _)| other != mask && other & mask == *other)
        })
        .map(|(_, ids)| ids.clone())
        .collect()
}
