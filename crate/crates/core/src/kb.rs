//! The data-base: ground facts plus Horn rules, with pattern retrieval,
//! statistics, and a line-oriented file format.
//!
//! A `KnowledgeBase` is an immutable value. Updates return new values and
//! leave the input untouched, so older states stay queryable.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::formula::{self, Atom, Formula, Symbol, Term};
use crate::sexpr;
use crate::subst::{unify, Substitution};

/// How a fact entered the data-base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Asserted,
    Derived,
    Watcher,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Asserted => "asserted",
            Provenance::Derived => "derived",
            Provenance::Watcher => "watcher",
        })
    }
}

/// A ground atom with its provenance and the generation that produced it.
/// Asserted facts are generation 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub atom: Atom,
    pub provenance: Provenance,
    pub generation: u32,
}

/// A chaining rule: every antecedent and the consequent are atoms whose
/// variables all come from `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub vars: Vec<Symbol>,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
}

impl Rule {
    /// The universally quantified if-formula this rule was read from.
    pub fn to_formula(&self) -> Formula {
        let ante = if self.antecedents.len() == 1 {
            Formula::Atom(self.antecedents[0].clone())
        } else {
            Formula::And(self.antecedents.iter().cloned().map(Formula::Atom).collect())
        };
        Formula::ForAll(
            self.vars.clone(),
            Box::new(Formula::If(Box::new(ante), Box::new(Formula::Atom(self.consequent.clone())))),
        )
    }

    /// Alpha-invariant key: variables renamed in first-occurrence order.
    fn canonical_key(&self) -> (Vec<Atom>, Atom) {
        let mut names: Vec<Symbol> = Vec::new();
        let mut remap = |a: &Atom| -> Atom {
            fn walk(t: &Term, names: &mut Vec<Symbol>) -> Term {
                match t {
                    Term::Constant(_) => t.clone(),
                    Term::Variable(v) => {
                        let i = match names.iter().position(|n| n == v) {
                            Some(i) => i,
                            None => {
                                names.push(v.clone());
                                names.len() - 1
                            }
                        };
                        Term::Variable(Symbol::new(format!("?{i}")))
                    }
                    Term::Compound(f, args) => Term::Compound(
                        f.clone(),
                        args.iter().map(|a| walk(a, names)).collect(),
                    ),
                }
            }
            Atom {
                predicate: a.predicate.clone(),
                args: a.args.iter().map(|t| walk(t, &mut names)).collect(),
            }
        };
        let antes = self.antecedents.iter().map(&mut remap).collect();
        let cons = remap(&self.consequent);
        (antes, cons)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// Counts reported by `stats`. `predicate_names` covers fact predicates only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbStats {
    pub fact_count: usize,
    pub rule_count: usize,
    pub predicate_names: Vec<Symbol>,
    pub derived_count: usize,
    pub watcher_fact_count: usize,
    pub saturation_truncated: bool,
}

/// Rejection of a formula that cannot be stored as a ground fact or Horn rule.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssertError {
    #[error("atom with variables is unsupported for chaining: {0}")]
    NonGroundAtom(String),
    #[error("formula shape unsupported for chaining: {0}")]
    NonHorn(String),
}

/// Error while loading a KB file, tagged with its 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct LoadError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    facts: Vec<Fact>,
    fact_index: HashMap<Symbol, Vec<usize>>,
    fact_set: HashSet<Atom>,
    rules: Vec<Rule>,
    rule_keys: HashSet<(Vec<Atom>, Atom)>,
    next_generation: u32,
    saturation_truncated: bool,
}

impl Default for KnowledgeBase {
    fn default() -> Self {
        Self::new()
    }
}

impl KnowledgeBase {
    pub fn new() -> Self {
        KnowledgeBase {
            facts: Vec::new(),
            fact_index: HashMap::new(),
            fact_set: HashSet::new(),
            rules: Vec::new(),
            rule_keys: HashSet::new(),
            next_generation: 1,
            saturation_truncated: false,
        }
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.fact_set.contains(atom)
    }

    pub fn next_generation(&self) -> u32 {
        self.next_generation
    }

    pub fn saturation_truncated(&self) -> bool {
        self.saturation_truncated
    }

    /// Store a ground atom or a universally quantified Horn rule, returning
    /// the extended data-base. Duplicates are a no-op; the original
    /// provenance of a fact is kept.
    pub fn assert_formula(&self, f: &Formula) -> Result<KnowledgeBase, AssertError> {
        let mut kb = self.clone();
        kb.assert_formula_mut(f)?;
        Ok(kb)
    }

    pub(crate) fn assert_formula_mut(&mut self, f: &Formula) -> Result<(), AssertError> {
        match f {
            Formula::Atom(a) => {
                if !a.is_ground() {
                    return Err(AssertError::NonGroundAtom(a.to_string()));
                }
                self.insert_fact(a.clone(), Provenance::Asserted, 0);
                Ok(())
            }
            Formula::ForAll(..) => {
                let rule = horn_rule(f).ok_or_else(|| AssertError::NonHorn(f.to_string()))?;
                self.insert_rule(rule);
                Ok(())
            }
            _ => Err(AssertError::NonHorn(f.to_string())),
        }
    }

    /// Returns false when the atom is already present.
    pub(crate) fn insert_fact(&mut self, atom: Atom, provenance: Provenance, generation: u32) -> bool {
        if !self.fact_set.insert(atom.clone()) {
            return false;
        }
        let idx = self.facts.len();
        self.fact_index.entry(atom.predicate.clone()).or_default().push(idx);
        self.facts.push(Fact { atom, provenance, generation });
        true
    }

    /// Returns false when an alpha-equivalent rule is already present.
    pub(crate) fn insert_rule(&mut self, rule: Rule) -> bool {
        if !self.rule_keys.insert(rule.canonical_key()) {
            return false;
        }
        self.rules.push(rule);
        true
    }

    pub(crate) fn bump_generation(&mut self) -> u32 {
        let g = self.next_generation;
        self.next_generation += 1;
        g
    }

    pub(crate) fn note_generation(&mut self, gen: u32) {
        self.next_generation = self.next_generation.max(gen + 1);
    }

    pub(crate) fn set_saturation_truncated(&mut self, truncated: bool) {
        self.saturation_truncated = truncated;
    }

    /// Facts whose atoms unify with the pattern, in insertion order, each
    /// paired with the most general unifier.
    pub fn facts_matching(&self, pattern: &Atom) -> Vec<(&Fact, Substitution)> {
        let Some(indices) = self.fact_index.get(&pattern.predicate) else {
            return Vec::new();
        };
        indices
            .iter()
            .filter_map(|&i| {
                let fact = &self.facts[i];
                unify(pattern, &fact.atom).map(|s| (fact, s))
            })
            .collect()
    }

    /// Constants appearing in fact arguments and rule atoms, in
    /// first-occurrence order.
    pub fn constants(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        fn walk(t: &Term, out: &mut Vec<Symbol>) {
            match t {
                Term::Constant(c) => {
                    if !out.contains(c) {
                        out.push(c.clone());
                    }
                }
                Term::Variable(_) => {}
                Term::Compound(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        for f in &self.facts {
            f.atom.args.iter().for_each(|t| walk(t, &mut out));
        }
        for r in &self.rules {
            for a in r.antecedents.iter().chain([&r.consequent]) {
                a.args.iter().for_each(|t| walk(t, &mut out));
            }
        }
        out
    }

    pub fn stats(&self) -> KbStats {
        let mut predicate_names: Vec<Symbol> =
            self.fact_index.keys().filter(|p| !self.fact_index[*p].is_empty()).cloned().collect();
        predicate_names.sort();
        KbStats {
            fact_count: self.facts.len(),
            rule_count: self.rules.len(),
            predicate_names,
            derived_count: self
                .facts
                .iter()
                .filter(|f| f.provenance == Provenance::Derived)
                .count(),
            watcher_fact_count: self
                .facts
                .iter()
                .filter(|f| f.provenance == Provenance::Watcher)
                .count(),
            saturation_truncated: self.saturation_truncated,
        }
    }

    /// Parse a KB file: one formula per line, `;` comments, blank lines
    /// allowed. Equivalent to folding `assert_formula` over the forms in
    /// file order.
    pub fn load_str(text: &str) -> Result<KnowledgeBase, LoadError> {
        let mut kb = KnowledgeBase::new();
        kb.load_str_mut(text)?;
        Ok(kb)
    }

    pub(crate) fn load_str_mut(&mut self, text: &str) -> Result<(), LoadError> {
        let forms = sexpr::read_all(text).map_err(|e| LoadError {
            line: sexpr::line_of_offset(text, e.offset),
            message: e.message,
        })?;
        for sx in &forms {
            let f = formula::closed_from_sexpr(sx).map_err(|e| LoadError {
                line: sexpr::line_of_offset(text, e.offset),
                message: e.message,
            })?;
            self.assert_formula_mut(&f).map_err(|e| LoadError {
                line: sexpr::line_of_offset(text, sx.offset()),
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Render the current facts (insertion order) and rules, one per line.
    /// Loading the result reproduces the same atoms and rules; provenance
    /// and generations reset to asserted.
    pub fn save_str(&self) -> String {
        let mut out = String::new();
        for f in &self.facts {
            out.push_str(&f.atom.to_string());
            out.push('\n');
        }
        for r in &self.rules {
            out.push_str(&r.to_formula().to_string());
            out.push('\n');
        }
        out
    }
}

/// Extract a Horn rule from a (possibly nested) ForAll over an If whose
/// antecedent is an atom or a conjunction of atoms.
fn horn_rule(f: &Formula) -> Option<Rule> {
    let mut vars: Vec<Symbol> = Vec::new();
    let mut body = f;
    while let Formula::ForAll(vs, inner) = body {
        vars.extend(vs.iter().cloned());
        body = inner;
    }
    let Formula::If(ante, cons) = body else { return None };
    let Formula::Atom(consequent) = cons.as_ref() else { return None };
    let antecedents = match ante.as_ref() {
        Formula::Atom(a) => vec![a.clone()],
        Formula::And(children) => children
            .iter()
            .map(|c| match c {
                Formula::Atom(a) => Some(a.clone()),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?,
        _ => return None,
    };
    Some(Rule { vars, antecedents, consequent: consequent.clone() })
}
