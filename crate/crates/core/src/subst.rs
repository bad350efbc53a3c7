//! Substitutions and unification.
//!
//! A substitution is a finite map from variables to terms, kept idempotent:
//! no variable in its domain appears in any of its range terms. Unification
//! failure is an ordinary value (`None`), not an error.

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::{Atom, Symbol, Term};

/// An idempotent variable-to-term map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    map: BTreeMap<Symbol, Term>,
}

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn get(&self, var: &Symbol) -> Option<&Term> {
        self.map.get(var)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Term)> {
        self.map.iter()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Symbol> {
        self.map.keys()
    }

    /// Apply to a term, replacing every bound variable.
    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Constant(_) => t.clone(),
            Term::Variable(v) => self.map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Compound(f, args) => {
                Term::Compound(f.clone(), args.iter().map(|a| self.apply_term(a)).collect())
            }
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        Atom {
            predicate: a.predicate.clone(),
            args: a.args.iter().map(|t| self.apply_term(t)).collect(),
        }
    }

    /// Add `var -> term`, preserving idempotence. Fails the occurs check if
    /// `var` appears in `term` (after applying the current map).
    pub fn bind(&self, var: &Symbol, term: &Term) -> Option<Substitution> {
        let term = self.apply_term(term);
        if let Term::Variable(v) = &term {
            if v == var {
                return Some(self.clone());
            }
        }
        if occurs(var, &term) {
            return None;
        }
        let single = Substitution {
            map: BTreeMap::from([(var.clone(), term.clone())]),
        };
        let mut map: BTreeMap<Symbol, Term> = self
            .map
            .iter()
            .map(|(k, v)| (k.clone(), single.apply_term(v)))
            .collect();
        map.insert(var.clone(), term);
        Some(Substitution { map })
    }

    /// Keep only bindings for the given variables.
    pub fn restrict(&self, vars: &[Symbol]) -> Substitution {
        Substitution {
            map: self
                .map
                .iter()
                .filter(|(k, _)| vars.contains(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (k, v)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k} -> {v}")?;
        }
        write!(f, "}}")
    }
}

fn occurs(var: &Symbol, term: &Term) -> bool {
    match term {
        Term::Constant(_) => false,
        Term::Variable(v) => v == var,
        Term::Compound(_, args) => args.iter().any(|a| occurs(var, a)),
    }
}

/// Unify two terms under an existing substitution.
pub fn unify_terms_in(a: &Term, b: &Term, s: &Substitution) -> Option<Substitution> {
    let a = s.apply_term(a);
    let b = s.apply_term(b);
    match (&a, &b) {
        (Term::Variable(x), _) => s.bind(x, &b),
        (_, Term::Variable(y)) => s.bind(y, &a),
        (Term::Constant(c), Term::Constant(d)) => (c == d).then(|| s.clone()),
        (Term::Compound(f, xs), Term::Compound(g, ys)) => {
            if f != g || xs.len() != ys.len() {
                return None;
            }
            let mut s = s.clone();
            for (x, y) in xs.iter().zip(ys) {
                s = unify_terms_in(x, y, &s)?;
            }
            Some(s)
        }
        _ => None,
    }
}

pub fn unify_terms(a: &Term, b: &Term) -> Option<Substitution> {
    unify_terms_in(a, b, &Substitution::new())
}

/// Unify two atoms under an existing substitution. Predicates and arity must
/// match exactly.
pub fn unify_in(a: &Atom, b: &Atom, s: &Substitution) -> Option<Substitution> {
    if a.predicate != b.predicate || a.args.len() != b.args.len() {
        return None;
    }
    let mut s = s.clone();
    for (x, y) in a.args.iter().zip(&b.args) {
        s = unify_terms_in(x, y, &s)?;
    }
    Some(s)
}

/// Most general unifier of two atoms, or `None` when they do not unify.
pub fn unify(a: &Atom, b: &Atom) -> Option<Substitution> {
    unify_in(a, b, &Substitution::new())
}

/// One-way match: bind pattern variables so the pattern equals the target.
/// Target variables are treated as opaque; they never acquire bindings.
pub fn match_atom(pattern: &Atom, target: &Atom) -> Option<Substitution> {
    if pattern.predicate != target.predicate || pattern.args.len() != target.args.len() {
        return None;
    }
    let mut s = Substitution::new();
    for (p, t) in pattern.args.iter().zip(&target.args) {
        s = match_term_in(p, t, s)?;
    }
    Some(s)
}

fn match_term_in(pattern: &Term, target: &Term, s: Substitution) -> Option<Substitution> {
    match pattern {
        Term::Variable(v) => match s.get(v) {
            Some(bound) => (bound == target).then_some(s),
            None => s.bind(v, target),
        },
        Term::Constant(c) => match target {
            Term::Constant(d) if c == d => Some(s),
            _ => None,
        },
        Term::Compound(f, args) => match target {
            Term::Compound(g, targs) if f == g && args.len() == targs.len() => {
                let mut s = s;
                for (p, t) in args.iter().zip(targs) {
                    s = match_term_in(p, t, s)?;
                }
                Some(s)
            }
            _ => None,
        },
    }
}
