//! Predicate-calculus expressions: terms, atoms, formulas.
//!
//! Surface syntax is S-expressions: `(loves John Mary)`,
//! `(forall (z) (if (inst z elephant) (color z gray)))`. Symbols are
//! case-sensitive and never normalized. A bare symbol is a variable when it
//! is listed in an enclosing quantifier's binding list; in goal/pattern
//! position a `?`-prefixed symbol is a variable. Everything else is a
//! constant.

use std::borrow::Borrow;
use std::fmt;

use crate::sexpr::{self, Sexpr, SyntaxError};

/// An interned-by-value symbol token. No whitespace, parens, or `;`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(s: impl Into<String>) -> Self {
        Symbol(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol(s.to_string())
    }
}

impl From<String> for Symbol {
    fn from(s: String) -> Self {
        Symbol(s)
    }
}

impl Borrow<str> for Symbol {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl AsRef<str> for Symbol {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// True for tokens that denote variables in goal/pattern syntax.
pub fn is_query_variable(token: &str) -> bool {
    token.starts_with('?')
}

/// A term: constant, variable, or compound (functor applied to terms).
///
/// Compound terms only go as deep as the tests need; the surface syntax
/// allows them anywhere a term is expected.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Constant(Symbol),
    Variable(Symbol),
    Compound(Symbol, Vec<Term>),
}

impl Term {
    pub fn constant(name: impl Into<Symbol>) -> Self {
        Term::Constant(name.into())
    }

    pub fn variable(name: impl Into<Symbol>) -> Self {
        Term::Variable(name.into())
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Constant(_) => true,
            Term::Variable(_) => false,
            Term::Compound(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub(crate) fn collect_variables(&self, out: &mut Vec<Symbol>) {
        match self {
            Term::Constant(_) => {}
            Term::Variable(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Compound(_, args) => {
                for a in args {
                    a.collect_variables(out);
                }
            }
        }
    }
}

/// An atomic formula: predicate applied to terms. Arity may be zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: Symbol,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<Symbol>, args: Vec<Term>) -> Self {
        Atom { predicate: predicate.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Variables in first-occurrence order.
    pub fn variables(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for a in &self.args {
            a.collect_variables(&mut out);
        }
        out
    }
}

/// A predicate-calculus formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Not(Box<Formula>),
    If(Box<Formula>, Box<Formula>),
    ForAll(Vec<Symbol>, Box<Formula>),
    Exists(Vec<Symbol>, Box<Formula>),
}

impl Formula {
    pub fn atom(predicate: impl Into<Symbol>, args: Vec<Term>) -> Self {
        Formula::Atom(Atom::new(predicate, args))
    }
}

const CONNECTIVES: &[&str] = &["and", "or", "not", "if", "forall", "exists"];

/// Whether a symbol is one of the structural connective/quantifier words.
pub fn is_connective(token: &str) -> bool {
    CONNECTIVES.contains(&token)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum VarContext {
    /// Closed formulas: `?`-tokens are rejected as unbound.
    Closed,
    /// Goal patterns: `?`-tokens are free variables.
    Query,
}

struct Scope {
    bound: Vec<Symbol>,
}

impl Scope {
    fn is_bound(&self, name: &str) -> bool {
        self.bound.iter().any(|s| s.as_str() == name)
    }
}

fn term_from_sexpr(sx: &Sexpr, scope: &Scope, ctx: VarContext) -> Result<Term, SyntaxError> {
    match sx {
        Sexpr::Symbol { text, offset } => {
            if is_query_variable(text) {
                match ctx {
                    VarContext::Query => Ok(Term::Variable(Symbol::new(text))),
                    VarContext::Closed => Err(SyntaxError::new(
                        format!("unbound variable {text} in closed formula"),
                        *offset,
                    )),
                }
            } else if scope.is_bound(text) {
                Ok(Term::Variable(Symbol::new(text)))
            } else {
                Ok(Term::Constant(Symbol::new(text)))
            }
        }
        Sexpr::List { items, offset } => {
            if items.is_empty() {
                return Err(SyntaxError::new("empty list", *offset));
            }
            let head = items[0].as_symbol().ok_or_else(|| {
                SyntaxError::new("functor must be a symbol", items[0].offset())
            })?;
            let args = items[1..]
                .iter()
                .map(|a| term_from_sexpr(a, scope, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::Compound(Symbol::new(head), args))
        }
    }
}

fn binding_list(sx: &Sexpr) -> Result<Vec<Symbol>, SyntaxError> {
    let items = sx
        .as_list()
        .ok_or_else(|| SyntaxError::new("quantifier binding list must be a list", sx.offset()))?;
    if items.is_empty() {
        return Err(SyntaxError::new("quantifier binding list is empty", sx.offset()));
    }
    items
        .iter()
        .map(|it| {
            it.as_symbol()
                .map(Symbol::new)
                .ok_or_else(|| SyntaxError::new("binding list entries must be symbols", it.offset()))
        })
        .collect()
}

fn formula_from_sexpr(sx: &Sexpr, scope: &mut Scope, ctx: VarContext) -> Result<Formula, SyntaxError> {
    let (items, offset) = match sx {
        Sexpr::List { items, offset } => (items.as_slice(), *offset),
        Sexpr::Symbol { offset, .. } => {
            return Err(SyntaxError::new("expected a parenthesized formula", *offset))
        }
    };
    if items.is_empty() {
        return Err(SyntaxError::new("empty list", offset));
    }
    let head = match items[0].as_symbol() {
        Some(h) => h,
        None => return Err(SyntaxError::new("predicate must be a symbol", items[0].offset())),
    };
    match head {
        "and" | "or" => {
            if items.len() < 3 {
                return Err(SyntaxError::new(
                    format!("'{head}' requires at least 2 operands"),
                    offset,
                ));
            }
            let children = items[1..]
                .iter()
                .map(|c| formula_from_sexpr(c, scope, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" { Formula::And(children) } else { Formula::Or(children) })
        }
        "not" => {
            if items.len() != 2 {
                return Err(SyntaxError::new("'not' requires exactly 1 operand", offset));
            }
            Ok(Formula::Not(Box::new(formula_from_sexpr(&items[1], scope, ctx)?)))
        }
        "if" => {
            if items.len() != 3 {
                return Err(SyntaxError::new("'if' requires exactly 2 operands", offset));
            }
            let ante = formula_from_sexpr(&items[1], scope, ctx)?;
            let cons = formula_from_sexpr(&items[2], scope, ctx)?;
            Ok(Formula::If(Box::new(ante), Box::new(cons)))
        }
        "forall" | "exists" => {
            if items.len() != 3 {
                return Err(SyntaxError::new(
                    format!("'{head}' requires a binding list and a body"),
                    offset,
                ));
            }
            let vars = binding_list(&items[1])?;
            let depth = scope.bound.len();
            scope.bound.extend(vars.iter().cloned());
            let body = formula_from_sexpr(&items[2], scope, ctx);
            scope.bound.truncate(depth);
            let body = body?;
            Ok(if head == "forall" {
                Formula::ForAll(vars, Box::new(body))
            } else {
                Formula::Exists(vars, Box::new(body))
            })
        }
        _ => {
            let args = items[1..]
                .iter()
                .map(|a| term_from_sexpr(a, scope, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Formula::Atom(Atom::new(head, args)))
        }
    }
}

/// Parse a single closed formula. `?`-variables are rejected here; the only
/// variables are those bound by quantifier binding lists.
pub fn parse(text: &str) -> Result<Formula, SyntaxError> {
    let sx = sexpr::read_one(text)?;
    closed_from_sexpr(&sx)
}

pub(crate) fn closed_from_sexpr(sx: &Sexpr) -> Result<Formula, SyntaxError> {
    formula_from_sexpr(sx, &mut Scope { bound: Vec::new() }, VarContext::Closed)
}

/// Parse a goal/pattern atom. `?`-prefixed symbols are variables; connective
/// heads are rejected because a goal must be a single atom.
pub fn parse_goal(text: &str) -> Result<Atom, SyntaxError> {
    let sx = sexpr::read_one(text)?;
    goal_from_sexpr(&sx)
}

pub(crate) fn goal_from_sexpr(sx: &Sexpr) -> Result<Atom, SyntaxError> {
    let items = match sx.as_list() {
        Some(items) => items,
        None => return Err(SyntaxError::new("goal must be a parenthesized atom", sx.offset())),
    };
    if items.is_empty() {
        return Err(SyntaxError::new("empty list", sx.offset()));
    }
    let head = items[0]
        .as_symbol()
        .ok_or_else(|| SyntaxError::new("predicate must be a symbol", items[0].offset()))?;
    if is_connective(head) {
        return Err(SyntaxError::new("goal must be a single atom", sx.offset()));
    }
    let scope = Scope { bound: Vec::new() };
    let args = items[1..]
        .iter()
        .map(|a| term_from_sexpr(a, &scope, VarContext::Query))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Atom::new(head, args))
}

fn render_term(t: &Term, out: &mut String) {
    match t {
        Term::Constant(s) | Term::Variable(s) => out.push_str(s.as_str()),
        Term::Compound(f, args) => {
            out.push('(');
            out.push_str(f.as_str());
            for a in args {
                out.push(' ');
                render_term(a, out);
            }
            out.push(')');
        }
    }
}

fn render_atom(a: &Atom, out: &mut String) {
    out.push('(');
    out.push_str(a.predicate.as_str());
    for t in &a.args {
        out.push(' ');
        render_term(t, out);
    }
    out.push(')');
}

fn render_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::Atom(a) => render_atom(a, out),
        Formula::And(children) | Formula::Or(children) => {
            out.push('(');
            out.push_str(if matches!(f, Formula::And(_)) { "and" } else { "or" });
            for c in children {
                out.push(' ');
                render_formula(c, out);
            }
            out.push(')');
        }
        Formula::Not(inner) => {
            out.push_str("(not ");
            render_formula(inner, out);
            out.push(')');
        }
        Formula::If(ante, cons) => {
            out.push_str("(if ");
            render_formula(ante, out);
            out.push(' ');
            render_formula(cons, out);
            out.push(')');
        }
        Formula::ForAll(vars, body) | Formula::Exists(vars, body) => {
            out.push('(');
            out.push_str(if matches!(f, Formula::ForAll(..)) { "forall" } else { "exists" });
            out.push_str(" (");
            for (i, v) in vars.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(v.as_str());
            }
            out.push_str(") ");
            render_formula(body, out);
            out.push(')');
        }
    }
}

/// Canonical single-space S-expression text. `parse(render(f))` is
/// structurally equal to `f` for any formula produced by `parse`.
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    render_formula(f, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render(self))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        render_atom(self, &mut out);
        write!(f, "{out}")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        render_term(self, &mut out);
        write!(f, "{out}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_atom() {
        let f = parse("(loves John Mary)").unwrap();
        assert_eq!(
            f,
            Formula::atom("loves", vec![Term::constant("John"), Term::constant("Mary")])
        );
    }

    #[test]
    fn parses_zero_arity_atom() {
        assert_eq!(parse("(raining)").unwrap(), Formula::atom("raining", vec![]));
    }

    #[test]
    fn parses_universal_rule() {
        let f = parse("(forall (z) (if (inst z elephant) (color z gray)))").unwrap();
        let expected = Formula::ForAll(
            vec![Symbol::new("z")],
            Box::new(Formula::If(
                Box::new(Formula::atom(
                    "inst",
                    vec![Term::variable("z"), Term::constant("elephant")],
                )),
                Box::new(Formula::atom(
                    "color",
                    vec![Term::variable("z"), Term::constant("gray")],
                )),
            )),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn empty_list_is_an_error() {
        let err = parse("()").unwrap_err();
        assert!(err.message.contains("empty list"), "{err}");
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn and_requires_two_children() {
        let err = parse("(and (p a))").unwrap_err();
        assert!(err.message.contains("at least 2"), "{err}");
    }

    #[test]
    fn unbound_variable_rejected_in_closed_context() {
        let err = parse("(color ?z gray)").unwrap_err();
        assert!(err.message.contains("unbound variable ?z"), "{err}");
        assert_eq!(err.offset, 7);
    }

    #[test]
    fn quantifier_shadows_only_inside_body() {
        // z is a variable inside the forall, a constant outside.
        let f = parse("(and (p z) (forall (z) (p z)))").unwrap();
        match f {
            Formula::And(children) => {
                assert_eq!(children[0], Formula::atom("p", vec![Term::constant("z")]));
                match &children[1] {
                    Formula::ForAll(_, body) => {
                        assert_eq!(**body, Formula::atom("p", vec![Term::variable("z")]));
                    }
                    other => panic!("expected forall, got {other:?}"),
                }
            }
            other => panic!("expected and, got {other:?}"),
        }
    }

    #[test]
    fn case_sensitive_symbols() {
        assert_ne!(parse("(color Clyde Gray)").unwrap(), parse("(color Clyde gray)").unwrap());
    }

    #[test]
    fn render_is_canonical() {
        let f = parse("( inst   Clyde\n elephant )").unwrap();
        assert_eq!(render(&f), "(inst Clyde elephant)");
    }

    #[test]
    fn render_parse_fixpoint() {
        let inputs = [
            "(loves John Mary)",
            "(forall (z) (if (inst z elephant) (color z gray)))",
            "(and (color block-1 yellow) (inst block-1 elephant))",
            "(exists (x) (loves x Mary))",
            "(not (is-hungry Fred))",
            "(or (p a) (q b) (r c))",
        ];
        for s in inputs {
            let once = parse(s).unwrap();
            let twice = parse(&render(&once)).unwrap();
            assert_eq!(once, twice, "round trip failed for {s}");
        }
    }

    #[test]
    fn goal_accepts_query_variables() {
        let g = parse_goal("(inst ?x elephant)").unwrap();
        assert_eq!(g.variables(), vec![Symbol::new("?x")]);
    }

    #[test]
    fn goal_rejects_connective_head() {
        assert!(parse_goal("(and (p a) (q b))").is_err());
    }

    #[test]
    fn nested_compound_terms() {
        let g = parse_goal("(p ?x (f ?x))").unwrap();
        assert_eq!(
            g.args[1],
            Term::Compound(Symbol::new("f"), vec![Term::variable("?x")])
        );
    }
}
