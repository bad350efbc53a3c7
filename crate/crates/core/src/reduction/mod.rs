//! Theory reduction as a finite-model checker: two finite theories, bridge
//! laws mapping sentences of the reduced theory onto sentences of the
//! reducing one, explanation enumeration, fusion detection, and a final
//! classification of the reduction as invalid, standard, or strong.

mod check;
mod load;
mod report;

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::{Atom, Formula, Symbol};

pub use check::{
    check_e_bijective, classify, detect_fusion, explain, explain_sequential, explanatory_power,
    nomologically_necessary, preserves_nn, structural_report, translate_explanation,
};
pub use load::load_reduction_spec;
pub use report::render_report;

/// Default subset-size cap for explanation search.
pub const DEFAULT_EXPLANATION_CAP: usize = 4;
/// Largest permitted subset-size cap.
pub const MAX_EXPLANATION_CAP: usize = 6;

/// Whether a theory's sentences are opaque token sequences or formulas the
/// inference engine can evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Abstract,
    Concrete,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Abstract => "abstract",
            Mode::Concrete => "concrete",
        })
    }
}

/// One sentence of a theory. `tokens` is the sentence as a symbol sequence;
/// concrete theories also carry an assertable formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: Symbol,
    pub tokens: Vec<Symbol>,
    pub concrete_form: Option<Formula>,
}

/// A finite theory: an identifier, a vocabulary, and its sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub id: Symbol,
    pub mode: Mode,
    pub vocabulary: Vec<Symbol>,
    pub sentences: Vec<Sentence>,
}

impl Theory {
    pub fn sentence(&self, id: &Symbol) -> Option<&Sentence> {
        self.sentences.iter().find(|s| &s.id == id)
    }

    pub fn sentence_ids(&self) -> Vec<Symbol> {
        self.sentences.iter().map(|s| s.id.clone()).collect()
    }
}

/// How a generalization is stated inside one theory. In a concrete theory
/// the statement is a goal atom; in an abstract theory explanations are
/// declared as subsets of sentence ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GenStatement {
    pub tokens: Vec<Symbol>,
    pub concrete_form: Option<Atom>,
    pub declared_explanations: Vec<BTreeSet<Symbol>>,
}

/// A generalization together with its per-theory statements, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generalization {
    pub id: Symbol,
    pub statements: Vec<(Symbol, GenStatement)>,
}

impl Generalization {
    pub fn statement_in(&self, theory: &Symbol) -> Option<&GenStatement> {
        self.statements.iter().find(|(t, _)| t == theory).map(|(_, s)| s)
    }
}

/// A bridge law: one named function from a tuple of reduced-theory
/// sentences to a reducing-theory sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeLaw {
    pub id: Symbol,
    pub args: Vec<Symbol>,
    pub output: Symbol,
}

/// The reduction proper: its bridge laws plus the optional vocabulary
/// substitution rules.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Reduction {
    pub laws: Vec<BridgeLaw>,
    pub vocab_map: Option<Vec<(Symbol, Vec<Symbol>)>>,
}

/// A fully loaded and validated reduction-spec file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionSpec {
    pub t1: Theory,
    pub t0: Theory,
    pub generalizations: Vec<Generalization>,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExplanationStatus {
    None,
    Unique,
    Ambiguous,
}

impl fmt::Display for ExplanationStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExplanationStatus::None => "none",
            ExplanationStatus::Unique => "unique",
            ExplanationStatus::Ambiguous => "ambiguous",
        })
    }
}

/// The minimal explaining subsets found for a generalization, in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplanationResult {
    pub status: ExplanationStatus,
    pub subsets: Vec<BTreeSet<Symbol>>,
}

/// Two laws with the same id disagreeing on the same argument tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminismConflict {
    pub law_id: Symbol,
    pub first_output: Symbol,
    pub second_output: Symbol,
}

/// Two distinct argument tuples sharing one output sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityCollision {
    pub first_law: Symbol,
    pub second_law: Symbol,
    pub output: Symbol,
}

/// Structural findings about the bridge laws as a relation between the two
/// sentence sets. A well-formed reduction is total and deterministic on the
/// reduced theory and must leave part of the reducing theory uncovered
/// (`onto` must be false); injectivity is reported but not required.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralReport {
    pub is_map: bool,
    pub uncovered_t1: Vec<Symbol>,
    pub determinism_conflicts: Vec<DeterminismConflict>,
    pub injective: bool,
    pub collisions: Vec<InjectivityCollision>,
    pub onto: bool,
    pub uncovered_t0: Vec<Symbol>,
}

/// Why the bijectivity of the explanation map fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BijectivityFailure {
    NotUnique { generalization: Symbol, status: ExplanationStatus },
    SharedExplanation { first: Symbol, second: Symbol, subset: BTreeSet<Symbol> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FusionReason {
    /// The translated explanation coincides with that of a distinct
    /// generalization.
    CollapsedImage,
    /// The translated explanation no longer derives the generalization in
    /// the reducing theory.
    ContentLost,
}

impl fmt::Display for FusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionReason::CollapsedImage => "collapsed image",
            FusionReason::ContentLost => "content lost",
        })
    }
}

/// A generalization degraded by the reduction, with the reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fusion {
    pub generalization: Symbol,
    pub reason: FusionReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Classification {
    Invalid,
    Standard,
    Strong,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Invalid => "invalid",
            Classification::Standard => "standard",
            Classification::Strong => "strong",
        })
    }
}

/// Every finding about one reduction, plus the final classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    pub structure: StructuralReport,
    pub explanations: Vec<(Symbol, ExplanationResult)>,
    pub e_bijective_in_t1: bool,
    pub bijectivity_failures: Vec<BijectivityFailure>,
    pub translations: Vec<(Symbol, BTreeSet<Symbol>)>,
    pub fused: Vec<Fusion>,
    pub preserves_nn: bool,
    pub vocab_map_total: bool,
    pub classification: Classification,
}

/// Failures of the checking operations themselves (as opposed to negative
/// findings, which are ordinary report content).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("generalization {generalization} is not stated in theory {theory}")]
    NotStated { generalization: Symbol, theory: Symbol },
    #[error("{id} has no concrete form in a concrete theory")]
    MissingConcreteForm { id: Symbol },
    #[error("sentence {sentence} cannot be asserted: {message}")]
    UnassertableSentence { sentence: Symbol, message: String },
    #[error("explanation cap {cap} is outside 1..={max}", max = MAX_EXPLANATION_CAP)]
    CapOutOfRange { cap: usize },
}

/// Predicate, functor, and constant symbols of a formula in order of
/// appearance, skipping variables and connective structure.
pub(crate) fn formula_symbols(f: &Formula, out: &mut Vec<Symbol>) {
    match f {
        Formula::Atom(a) => atom_symbols(a, out),
        Formula::And(children) | Formula::Or(children) => {
            children.iter().for_each(|c| formula_symbols(c, out));
        }
        Formula::Not(inner) => formula_symbols(inner, out),
        Formula::If(x, y) => {
            formula_symbols(x, out);
            formula_symbols(y, out);
        }
        Formula::ForAll(_, body) | Formula::Exists(_, body) => formula_symbols(body, out),
    }
}

pub(crate) fn atom_symbols(a: &Atom, out: &mut Vec<Symbol>) {
    use crate::formula::Term;
    fn term(t: &Term, out: &mut Vec<Symbol>) {
        match t {
            Term::Constant(c) => out.push(c.clone()),
            Term::Variable(_) => {}
            Term::Compound(f, args) => {
                out.push(f.clone());
                args.iter().for_each(|x| term(x, out));
            }
        }
    }
    out.push(a.predicate.clone());
    a.args.iter().for_each(|t| term(t, out));
}
