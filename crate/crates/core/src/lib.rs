//! Predicate-calculus knowledge base with backward and forward chaining,
//! a self-watching introspection loop, and a theory-reduction checker.

pub mod formula;
pub mod infer;
pub mod kb;
pub mod network;
pub mod reduction;
pub mod sexpr;
pub mod subst;
pub mod watcher;

pub use formula::{Atom, Formula, Symbol, Term};
pub use infer::{backward_chain, forward_chain, show, ChainConfig, ProofResult};
pub use kb::{Fact, KbStats, KnowledgeBase, Provenance, Rule};
pub use network::{semantic_network, Network};
pub use sexpr::SyntaxError;
pub use subst::{unify, Substitution};
pub use watcher::{run_watcher, watch_tick, WatcherConfig, WatcherReport};
