//! The self-watcher: each generation stores facts describing the
//! data-base's own pre-tick state back into the data-base, until the
//! data-base contains descriptions of its descriptions and reports
//! `(have-impression-of mind)`.
//!
//! Watcher facts use the reserved predicates `db-fact-count`,
//! `db-rule-count`, `db-has-predicate`, `watcher-generation`, and
//! `have-impression-of`.

use crate::formula::{Atom, Term};
use crate::kb::{KnowledgeBase, Provenance};

/// Which snapshot predicates a tick writes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitFlags {
    pub fact_count: bool,
    pub rule_count: bool,
    pub has_predicate: bool,
    pub generation: bool,
}

impl Default for EmitFlags {
    fn default() -> Self {
        EmitFlags { fact_count: true, rule_count: true, has_predicate: true, generation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatcherConfig {
    /// Exact number of ticks a run performs.
    pub max_generations: u32,
    /// Earliest generation allowed to report awareness. Keep at most
    /// `max_generations` or awareness can never fire.
    pub awareness_threshold: u32,
    pub emit: EmitFlags,
}

impl Default for WatcherConfig {
    fn default() -> Self {
        WatcherConfig { max_generations: 4, awareness_threshold: 2, emit: EmitFlags::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatcherReport {
    pub generations_run: u32,
    /// Facts actually added by each tick; re-observed state that is already
    /// recorded does not count again.
    pub facts_emitted_per_generation: Vec<usize>,
    pub awareness_emitted: bool,
    /// Generation whose tick first stored the awareness sentence.
    pub awareness_generation: Option<u32>,
}

fn count_atom(predicate: &str, n: usize) -> Atom {
    Atom::new(predicate, vec![Term::constant(n.to_string())])
}

/// The sentence whose appearance marks self-awareness.
pub fn awareness_atom() -> Atom {
    Atom::new("have-impression-of", vec![Term::constant("mind")])
}

fn has_watcher_facts(kb: &KnowledgeBase) -> bool {
    kb.facts().iter().any(|f| f.provenance == Provenance::Watcher)
}

/// One watcher generation: snapshot the pre-tick state, then store it as
/// watcher-provenance facts stamped with `gen`.
pub fn watch_tick(kb: &KnowledgeBase, gen: u32, cfg: &WatcherConfig) -> KnowledgeBase {
    let stats = kb.stats();
    let mut kb = kb.clone();
    if cfg.emit.fact_count {
        kb.insert_fact(count_atom("db-fact-count", stats.fact_count), Provenance::Watcher, gen);
    }
    if cfg.emit.rule_count {
        kb.insert_fact(count_atom("db-rule-count", stats.rule_count), Provenance::Watcher, gen);
    }
    if cfg.emit.has_predicate {
        for p in &stats.predicate_names {
            let atom = Atom::new("db-has-predicate", vec![Term::Constant(p.clone())]);
            kb.insert_fact(atom, Provenance::Watcher, gen);
        }
    }
    if cfg.emit.generation {
        let atom = Atom::new("watcher-generation", vec![Term::constant(gen.to_string())]);
        kb.insert_fact(atom, Provenance::Watcher, gen);
    }
    kb.note_generation(gen);
    kb
}

/// Run `cfg.max_generations` ticks. A tick at or past the awareness
/// threshold whose pre-tick data-base already holds watcher facts also
/// stores `(have-impression-of mind)`.
pub fn run_watcher(kb: &KnowledgeBase, cfg: &WatcherConfig) -> (KnowledgeBase, WatcherReport) {
    let mut kb = kb.clone();
    let mut emitted = Vec::new();
    let mut awareness_generation = None;
    for gen in 1..=cfg.max_generations {
        let before = kb.facts().len();
        let observes_prior = has_watcher_facts(&kb);
        kb = watch_tick(&kb, gen, cfg);
        if gen >= cfg.awareness_threshold && observes_prior {
            let mut kb2 = kb.clone();
            if kb2.insert_fact(awareness_atom(), Provenance::Watcher, gen)
                && awareness_generation.is_none()
            {
                awareness_generation = Some(gen);
            }
            kb = kb2;
        }
        emitted.push(kb.facts().len() - before);
    }
    let report = WatcherReport {
        generations_run: cfg.max_generations,
        facts_emitted_per_generation: emitted,
        awareness_emitted: awareness_generation.is_some(),
        awareness_generation,
    };
    (kb, report)
}
