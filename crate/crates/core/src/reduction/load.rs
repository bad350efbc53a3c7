//! Reduction-spec file format.
//!
//! A spec file holds, in order: two `(theory ...)` forms, an optional
//! `(generalizations ...)` form, and one `(reduction ...)` form. `;` starts
//! a comment. All validation errors carry the 1-based line of the offending
//! token.
//!
//! ```text
//! (theory <id> (mode abstract|concrete) (vocabulary <sym>...)
//!   (sentences (<id> <tokens-or-formula>)...))
//! (generalizations
//!   (<id> (in <theory-id> <tokens-or-goal> (explained-by <sid>...)...)...)...)
//! (reduction
//!   (vocab-map (<from> <to>...)...)
//!   (bridge <id> (args <sid>...) (to <sid>))...)
//! ```
//!
//! Concrete theories write each sentence as one assertable formula and each
//! generalization statement as one goal atom; abstract theories write both
//! as plain token sequences and declare explanations with `explained-by`.

use std::collections::BTreeSet;

use crate::formula::{self, Symbol};
use crate::kb::{KnowledgeBase, LoadError};
use crate::sexpr::{self, Sexpr};

use super::{
    formula_symbols, atom_symbols, BridgeLaw, GenStatement, Generalization, Mode, Reduction,
    ReductionSpec, Sentence, Theory,
};

struct Loader<'a> {
    text: &'a str,
}

impl Loader<'_> {
    fn fail<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, LoadError> {
        Err(LoadError { line: sexpr::line_of_offset(self.text, offset), message: message.into() })
    }

    fn list<'s>(&self, sx: &'s Sexpr, what: &str) -> Result<&'s [Sexpr], LoadError> {
        match sx.as_list() {
            Some(items) => Ok(items),
            None => self.fail(sx.offset(), format!("expected {what}")),
        }
    }

    fn symbol<'s>(&self, sx: &'s Sexpr, what: &str) -> Result<&'s str, LoadError> {
        match sx.as_symbol() {
            Some(s) => Ok(s),
            None => self.fail(sx.offset(), format!("expected {what}")),
        }
    }

    fn keyed_list<'s>(&self, sx: &'s Sexpr, key: &str) -> Result<&'s [Sexpr], LoadError> {
        let items = self.list(sx, &format!("({key} ...) form"))?;
        match items.first().and_then(Sexpr::as_symbol) {
            Some(head) if head == key => Ok(&items[1..]),
            _ => self.fail(sx.offset(), format!("expected ({key} ...) form")),
        }
    }

    fn theory(&self, sx: &Sexpr) -> Result<Theory, LoadError> {
        let items = self.keyed_list(sx, "theory")?;
        if items.len() != 4 {
            return self.fail(
                sx.offset(),
                "theory form needs an id, (mode ...), (vocabulary ...), (sentences ...)",
            );
        }
        let id = Symbol::new(self.symbol(&items[0], "theory id")?);
        let mode_items = self.keyed_list(&items[1], "mode")?;
        let mode = match mode_items {
            [m] => match self.symbol(m, "mode name")? {
                "abstract" => Mode::Abstract,
                "concrete" => Mode::Concrete,
                other => {
                    return self.fail(m.offset(), format!("unknown mode {other}; use abstract or concrete"))
                }
            },
            _ => return self.fail(items[1].offset(), "mode form takes exactly one name"),
        };
        let vocab_items = self.keyed_list(&items[2], "vocabulary")?;
        if vocab_items.is_empty() {
            return self.fail(items[2].offset(), "vocabulary must be non-empty");
        }
        let mut vocabulary: Vec<Symbol> = Vec::new();
        for v in vocab_items {
            let s = Symbol::new(self.symbol(v, "vocabulary symbol")?);
            if vocabulary.contains(&s) {
                return self.fail(v.offset(), format!("duplicate vocabulary symbol {s}"));
            }
            vocabulary.push(s);
        }
        let sentence_items = self.keyed_list(&items[3], "sentences")?;
        if sentence_items.is_empty() {
            return self.fail(items[3].offset(), "sentences must be non-empty");
        }
        let mut sentences: Vec<Sentence> = Vec::new();
        for entry in sentence_items {
            let s = self.sentence(entry, mode, &vocabulary)?;
            if sentences.iter().any(|prev| prev.id == s.id) {
                return self.fail(entry.offset(), format!("duplicate sentence id {}", s.id));
            }
            sentences.push(s);
        }
        Ok(Theory { id, mode, vocabulary, sentences })
    }

    fn sentence(&self, sx: &Sexpr, mode: Mode, vocabulary: &[Symbol]) -> Result<Sentence, LoadError> {
        let items = self.list(sx, "sentence entry")?;
        if items.len() < 2 {
            return self.fail(sx.offset(), "sentence entry needs an id and a body");
        }
        let id = Symbol::new(self.symbol(&items[0], "sentence id")?);
        match mode {
            Mode::Concrete => {
                if items.len() != 2 || items[1].as_list().is_none() {
                    return self.fail(
                        sx.offset(),
                        format!("concrete sentence {id} must have exactly one formula body"),
                    );
                }
                let form = formula::closed_from_sexpr(&items[1]).map_err(|e| LoadError {
                    line: sexpr::line_of_offset(self.text, e.offset),
                    message: e.message,
                })?;
                KnowledgeBase::new().assert_formula(&form).map_err(|e| LoadError {
                    line: sexpr::line_of_offset(self.text, items[1].offset()),
                    message: format!("sentence {id}: {e}"),
                })?;
                let mut tokens = Vec::new();
                formula_symbols(&form, &mut tokens);
                for t in &tokens {
                    if !vocabulary.contains(t) {
                        return self.fail(
                            items[1].offset(),
                            format!("sentence {id} uses {t}, which is not in the vocabulary"),
                        );
                    }
                }
                Ok(Sentence { id, tokens, concrete_form: Some(form) })
            }
            Mode::Abstract => {
                let mut tokens = Vec::new();
                for t in &items[1..] {
                    match t.as_symbol() {
                        Some(s) => tokens.push(Symbol::new(s)),
                        None => {
                            return self.fail(
                                t.offset(),
                                format!("abstract sentence {id} must be a flat token sequence"),
                            )
                        }
                    }
                }
                Ok(Sentence { id, tokens, concrete_form: None })
            }
        }
    }

    fn generalization(&self, sx: &Sexpr, t1: &Theory, t0: &Theory) -> Result<Generalization, LoadError> {
        let items = self.list(sx, "generalization entry")?;
        if items.len() < 2 {
            return self.fail(sx.offset(), "generalization entry needs an id and (in ...) clauses");
        }
        let id = Symbol::new(self.symbol(&items[0], "generalization id")?);
        let mut statements: Vec<(Symbol, GenStatement)> = Vec::new();
        for clause in &items[1..] {
            let parts = self.keyed_list(clause, "in")?;
            if parts.is_empty() {
                return self.fail(clause.offset(), "in clause needs a theory id");
            }
            let tid = Symbol::new(self.symbol(&parts[0], "theory id")?);
            let theory = if tid == t1.id {
                t1
            } else if tid == t0.id {
                t0
            } else {
                return self.fail(parts[0].offset(), format!("unknown theory {tid}"));
            };
            if statements.iter().any(|(t, _)| *t == tid) {
                return self.fail(clause.offset(), format!("{id} is stated twice in {tid}"));
            }
            let mut payload: Vec<&Sexpr> = Vec::new();
            let mut declared: Vec<BTreeSet<Symbol>> = Vec::new();
            for item in &parts[1..] {
                let is_declaration = item
                    .as_list()
                    .and_then(|l| l.first())
                    .and_then(Sexpr::as_symbol)
                    .is_some_and(|h| h == "explained-by");
                if is_declaration {
                    let sids = self.keyed_list(item, "explained-by")?;
                    let mut set = BTreeSet::new();
                    for sid in sids {
                        let s = Symbol::new(self.symbol(sid, "sentence id")?);
                        if theory.sentence(&s).is_none() {
                            return self.fail(
                                sid.offset(),
                                format!("unknown sentence {s} in theory {tid}"),
                            );
                        }
                        set.insert(s);
                    }
                    declared.push(set);
                } else {
                    payload.push(item);
                }
            }
            let statement = match theory.mode {
                Mode::Concrete => {
                    let [form] = payload.as_slice() else {
                        return self.fail(
                            clause.offset(),
                            format!("{id} in concrete theory {tid} must state exactly one goal atom"),
                        );
                    };
                    let goal = formula::goal_from_sexpr(form).map_err(|e| LoadError {
                        line: sexpr::line_of_offset(self.text, e.offset),
                        message: e.message,
                    })?;
                    let mut tokens = Vec::new();
                    atom_symbols(&goal, &mut tokens);
                    for t in &tokens {
                        if !theory.vocabulary.contains(t) {
                            return self.fail(
                                form.offset(),
                                format!("{id} uses {t}, which is not in the vocabulary of {tid}"),
                            );
                        }
                    }
                    GenStatement { tokens, concrete_form: Some(goal), declared_explanations: declared }
                }
                Mode::Abstract => {
                    let mut tokens = Vec::new();
                    for t in payload {
                        match t.as_symbol() {
                            Some(s) => tokens.push(Symbol::new(s)),
                            None => {
                                return self.fail(
                                    t.offset(),
                                    format!("{id} in abstract theory {tid} must be a flat token sequence"),
                                )
                            }
                        }
                    }
                    GenStatement { tokens, concrete_form: None, declared_explanations: declared }
                }
            };
            statements.push((tid, statement));
        }
        Ok(Generalization { id, statements })
    }

    fn reduction(&self, sx: &Sexpr, t1: &Theory, t0: &Theory) -> Result<Reduction, LoadError> {
        let items = self.keyed_list(sx, "reduction")?;
        let mut vocab_map: Option<Vec<(Symbol, Vec<Symbol>)>> = None;
        let mut laws: Vec<BridgeLaw> = Vec::new();
        for item in items {
            let head = self
                .list(item, "vocab-map or bridge form")?
                .first()
                .and_then(Sexpr::as_symbol)
                .unwrap_or("");
            match head {
                "vocab-map" => {
                    if vocab_map.is_some() {
                        return self.fail(item.offset(), "duplicate vocab-map form");
                    }
                    vocab_map = Some(self.vocab_map(item, t1, t0)?);
                }
                "bridge" => {
                    let law = self.bridge(item, t1, t0)?;
                    if laws.iter().any(|l| l.id == law.id) {
                        return self.fail(item.offset(), format!("duplicate bridge law id {}", law.id));
                    }
                    laws.push(law);
                }
                _ => return self.fail(item.offset(), "expected a vocab-map or bridge form"),
            }
        }
        Ok(Reduction { laws, vocab_map })
    }

    fn vocab_map(&self, sx: &Sexpr, t1: &Theory, t0: &Theory) -> Result<Vec<(Symbol, Vec<Symbol>)>, LoadError> {
        let entries = self.keyed_list(sx, "vocab-map")?;
        let mut map: Vec<(Symbol, Vec<Symbol>)> = Vec::new();
        for entry in entries {
            let parts = self.list(entry, "vocab-map entry")?;
            if parts.len() < 2 {
                return self.fail(entry.offset(), "vocab-map entry needs a source and targets");
            }
            let from = Symbol::new(self.symbol(&parts[0], "vocabulary symbol")?);
            if !t1.vocabulary.contains(&from) {
                return self.fail(
                    parts[0].offset(),
                    format!("{from} is not in the vocabulary of {}", t1.id),
                );
            }
            if map.iter().any(|(f, _)| *f == from) {
                return self.fail(parts[0].offset(), format!("duplicate vocab-map entry for {from}"));
            }
            let mut to = Vec::new();
            for t in &parts[1..] {
                let s = Symbol::new(self.symbol(t, "vocabulary symbol")?);
                if !t0.vocabulary.contains(&s) {
                    return self.fail(
                        t.offset(),
                        format!("{s} is not in the vocabulary of {}", t0.id),
                    );
                }
                to.push(s);
            }
            map.push((from, to));
        }
        Ok(map)
    }

    fn bridge(&self, sx: &Sexpr, t1: &Theory, t0: &Theory) -> Result<BridgeLaw, LoadError> {
        let items = self.keyed_list(sx, "bridge")?;
        if items.len() != 3 {
            return self.fail(sx.offset(), "bridge form needs an id, (args ...), (to ...)");
        }
        let id = Symbol::new(self.symbol(&items[0], "bridge law id")?);
        let args_items = self.keyed_list(&items[1], "args")?;
        if args_items.is_empty() {
            return self.fail(items[1].offset(), format!("bridge law {id} needs at least one argument"));
        }
        let mut args = Vec::new();
        for a in args_items {
            let s = Symbol::new(self.symbol(a, "sentence id")?);
            if t1.sentence(&s).is_none() {
                return self.fail(a.offset(), format!("unknown sentence {s} in theory {}", t1.id));
            }
            args.push(s);
        }
        let to_items = self.keyed_list(&items[2], "to")?;
        let [out] = to_items else {
            return self.fail(items[2].offset(), format!("bridge law {id} needs exactly one output"));
        };
        let output = Symbol::new(self.symbol(out, "sentence id")?);
        if t0.sentence(&output).is_none() {
            return self.fail(out.offset(), format!("unknown sentence {output} in theory {}", t0.id));
        }
        Ok(BridgeLaw { id, args, output })
    }
}

/// Load and validate a reduction-spec file. All id references are resolved;
/// every error names the line it came from.
pub fn load_reduction_spec(text: &str) -> Result<ReductionSpec, LoadError> {
    let loader = Loader { text };
    let forms = sexpr::read_all(text).map_err(|e| LoadError {
        line: sexpr::line_of_offset(text, e.offset),
        message: e.message,
    })?;
    if forms.len() < 3 || forms.len() > 4 {
        let offset = forms.first().map(Sexpr::offset).unwrap_or(0);
        return loader.fail(
            offset,
            "expected two theory forms, an optional generalizations form, and a reduction form",
        );
    }
    let t1 = loader.theory(&forms[0])?;
    let t0 = loader.theory(&forms[1])?;
    if t1.id == t0.id {
        return loader.fail(forms[1].offset(), format!("duplicate theory id {}", t0.id));
    }
    let mut generalizations: Vec<Generalization> = Vec::new();
    let reduction_form = if forms.len() == 4 {
        for entry in loader.keyed_list(&forms[2], "generalizations")? {
            let g = loader.generalization(entry, &t1, &t0)?;
            if generalizations.iter().any(|prev| prev.id == g.id) {
                return loader.fail(entry.offset(), format!("duplicate generalization id {}", g.id));
            }
            generalizations.push(g);
        }
        &forms[3]
    } else {
        &forms[2]
    };
    let reduction = loader.reduction(reduction_form, &t1, &t0)?;
    Ok(ReductionSpec { t1, t0, generalizations, reduction })
}
