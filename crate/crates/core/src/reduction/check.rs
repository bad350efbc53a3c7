//! The reduction checks: structural requirements on the bridge laws,
//! explanation search, nomological necessity, fusion detection, and the
//! final classification.

use std::collections::BTreeSet;

use crate::formula::{Atom, Symbol};
use crate::infer::{backward_chain, ChainConfig};
use crate::kb::KnowledgeBase;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{
    BijectivityFailure, Classification, DeterminismConflict, ExplanationResult, ExplanationStatus,
    Fusion, FusionReason, Generalization, InjectivityCollision, Mode, Reduction, ReductionError,
    ReductionReport, StructuralReport, Theory, MAX_EXPLANATION_CAP,
};

/// Check the bridge laws as a relation between the two sentence sets:
/// totality and per-law determinism (together `is_map`), injectivity
/// (informational), and surjectivity (`onto`, which a sound reduction must
/// avoid: part of the reducing theory has to stay uncovered).
pub fn structural_report(r: &Reduction, t1: &Theory, t0: &Theory) -> StructuralReport {
    let uncovered_t1: Vec<Symbol> = t1
        .sentences
        .iter()
        .map(|s| s.id.clone())
        .filter(|id| !r.laws.iter().any(|l| l.args.contains(id)))
        .collect();
    let mut determinism_conflicts = Vec::new();
    let mut collisions = Vec::new();
    for (i, a) in r.laws.iter().enumerate() {
        for b in &r.laws[i + 1..] {
            if a.id == b.id && a.args == b.args && a.output != b.output {
                determinism_conflicts.push(DeterminismConflict {
                    law_id: a.id.clone(),
                    first_output: a.output.clone(),
                    second_output: b.output.clone(),
                });
            }
            if a.args != b.args && a.output == b.output {
                collisions.push(InjectivityCollision {
                    first_law: a.id.clone(),
                    second_law: b.id.clone(),
                    output: a.output.clone(),
                });
            }
        }
    }
    let uncovered_t0: Vec<Symbol> = t0
        .sentences
        .iter()
        .map(|s| s.id.clone())
        .filter(|id| !r.laws.iter().any(|l| &l.output == id))
        .collect();
    StructuralReport {
        is_map: uncovered_t1.is_empty() && determinism_conflicts.is_empty(),
        uncovered_t1,
        injective: collisions.is_empty(),
        determinism_conflicts,
        collisions,
        onto: uncovered_t0.is_empty(),
        uncovered_t0,
    }
}

fn data_base_of(t: &Theory, ids: &BTreeSet<Symbol>) -> Result<KnowledgeBase, ReductionError> {
    let mut kb = KnowledgeBase::new();
    for id in ids {
        let sentence = t
            .sentence(id)
            .ok_or_else(|| ReductionError::UnassertableSentence {
                sentence: id.clone(),
                message: format!("not a sentence of theory {}", t.id),
            })?;
        let form = sentence
            .concrete_form
            .as_ref()
            .ok_or_else(|| ReductionError::MissingConcreteForm { id: id.clone() })?;
        kb = kb.assert_formula(form).map_err(|e| ReductionError::UnassertableSentence {
            sentence: id.clone(),
            message: e.to_string(),
        })?;
    }
    Ok(kb)
}

fn derives(t: &Theory, ids: &BTreeSet<Symbol>, goal: &Atom) -> Result<bool, ReductionError> {
    let kb = data_base_of(t, ids)?;
    Ok(backward_chain(&kb, goal, &ChainConfig::default()).proven)
}

fn candidate_subsets(ids: &[Symbol], cap: usize) -> Vec<BTreeSet<Symbol>> {
    let n = ids.len();
    (0u32..(1u32 << n))
        .filter(|mask| (mask.count_ones() as usize) <= cap)
        .map(|mask| {
            (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| ids[i].clone())
                .collect::<BTreeSet<_>>()
        })
        .collect()
}

fn minimal_subsets(mut proving: Vec<BTreeSet<Symbol>>) -> Vec<BTreeSet<Symbol>> {
    proving.sort();
    let minimal: Vec<BTreeSet<Symbol>> = proving
        .iter()
        .filter(|s| !proving.iter().any(|other| other.len() < s.len() && other.is_subset(s)))
        .cloned()
        .collect();
    minimal
}

fn result_from_subsets(mut subsets: Vec<BTreeSet<Symbol>>) -> ExplanationResult {
    subsets.sort();
    subsets.dedup();
    let status = match subsets.len() {
        0 => ExplanationStatus::None,
        1 => ExplanationStatus::Unique,
        _ => ExplanationStatus::Ambiguous,
    };
    ExplanationResult { status, subsets }
}

fn checked_cap(cap: usize) -> Result<usize, ReductionError> {
    if (1..=MAX_EXPLANATION_CAP).contains(&cap) {
        Ok(cap)
    } else {
        Err(ReductionError::CapOutOfRange { cap })
    }
}

fn explanation_goal<'g>(
    g: &'g Generalization,
    t: &Theory,
) -> Result<Option<&'g Atom>, ReductionError> {
    let stmt = g
        .statement_in(&t.id)
        .ok_or_else(|| ReductionError::NotStated {
            generalization: g.id.clone(),
            theory: t.id.clone(),
        })?;
    match t.mode {
        Mode::Abstract => Ok(None),
        Mode::Concrete => stmt
            .concrete_form
            .as_ref()
            .map(Some)
            .ok_or_else(|| ReductionError::MissingConcreteForm { id: g.id.clone() }),
    }
}

/// Find the explanations of a generalization in a theory: the minimal
/// sentence subsets (of size at most `cap`) whose assertion lets the
/// inference engine derive the generalization. Abstract theories answer
/// from their declared explanation tables instead. Subsets come back in
/// lexicographic order.
pub fn explain(
    g: &Generalization,
    t: &Theory,
    cap: usize,
) -> Result<ExplanationResult, ReductionError> {
    let cap = checked_cap(cap)?;
    match explanation_goal(g, t)? {
        None => {
            let stmt = g.statement_in(&t.id).expect("statement checked above");
            Ok(result_from_subsets(stmt.declared_explanations.clone()))
        }
        Some(goal) => {
            let candidates = candidate_subsets(&t.sentence_ids(), cap);
            let proving = filter_proving(t, goal, candidates)?;
            Ok(result_from_subsets(minimal_subsets(proving)))
        }
    }
}

/// `explain` with the subset search forced onto one thread. The dispatching
/// version equals this one result-for-result.
pub fn explain_sequential(
    g: &Generalization,
    t: &Theory,
    cap: usize,
) -> Result<ExplanationResult, ReductionError> {
    let cap = checked_cap(cap)?;
    match explanation_goal(g, t)? {
        None => {
            let stmt = g.statement_in(&t.id).expect("statement checked above");
            Ok(result_from_subsets(stmt.declared_explanations.clone()))
        }
        Some(goal) => {
            let proving = filter_proving_sequential(t, goal, candidate_subsets(&t.sentence_ids(), cap))?;
            Ok(result_from_subsets(minimal_subsets(proving)))
        }
    }
}

fn filter_proving_sequential(
    t: &Theory,
    goal: &Atom,
    candidates: Vec<BTreeSet<Symbol>>,
) -> Result<Vec<BTreeSet<Symbol>>, ReductionError> {
    let mut proving = Vec::new();
    for subset in candidates {
        if derives(t, &subset, goal)? {
            proving.push(subset);
        }
    }
    Ok(proving)
}

#[cfg(feature = "parallel")]
fn filter_proving(
    t: &Theory,
    goal: &Atom,
    candidates: Vec<BTreeSet<Symbol>>,
) -> Result<Vec<BTreeSet<Symbol>>, ReductionError> {
    candidates
        .into_par_iter()
        .filter_map(|subset| match derives(t, &subset, goal) {
            Ok(true) => Some(Ok(subset)),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn filter_proving(
    t: &Theory,
    goal: &Atom,
    candidates: Vec<BTreeSet<Symbol>>,
) -> Result<Vec<BTreeSet<Symbol>>, ReductionError> {
    filter_proving_sequential(t, goal, candidates)
}

/// A generalization is nomologically necessary in a theory exactly when it
/// has a unique minimal explanation there.
pub fn nomologically_necessary(
    g: &Generalization,
    t: &Theory,
    cap: usize,
) -> Result<bool, ReductionError> {
    Ok(explain(g, t, cap)?.status == ExplanationStatus::Unique)
}

/// Whether every generalization stated in the theory is nomologically
/// necessary there; the second component lists the ones that are not.
pub fn explanatory_power(
    t: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<(bool, Vec<Symbol>), ReductionError> {
    let mut failing = Vec::new();
    for g in gs {
        if g.statement_in(&t.id).is_none() {
            continue;
        }
        if !nomologically_necessary(g, t, cap)? {
            failing.push(g.id.clone());
        }
    }
    Ok((failing.is_empty(), failing))
}

/// Whether the explanation map is a bijection over the stated
/// generalizations: each must have a unique explanation, and no two may
/// share one.
pub fn check_e_bijective(
    t: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<(bool, Vec<BijectivityFailure>), ReductionError> {
    let mut failures = Vec::new();
    let mut unique: Vec<(Symbol, BTreeSet<Symbol>)> = Vec::new();
    for g in gs {
        if g.statement_in(&t.id).is_none() {
            continue;
        }
        let res = explain(g, t, cap)?;
        if res.status == ExplanationStatus::Unique {
            unique.push((g.id.clone(), res.subsets[0].clone()));
        } else {
            failures.push(BijectivityFailure::NotUnique {
                generalization: g.id.clone(),
                status: res.status,
            });
        }
    }
    for (i, (ga, sa)) in unique.iter().enumerate() {
        for (gb, sb) in &unique[i + 1..] {
            if sa == sb {
                failures.push(BijectivityFailure::SharedExplanation {
                    first: ga.clone(),
                    second: gb.clone(),
                    subset: sa.clone(),
                });
            }
        }
    }
    Ok((failures.is_empty(), failures))
}

/// Image of a sentence set under the bridge laws: the outputs of every law
/// whose whole argument tuple lies inside the set.
pub fn translate_explanation(r: &Reduction, x: &BTreeSet<Symbol>) -> BTreeSet<Symbol> {
    r.laws
        .iter()
        .filter(|law| law.args.iter().all(|a| x.contains(a)))
        .map(|law| law.output.clone())
        .collect()
}

fn necessary_with_explanations(
    t1: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<Vec<(Symbol, BTreeSet<Symbol>)>, ReductionError> {
    let mut out = Vec::new();
    for g in gs {
        if g.statement_in(&t1.id).is_none() {
            continue;
        }
        let res = explain(g, t1, cap)?;
        if res.status == ExplanationStatus::Unique {
            out.push((g.id.clone(), res.subsets[0].clone()));
        }
    }
    Ok(out)
}

/// Does the translated explanation still explain the generalization on the
/// reducing side? Concrete theories re-derive the statement; abstract ones
/// consult the declared table. A generalization with no statement in the
/// reducing theory cannot be explained there.
fn image_explains(
    t0: &Theory,
    g: &Generalization,
    image: &BTreeSet<Symbol>,
) -> Result<bool, ReductionError> {
    let Some(stmt) = g.statement_in(&t0.id) else {
        return Ok(false);
    };
    match t0.mode {
        Mode::Concrete => {
            let goal = stmt
                .concrete_form
                .as_ref()
                .ok_or_else(|| ReductionError::MissingConcreteForm { id: g.id.clone() })?;
            derives(t0, image, goal)
        }
        Mode::Abstract => Ok(stmt.declared_explanations.contains(image)),
    }
}

/// Report each nomologically necessary generalization whose content the
/// reduction degrades: either its translated explanation collapses onto a
/// distinct generalization's image, or (against a concrete reducing theory)
/// the image no longer derives it. Sorted by generalization, then reason.
pub fn detect_fusion(
    r: &Reduction,
    t1: &Theory,
    t0: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<Vec<Fusion>, ReductionError> {
    let necessary = necessary_with_explanations(t1, gs, cap)?;
    let images: Vec<(Symbol, BTreeSet<Symbol>)> = necessary
        .iter()
        .map(|(id, x)| (id.clone(), translate_explanation(r, x)))
        .collect();
    let mut fused = Vec::new();
    for (id, image) in &images {
        if images.iter().any(|(other, img)| other != id && img == image) {
            fused.push(Fusion { generalization: id.clone(), reason: FusionReason::CollapsedImage });
        }
        if t0.mode == Mode::Concrete {
            let g = gs.iter().find(|g| &g.id == id).expect("id came from gs");
            if !image_explains(t0, g, image)? {
                fused.push(Fusion { generalization: id.clone(), reason: FusionReason::ContentLost });
            }
        }
    }
    fused.sort_by(|a, b| (&a.generalization, a.reason).cmp(&(&b.generalization, b.reason)));
    Ok(fused)
}

/// Whether the reduction preserves nomological necessity: every necessary
/// generalization's translated explanation must still explain it in the
/// reducing theory, and distinct generalizations must keep distinct images.
pub fn preserves_nn(
    r: &Reduction,
    t1: &Theory,
    t0: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<bool, ReductionError> {
    let necessary = necessary_with_explanations(t1, gs, cap)?;
    let mut images: Vec<&BTreeSet<Symbol>> = Vec::new();
    let mut translated: Vec<(Symbol, BTreeSet<Symbol>)> = Vec::new();
    for (id, x) in &necessary {
        translated.push((id.clone(), translate_explanation(r, x)));
    }
    for (id, image) in &translated {
        let g = gs.iter().find(|g| &g.id == id).expect("id came from gs");
        if !image_explains(t0, g, image)? {
            return Ok(false);
        }
        if images.contains(&image) {
            return Ok(false);
        }
        images.push(image);
    }
    Ok(true)
}

/// Run every check and classify the reduction: `strong` when a standard
/// reduction also preserves nomological necessity; `standard` when a
/// structurally sound reduction carries a vocabulary map covering all of
/// the reduced theory's vocabulary; `invalid` otherwise.
pub fn classify(
    r: &Reduction,
    t1: &Theory,
    t0: &Theory,
    gs: &[Generalization],
    cap: usize,
) -> Result<ReductionReport, ReductionError> {
    let structure = structural_report(r, t1, t0);
    let mut explanations = Vec::new();
    for g in gs {
        if g.statement_in(&t1.id).is_some() {
            explanations.push((g.id.clone(), explain(g, t1, cap)?));
        }
    }
    let (e_bijective_in_t1, bijectivity_failures) = check_e_bijective(t1, gs, cap)?;
    let translations: Vec<(Symbol, BTreeSet<Symbol>)> = necessary_with_explanations(t1, gs, cap)?
        .iter()
        .map(|(id, x)| (id.clone(), translate_explanation(r, x)))
        .collect();
    let fused = detect_fusion(r, t1, t0, gs, cap)?;
    let preserves = preserves_nn(r, t1, t0, gs, cap)?;
    let vocab_map_total = r
        .vocab_map
        .as_ref()
        .is_some_and(|m| t1.vocabulary.iter().all(|v| m.iter().any(|(from, _)| from == v)));
    let classification = if !structure.is_map || structure.onto || !e_bijective_in_t1 {
        Classification::Invalid
    } else if !vocab_map_total {
        Classification::Invalid
    } else if preserves {
        Classification::Strong
    } else {
        Classification::Standard
    };
    Ok(ReductionReport {
        structure,
        explanations,
        e_bijective_in_t1,
        bijectivity_failures,
        translations,
        fused,
        preserves_nn: preserves,
        vocab_map_total,
        classification,
    })
}
