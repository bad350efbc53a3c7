//! Plain-text rendering of a reduction report: one finding per line,
//! deterministic down to the byte, ending with the classification.

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::formula::Symbol;

use super::{BijectivityFailure, ReductionReport, Theory};

fn set(s: &BTreeSet<Symbol>) -> String {
    let mut out = String::from("{");
    for (i, id) in s.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(id.as_str());
    }
    out.push('}');
    out
}

fn joined(items: &[Symbol]) -> String {
    items.iter().map(Symbol::as_str).collect::<Vec<_>>().join(" ")
}

/// Render the full report. The first line flags the reading under which
/// necessity is checked; the last line carries the classification.
pub fn render_report(report: &ReductionReport, t1: &Theory, t0: &Theory) -> String {
    let mut out = String::new();
    let s = &report.structure;
    out.push_str(
        "note: necessity is read as iff: nomologically necessary = has exactly one minimal explanation\n",
    );
    if s.uncovered_t1.is_empty() {
        let _ = writeln!(out, "map: total on {}: yes", t1.id);
    } else {
        let _ = writeln!(out, "map: total on {}: no (unused: {})", t1.id, joined(&s.uncovered_t1));
    }
    if s.determinism_conflicts.is_empty() {
        out.push_str("map: deterministic: yes\n");
    } else {
        let details: Vec<String> = s
            .determinism_conflicts
            .iter()
            .map(|c| format!("{} -> {} vs {}", c.law_id, c.first_output, c.second_output))
            .collect();
        let _ = writeln!(out, "map: deterministic: no ({})", details.join("; "));
    }
    if s.collisions.is_empty() {
        out.push_str("injective: yes\n");
    } else {
        let details: Vec<String> = s
            .collisions
            .iter()
            .map(|c| format!("{} {} -> {}", c.first_law, c.second_law, c.output))
            .collect();
        let _ = writeln!(out, "injective: no ({})", details.join("; "));
    }
    if s.onto {
        let _ = writeln!(
            out,
            "onto: yes (requirement violated: every {} sentence is an image)",
            t0.id
        );
    } else {
        let _ = writeln!(out, "onto: no (uncovered in {}: {})", t0.id, joined(&s.uncovered_t0));
    }
    for (gid, res) in &report.explanations {
        let subsets: Vec<String> = res.subsets.iter().map(set).collect();
        if subsets.is_empty() {
            let _ = writeln!(out, "explain {gid} in {}: {}", t1.id, res.status);
        } else {
            let _ = writeln!(out, "explain {gid} in {}: {} {}", t1.id, res.status, subsets.join(" "));
        }
    }
    if report.e_bijective_in_t1 {
        let _ = writeln!(out, "e-bijective in {}: yes", t1.id);
    } else {
        let details: Vec<String> = report
            .bijectivity_failures
            .iter()
            .map(|f| match f {
                BijectivityFailure::NotUnique { generalization, status } => {
                    format!("{generalization}: {status}")
                }
                BijectivityFailure::SharedExplanation { first, second, subset } => {
                    format!("{first} {second} share {}", set(subset))
                }
            })
            .collect();
        let _ = writeln!(out, "e-bijective in {}: no ({})", t1.id, details.join("; "));
    }
    for (gid, image) in &report.translations {
        let _ = writeln!(out, "translate {gid}: {}", set(image));
    }
    if report.fused.is_empty() {
        out.push_str("fused: none\n");
    } else {
        for f in &report.fused {
            let _ = writeln!(out, "fused: {} ({})", f.generalization, f.reason);
        }
    }
    let _ = writeln!(out, "preserves-nn: {}", if report.preserves_nn { "yes" } else { "no" });
    let _ = writeln!(
        out,
        "vocab-map: total on {}: {}",
        t1.id,
        if report.vocab_map_total { "yes" } else { "no" }
    );
    let _ = writeln!(out, "classification: {}", report.classification);
    out
}
