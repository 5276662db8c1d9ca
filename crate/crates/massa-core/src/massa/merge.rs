//! The merging-point check: every goal formula of the saturated sequent must
//! be rebuilt by exactly the sections, jointly and without leftovers.

use std::collections::BTreeSet;

use crate::calculus::{Label, Sequent, Side};
use crate::formula::Formula;

/// Occurrences compared during merging: label, formula text, side. Falsum on
/// the left and verum on the right are constant substitutions, not goals, so
/// they are ignored.
type Entry = (Label, String, Side);

fn entries(s: &Sequent) -> BTreeSet<Entry> {
    let mut out = BTreeSet::new();
    for (side, items) in [(Side::Left, &s.left), (Side::Right, &s.right)] {
        for f in items {
            if matches!(
                (&f.formula, side),
                (Formula::Bot, Side::Left) | (Formula::Top, Side::Right)
            ) {
                continue;
            }
            out.insert((f.label.clone(), f.formula.to_string(), side));
        }
    }
    out
}

/// Check that `top` is the merging point of `sections`: the union of the
/// sections' occurrences (ignoring constant substitutions) is exactly the
/// occurrence set of `top`, and every section stays inside it.
pub(crate) fn find_merging_point(top: &Sequent, sections: &[Sequent]) -> Result<(), String> {
    let want = entries(top);
    let mut got = BTreeSet::new();
    for sec in sections {
        got.extend(entries(sec));
    }
    if got == want {
        return Ok(());
    }
    let fmt = |e: &Entry| {
        format!(
            "{}:{} on the {}",
            e.0,
            e.1,
            match e.2 {
                Side::Left => "left",
                Side::Right => "right",
            }
        )
    };
    let missing: Vec<String> = want.difference(&got).map(fmt).collect();
    let extra: Vec<String> = got.difference(&want).map(fmt).collect();
    let mut parts = Vec::new();
    if !missing.is_empty() {
        parts.push(format!("no section rebuilds {}", missing.join(", ")));
    }
    if !extra.is_empty() {
        parts.push(format!(
            "sections carry leftover occurrences {}",
            extra.join(", ")
        ));
    }
    Err(parts.join("; "))
}
